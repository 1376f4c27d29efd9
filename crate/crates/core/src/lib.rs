//! Online convex optimisation with the optimal switching regret on every
//! segmentation of the trial sequence simultaneously.
//!
//! The library is organised around a meta-algorithm that stacks
//! horizon-doubling instances of a base online learner (online gradient
//! descent or Hedge) and blends their actions with exponentially updated
//! mixing weights. Supporting modules provide the convex domain types, the
//! dyadic segment-tree combinatorics behind the regret analysis, and regret
//! accounting against hindsight comparators.
//!
//! - [`domain`]: actions, feasible sets with exact Euclidean projection,
//!   and the loss families used by the experiments.
//! - [`base`]: the horizon-parameterised base-learner contract plus OGD and
//!   Hedge implementations.
//! - [`reset`]: the RESET meta-algorithm itself.
//! - [`segtree`]: dyadic block decompositions and the constants of the
//!   switching-regret envelope.
//! - [`regret`]: traces, segmentations, comparator sequences, and the
//!   static/switching/dynamic regret computations.

pub mod base;
pub mod domain;
pub mod error;
pub mod regret;
pub mod reset;
pub mod segtree;

pub use error::{Error, Result};

//! Actions, feasible sets, and loss functions.
//!
//! An [`Action`] is a finite dense vector. An [`ActionSet`] is a bounded
//! convex feasible set with an exact Euclidean projection: the probability
//! simplex or an L2 ball. A [`LossFunction`] is a convex function with values
//! in `[0, 1]` on its intended set and an exactly evaluable subgradient; two
//! families are provided, linear losses (the experts problem) and quadratics
//! clamped at 1.
//!
//! All values are immutable once constructed and safe to share across
//! threads.

use crate::error::{Error, Result};

/// Tolerance used by membership checks.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// A point in Euclidean space, validated to be finite on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    coords: Vec<f64>,
}

impl Action {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::contract("action must have dimension >= 1"));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("action coordinates must be finite"));
        }
        Ok(Action { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        Action {
            coords: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Inner product with a raw weight vector of the same dimension.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        debug_assert_eq!(self.coords.len(), weights.len());
        self.coords.iter().zip(weights).map(|(x, w)| x * w).sum()
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: &Action) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Convex combination `wa * a + wb * b` (callers keep `wa + wb = 1`).
    pub(crate) fn blend(a: &Action, wa: f64, b: &Action, wb: f64) -> Action {
        debug_assert_eq!(a.dim(), b.dim());
        Action {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| wa * x + wb * y)
                .collect(),
        }
    }
}

/// A bounded convex feasible set with exact Euclidean projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionSet {
    /// Probability simplex in `dim` coordinates.
    Simplex { dim: usize },
    /// L2 ball around `center` with the given radius.
    Ball { center: Action, radius: f64 },
}

impl ActionSet {
    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("simplex dimension must be >= 1"));
        }
        Ok(ActionSet::Simplex { dim })
    }

    pub fn ball(center: Action, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::contract("ball radius must be positive"));
        }
        Ok(ActionSet::Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            ActionSet::Simplex { dim } => *dim,
            ActionSet::Ball { center, .. } => center.dim(),
        }
    }

    /// Euclidean diameter of the set.
    pub fn diameter(&self) -> f64 {
        match self {
            ActionSet::Simplex { dim } => {
                if *dim >= 2 {
                    std::f64::consts::SQRT_2
                } else {
                    0.0
                }
            }
            ActionSet::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// Canonical starting point: uniform vector or ball center.
    pub fn center(&self) -> Action {
        match self {
            ActionSet::Simplex { dim } => Action {
                coords: vec![1.0 / *dim as f64; *dim],
            },
            ActionSet::Ball { center, .. } => center.clone(),
        }
    }

    /// Membership test with a small tolerance.
    pub fn contains(&self, x: &Action) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            ActionSet::Simplex { .. } => {
                let sum: f64 = x.coords.iter().sum();
                x.coords.iter().all(|&v| (-MEMBERSHIP_TOL..=1.0 + MEMBERSHIP_TOL).contains(&v))
                    && (sum - 1.0).abs() <= MEMBERSHIP_TOL
            }
            ActionSet::Ball { center, radius } => x.distance(center) <= radius + MEMBERSHIP_TOL,
        }
    }

    /// Exact Euclidean projection of an arbitrary finite point into the set.
    pub fn project(&self, point: &[f64]) -> Result<Action> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("projection input must be finite"));
        }
        let coords = match self {
            ActionSet::Simplex { .. } => project_simplex(point),
            ActionSet::Ball { center, radius } => {
                let dist: f64 = point
                    .iter()
                    .zip(center.coords())
                    .map(|(p, c)| (p - c) * (p - c))
                    .sum::<f64>()
                    .sqrt();
                if dist <= *radius {
                    point.to_vec()
                } else {
                    let shrink = radius / dist;
                    point
                        .iter()
                        .zip(center.coords())
                        .map(|(p, c)| c + shrink * (p - c))
                        .collect()
                }
            }
        };
        Ok(Action { coords })
    }
}

/// Sort-then-threshold projection onto the probability simplex, O(N log N).
fn project_simplex(point: &[f64]) -> Vec<f64> {
    let mut sorted = point.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite inputs"));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            threshold = candidate;
        }
    }
    point.iter().map(|&v| (v - threshold).max(0.0)).collect()
}

/// A convex loss with values in `[0, 1]` on its intended action set.
#[derive(Debug, Clone, PartialEq)]
pub enum LossFunction {
    /// `x -> <weights, x>` with weights in `[0, 1]`; intended for the simplex,
    /// where the range constraint holds automatically.
    Linear { weights: Vec<f64> },
    /// `x -> min(1, scale * |x - target|^2)`.
    ClampedQuadratic { target: Action, scale: f64 },
}

impl LossFunction {
    /// Linear loss. Weights outside `[0, 1]` are rejected rather than
    /// clamped: the regret accounting assumes the range.
    pub fn linear(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::contract("linear loss needs dimension >= 1"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0 || *w > 1.0) {
            return Err(Error::contract("linear loss weights must lie in [0, 1]"));
        }
        Ok(LossFunction::Linear { weights })
    }

    /// Identically-zero loss, used to pad horizons without affecting regrets.
    pub fn zero(dim: usize) -> Self {
        LossFunction::Linear {
            weights: vec![0.0; dim],
        }
    }

    pub fn clamped_quadratic(target: Action, scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::contract("quadratic scale must be positive"));
        }
        Ok(LossFunction::ClampedQuadratic { target, scale })
    }

    pub fn dim(&self) -> usize {
        match self {
            LossFunction::Linear { weights } => weights.len(),
            LossFunction::ClampedQuadratic { target, .. } => target.dim(),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, LossFunction::Linear { .. })
    }

    pub fn linear_weights(&self) -> Option<&[f64]> {
        match self {
            LossFunction::Linear { weights } => Some(weights),
            _ => None,
        }
    }

    /// Exact loss value at `x`.
    pub fn eval(&self, x: &Action) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match self {
            LossFunction::Linear { weights } => x.dot(weights),
            LossFunction::ClampedQuadratic { target, scale } => {
                let d = x.distance(target);
                (scale * d * d).min(1.0)
            }
        })
    }

    /// A subgradient at `x`. For the clamped quadratic this is the quadratic's
    /// gradient where the clamp is inactive and the zero vector where active.
    pub fn subgradient(&self, x: &Action) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(match self {
            LossFunction::Linear { weights } => weights.clone(),
            LossFunction::ClampedQuadratic { target, scale } => {
                let d = x.distance(target);
                if scale * d * d >= 1.0 {
                    vec![0.0; x.dim()]
                } else {
                    x.coords()
                        .iter()
                        .zip(target.coords())
                        .map(|(xi, ai)| 2.0 * scale * (xi - ai))
                        .collect()
                }
            }
        })
    }

    fn check_dim(&self, x: &Action) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }
}

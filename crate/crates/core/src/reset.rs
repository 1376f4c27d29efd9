//! The RESET meta-algorithm.
//!
//! For a horizon `T = 2^tau`, RESET runs `tau + 1` levels. Level `i` hosts a
//! base learner initialised with horizon `2^i` and restarted every `2^i`
//! trials, plus (for `i >= 1`) a mixing weight in `(0, 1)` that restarts to
//! 1/2 on the same schedule. Each trial the per-level base actions are folded
//! bottom-up into blended actions
//!
//! ```text
//! z^0 = w^0,    z^i = mu^i * w^i + (1 - mu^i) * z^(i-1),    play x = z^tau
//! ```
//!
//! and at the end of the trial each live mixing weight absorbs the loss pair
//! `(loss(w^i), loss(z^(i-1)))` through [`mixing_update`], which is a
//! two-expert Hedge step with rate `sqrt(2 ln 2 / 2^i)` in closed form.
//!
//! Per-trial work and state are both linear in `tau + 1`: exactly one query
//! and one update-or-initialise per level, counted in [`Counters`].

use crate::base::{BaseLearner, BaseSpec};
use crate::domain::{Action, LossFunction};
use crate::error::{Error, Result};

/// Slack when checking that observed losses lie in [0, 1].
const LOSS_RANGE_TOL: f64 = 1e-9;

/// Two-expert exponential-weights update in closed form.
///
/// `weight` is the current probability of the first expert, `base_loss` and
/// `blend_loss` are the two experts' losses this trial, and `window` sets the
/// rate `sqrt(2 ln 2 / window)`. The value is computed with both exponentials
/// shifted by the smaller loss, which changes nothing mathematically but
/// cannot underflow. Equal losses return `weight` exactly.
pub fn mixing_update(weight: f64, base_loss: f64, blend_loss: f64, window: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::contract(format!(
            "mixing weight {weight} outside [0, 1]"
        )));
    }
    if window == 0 {
        return Err(Error::contract("mixing window must be >= 1"));
    }
    if !base_loss.is_finite() || !blend_loss.is_finite() {
        return Err(Error::contract("mixing losses must be finite"));
    }
    let rate = (2.0 * std::f64::consts::LN_2 / window as f64).sqrt();
    let floor = base_loss.min(blend_loss);
    let kept = weight * (-rate * (base_loss - floor)).exp();
    let other = (1.0 - weight) * (-rate * (blend_loss - floor)).exp();
    Ok(kept / (kept + other))
}

/// Coefficient of each level's base action in the played combination.
///
/// `mix[i - 1]` holds level `i`'s weight for `i in 1..=tau`. The result has
/// `tau + 1` entries summing to one: level `i >= 1` carries
/// `mix[i] * prod_{j>i} (1 - mix[j])` and level 0 the full product
/// `prod_{j>=1} (1 - mix[j])`.
pub fn blend_coefficients(mix: &[f64]) -> Vec<f64> {
    let tau = mix.len();
    let mut coeffs = vec![0.0; tau + 1];
    let mut suffix = 1.0;
    for i in (1..=tau).rev() {
        coeffs[i] = mix[i - 1] * suffix;
        suffix *= 1.0 - mix[i - 1];
    }
    coeffs[0] = suffix;
    coeffs
}

/// Per-level base-learner call counters, cumulative over the run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub queries: u64,
    pub updates: u64,
    pub initialises: u64,
}

/// Base actions and blended actions cached between a query and its update.
#[derive(Debug, Clone)]
struct TrialCache {
    base_actions: Vec<Action>,
    blended: Vec<Action>,
}

/// RESET state over a power-of-two horizon.
#[derive(Debug, Clone)]
pub struct Reset {
    spec: BaseSpec,
    horizon: usize,
    tau: u32,
    levels: Vec<BaseLearner>,
    /// Mixing weights for levels `1..=tau`; level 0 never mixes.
    mix: Vec<f64>,
    /// 1-based index of the next trial to play.
    trial: usize,
    cache: Option<TrialCache>,
    counters: Counters,
}

impl Reset {
    /// Build a fresh run of `horizon` trials. `horizon` must be a power of
    /// two; the harness owns padding arbitrary horizons up to one.
    pub fn new(spec: BaseSpec, horizon: usize) -> Result<Self> {
        if horizon == 0 || !horizon.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(horizon));
        }
        let tau = horizon.trailing_zeros();
        let mut counters = Counters::default();
        let levels = (0..=tau)
            .map(|i| {
                counters.initialises += 1;
                spec.initialise(1 << i)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Reset {
            spec,
            horizon,
            tau,
            levels,
            mix: vec![0.5; tau as usize],
            trial: 1,
            cache: None,
            counters,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    /// Number of live base-learner states, always `tau + 1`.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// 1-based index of the next trial to play.
    pub fn trial(&self) -> usize {
        self.trial
    }

    /// Mixing weight of level `i`, or `None` for level 0 (which has none)
    /// and out-of-range levels.
    pub fn mix_weight(&self, level: usize) -> Option<f64> {
        if level == 0 {
            None
        } else {
            self.mix.get(level - 1).copied()
        }
    }

    /// Updates absorbed by level `i`'s learner since its last restart.
    pub fn level_updates_consumed(&self, level: usize) -> Option<usize> {
        self.levels.get(level).map(|l| l.updates_consumed())
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Base actions cached by the pending query, if one is outstanding.
    pub fn cached_base_actions(&self) -> Option<&[Action]> {
        self.cache.as_ref().map(|c| c.base_actions.as_slice())
    }

    /// The action to play on the current trial. Queries every level once and
    /// folds the base actions into the blended stack; the result is a convex
    /// combination of feasible points and hence feasible.
    pub fn query(&mut self) -> Result<Action> {
        if self.trial > self.horizon {
            return Err(Error::HorizonExhausted {
                trial: self.trial,
                horizon: self.horizon,
            });
        }
        if self.cache.is_some() {
            return Err(Error::lifecycle("query called twice without an update"));
        }
        let mut base_actions = Vec::with_capacity(self.levels.len());
        for learner in &mut self.levels {
            base_actions.push(learner.query()?);
            self.counters.queries += 1;
        }
        let mut blended = Vec::with_capacity(self.levels.len());
        blended.push(base_actions[0].clone());
        for i in 1..base_actions.len() {
            let mu = self.mix[i - 1];
            let z = Action::blend(&base_actions[i], mu, &blended[i - 1], 1.0 - mu);
            blended.push(z);
        }
        let played = blended.last().expect("at least one level").clone();
        self.cache = Some(TrialCache {
            base_actions,
            blended,
        });
        Ok(played)
    }

    /// Finish the current trial with its revealed loss.
    ///
    /// Every level whose restart boundary falls at this trial resets its
    /// learner and mixing weight; every other level feeds the cached action
    /// pair through [`mixing_update`] and the loss to its learner.
    pub fn update(&mut self, loss: &LossFunction) -> Result<()> {
        let cache = self
            .cache
            .take()
            .ok_or_else(|| Error::lifecycle("update without a preceding query"))?;
        let t = self.trial;
        for i in 0..self.levels.len() {
            let span = 1usize << i;
            if t.is_multiple_of(span) {
                self.levels[i] = self.spec.initialise(span)?;
                self.counters.initialises += 1;
                if i >= 1 {
                    self.mix[i - 1] = 0.5;
                }
            } else {
                if i >= 1 {
                    let base_loss = checked_eval(loss, &cache.base_actions[i])?;
                    let blend_loss = checked_eval(loss, &cache.blended[i - 1])?;
                    self.mix[i - 1] = mixing_update(self.mix[i - 1], base_loss, blend_loss, span)?;
                }
                self.levels[i].update(loss)?;
                self.counters.updates += 1;
            }
        }
        self.trial += 1;
        Ok(())
    }

    /// Coefficients of the base actions in the pending played action; a
    /// diagnostic cross-check of the blended stack. They sum to one and
    /// reconstruct the played action from the cached base actions.
    pub fn mixing_coefficients(&self) -> Result<Vec<f64>> {
        if self.cache.is_none() {
            return Err(Error::lifecycle(
                "mixing coefficients need an outstanding query",
            ));
        }
        Ok(blend_coefficients(&self.mix))
    }
}

fn checked_eval(loss: &LossFunction, x: &Action) -> Result<f64> {
    let v = loss.eval(x)?;
    if !(-LOSS_RANGE_TOL..=1.0 + LOSS_RANGE_TOL).contains(&v) {
        return Err(Error::contract(format!(
            "observed loss {v} outside [0, 1]"
        )));
    }
    Ok(v.clamp(0.0, 1.0))
}

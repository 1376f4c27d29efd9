//! Base online learners parameterised by a known horizon.
//!
//! A base learner is handed its horizon up front, answers a read-only query
//! with its action for the current trial, and absorbs the revealed loss in an
//! update. Queries and updates alternate; at most `horizon` updates are legal
//! before the learner must be re-initialised. Both learners here meet the
//! static-regret contract `R([h]) <= gamma * sqrt(h)`:
//!
//! - online gradient descent with fixed step `D / (G * sqrt(h))`, giving
//!   `gamma = D * G` for diameter `D` and gradient bound `G`;
//! - Hedge over `n` experts with rate `sqrt(8 ln(n) / h)`, giving
//!   `gamma = sqrt(ln(n) / 2)`.

use crate::domain::{Action, ActionSet, LossFunction};
use crate::error::{Error, Result};

/// Which base algorithm to run, plus its fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseKind {
    /// Projected online gradient descent; `grad_bound` is the largest
    /// subgradient norm the loss family can produce on the set.
    Ogd { grad_bound: f64 },
    /// Exponential weights over the simplex with linear losses.
    Hedge,
}

/// A base-algorithm configuration bound to its action set. Acts as the
/// factory the meta-algorithm uses to re-initialise learners.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseSpec {
    pub kind: BaseKind,
    pub set: ActionSet,
}

impl BaseSpec {
    pub fn ogd(set: ActionSet, grad_bound: f64) -> Self {
        BaseSpec {
            kind: BaseKind::Ogd { grad_bound },
            set,
        }
    }

    pub fn hedge(experts: usize) -> Result<Self> {
        Ok(BaseSpec {
            kind: BaseKind::Hedge,
            set: ActionSet::simplex(experts)?,
        })
    }

    pub fn initialise(&self, horizon: usize) -> Result<BaseLearner> {
        initialise(&self.kind, &self.set, horizon)
    }

    /// The constant `gamma` in the learner's `gamma * sqrt(horizon)` regret
    /// guarantee.
    pub fn regret_constant(&self) -> f64 {
        match &self.kind {
            BaseKind::Ogd { grad_bound } => self.set.diameter() * grad_bound,
            BaseKind::Hedge => ((self.set.dim() as f64).ln() / 2.0).sqrt(),
        }
    }
}

/// Fresh learner state for a horizon of `horizon` trials.
pub fn initialise(kind: &BaseKind, set: &ActionSet, horizon: usize) -> Result<BaseLearner> {
    if horizon == 0 {
        return Err(Error::contract("base learner horizon must be >= 1"));
    }
    match kind {
        BaseKind::Ogd { grad_bound } => {
            if !grad_bound.is_finite() || *grad_bound <= 0.0 {
                return Err(Error::contract("gradient bound must be positive"));
            }
            let step = set.diameter() / (grad_bound * (horizon as f64).sqrt());
            Ok(BaseLearner::Ogd(Ogd {
                current: set.center(),
                step,
                set: set.clone(),
                lifecycle: Lifecycle::new(horizon),
            }))
        }
        BaseKind::Hedge => {
            let experts = match set {
                ActionSet::Simplex { dim } => *dim,
                ActionSet::Ball { .. } => {
                    return Err(Error::contract("Hedge requires a simplex action set"))
                }
            };
            let rate = (8.0 * (experts as f64).ln() / horizon as f64).sqrt();
            Ok(BaseLearner::Hedge(Hedge {
                cumulative: vec![0.0; experts],
                rate,
                lifecycle: Lifecycle::new(horizon),
            }))
        }
    }
}

/// Query/update bookkeeping shared by the concrete learners.
#[derive(Debug, Clone, PartialEq)]
struct Lifecycle {
    horizon: usize,
    consumed: usize,
    queried: bool,
}

impl Lifecycle {
    fn new(horizon: usize) -> Self {
        Lifecycle {
            horizon,
            consumed: 0,
            queried: false,
        }
    }

    fn on_query(&mut self) -> Result<()> {
        if self.consumed >= self.horizon {
            return Err(Error::lifecycle(format!(
                "query after all {} updates of the horizon were consumed",
                self.horizon
            )));
        }
        self.queried = true;
        Ok(())
    }

    fn on_update(&mut self) -> Result<()> {
        if !self.queried {
            return Err(Error::lifecycle("update without a preceding query"));
        }
        if self.consumed >= self.horizon {
            return Err(Error::lifecycle(format!(
                "more than {} updates on one initialisation",
                self.horizon
            )));
        }
        self.consumed += 1;
        self.queried = false;
        Ok(())
    }
}

/// Projected online gradient descent with a horizon-tuned fixed step size.
#[derive(Debug, Clone, PartialEq)]
pub struct Ogd {
    current: Action,
    step: f64,
    set: ActionSet,
    lifecycle: Lifecycle,
}

impl Ogd {
    fn query(&mut self) -> Result<Action> {
        self.lifecycle.on_query()?;
        Ok(self.current.clone())
    }

    fn update(&mut self, loss: &LossFunction) -> Result<()> {
        self.lifecycle.on_update()?;
        let grad = loss.subgradient(&self.current)?;
        let moved: Vec<f64> = self
            .current
            .coords()
            .iter()
            .zip(&grad)
            .map(|(x, g)| x - self.step * g)
            .collect();
        self.current = self.set.project(&moved)?;
        Ok(())
    }
}

/// Hedge over the simplex. Weights are recomputed from cumulative losses at
/// query time with a max-shift, which is exactly the multiplicative update
/// but immune to underflow over long horizons.
#[derive(Debug, Clone, PartialEq)]
pub struct Hedge {
    cumulative: Vec<f64>,
    rate: f64,
    lifecycle: Lifecycle,
}

impl Hedge {
    fn weights(&self) -> Vec<f64> {
        let least = self
            .cumulative
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let unnormalised: Vec<f64> = self
            .cumulative
            .iter()
            .map(|c| (-self.rate * (c - least)).exp())
            .collect();
        let total: f64 = unnormalised.iter().sum();
        unnormalised.into_iter().map(|w| w / total).collect()
    }

    fn query(&mut self) -> Result<Action> {
        self.lifecycle.on_query()?;
        Action::new(self.weights())
    }

    fn update(&mut self, loss: &LossFunction) -> Result<()> {
        let weights = loss
            .linear_weights()
            .ok_or_else(|| Error::contract("Hedge can only absorb linear losses"))?;
        if weights.len() != self.cumulative.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cumulative.len(),
                got: weights.len(),
            });
        }
        self.lifecycle.on_update()?;
        for (c, g) in self.cumulative.iter_mut().zip(weights) {
            *c += g;
        }
        Ok(())
    }
}

/// A live base-learner instance.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseLearner {
    Ogd(Ogd),
    Hedge(Hedge),
}

impl BaseLearner {
    /// The action for the current trial. Repeated queries without an update
    /// in between return the identical action.
    pub fn query(&mut self) -> Result<Action> {
        match self {
            BaseLearner::Ogd(s) => s.query(),
            BaseLearner::Hedge(s) => s.query(),
        }
    }

    /// Absorb the loss revealed at the end of the trial.
    pub fn update(&mut self, loss: &LossFunction) -> Result<()> {
        match self {
            BaseLearner::Ogd(s) => s.update(loss),
            BaseLearner::Hedge(s) => s.update(loss),
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            BaseLearner::Ogd(s) => s.lifecycle.horizon,
            BaseLearner::Hedge(s) => s.lifecycle.horizon,
        }
    }

    /// Number of updates absorbed since the last initialisation.
    pub fn updates_consumed(&self) -> usize {
        match self {
            BaseLearner::Ogd(s) => s.lifecycle.consumed,
            BaseLearner::Hedge(s) => s.lifecycle.consumed,
        }
    }
}

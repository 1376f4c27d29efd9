//! Synthetic non-stationary environments, generated deterministically from a
//! 64-bit seed through ChaCha8 so traces reproduce bit for bit on any
//! platform.
//!
//! Draw order is part of the format and must not change:
//!
//! - experts: one best-expert index per segment (in segment order), then one
//!   uniform per (trial, expert) pair, trials outer, experts inner;
//! - quadratic: `dim` standard normals for the starting direction, then
//!   `dim` standard normals per trial for the drift direction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use reset_core::domain::{Action, ActionSet, LossFunction};
use reset_core::regret::{ComparatorSequence, Segmentation};

use crate::HarnessError;

/// Piecewise-stationary experts problem: in each segment one designated
/// expert suffers Bernoulli(0.5 - gap) losses and everyone else
/// Bernoulli(0.5).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertsEnv {
    pub experts: usize,
    pub segmentation: Segmentation,
    pub gap: f64,
}

impl ExpertsEnv {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.experts == 0 {
            return Err(HarnessError::config("experts must be >= 1"));
        }
        if !self.gap.is_finite() || self.gap <= 0.0 || self.gap > 0.5 {
            return Err(HarnessError::config("gap must lie in (0, 0.5]"));
        }
        Ok(())
    }

    pub fn action_set(&self) -> ActionSet {
        ActionSet::simplex(self.experts).expect("validated")
    }

    /// Largest subgradient norm of the loss family on the set.
    pub fn grad_bound(&self) -> f64 {
        (self.experts as f64).sqrt()
    }

    pub fn generate(&self, seed: u64) -> Result<Vec<LossFunction>, HarnessError> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let best: Vec<usize> = (0..self.segmentation.count())
            .map(|_| rng.random_range(0..self.experts))
            .collect();
        let mut losses = Vec::with_capacity(self.segmentation.horizon());
        for (k, segment) in self.segmentation.segments().enumerate() {
            for _ in segment.trials() {
                let g: Vec<f64> = (0..self.experts)
                    .map(|j| {
                        let p = if j == best[k] { 0.5 - self.gap } else { 0.5 };
                        if rng.random::<f64>() < p {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                losses.push(LossFunction::linear(g)?);
            }
        }
        Ok(losses)
    }
}

/// Fraction of the radius at which the quadratic target starts, in a seeded
/// uniform direction. A fixed distance makes every seeded instance equally
/// hard and leaves slack for small drifts to walk without projection.
pub const START_RADIUS_FRACTION: f64 = 0.75;

/// Quadratic losses whose minimiser random-walks inside an L2 ball, with a
/// per-segment drift rate. The walk for the step after trial `t` uses the
/// drift of the segment containing `t`, so the comparator's path length in
/// segment `k` is at most `drift[k] * |segment k|` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticEnv {
    pub dim: usize,
    pub segmentation: Segmentation,
    pub drift: Vec<f64>,
    pub scale: f64,
    pub radius: f64,
}

impl QuadraticEnv {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.dim == 0 {
            return Err(HarnessError::config("dimension must be >= 1"));
        }
        if self.drift.len() != self.segmentation.count() {
            return Err(HarnessError::config(format!(
                "{} drift rates for {} segments",
                self.drift.len(),
                self.segmentation.count()
            )));
        }
        if self.drift.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(HarnessError::config("drift rates must be >= 0"));
        }
        if !self.radius.is_finite() || self.radius <= 0.0 {
            return Err(HarnessError::config("radius must be positive"));
        }
        if !self.scale.is_finite() || self.scale <= 0.0 {
            return Err(HarnessError::config("scale must be positive"));
        }
        let diameter = 2.0 * self.radius;
        if self.scale * diameter * diameter > 1.0 + 1e-12 {
            return Err(HarnessError::config(
                "scale * diameter^2 must be <= 1 so losses stay unclamped on the set",
            ));
        }
        Ok(())
    }

    pub fn action_set(&self) -> ActionSet {
        ActionSet::ball(Action::zeros(self.dim), self.radius).expect("validated")
    }

    pub fn grad_bound(&self) -> f64 {
        2.0 * self.scale * 2.0 * self.radius
    }

    pub fn generate(
        &self,
        seed: u64,
    ) -> Result<(Vec<LossFunction>, ComparatorSequence), HarnessError> {
        self.validate()?;
        let set = self.action_set();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let direction = random_direction(&mut rng, self.dim);
        let stretch = self.radius * START_RADIUS_FRACTION;
        let start: Vec<f64> = direction.iter().map(|d| stretch * d).collect();
        let mut anchor = set.project(&start)?;

        let horizon = self.segmentation.horizon();
        let mut anchors = Vec::with_capacity(horizon + 1);
        anchors.push(anchor.clone());
        for (k, segment) in self.segmentation.segments().enumerate() {
            for _ in segment.trials() {
                let step = self.drift[k];
                let dir = random_direction(&mut rng, self.dim);
                let moved: Vec<f64> = anchor
                    .coords()
                    .iter()
                    .zip(&dir)
                    .map(|(a, d)| a + step * d)
                    .collect();
                anchor = set.project(&moved)?;
                anchors.push(anchor.clone());
            }
        }

        let losses: Vec<LossFunction> = anchors[..horizon]
            .iter()
            .map(|a| LossFunction::clamped_quadratic(a.clone(), self.scale))
            .collect::<Result<_, _>>()?;
        let comparator = ComparatorSequence::new(anchors, &set)?;
        Ok((losses, comparator))
    }
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm: f64 = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return vec![0.0; dim];
    }
    raw.into_iter().map(|v| v / norm).collect()
}

/// One of the two environment families, with everything needed to drive a
/// run.
#[derive(Debug, Clone, PartialEq)]
pub enum Environment {
    Experts(ExpertsEnv),
    Quadratic(QuadraticEnv),
}

impl Environment {
    pub fn validate(&self) -> Result<(), HarnessError> {
        match self {
            Environment::Experts(e) => e.validate(),
            Environment::Quadratic(e) => e.validate(),
        }
    }

    pub fn segmentation(&self) -> &Segmentation {
        match self {
            Environment::Experts(e) => &e.segmentation,
            Environment::Quadratic(e) => &e.segmentation,
        }
    }

    pub fn action_set(&self) -> ActionSet {
        match self {
            Environment::Experts(e) => e.action_set(),
            Environment::Quadratic(e) => e.action_set(),
        }
    }

    pub fn grad_bound(&self) -> f64 {
        match self {
            Environment::Experts(e) => e.grad_bound(),
            Environment::Quadratic(e) => e.grad_bound(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Environment::Experts(e) => e.experts,
            Environment::Quadratic(e) => e.dim,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Environment::Experts(_) => "experts",
            Environment::Quadratic(_) => "quadratic",
        }
    }

    /// Losses for the whole declared horizon plus, for drifting targets, the
    /// comparator sequence the losses were built around.
    pub fn generate(
        &self,
        seed: u64,
    ) -> Result<(Vec<LossFunction>, Option<ComparatorSequence>), HarnessError> {
        match self {
            Environment::Experts(e) => Ok((e.generate(seed)?, None)),
            Environment::Quadratic(e) => {
                let (losses, comparator) = e.generate(seed)?;
                Ok((losses, Some(comparator)))
            }
        }
    }
}

//! End-to-end experiment runs.
//!
//! A run generates its loss stream, pads the horizon up to the next power of
//! two with identically-zero linear losses (which leave every regret
//! unchanged), plays the query/loss/update protocol, and measures regrets
//! against the declared segmentation together with the theoretical
//! envelopes.

use std::time::Instant;

use reset_core::base::BaseSpec;
use reset_core::domain::LossFunction;
use reset_core::regret::{
    best_in_hindsight, dynamic_regret, path_length, ComparatorSequence, Segmentation, Trace,
};
use reset_core::reset::Reset;
use reset_core::segtree::{switching_bound, Constants};

use crate::env::Environment;
use crate::report::{
    ConfigEcho, EnvelopeBlock, RegretBlock, RunReport, SegmentReport, TimingBlock,
};
use crate::{HarnessError, ViolationRecord};

/// Which algorithm plays the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    ResetHedge,
    ResetOgd,
    /// One Hedge instance initialised with the full horizon.
    BareHedge,
    /// One OGD instance initialised with the full horizon.
    BareOgd,
}

impl Algorithm {
    pub fn parse(name: &str) -> Result<Self, HarnessError> {
        match name {
            "reset+hedge" => Ok(Algorithm::ResetHedge),
            "reset+ogd" => Ok(Algorithm::ResetOgd),
            "hedge" => Ok(Algorithm::BareHedge),
            "ogd" => Ok(Algorithm::BareOgd),
            other => Err(HarnessError::config(format!(
                "unknown algorithm '{other}' (expected reset+hedge, reset+ogd, hedge, ogd)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::ResetHedge => "reset+hedge",
            Algorithm::ResetOgd => "reset+ogd",
            Algorithm::BareHedge => "hedge",
            Algorithm::BareOgd => "ogd",
        }
    }

    fn uses_hedge(&self) -> bool {
        matches!(self, Algorithm::ResetHedge | Algorithm::BareHedge)
    }
}

/// A fully validated run request.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub environment: Environment,
    pub seed: u64,
    pub assert_bounds: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.environment.validate()?;
        if self.algorithm.uses_hedge()
            && !matches!(self.environment, Environment::Experts(_))
        {
            return Err(HarnessError::config(
                "hedge-based algorithms need the experts environment",
            ));
        }
        Ok(())
    }

    /// Base-learner configuration implied by algorithm and environment.
    pub fn base_spec(&self) -> Result<BaseSpec, HarnessError> {
        let spec = if self.algorithm.uses_hedge() {
            BaseSpec::hedge(self.environment.dim())?
        } else {
            BaseSpec::ogd(self.environment.action_set(), self.environment.grad_bound())
        };
        Ok(spec)
    }
}

enum Driver {
    Meta(Box<Reset>),
    Bare(reset_core::base::BaseLearner),
}

impl Driver {
    fn query(&mut self) -> reset_core::Result<reset_core::domain::Action> {
        match self {
            Driver::Meta(r) => r.query(),
            Driver::Bare(l) => l.query(),
        }
    }

    fn update(&mut self, loss: &LossFunction) -> reset_core::Result<()> {
        match self {
            Driver::Meta(r) => r.update(loss),
            Driver::Bare(l) => l.update(loss),
        }
    }
}

/// Everything a finished run leaves behind.
pub struct RunOutcome {
    pub trace: Trace,
    pub comparator: Option<ComparatorSequence>,
    /// Declared segmentation extended through the padding trials.
    pub segmentation: Segmentation,
    pub report: RunReport,
    /// Rendered trace CSV, also written to disk by the CLI.
    pub csv: String,
    /// Populated instead of an early return so callers can still inspect the
    /// report when a bound assertion fails.
    pub violation: Option<ViolationRecord>,
}

pub fn next_power_of_two(n: usize) -> usize {
    n.next_power_of_two().max(1)
}

/// Play one seeded run and measure it.
pub fn run_experiment(config: &RunConfig) -> Result<RunOutcome, HarnessError> {
    config.validate()?;
    let declared = config.environment.segmentation().clone();
    let requested = declared.horizon();
    let padded = next_power_of_two(requested);
    let set = config.environment.action_set();
    let dim = set.dim();

    let (mut losses, comparator) = config.environment.generate(config.seed)?;
    losses.resize(padded, LossFunction::zero(dim));
    let comparator = comparator
        .map(|c| pad_comparator(c, padded, &set))
        .transpose()?;
    let segmentation = declared.extended_to(padded)?;

    let spec = config.base_spec()?;
    let mut driver = match config.algorithm {
        Algorithm::ResetHedge | Algorithm::ResetOgd => {
            Driver::Meta(Box::new(Reset::new(spec.clone(), padded)?))
        }
        Algorithm::BareHedge | Algorithm::BareOgd => Driver::Bare(spec.initialise(padded)?),
    };

    let mut trace = Trace::with_capacity(padded);
    let mut trial_nanos = Vec::with_capacity(padded);
    let started = Instant::now();
    for loss in &losses {
        let t0 = Instant::now();
        let action = driver.query()?;
        driver.update(loss)?;
        trial_nanos.push(t0.elapsed().as_nanos());
        trace.push(action, loss.clone())?;
    }
    let total_seconds = started.elapsed().as_secs_f64();

    let gamma = spec.regret_constant();
    let consts = Constants::new();

    // Per-segment accounting against the declared segmentation.
    let mut per_segment = Vec::with_capacity(segmentation.count());
    let mut comparator_values = Vec::with_capacity(segmentation.count());
    for segment in segmentation.segments() {
        let (best_action, best_loss) = best_in_hindsight(&trace, segment, &set)?;
        let played: f64 = segment
            .trials()
            .map(|t| trace.record(t).unwrap().incurred)
            .sum();
        let p = comparator
            .as_ref()
            .map(|c| path_length(c, segment))
            .transpose()?;
        per_segment.push(SegmentReport {
            first: segment.first,
            last: segment.last,
            static_regret: played - best_loss,
            comparator_loss: best_loss,
            path_length: p,
        });
        comparator_values.push(best_action);
    }
    let switching_true: f64 = per_segment.iter().map(|s| s.static_regret).sum();
    let switching_envelope = switching_bound(&declared.lengths(), gamma)?;

    let dynamic = comparator
        .as_ref()
        .map(|c| dynamic_regret(&trace, c))
        .transpose()?;
    let dynamic_shape = match &comparator {
        Some(c) => {
            let mut shape = 0.0;
            for segment in segmentation.segments() {
                let p = path_length(c, segment)?;
                shape += ((1.0 + p) * segment.len() as f64).sqrt();
            }
            Some(shape)
        }
        None => None,
    };

    // Per-trial cumulative regret against the piecewise hindsight comparator.
    let piecewise =
        ComparatorSequence::piecewise_constant(&comparator_values, &segmentation, &set)?;
    let mut cum_regret = Vec::with_capacity(padded);
    let mut acc = 0.0;
    for t in 1..=padded {
        let record = trace.record(t).unwrap();
        acc += record.incurred - record.loss_fn.eval(piecewise.action(t))?;
        cum_regret.push(acc);
    }

    let csv = crate::report::render_trace_csv(&trace, &cum_regret);

    let mean_trial_us =
        trial_nanos.iter().sum::<u128>() as f64 / trial_nanos.len() as f64 / 1000.0;
    let max_trial_us = trial_nanos.iter().max().copied().unwrap_or(0) as f64 / 1000.0;

    let report = RunReport {
        config: ConfigEcho {
            algorithm: config.algorithm.name().to_string(),
            environment: config.environment.kind_name().to_string(),
            requested_horizon: requested,
            padded_horizon: padded,
            seed: config.seed,
            segment_lengths: declared.lengths(),
            gamma,
        },
        regrets: RegretBlock {
            switching_true,
            dynamic,
        },
        envelopes: EnvelopeBlock {
            switching: switching_envelope,
            dynamic_shape,
            c: consts.c,
            d: consts.d,
        },
        per_segment,
        timing: TimingBlock {
            total_seconds,
            mean_trial_us,
            max_trial_us,
        },
    };

    let violation = if config.assert_bounds && switching_true > switching_envelope + 1e-9 {
        Some(ViolationRecord {
            check: "switching_envelope".to_string(),
            seed: config.seed,
            measured: switching_true,
            envelope: switching_envelope,
        })
    } else {
        None
    };

    Ok(RunOutcome {
        trace,
        comparator,
        segmentation,
        report,
        csv,
        violation,
    })
}

/// Repeat the comparator's final entry through the padding trials; the extra
/// zero-loss trials and zero-length steps change neither regret nor path
/// length.
fn pad_comparator(
    comparator: ComparatorSequence,
    padded: usize,
    set: &reset_core::domain::ActionSet,
) -> Result<ComparatorSequence, HarnessError> {
    let have = comparator.horizon();
    if have == padded {
        return Ok(comparator);
    }
    let mut actions: Vec<_> = (1..=have + 1).map(|t| comparator.action(t).clone()).collect();
    let last = actions.last().unwrap().clone();
    actions.resize(padded + 1, last);
    Ok(ComparatorSequence::new(actions, set)?)
}

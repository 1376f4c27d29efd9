//! Regret accounting over recorded runs.
//!
//! A [`Trace`] stores what was played and what loss arrived, trial by trial.
//! Against a trace we measure static regret on a segment (versus the best
//! constant action in hindsight), switching regret on a [`Segmentation`]
//! (the sum of per-segment static regrets), and dynamic regret against an
//! arbitrary [`ComparatorSequence`], together with the comparator's path
//! length per segment.
//!
//! Hindsight comparators are exact for linear losses (vertex argmin on the
//! simplex, supporting hyperplane on a ball) and numerical otherwise, via
//! offline projected subgradient descent with `10 * |segment|` iterations,
//! a declared objective tolerance of [`SOLVER_TOL`].

use crate::domain::{Action, ActionSet, LossFunction};
use crate::error::{Error, Result};

/// Declared optimality slack of the numerical hindsight solver. Envelope
/// comparisons subtract it rather than trusting the solver blindly.
pub const SOLVER_TOL: f64 = 1e-6;

/// One recorded trial.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub action: Action,
    pub loss_fn: LossFunction,
    /// `loss_fn` evaluated at `action`, fixed at record time.
    pub incurred: f64,
}

/// A complete record of a run: actions played and losses received.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    records: Vec<TrialRecord>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Trace {
            records: Vec::with_capacity(n),
        }
    }

    /// Record a trial. The incurred loss is evaluated here and must land in
    /// `[0, 1]`.
    pub fn push(&mut self, action: Action, loss_fn: LossFunction) -> Result<()> {
        let incurred = loss_fn.eval(&action)?;
        if !(-1e-12..=1.0 + 1e-12).contains(&incurred) {
            return Err(Error::contract(format!(
                "recorded loss {incurred} outside [0, 1]"
            )));
        }
        self.records.push(TrialRecord {
            action,
            loss_fn,
            incurred: incurred.clamp(0.0, 1.0),
        });
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    /// Record for 1-based trial `t`.
    pub fn record(&self, t: usize) -> Option<&TrialRecord> {
        if t == 0 {
            None
        } else {
            self.records.get(t - 1)
        }
    }

    fn check_segment(&self, segment: Segment) -> Result<()> {
        if segment.last > self.horizon() {
            return Err(Error::segment(format!(
                "segment {}..={} beyond horizon {}",
                segment.first,
                segment.last,
                self.horizon()
            )));
        }
        Ok(())
    }
}

/// A contiguous 1-based inclusive range of trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub first: usize,
    pub last: usize,
}

impl Segment {
    pub fn new(first: usize, last: usize) -> Result<Self> {
        if first < 1 || last < first {
            return Err(Error::segment(format!(
                "need 1 <= first <= last, got {first}..={last}"
            )));
        }
        Ok(Segment { first, last })
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn trials(&self) -> impl Iterator<Item = usize> {
        self.first..=self.last
    }
}

/// A partition of `1..=T` into contiguous segments, stored as the boundary
/// trial indices `1 = b_1 < b_2 < ... < b_{k+1} = T + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    boundaries: Vec<usize>,
}

impl Segmentation {
    pub fn from_boundaries(boundaries: Vec<usize>, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::segment("horizon must be >= 1"));
        }
        if boundaries.first() != Some(&1) || boundaries.last() != Some(&(horizon + 1)) {
            return Err(Error::segment(format!(
                "boundaries must run from 1 to horizon + 1 = {}",
                horizon + 1
            )));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::segment("boundaries must be strictly increasing"));
        }
        Ok(Segmentation { boundaries })
    }

    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        if lengths.is_empty() || lengths.contains(&0) {
            return Err(Error::segment("segment lengths must be positive"));
        }
        let mut boundaries = Vec::with_capacity(lengths.len() + 1);
        let mut next = 1;
        boundaries.push(next);
        for &l in lengths {
            next += l;
            boundaries.push(next);
        }
        Ok(Segmentation { boundaries })
    }

    pub fn single(horizon: usize) -> Result<Self> {
        Segmentation::from_boundaries(vec![1, horizon + 1], horizon)
    }

    pub fn horizon(&self) -> usize {
        self.boundaries.last().unwrap() - 1
    }

    /// Number of segments.
    pub fn count(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.boundaries.windows(2).map(|w| Segment {
            first: w[0],
            last: w[1] - 1,
        })
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.segments().map(|s| s.len()).collect()
    }

    /// Extend the final segment so the partition covers `horizon` trials.
    pub fn extended_to(&self, horizon: usize) -> Result<Self> {
        if horizon < self.horizon() {
            return Err(Error::segment("cannot shrink a segmentation"));
        }
        let mut boundaries = self.boundaries.clone();
        *boundaries.last_mut().unwrap() = horizon + 1;
        Ok(Segmentation { boundaries })
    }
}

/// A comparator sequence of `T + 1` feasible actions; entry `T + 1` exists
/// so path lengths over suffix segments are well defined.
#[derive(Debug, Clone)]
pub struct ComparatorSequence {
    actions: Vec<Action>,
}

impl ComparatorSequence {
    pub fn new(actions: Vec<Action>, set: &ActionSet) -> Result<Self> {
        if actions.len() < 2 {
            return Err(Error::contract(
                "comparator sequence needs at least T + 1 = 2 entries",
            ));
        }
        for (i, a) in actions.iter().enumerate() {
            if !set.contains(a) {
                return Err(Error::contract(format!(
                    "comparator entry {} is outside the action set",
                    i + 1
                )));
            }
        }
        Ok(ComparatorSequence { actions })
    }

    /// Piecewise-constant sequence taking `values[k]` on segment `k`; the
    /// final extra entry repeats the last segment's value.
    pub fn piecewise_constant(
        values: &[Action],
        segmentation: &Segmentation,
        set: &ActionSet,
    ) -> Result<Self> {
        if values.len() != segmentation.count() {
            return Err(Error::segment(format!(
                "{} values for {} segments",
                values.len(),
                segmentation.count()
            )));
        }
        let mut actions = Vec::with_capacity(segmentation.horizon() + 1);
        for (value, segment) in values.iter().zip(segmentation.segments()) {
            for _ in segment.trials() {
                actions.push(value.clone());
            }
        }
        actions.push(values.last().unwrap().clone());
        ComparatorSequence::new(actions, set)
    }

    /// Number of trials covered, i.e. one less than the entry count.
    pub fn horizon(&self) -> usize {
        self.actions.len() - 1
    }

    /// 1-based entry access, valid for `t` in `1..=horizon + 1`.
    pub fn action(&self, t: usize) -> &Action {
        &self.actions[t - 1]
    }
}

/// The best constant action on a segment in hindsight and its total loss.
///
/// Exact for all-linear segments; otherwise solved by offline projected
/// subgradient descent (ties broken toward the earliest candidate).
pub fn best_in_hindsight(
    trace: &Trace,
    segment: Segment,
    set: &ActionSet,
) -> Result<(Action, f64)> {
    trace.check_segment(segment)?;
    let all_linear = segment
        .trials()
        .all(|t| trace.record(t).unwrap().loss_fn.is_linear());
    if all_linear {
        let mut cumulative = vec![0.0; set.dim()];
        for t in segment.trials() {
            let weights = trace.record(t).unwrap().loss_fn.linear_weights().unwrap();
            if weights.len() != cumulative.len() {
                return Err(Error::DimensionMismatch {
                    expected: cumulative.len(),
                    got: weights.len(),
                });
            }
            for (c, w) in cumulative.iter_mut().zip(weights) {
                *c += w;
            }
        }
        return linear_minimiser(&cumulative, set);
    }
    projected_descent(trace, segment, set)
}

/// Exact minimiser of `<cumulative, x>` over the set.
fn linear_minimiser(cumulative: &[f64], set: &ActionSet) -> Result<(Action, f64)> {
    match set {
        ActionSet::Simplex { dim } => {
            let mut best = 0;
            for j in 1..*dim {
                if cumulative[j] < cumulative[best] {
                    best = j;
                }
            }
            let mut coords = vec![0.0; *dim];
            coords[best] = 1.0;
            Ok((Action::new(coords)?, cumulative[best]))
        }
        ActionSet::Ball { center, radius } => {
            let norm: f64 = cumulative.iter().map(|g| g * g).sum::<f64>().sqrt();
            let coords: Vec<f64> = if norm == 0.0 {
                center.coords().to_vec()
            } else {
                center
                    .coords()
                    .iter()
                    .zip(cumulative)
                    .map(|(c, g)| c - radius * g / norm)
                    .collect()
            };
            let action = Action::new(coords)?;
            let value = action.dot(cumulative);
            Ok((action, value))
        }
    }
}

fn segment_objective(trace: &Trace, segment: Segment, x: &Action) -> Result<f64> {
    let mut total = 0.0;
    for t in segment.trials() {
        total += trace.record(t).unwrap().loss_fn.eval(x)?;
    }
    Ok(total)
}

/// Offline projected subgradient descent on the summed segment loss.
///
/// The step starts at the inverse curvature of the quadratic part (so pure
/// quadratic segments land on their minimiser in one step) and decays as
/// `1/sqrt(k)` to absorb any linear terms.
fn projected_descent(trace: &Trace, segment: Segment, set: &ActionSet) -> Result<(Action, f64)> {
    let mut curvature = 0.0;
    for t in segment.trials() {
        if let LossFunction::ClampedQuadratic { scale, .. } = &trace.record(t).unwrap().loss_fn {
            curvature += 2.0 * scale;
        }
    }
    let base_step = if curvature > 0.0 {
        1.0 / curvature
    } else {
        set.diameter().max(1.0)
    };

    let mut x = set.center();
    let mut best = x.clone();
    let mut best_value = segment_objective(trace, segment, &x)?;
    let iterations = 10 * segment.len();
    for k in 1..=iterations {
        let mut grad = vec![0.0; set.dim()];
        for t in segment.trials() {
            let g = trace.record(t).unwrap().loss_fn.subgradient(&x)?;
            for (acc, gi) in grad.iter_mut().zip(&g) {
                *acc += gi;
            }
        }
        let step = base_step / (k as f64).sqrt();
        let moved: Vec<f64> = x
            .coords()
            .iter()
            .zip(&grad)
            .map(|(xi, gi)| xi - step * gi)
            .collect();
        x = set.project(&moved)?;
        let value = segment_objective(trace, segment, &x)?;
        if value < best_value {
            best_value = value;
            best = x.clone();
        }
    }
    Ok((best, best_value))
}

/// Loss of the run on a segment minus the hindsight-best constant action.
pub fn static_regret(trace: &Trace, segment: Segment, set: &ActionSet) -> Result<f64> {
    trace.check_segment(segment)?;
    let played: f64 = segment
        .trials()
        .map(|t| trace.record(t).unwrap().incurred)
        .sum();
    let (_, comparator) = best_in_hindsight(trace, segment, set)?;
    Ok(played - comparator)
}

/// Sum of per-segment static regrets over a segmentation of the whole trace.
pub fn switching_regret(trace: &Trace, segmentation: &Segmentation, set: &ActionSet) -> Result<f64> {
    if segmentation.horizon() != trace.horizon() {
        return Err(Error::segment(format!(
            "segmentation covers {} trials, trace has {}",
            segmentation.horizon(),
            trace.horizon()
        )));
    }
    let mut total = 0.0;
    for segment in segmentation.segments() {
        total += static_regret(trace, segment, set)?;
    }
    Ok(total)
}

/// Loss of the run minus the loss of an arbitrary comparator sequence.
pub fn dynamic_regret(trace: &Trace, comparator: &ComparatorSequence) -> Result<f64> {
    if comparator.horizon() != trace.horizon() {
        return Err(Error::DimensionMismatch {
            expected: trace.horizon(),
            got: comparator.horizon(),
        });
    }
    let mut total = 0.0;
    for t in 1..=trace.horizon() {
        let record = trace.record(t).unwrap();
        total += record.incurred - record.loss_fn.eval(comparator.action(t))?;
    }
    Ok(total)
}

/// Total movement `sum_{t in segment} |e_{t+1} - e_t|` of the comparator.
pub fn path_length(comparator: &ComparatorSequence, segment: Segment) -> Result<f64> {
    if segment.last > comparator.horizon() {
        return Err(Error::segment(format!(
            "segment end {} beyond comparator horizon {}",
            segment.last,
            comparator.horizon()
        )));
    }
    let mut total = 0.0;
    for t in segment.trials() {
        total += comparator.action(t + 1).distance(comparator.action(t));
    }
    Ok(total)
}

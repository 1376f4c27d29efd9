//! Report rendering: the per-trial trace CSV and the JSON run report.
//!
//! The CSV schema is `trial,loss,cum_loss,cum_regret_true_seg`, one row per
//! trial, floats printed with 17 significant digits so re-parsing loses
//! nothing. Reports serialize as a single JSON document with the blocks
//! `config`, `regrets`, `envelopes`, `per_segment`, `timing`.

use std::fmt::Write as _;
use std::path::Path;

use reset_core::regret::Trace;
use serde::Serialize;

use crate::HarnessError;

pub const TRACE_CSV_HEADER: &str = "trial,loss,cum_loss,cum_regret_true_seg";

/// 17-significant-digit float format shared by every CSV field.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn render_trace_csv(trace: &Trace, cum_regret: &[f64]) -> String {
    debug_assert_eq!(trace.horizon(), cum_regret.len());
    let mut out = String::with_capacity(64 * (trace.horizon() + 1));
    out.push_str(TRACE_CSV_HEADER);
    out.push('\n');
    let mut cum_loss = 0.0;
    for (i, record) in trace.records().iter().enumerate() {
        cum_loss += record.incurred;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            i + 1,
            fmt_float(record.incurred),
            fmt_float(cum_loss),
            fmt_float(cum_regret[i]),
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub algorithm: String,
    pub environment: String,
    pub requested_horizon: usize,
    pub padded_horizon: usize,
    pub seed: u64,
    pub segment_lengths: Vec<usize>,
    /// Regret constant of the base learner in use.
    pub gamma: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegretBlock {
    /// Switching regret on the declared segmentation.
    pub switching_true: f64,
    /// Dynamic regret against the generated comparator, drifting runs only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamic: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeBlock {
    /// `(c * gamma + d) * sum_k sqrt(len_k)` for the declared segmentation.
    pub switching: f64,
    /// `sum_k sqrt((1 + P_k) * len_k)`, the shape of the dynamic envelope.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamic_shape: Option<f64>,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentReport {
    pub first: usize,
    pub last: usize,
    pub static_regret: f64,
    /// Total loss of the hindsight-best constant action on the segment.
    pub comparator_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_length: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingBlock {
    pub total_seconds: f64,
    pub mean_trial_us: f64,
    pub max_trial_us: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub regrets: RegretBlock,
    pub envelopes: EnvelopeBlock,
    pub per_segment: Vec<SegmentReport>,
    pub timing: TimingBlock,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Write the trace CSV and report JSON under `dir`, suffixed by seed.
pub fn persist(dir: &Path, seed: u64, csv: &str, report: &RunReport) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("trace_seed{seed:04}.csv")), csv)?;
    std::fs::write(
        dir.join(format!("report_seed{seed:04}.json")),
        report.to_json(),
    )?;
    Ok(())
}

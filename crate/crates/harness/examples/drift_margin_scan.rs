//! Scans the dynamic-regret margin of the still/drift quadratic setup over
//! seeds, to sanity-check that the acceptance configuration is not fragile.

use reset_core::regret::{path_length, Segment, Segmentation};
use reset_harness::env::{Environment, QuadraticEnv};
use reset_harness::run::{run_experiment, Algorithm, RunConfig};

fn config(drift: Vec<f64>, seed: u64) -> RunConfig {
    RunConfig {
        algorithm: Algorithm::ResetOgd,
        environment: Environment::Quadratic(QuadraticEnv {
            dim: 2,
            segmentation: Segmentation::from_lengths(&[512, 512]).unwrap(),
            drift,
            scale: 0.25,
            radius: 1.0,
        }),
        seed,
        assert_bounds: false,
    }
}

fn main() {
    println!("seed  calib_R*  K       drift_R*  splitEnv  ratio   singleEnv");
    for seed in 0..16u64 {
        let calib = run_experiment(&config(vec![0.0, 0.0], seed)).unwrap();
        let calib_regret = calib.report.regrets.dynamic.unwrap();
        let k = calib_regret / calib.report.envelopes.dynamic_shape.unwrap();

        let run = run_experiment(&config(vec![0.0, 0.05], seed)).unwrap();
        let measured = run.report.regrets.dynamic.unwrap();
        let split = k * run.report.envelopes.dynamic_shape.unwrap();
        let total_path = path_length(
            run.comparator.as_ref().unwrap(),
            Segment::new(1, run.trace.horizon()).unwrap(),
        )
        .unwrap();
        let single = k * ((1.0 + total_path) * run.trace.horizon() as f64).sqrt();
        println!(
            "{seed:4}  {calib_regret:8.3}  {k:6.3}  {measured:8.3}  {split:8.3}  {:6.3}  {single:8.3}{}",
            measured / split,
            if measured <= split && split < single { "" } else { "  <-- WOULD FAIL" }
        );
    }
}

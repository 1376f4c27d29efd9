//! Acceptance suite: every release-gating property of the library, one test
//! per criterion, each printing a PASS line with its measured numbers. Run
//! with `cargo test --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reset_core::base::BaseSpec;
use reset_core::regret::{
    dynamic_regret, path_length, switching_regret, Segment, Segmentation,
};
use reset_core::reset::{mixing_update, Reset};
use reset_core::segtree::{distinct_power_bound, dyadic_cover, sqrt_length_sum, Constants};
use reset_harness::env::{Environment, ExpertsEnv, QuadraticEnv};
use reset_harness::run::{run_experiment, Algorithm, RunConfig};

const LN2: f64 = std::f64::consts::LN_2;

#[test]
fn a1_iterated_mixing_equals_two_point_posterior() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let window = rng.random_range(1..=64usize);
        let len = rng.random_range(1..=64usize);
        let rate = (2.0 * LN2 / window as f64).sqrt();
        let mut rho = 0.5;
        let (mut sum_a, mut sum_b) = (0.0, 0.0);
        for _ in 0..len {
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            rho = mixing_update(rho, a, b, window).unwrap();
            sum_a += a;
            sum_b += b;
            let ea = (-rate * sum_a).exp();
            let eb = (-rate * sum_b).exp();
            let posterior = ea / (ea + eb);
            worst = worst.max((rho - posterior).abs());
        }
    }
    let elapsed = started.elapsed();
    assert!(worst <= 1e-9, "max deviation {worst}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("A1 mixing-update equals two-point posterior: PASS (max dev {worst:.3e}, {elapsed:?})");
}

#[test]
fn a2_two_expert_mixture_bound() {
    let started = Instant::now();
    let n = 12usize;
    let slack = (2.0 * LN2 * n as f64).sqrt();
    let mut worst_gap = f64::NEG_INFINITY;

    // Exhaustive over the complementary-loss structure (a, b) = (1, 0)/(0, 1).
    for code in 0..(1u32 << n) {
        let mut rho = 0.5;
        let (mut mixture, mut sum_a, mut sum_b) = (0.0, 0.0, 0.0);
        for t in 0..n {
            let a = ((code >> t) & 1) as f64;
            let b = 1.0 - a;
            mixture += rho * a + (1.0 - rho) * b;
            sum_a += a;
            sum_b += b;
            rho = mixing_update(rho, a, b, n).unwrap();
        }
        let gap = mixture - sum_a.min(sum_b);
        worst_gap = worst_gap.max(gap);
        assert!(gap <= slack + 1e-9, "code {code}: gap {gap} > {slack}");
    }

    // Random real-valued sequences.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let mut rho = 0.5;
        let (mut mixture, mut sum_a, mut sum_b) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            mixture += rho * a + (1.0 - rho) * b;
            sum_a += a;
            sum_b += b;
            rho = mixing_update(rho, a, b, n).unwrap();
        }
        assert!(mixture <= sum_a.min(sum_b) + slack + 1e-9);
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "A2 two-expert mixture bound: PASS (worst exhaustive gap {worst_gap:.6} vs slack {slack:.6}, {elapsed:?})"
    );
}

#[test]
fn a3_dyadic_cover_and_root_sum_exhaustive() {
    let started = Instant::now();
    let horizon = 256usize;
    let consts = Constants::new();
    let mut segments_checked = 0usize;

    for first in 1..=horizon {
        for last in first..=horizon {
            let blocks = dyadic_cover(first, last, horizon).unwrap();
            let len = last - first + 1;

            // Partition: contiguous, aligned, lengths sum to the segment.
            let mut cursor = first;
            let mut total = 0usize;
            let mut per_height = [0u32; 9];
            for v in &blocks {
                assert_eq!(v.first, cursor, "gap before block at {}", v.first);
                assert_eq!(v.len(), 1usize << v.height);
                assert_eq!((v.first - 1) % v.len(), 0, "misaligned block");
                cursor = v.last + 1;
                total += v.len();
                per_height[v.height as usize] += 1;
            }
            assert_eq!(cursor, last + 1);
            assert_eq!(total, len);
            assert!(per_height.iter().all(|&c| c <= 2), "height repeated 3x");

            let lhs = sqrt_length_sum(&blocks);
            let rhs = consts.c * (len as f64).sqrt();
            assert!(lhs <= rhs + 1e-12, "{first}..={last}: {lhs} > {rhs}");
            segments_checked += 1;
        }
    }
    assert_eq!(segments_checked, horizon * (horizon + 1) / 2);

    // Root-sum inequality over every nonempty subset of {0..14}.
    for mask in 1u32..(1 << 15) {
        let levels: Vec<u32> = (0..15).filter(|k| mask & (1 << k) != 0).collect();
        let (lhs, rhs) = distinct_power_bound(&levels).unwrap();
        assert!(lhs <= rhs + 1e-12, "mask {mask}: {lhs} > {rhs}");
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "A3 dyadic cover + root-sum inequality exhaustive: PASS ({segments_checked} segments, 32767 subsets, {elapsed:?})"
    );
}

fn experts_config(lengths: &[usize], experts: usize, gap: f64, seed: u64) -> RunConfig {
    RunConfig {
        algorithm: Algorithm::ResetHedge,
        environment: Environment::Experts(ExpertsEnv {
            experts,
            segmentation: Segmentation::from_lengths(lengths).unwrap(),
            gap,
        }),
        seed,
        assert_bounds: false,
    }
}

fn random_segmentation(rng: &mut ChaCha8Rng, horizon: usize) -> Segmentation {
    let pieces = rng.random_range(1..=8usize);
    let mut cuts = std::collections::BTreeSet::new();
    while cuts.len() < pieces - 1 {
        cuts.insert(rng.random_range(2..=horizon));
    }
    let mut boundaries = vec![1usize];
    boundaries.extend(cuts);
    boundaries.push(horizon + 1);
    Segmentation::from_boundaries(boundaries, horizon).unwrap()
}

#[test]
fn a4_switching_envelope_holds_for_every_seed_and_segmentation() {
    let started = Instant::now();
    let lengths = [128usize, 384, 256, 256];
    let gamma = (10f64.ln() / 2.0).sqrt();
    let consts = Constants::new();
    let envelope_for = |lens: &[usize]| -> f64 {
        (consts.c * gamma + consts.d) * lens.iter().map(|&l| (l as f64).sqrt()).sum::<f64>()
    };
    let envelope = envelope_for(&lengths);

    let mut first_trace = None;
    let mut worst_ratio: f64 = 0.0;
    for seed in 0..20u64 {
        let config = experts_config(&lengths, 10, 0.25, seed);
        let outcome = run_experiment(&config).unwrap();
        let measured = outcome.report.regrets.switching_true;
        assert!(
            measured <= envelope,
            "seed {seed}: switching regret {measured} exceeds envelope {envelope}"
        );
        // The report must agree with the criterion's own envelope formula.
        assert!((outcome.report.envelopes.switching - envelope).abs() < 1e-9);
        worst_ratio = worst_ratio.max(measured / envelope);
        if seed == 0 {
            first_trace = Some(outcome.trace);
        }
    }

    // The same trace also satisfies the envelope of any other segmentation.
    let trace = first_trace.unwrap();
    let set = reset_core::domain::ActionSet::simplex(10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa4);
    for _ in 0..50 {
        let alt = random_segmentation(&mut rng, trace.horizon());
        let measured = switching_regret(&trace, &alt, &set).unwrap();
        let alt_envelope = envelope_for(&alt.lengths());
        assert!(
            measured <= alt_envelope,
            "alternative segmentation {:?}: {measured} > {alt_envelope}",
            alt.lengths()
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "A4 switching envelope, 20 seeds + 50 alternative segmentations: PASS (worst measured/envelope {worst_ratio:.4}, {elapsed:?})"
    );
}

#[test]
fn a5_single_segment_regret_scales_like_sqrt_horizon() {
    let started = Instant::now();
    let horizons = [64usize, 256, 1024, 4096];
    let mut points = Vec::new();
    for &horizon in &horizons {
        let mut total = 0.0;
        for seed in 0..20u64 {
            let config = experts_config(&[horizon], 10, 0.25, 1000 + seed);
            let outcome = run_experiment(&config).unwrap();
            total += outcome.report.regrets.switching_true;
        }
        let mean = total / 20.0;
        assert!(mean > 0.0, "degenerate mean regret at horizon {horizon}");
        points.push(((horizon as f64).ln(), mean.ln(), mean));
    }

    let n = points.len() as f64;
    let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let slope = cov / var;

    let elapsed = started.elapsed();
    assert!(
        (0.35..=0.65).contains(&slope),
        "log-log slope {slope} outside [0.35, 0.65]; means: {:?}",
        points.iter().map(|p| p.2).collect::<Vec<_>>()
    );
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "A5 sqrt-horizon scaling: PASS (slope {slope:.3}, means {:?}, {elapsed:?})",
        points.iter().map(|p| format!("{:.2}", p.2)).collect::<Vec<_>>()
    );
}

fn timed_mean_trial_us(horizon: usize, reps: usize) -> f64 {
    let env = ExpertsEnv {
        experts: 5,
        segmentation: Segmentation::single(horizon).unwrap(),
        gap: 0.25,
    };
    let losses = env.generate(6).unwrap();
    let spec = BaseSpec::hedge(5).unwrap();
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let mut reset = Reset::new(spec.clone(), horizon).unwrap();
        let t0 = Instant::now();
        for loss in &losses {
            reset.query().unwrap();
            reset.update(loss).unwrap();
        }
        let mean = t0.elapsed().as_secs_f64() * 1e6 / horizon as f64;
        best = best.min(mean);
    }
    best
}

#[test]
fn a6_per_trial_work_and_state_are_logarithmic() {
    // Call counts: exactly tau + 1 queries and tau + 1 update-or-initialise
    // calls per trial, and exactly tau + 1 live learner states.
    let horizon = 1024usize;
    let env = ExpertsEnv {
        experts: 5,
        segmentation: Segmentation::single(horizon).unwrap(),
        gap: 0.25,
    };
    let losses = env.generate(6).unwrap();
    let mut reset = Reset::new(BaseSpec::hedge(5).unwrap(), horizon).unwrap();
    let levels = reset.level_count() as u64;
    assert_eq!(levels, reset.tau() as u64 + 1);
    let mut before = reset.counters();
    for loss in &losses {
        reset.query().unwrap();
        reset.update(loss).unwrap();
        let after = reset.counters();
        assert_eq!(after.queries - before.queries, levels);
        let touched = (after.updates + after.initialises) - (before.updates + before.initialises);
        assert!(touched <= levels);
        before = after;
    }
    assert_eq!(reset.level_count(), reset.tau() as usize + 1);

    // Wall clock: 64x more trials only grows per-trial time like the level
    // count (17/11), far below the 2.5x allowance.
    let small = timed_mean_trial_us(1 << 10, 5);
    let large = timed_mean_trial_us(1 << 16, 3);
    let ratio = large / small;
    assert!(
        ratio <= 2.5,
        "per-trial time grew {ratio:.2}x from T=2^10 ({small:.3}us) to T=2^16 ({large:.3}us)"
    );
    println!(
        "A6 logarithmic work and state: PASS (per-trial {small:.3}us -> {large:.3}us, ratio {ratio:.2})"
    );
}

fn quadratic_config(drift: Vec<f64>, seed: u64) -> RunConfig {
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

#[test]
fn a7_dynamic_regret_tracks_the_split_aware_envelope() {
    let started = Instant::now();
    let seed = 0u64;

    // Calibrate the constant once on a zero-drift run: both path lengths are
    // exactly zero there, so the envelope shape is 2 * sqrt(512).
    let calibration = run_experiment(&quadratic_config(vec![0.0, 0.0], seed)).unwrap();
    let calib_regret = calibration.report.regrets.dynamic.unwrap();
    let calib_shape = calibration.report.envelopes.dynamic_shape.unwrap();
    assert!((calib_shape - 2.0 * 512f64.sqrt()).abs() < 1e-9);
    assert!(calib_regret > 0.0, "calibration run has no regret to scale by");
    let scale_constant = calib_regret / calib_shape;

    // Drift run: still segment then drifting segment.
    let outcome = run_experiment(&quadratic_config(vec![0.0, 0.05], seed)).unwrap();
    let measured = outcome.report.regrets.dynamic.unwrap();
    let comparator = outcome.comparator.as_ref().unwrap();
    let split_shape = outcome.report.envelopes.dynamic_shape.unwrap();
    let split_envelope = scale_constant * split_shape;
    assert!(
        measured <= split_envelope,
        "dynamic regret {measured} exceeds split-aware envelope {split_envelope}"
    );

    // Adaptivity: the split-aware envelope is strictly below the one-segment
    // envelope built from the total path length.
    let total_path = path_length(
        comparator,
        Segment::new(1, outcome.trace.horizon()).unwrap(),
    )
    .unwrap();
    let single_shape = ((1.0 + total_path) * outcome.trace.horizon() as f64).sqrt();
    let single_envelope = scale_constant * single_shape;
    assert!(
        split_envelope < single_envelope,
        "split envelope {split_envelope} not below single-segment envelope {single_envelope}"
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "A7 dynamic-regret adaptivity: PASS (measured {measured:.3} <= split {split_envelope:.3} < single {single_envelope:.3}, {elapsed:?})"
    );
}

#[test]
fn a8_structural_invariants() {
    // Feasibility, coefficient reconstruction, and the restart schedule over
    // one instrumented 64-trial run.
    let horizon = 64usize;
    let experts = 4usize;
    let env = ExpertsEnv {
        experts,
        segmentation: Segmentation::from_lengths(&[32, 32]).unwrap(),
        gap: 0.25,
    };
    let losses = env.generate(88).unwrap();
    let mut reset = Reset::new(BaseSpec::hedge(experts).unwrap(), horizon).unwrap();
    let tau = reset.tau() as usize;

    for (idx, loss) in losses.iter().enumerate() {
        let t = idx + 1;
        let played = reset.query().unwrap();

        let sum: f64 = played.coords().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9, "trial {t}: simplex sum {sum}");
        assert!(played.coords().iter().all(|v| *v >= -1e-12));

        let coeffs = reset.mixing_coefficients().unwrap();
        let csum: f64 = coeffs.iter().sum();
        assert!((csum - 1.0).abs() <= 1e-12);
        let bases = reset.cached_base_actions().unwrap();
        for dim in 0..experts {
            let rebuilt: f64 = coeffs
                .iter()
                .zip(bases)
                .map(|(c, w)| c * w.coords()[dim])
                .sum();
            assert!((rebuilt - played.coords()[dim]).abs() <= 1e-12);
        }

        reset.update(loss).unwrap();

        for level in 0..=tau {
            let span = 1usize << level;
            if t % span == 0 {
                assert_eq!(reset.level_updates_consumed(level), Some(0));
                if level >= 1 {
                    assert_eq!(reset.mix_weight(level), Some(0.5));
                }
            } else {
                assert_eq!(reset.level_updates_consumed(level), Some(t % span));
            }
        }
    }

    // Determinism: identical seeds render byte-identical CSVs.
    let config = experts_config(&[32, 32], 4, 0.25, 88);
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    assert_eq!(a.csv, b.csv, "same seed must give identical CSV bytes");
    assert!(!a.csv.is_empty());

    // And the dynamic-regret identity: against the piecewise hindsight
    // comparator the switching regret is the dynamic regret.
    let set = reset_core::domain::ActionSet::simplex(4).unwrap();
    let seg = &a.segmentation;
    let values: Vec<_> = seg
        .segments()
        .map(|s| {
            reset_core::regret::best_in_hindsight(&a.trace, s, &set)
                .unwrap()
                .0
        })
        .collect();
    let piecewise =
        reset_core::regret::ComparatorSequence::piecewise_constant(&values, seg, &set).unwrap();
    let dynamic = dynamic_regret(&a.trace, &piecewise).unwrap();
    assert!((dynamic - a.report.regrets.switching_true).abs() < 1e-9);

    println!("A8 structural invariants: PASS (feasibility, coefficients, schedule, determinism)");
}

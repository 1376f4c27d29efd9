//! The base-learner regret contract, checked empirically: a fresh learner
//! run alone over its declared horizon keeps its static regret below
//! `gamma * sqrt(horizon)` on random and adversarial loss streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reset_core::base::BaseSpec;
use reset_core::domain::{Action, ActionSet, LossFunction};
use reset_core::regret::{static_regret, Segment, Trace};

const HORIZONS: [usize; 5] = [1, 4, 16, 64, 256];

fn run_alone(spec: &BaseSpec, losses: &[LossFunction]) -> Trace {
    let mut learner = spec.initialise(losses.len()).unwrap();
    let mut trace = Trace::with_capacity(losses.len());
    for loss in losses {
        let action = learner.query().unwrap();
        trace.push(action, loss.clone()).unwrap();
        learner.update(loss).unwrap();
    }
    trace
}

fn assert_contract(spec: &BaseSpec, losses: &[LossFunction], label: &str) {
    let trace = run_alone(spec, losses);
    let horizon = losses.len();
    let segment = Segment::new(1, horizon).unwrap();
    let regret = static_regret(&trace, segment, &spec.set).unwrap();
    let bound = spec.regret_constant() * (horizon as f64).sqrt();
    assert!(
        regret <= bound + 1e-9,
        "{label}: regret {regret} exceeds {bound} at horizon {horizon}"
    );
}

fn random_linear(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Vec<LossFunction> {
    (0..n)
        .map(|_| {
            let g: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            LossFunction::linear(g).unwrap()
        })
        .collect()
}

/// Punish whichever expert currently leads: a stream that defeats
/// follow-the-leader and stresses the exponential-weights tuning.
fn leader_trap(dim: usize, n: usize) -> Vec<LossFunction> {
    let mut cumulative = vec![0.0f64; dim];
    (0..n)
        .map(|_| {
            let leader = cumulative
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            let mut g = vec![0.0; dim];
            g[leader] = 1.0;
            for (c, gi) in cumulative.iter_mut().zip(&g) {
                *c += gi;
            }
            LossFunction::linear(g).unwrap()
        })
        .collect()
}

#[test]
fn hedge_meets_its_regret_bound() {
    for dim in [2usize, 5] {
        let spec = BaseSpec::hedge(dim).unwrap();
        for horizon in HORIZONS {
            for seed in 0..8u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 1000 + horizon as u64);
                let losses = random_linear(&mut rng, dim, horizon);
                assert_contract(&spec, &losses, "hedge/random");
            }
            assert_contract(&spec, &leader_trap(dim, horizon), "hedge/leader-trap");
        }
    }
}

#[test]
fn ogd_meets_its_regret_bound_on_the_simplex() {
    let dim = 3usize;
    let set = ActionSet::simplex(dim).unwrap();
    let spec = BaseSpec::ogd(set, (dim as f64).sqrt());
    for horizon in HORIZONS {
        for seed in 0..8u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 7919 + horizon as u64);
            let losses = random_linear(&mut rng, dim, horizon);
            assert_contract(&spec, &losses, "ogd/simplex/random");
        }
        assert_contract(&spec, &leader_trap(dim, horizon), "ogd/simplex/leader-trap");
    }
}

#[test]
fn ogd_meets_its_regret_bound_on_a_ball() {
    let set = ActionSet::ball(Action::zeros(2), 1.0).unwrap();
    let scale = 0.25;
    // Largest gradient norm: 2 * scale * diameter.
    let spec = BaseSpec::ogd(set.clone(), 2.0 * scale * set.diameter());
    for horizon in HORIZONS {
        for seed in 0..8u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 65537 + horizon as u64);
            let losses: Vec<LossFunction> = (0..horizon)
                .map(|_| {
                    let raw: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
                    let target = set.project(&raw).unwrap();
                    LossFunction::clamped_quadratic(target, scale).unwrap()
                })
                .collect();
            assert_contract(&spec, &losses, "ogd/ball/quadratic");
        }
    }
}

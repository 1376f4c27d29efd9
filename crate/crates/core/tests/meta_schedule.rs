//! Instrumented run over 64 trials: every level restarts exactly on its
//! dyadic boundaries, and between restarts its mixing weight follows the
//! closed-form two-expert update on the cached action pair, bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reset_core::base::BaseSpec;
use reset_core::domain::{Action, LossFunction};
use reset_core::reset::{mixing_update, Reset};

#[test]
fn restart_schedule_and_weight_trajectory_are_exact() {
    let horizon = 64usize;
    let experts = 3usize;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut reset = Reset::new(BaseSpec::hedge(experts).unwrap(), horizon).unwrap();
    let tau = reset.tau() as usize;

    for t in 1..=horizon {
        // Start of trial t: every level whose block starts here must be fresh.
        for level in 0..=tau {
            let span = 1usize << level;
            if (t - 1) % span == 0 {
                assert_eq!(
                    reset.level_updates_consumed(level),
                    Some(0),
                    "level {level} not fresh at the start of trial {t}"
                );
                if level >= 1 {
                    assert_eq!(reset.mix_weight(level), Some(0.5));
                }
            } else {
                assert_eq!(reset.level_updates_consumed(level), Some((t - 1) % span));
            }
        }

        let played = reset.query().unwrap();
        let bases: Vec<Action> = reset.cached_base_actions().unwrap().to_vec();
        let mix_before: Vec<f64> = (1..=tau).map(|l| reset.mix_weight(l).unwrap()).collect();

        // Rebuild the blended stack independently from the cached pieces.
        let mut blended = vec![bases[0].clone()];
        for i in 1..=tau {
            let mu = mix_before[i - 1];
            let prev = &blended[i - 1];
            let combo: Vec<f64> = bases[i]
                .coords()
                .iter()
                .zip(prev.coords())
                .map(|(w, z)| mu * w + (1.0 - mu) * z)
                .collect();
            blended.push(Action::new(combo).unwrap());
        }
        assert_eq!(blended.last().unwrap(), &played);

        let g: Vec<f64> = (0..experts).map(|_| rng.random::<f64>()).collect();
        let loss = LossFunction::linear(g).unwrap();
        reset.update(&loss).unwrap();

        // End of trial t: boundary levels reset, the rest followed the
        // closed-form weight update on exactly the cached pair.
        for level in 0..=tau {
            let span = 1usize << level;
            if t % span == 0 {
                assert_eq!(reset.level_updates_consumed(level), Some(0));
                if level >= 1 {
                    assert_eq!(reset.mix_weight(level), Some(0.5));
                }
            } else {
                assert_eq!(reset.level_updates_consumed(level), Some(t % span));
                if level >= 1 {
                    let base_loss = loss.eval(&bases[level]).unwrap();
                    let blend_loss = loss.eval(&blended[level - 1]).unwrap();
                    let expected =
                        mixing_update(mix_before[level - 1], base_loss, blend_loss, span).unwrap();
                    assert_eq!(reset.mix_weight(level), Some(expected));
                }
            }
        }
    }
}

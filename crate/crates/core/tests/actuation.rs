mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rcjhand::actuation::{motor_to_pose, pose_to_motor, ActuatorConfig, CouplingRule, MotorState};
use rcjhand::cable::tendon_deviation;
use rcjhand::config::default_config;
use rcjhand::{Error, FingerName};

fn round_trip(cfg: &ActuatorConfig, seed: u64, n: usize) {
    let hand = default_config().hand;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let pose = coupled_pose(&mut rng, &hand, cfg);
        let motors = pose_to_motor(&hand, &pose, cfg).unwrap();
        let back = motor_to_pose(&hand, &motors, cfg).unwrap();
        for f in FingerName::ALL {
            for j in 0..4 {
                let d = (pose.finger(f)[j] - back.finger(f)[j]).to_radians().abs();
                assert!(d <= 1e-6, "{f} joint {j}: {pose:?} vs {back:?}");
            }
        }
        let again = pose_to_motor(&hand, &back, cfg).unwrap();
        for (a, b) in motors.0.iter().zip(&again.0) {
            let d = (a.payout(cfg.bobbin_radius) - b.payout(cfg.bobbin_radius)).abs();
            assert!(d <= 1e-6, "{} {}: {d}", a.finger, a.pair);
        }
    }
}

#[test]
fn round_trip_default_coupling() {
    round_trip(&ActuatorConfig::default(), 1, 1000);
}

#[test]
fn round_trip_uneven_coupling() {
    let cfg = ActuatorConfig {
        bobbin_radius: 7.5,
        finger_coupling: CouplingRule { ratio: 0.7 },
        thumb_coupling: CouplingRule { ratio: 1.3 },
    };
    round_trip(&cfg, 2, 300);
}

#[test]
fn payout_equals_flexor_travel() {
    // b·ψ is exactly the flexor's length change
    let hand = default_config().hand;
    let cfg = ActuatorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let pose = coupled_pose(&mut rng, &hand, &cfg);
        let motors = pose_to_motor(&hand, &pose, &cfg).unwrap();
        for m in &motors.0 {
            let flexor = m.pair.split('-').next().unwrap();
            let f = hand.finger(m.finger);
            let d = tendon_deviation(f, pose.finger(m.finger), flexor).unwrap();
            assert!(
                (m.payout(cfg.bobbin_radius) - d).abs() < 1e-12,
                "{} {}",
                m.finger,
                m.pair
            );
        }
    }
}

#[test]
fn antagonist_follows_within_pairing_bound() {
    let hand = default_config().hand;
    let cfg = ActuatorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let pose = coupled_pose(&mut rng, &hand, &cfg);
        for name in FingerName::ALL {
            let f = hand.finger(name);
            let plan = f.routing();
            for pair in ["FU-ER", "FR-EU", "DF-DE"] {
                let p = plan.pair(pair).unwrap();
                let joints = plan.tendon(p.flexor).unwrap().joints.len() as f64;
                let a = tendon_deviation(f, pose.finger(name), p.flexor).unwrap();
                let b = tendon_deviation(f, pose.finger(name), p.extensor).unwrap();
                assert!(
                    (a.abs() - b.abs()).abs() <= 0.05 * joints,
                    "{name} {pair}: {a} {b}"
                );
            }
        }
    }
}

#[test]
fn uncoupled_pose_rejected() {
    let hand = default_config().hand;
    let mut pose = rcjhand::Pose::ZERO;
    pose.finger_mut(FingerName::Index)[2] = 40.0;
    let e = pose_to_motor(&hand, &pose, &ActuatorConfig::default()).unwrap_err();
    assert!(matches!(e, Error::CouplingViolation { .. }), "{e}");
}

#[test]
fn unreachable_payout_reported() {
    let hand = default_config().hand;
    let mut motors = MotorState::zero();
    motors.0[0].angle = 100.0;
    let e = motor_to_pose(&hand, &motors, &ActuatorConfig::default()).unwrap_err();
    assert!(matches!(e, Error::UnreachablePayout(_)), "{e}");
}

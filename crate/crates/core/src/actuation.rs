//! Motor, tendon and joint space mappings.
//!
//! Each finger has three motors, one per antagonistic pair. A motor's
//! bobbin pays out its flexor by `b·ψ` and reels in the extensor by the
//! same amount, so only the flexor deviation is needed to set `ψ`. The
//! two base motors jointly drive deviation and basal flexion; the distal
//! motor drives an underactuated pair of flexion joints whose angles are
//! tied by a coupling ratio.

use serde::{Deserialize, Serialize};

use crate::cable::tendon_deviation;
use crate::error::{Error, Result};
use crate::geometry::{FingerAngles, FingerKind, FingerModel, FingerName, HandModel, Pose};
use crate::kinematics::{validate_rom, RomMode};
use crate::section::{Face, JointSection};
use crate::tol;

pub const DEFAULT_BOBBIN_RADIUS_MM: f64 = 5.0;
pub const PAIRS: [&str; 3] = ["FU-ER", "FR-EU", "DF-DE"];
const FLEXORS: [&str; 3] = ["FU", "FR", "DF"];

/// Payout tolerance of the root finder, mm.
pub const PAYOUT_TOLERANCE: f64 = 1e-9;
const MAX_ITERATIONS: usize = 100;
/// Allowed mismatch between a coupled joint and `ρ` times its driver.
pub const COUPLING_TOLERANCE_DEG: f64 = 1e-6;

/// `θ_second = ratio · θ_first` on an underactuated joint pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingRule {
    pub ratio: f64,
}

impl Default for CouplingRule {
    fn default() -> Self {
        Self { ratio: 1.0 }
    }
}

impl CouplingRule {
    /// `(driver, follower)` joint indices: PIP→DIP on fingers, CMC→MCP
    /// flexion on the thumb.
    pub fn joints(kind: FingerKind) -> (usize, usize) {
        match kind {
            FingerKind::Finger => (2, 3),
            FingerKind::Thumb => (1, 2),
        }
    }

    /// Driver angle range for which the follower stays inside its ROM.
    pub fn driver_range(&self, finger: &FingerModel) -> Result<(f64, f64)> {
        let (a, b) = Self::joints(finger.kind);
        let (ja, jb) = (&finger.joints[a], &finger.joints[b]);
        let lo = ja.rom_min.max(jb.rom_min / self.ratio);
        let hi = ja.rom_max.min(jb.rom_max / self.ratio);
        if lo > hi {
            return Err(Error::EmptyRom(format!(
                "coupling ratio {} leaves no common range",
                self.ratio
            )));
        }
        Ok((lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorConfig {
    /// Bobbin radius shared by every motor, mm.
    pub bobbin_radius: f64,
    pub finger_coupling: CouplingRule,
    pub thumb_coupling: CouplingRule,
}

impl Default for ActuatorConfig {
    fn default() -> Self {
        Self {
            bobbin_radius: DEFAULT_BOBBIN_RADIUS_MM,
            finger_coupling: CouplingRule::default(),
            thumb_coupling: CouplingRule::default(),
        }
    }
}

impl ActuatorConfig {
    pub fn coupling(&self, kind: FingerKind) -> CouplingRule {
        match kind {
            FingerKind::Finger => self.finger_coupling,
            FingerKind::Thumb => self.thumb_coupling,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bobbin_radius.is_finite() && self.bobbin_radius > 0.0) {
            return Err(Error::Validation("bobbin radius b > 0 required".into()));
        }
        for (name, c) in [
            ("finger", self.finger_coupling),
            ("thumb", self.thumb_coupling),
        ] {
            if !(c.ratio.is_finite() && c.ratio > 0.0) {
                return Err(Error::Validation(format!(
                    "{name} coupling ratio must be positive"
                )));
            }
        }
        Ok(())
    }

    /// Sets the follower joint of every finger from its driver.
    pub fn couple(&self, hand: &HandModel, pose: &Pose) -> Pose {
        let mut out = *pose;
        for name in FingerName::ALL {
            let kind = hand.finger(name).kind;
            let (a, b) = CouplingRule::joints(kind);
            let f = out.finger_mut(name);
            f[b] = self.coupling(kind).ratio * f[a];
        }
        out
    }
}

/// One motor: its antagonistic pair and bobbin angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motor {
    pub finger: FingerName,
    pub pair: &'static str,
    /// Bobbin angle ψ, rad.
    pub angle: f64,
}

impl Motor {
    /// Flexor payout `b·ψ`, mm; the extensor receives the negative.
    pub fn payout(&self, bobbin_radius: f64) -> f64 {
        bobbin_radius * self.angle
    }
}

/// Angles of all 15 motors, finger-major in pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorState(pub Vec<Motor>);

impl MotorState {
    pub fn zero() -> Self {
        Self(
            FingerName::ALL
                .iter()
                .flat_map(|&finger| {
                    PAIRS.iter().map(move |&pair| Motor {
                        finger,
                        pair,
                        angle: 0.0,
                    })
                })
                .collect(),
        )
    }

    pub fn get(&self, finger: FingerName, pair: &str) -> Result<&Motor> {
        self.0
            .iter()
            .find(|m| m.finger == finger && m.pair == pair)
            .ok_or_else(|| Error::UnknownPair(format!("{finger} {pair}")))
    }

    fn angles(&self, finger: FingerName) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (i, p) in PAIRS.iter().enumerate() {
            out[i] = self.get(finger, p)?.angle;
        }
        Ok(out)
    }
}

fn check_coupling(
    name: FingerName,
    finger: &FingerModel,
    angles: &FingerAngles,
    rule: CouplingRule,
) -> Result<()> {
    let (a, b) = CouplingRule::joints(finger.kind);
    let expected = rule.ratio * angles[a];
    if !tol::close(angles[b], expected, COUPLING_TOLERANCE_DEG) {
        return Err(Error::CouplingViolation {
            finger: format!("{name} {}", finger.joint_labels()[b]),
            expected,
            found: angles[b],
        });
    }
    Ok(())
}

/// Motor angles that hold `pose`. Exact: each motor angle is its flexor's
/// deviation divided by the bobbin radius.
pub fn pose_to_motor(hand: &HandModel, pose: &Pose, cfg: &ActuatorConfig) -> Result<MotorState> {
    cfg.validate()?;
    let mut motors = Vec::with_capacity(15);
    for name in FingerName::ALL {
        let finger = hand.finger(name);
        let angles = validate_rom(finger, pose.finger(name), RomMode::Strict)?;
        check_coupling(name, finger, &angles, cfg.coupling(finger.kind))?;
        for (pair, flexor) in PAIRS.iter().zip(FLEXORS) {
            let dev = tendon_deviation(finger, &angles, flexor)?;
            motors.push(Motor {
                finger: name,
                pair,
                angle: dev / cfg.bobbin_radius,
            });
        }
    }
    Ok(MotorState(motors))
}

/// Closing-face cable deviation of one joint as a function of its angle.
struct Closing(JointSection);

impl Closing {
    fn new(finger: &FingerModel, j: usize) -> Self {
        Self(finger.joints[j].section(None))
    }

    fn dev(&self, face: Face, deg: f64) -> f64 {
        self.0.length(face, tol::rad(deg)) - 2.0 * self.0.radius
    }
}

/// Solves `f(x) = target` for monotone `f` on `[lo, hi]` with Newton steps
/// safeguarded by a shrinking bracket.
fn solve_monotone(
    what: &str,
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    target: f64,
) -> Result<f64> {
    let g = |x: f64| f(x) - target;
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (g(a), g(b));
    if ga.abs() <= PAYOUT_TOLERANCE {
        return Ok(a);
    }
    if gb.abs() <= PAYOUT_TOLERANCE {
        return Ok(b);
    }
    if ga.signum() == gb.signum() {
        return Err(Error::UnreachablePayout(format!(
            "{what}: target {target:.6} mm outside [{:.6}, {:.6}] mm",
            f(lo).min(f(hi)),
            f(lo).max(f(hi))
        )));
    }
    let rising = gb > 0.0;
    let mut x = 0.5 * (a + b);
    let mut gx = g(x);
    for _ in 0..MAX_ITERATIONS {
        if gx.abs() <= PAYOUT_TOLERANCE {
            return Ok(x);
        }
        if (gx > 0.0) == rising {
            b = x;
        } else {
            a = x;
        }
        let h = 1e-6 * (hi - lo).max(1e-9);
        let slope = (g(x + h) - g(x - h)) / (2.0 * h);
        let newton = x - gx / slope;
        x = if slope.is_finite() && slope != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        gx = g(x);
    }
    if gx.abs() <= PAYOUT_TOLERANCE {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            what: what.to_string(),
            residual: gx.abs(),
        })
    }
}

fn finger_from_motors(
    name: FingerName,
    finger: &FingerModel,
    psi: [f64; 3],
    cfg: &ActuatorConfig,
) -> Result<FingerAngles> {
    let b = cfg.bobbin_radius;
    let rule = cfg.coupling(finger.kind);
    let (ca, cb) = CouplingRule::joints(finger.kind);
    let (u, r, d) = (b * psi[0], b * psi[1], b * psi[2]);
    let dev = Closing::new(finger, 0);
    let j0 = &finger.joints[0];

    // ulnar minus radial depends on deviation alone
    let phi = solve_monotone(
        &format!("{name} deviation"),
        |p| dev.dev(Face::Closing, p) - dev.dev(Face::Opening, p),
        j0.rom_min,
        j0.rom_max,
        u - r,
    )?;

    let mut angles = FingerAngles::new(phi, 0.0, 0.0, 0.0);
    let base_target = u - dev.dev(Face::Closing, phi);
    let (drange, last) = (rule.driver_range(finger)?, finger.joints.len() - 1);
    match finger.kind {
        FingerKind::Finger => {
            let j1 = Closing::new(finger, 1);
            let jr = &finger.joints[1];
            angles[1] = solve_monotone(
                &format!("{name} basal flexion"),
                |t| j1.dev(Face::Closing, t),
                jr.rom_min,
                jr.rom_max,
                base_target,
            )?;
            let (p, q) = (Closing::new(finger, ca), Closing::new(finger, cb));
            angles[ca] = solve_monotone(
                &format!("{name} distal flexion"),
                |t| p.dev(Face::Closing, t) + q.dev(Face::Closing, rule.ratio * t),
                drange.0,
                drange.1,
                d,
            )?;
            angles[cb] = rule.ratio * angles[ca];
        }
        FingerKind::Thumb => {
            let (p, q) = (Closing::new(finger, ca), Closing::new(finger, cb));
            angles[ca] = solve_monotone(
                &format!("{name} basal flexion"),
                |t| p.dev(Face::Closing, t) + q.dev(Face::Closing, rule.ratio * t),
                drange.0,
                drange.1,
                base_target,
            )?;
            angles[cb] = rule.ratio * angles[ca];
            let ip = Closing::new(finger, last);
            let jr = &finger.joints[last];
            angles[last] = solve_monotone(
                &format!("{name} IP flexion"),
                |t| ip.dev(Face::Closing, t),
                jr.rom_min,
                jr.rom_max,
                d,
            )?;
        }
    }
    Ok(angles)
}

/// Pose reached in free space by the given motor angles.
pub fn motor_to_pose(hand: &HandModel, motors: &MotorState, cfg: &ActuatorConfig) -> Result<Pose> {
    cfg.validate()?;
    let mut pose = Pose::ZERO;
    for name in FingerName::ALL {
        let psi = motors.angles(name)?;
        *pose.finger_mut(name) = finger_from_motors(name, hand.finger(name), psi, cfg)?;
    }
    Ok(pose)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hand() -> HandModel {
        let f = FingerModel::design_finger();
        HandModel::new(
            [
                FingerModel::design_thumb(),
                f.clone(),
                f.clone(),
                f.clone(),
                f,
            ],
            [crate::RigidTransform::identity(); 5],
        )
    }

    #[test]
    fn zero_pose_zero_motors() {
        let h = hand();
        let cfg = ActuatorConfig::default();
        let m = pose_to_motor(&h, &Pose::ZERO, &cfg).unwrap();
        assert_eq!(m.0.len(), 15);
        assert!(m.0.iter().all(|x| x.angle == 0.0));
        assert_eq!(
            motor_to_pose(&h, &MotorState::zero(), &cfg).unwrap(),
            Pose::ZERO
        );
    }

    #[test]
    fn pure_deviation_moves_base_motors_oppositely() {
        let h = hand();
        let cfg = ActuatorConfig::default();
        let mut p = Pose::ZERO;
        p.finger_mut(FingerName::Index)[0] = 20.0;
        let m = pose_to_motor(&h, &p, &cfg).unwrap();
        let fu = m.get(FingerName::Index, "FU-ER").unwrap().angle;
        let fr = m.get(FingerName::Index, "FR-EU").unwrap().angle;
        let df = m.get(FingerName::Index, "DF-DE").unwrap().angle;
        assert!(fu < 0.0 && fr > 0.0);
        assert!((fu + fr).abs() < 0.05 / cfg.bobbin_radius);
        assert_eq!(df, 0.0);
    }

    #[test]
    fn pure_basal_flexion_moves_base_motors_together() {
        let h = hand();
        let cfg = ActuatorConfig::default();
        let mut p = Pose::ZERO;
        p.finger_mut(FingerName::Middle)[1] = 70.0;
        let m = pose_to_motor(&h, &p, &cfg).unwrap();
        let fu = m.get(FingerName::Middle, "FU-ER").unwrap().angle;
        let fr = m.get(FingerName::Middle, "FR-EU").unwrap().angle;
        assert!(fu < 0.0);
        assert!((fu - fr).abs() < 1e-12);
    }

    #[test]
    fn coupling_enforced() {
        let h = hand();
        let cfg = ActuatorConfig::default();
        let mut p = Pose::ZERO;
        p.finger_mut(FingerName::Ring)[2] = 40.0;
        assert!(matches!(
            pose_to_motor(&h, &p, &cfg),
            Err(Error::CouplingViolation { .. })
        ));
        let p = cfg.couple(&h, &p);
        assert_eq!(p.finger(FingerName::Ring)[3], 40.0);
        assert!(pose_to_motor(&h, &p, &cfg).is_ok());
    }

    #[test]
    fn unreachable_payout() {
        let h = hand();
        let cfg = ActuatorConfig::default();
        let mut m = MotorState::zero();
        // beyond full flexion of both distal joints
        m.0[5].angle = -50.0 / cfg.bobbin_radius;
        assert!(matches!(
            motor_to_pose(&h, &m, &cfg),
            Err(Error::UnreachablePayout(_))
        ));
    }

    #[test]
    fn round_trip_with_ratio() {
        let h = hand();
        let cfg = ActuatorConfig {
            finger_coupling: CouplingRule { ratio: 0.8 },
            thumb_coupling: CouplingRule { ratio: 1.25 },
            ..ActuatorConfig::default()
        };
        let mut p = Pose::ZERO;
        *p.finger_mut(FingerName::Thumb) = FingerAngles::new(-30.0, 50.0, 62.5, 30.0);
        *p.finger_mut(FingerName::Little) = FingerAngles::new(12.0, 85.0, 90.0, 72.0);
        let m = pose_to_motor(&h, &p, &cfg).unwrap();
        let back = motor_to_pose(&h, &m, &cfg).unwrap();
        for name in FingerName::ALL {
            for j in 0..4 {
                let e = (back.finger(name)[j] - p.finger(name)[j])
                    .to_radians()
                    .abs();
                assert!(e < 1e-6, "{name} joint {j}: {e}");
            }
        }
    }
}

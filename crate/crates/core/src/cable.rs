//! Cable holes, tendon routing and cable-length bookkeeping.
//!
//! A cable crosses each joint it traverses as a straight chord between a
//! hole on the proximal link face and the mirrored hole on the distal link
//! face (see [`crate::section`]). The length counted for a joint also
//! includes the axial runs from each rolling-circle-center plane to its
//! hole, so every joint contributes exactly `2r` at zero angle. Runs inside
//! a link are pose independent.

use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, RomViolation};
use crate::geometry::{FingerAngles, FingerKind, FingerModel, JointAxis, JointGeometry};
use crate::kinematics::roll_transform;
use crate::section::{Face, JointSection};
use crate::tol;

/// Dorsopalmar side of a hole. Flexors run on the palmar (`+x`) side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Flexor,
    Extensor,
}

/// Lateral position of a hole. Radial is `+y`, ulnar `−y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lateral {
    Radial,
    Ulnar,
    Center,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Flexor => 1.0,
            Side::Extensor => -1.0,
        }
    }
}

impl Lateral {
    fn sign(self) -> f64 {
        match self {
            Lateral::Radial => 1.0,
            Lateral::Ulnar => -1.0,
            Lateral::Center => 0.0,
        }
    }
}

/// A cable hole pair at one joint, identified by its side and lateral
/// position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CableHole {
    pub side: Side,
    pub lateral: Lateral,
}

impl CableHole {
    pub const fn new(side: Side, lateral: Lateral) -> Self {
        Self { side, lateral }
    }

    /// The wedge face carrying this hole at `joint`. On flexion joints the
    /// flexor holes sit on the closing face; on the deviation joint the
    /// ulnar holes do (positive deviation bends toward `−y`).
    pub fn face(&self, joint: &JointGeometry) -> Result<Face> {
        match joint.axis {
            JointAxis::Flexion => Ok(match self.side {
                Side::Flexor => Face::Closing,
                Side::Extensor => Face::Opening,
            }),
            JointAxis::Deviation => match self.lateral {
                Lateral::Ulnar => Ok(Face::Closing),
                Lateral::Radial => Ok(Face::Opening),
                Lateral::Center => Err(Error::InvalidGeometry(
                    "center holes cannot act across a deviation joint".into(),
                )),
            },
        }
    }

    /// Hole position in the proximal rolling-circle-center frame of
    /// `joint` (the distal hole is its mirror `z → −z`). `radius`
    /// overrides the joint radius.
    pub fn position(&self, joint: &JointGeometry, radius: Option<f64>) -> Result<Vector3<f64>> {
        let section = joint.section(radius);
        let (u, w) = section.hole(self.face(joint)?);
        Ok(match joint.axis {
            JointAxis::Flexion => {
                Vector3::new(u, self.lateral.sign() * joint.lateral_spacing / 2.0, w)
            }
            JointAxis::Deviation => Vector3::new(self.side.sign() * joint.hole_offset, -u, w),
        })
    }
}

fn check_angle(joint: &JointGeometry, angle_deg: f64, label: &str) -> Result<()> {
    if angle_deg.is_finite() && joint.contains(angle_deg) {
        Ok(())
    } else {
        Err(Error::RomViolation(vec![RomViolation {
            joint: label.to_string(),
            angle_deg,
            min_deg: joint.rom_min,
            max_deg: joint.rom_max,
        }]))
    }
}

/// Length of the cable segment between two mirrored holes at `p` (in the
/// proximal frame) across a rolling joint, including the axial runs.
pub fn segment_length(radius: f64, axis: JointAxis, angle_deg: f64, p: &Vector3<f64>) -> f64 {
    let roll = roll_transform(radius, axis, angle_deg);
    let distal = Vector3::new(p.x, p.y, -p.z);
    (roll.transform_point(&distal) - p).norm() + 2.0 * p.z
}

/// Cable length across one joint for the given hole.
pub fn joint_cable_length(joint: &JointGeometry, angle_deg: f64, hole: CableHole) -> Result<f64> {
    check_angle(joint, angle_deg, joint.axis.name())?;
    let p = hole.position(joint, None)?;
    Ok(segment_length(joint.radius, joint.axis, angle_deg, &p))
}

/// Length changes of the closing-face and opening-face cables of a joint
/// relative to zero angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceDeviation {
    /// Flexor on flexion joints, ulnar on the deviation joint.
    pub closing: f64,
    /// Extensor on flexion joints, radial on the deviation joint.
    pub opening: f64,
}

impl FaceDeviation {
    pub fn sum(&self) -> f64 {
        self.closing + self.opening
    }
}

/// Per-side cable length change at `angle_deg`, optionally with an
/// overridden rolling radius.
pub fn cable_deviation(
    joint: &JointGeometry,
    angle_deg: f64,
    radius: Option<f64>,
) -> Result<FaceDeviation> {
    check_angle(joint, angle_deg, joint.axis.name())?;
    let s = joint.section(radius);
    Ok(section_deviation(&s, tol::rad(angle_deg)))
}

pub(crate) fn section_deviation(s: &JointSection, angle_rad: f64) -> FaceDeviation {
    let two_r = 2.0 * s.radius;
    FaceDeviation {
        closing: s.length(Face::Closing, angle_rad) - two_r,
        opening: s.length(Face::Opening, angle_rad) - two_r,
    }
}

/// One routed cable.
#[derive(Debug, Clone, PartialEq)]
pub struct TendonPath {
    pub name: &'static str,
    pub side: Side,
    pub lateral: Lateral,
    /// Traversed joints, proximal to distal, consecutive.
    pub joints: Vec<usize>,
    /// Link the cable terminates on.
    pub anchor_link: usize,
}

impl TendonPath {
    pub fn hole(&self) -> CableHole {
        CableHole::new(self.side, self.lateral)
    }
}

/// Two cables wound in opposite directions on one motor bobbin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TendonPair {
    pub name: &'static str,
    pub flexor: &'static str,
    pub extensor: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TendonRoutingPlan {
    pub tendons: Vec<TendonPath>,
    pub pairs: Vec<TendonPair>,
}

const PAIRS: [TendonPair; 3] = [
    TendonPair {
        name: "FU-ER",
        flexor: "FU",
        extensor: "ER",
    },
    TendonPair {
        name: "FR-EU",
        flexor: "FR",
        extensor: "EU",
    },
    TendonPair {
        name: "DF-DE",
        flexor: "DF",
        extensor: "DE",
    },
];

impl TendonRoutingPlan {
    /// Routing for a finger of the given kind.
    ///
    /// Fingers: the four base cables cross the deviation and MCP joints and
    /// anchor on the proximal phalanx; the distal pair crosses PIP and DIP
    /// through the center holes and anchors on the distal phalanx.
    /// Thumb: the base cables cross the CMC joints and the MCP joint and
    /// anchor on the proximal phalanx; the IP pair is independent.
    pub fn for_kind(kind: FingerKind) -> Self {
        let (base, base_anchor, distal) = match kind {
            FingerKind::Finger => (vec![0, 1], 1, vec![2, 3]),
            FingerKind::Thumb => (vec![0, 1, 2], 2, vec![3]),
        };
        let b = |name, side, lateral| TendonPath {
            name,
            side,
            lateral,
            joints: base.clone(),
            anchor_link: base_anchor,
        };
        let d = |name, side| TendonPath {
            name,
            side,
            lateral: Lateral::Center,
            joints: distal.clone(),
            anchor_link: 3,
        };
        Self {
            tendons: vec![
                b("FR", Side::Flexor, Lateral::Radial),
                b("FU", Side::Flexor, Lateral::Ulnar),
                b("ER", Side::Extensor, Lateral::Radial),
                b("EU", Side::Extensor, Lateral::Ulnar),
                d("DF", Side::Flexor),
                d("DE", Side::Extensor),
            ],
            pairs: PAIRS.to_vec(),
        }
    }

    pub fn tendon(&self, name: &str) -> Result<&TendonPath> {
        self.tendons
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::UnknownTendon(name.to_string()))
    }

    pub fn pair(&self, name: &str) -> Result<&TendonPair> {
        self.pairs
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::UnknownPair(name.to_string()))
    }
}

impl FingerModel {
    pub fn routing(&self) -> TendonRoutingPlan {
        TendonRoutingPlan::for_kind(self.kind)
    }
}

/// Pose-independent run inside the links between consecutive traversed
/// joints.
fn in_link_constant(finger: &FingerModel, path: &TendonPath) -> f64 {
    path.joints
        .windows(2)
        .map(|w| {
            let i = w[0];
            finger.links[i].length - finger.joints[i].radius - finger.joints[i + 1].radius
        })
        .sum()
}

fn path_length(finger: &FingerModel, angles: &FingerAngles, path: &TendonPath) -> Result<f64> {
    let labels = finger.joint_labels();
    let hole = path.hole();
    let mut total = in_link_constant(finger, path);
    for &j in &path.joints {
        let joint = &finger.joints[j];
        check_angle(joint, angles[j], labels[j])?;
        let p = hole.position(joint, None)?;
        total += segment_length(joint.radius, joint.axis, angles[j], &p);
    }
    Ok(total)
}

/// Total length of tendon `name` at `angles`.
pub fn tendon_length(finger: &FingerModel, angles: &FingerAngles, name: &str) -> Result<f64> {
    let plan = finger.routing();
    path_length(finger, angles, plan.tendon(name)?)
}

/// Length change of tendon `name` relative to the zero pose.
pub fn tendon_deviation(finger: &FingerModel, angles: &FingerAngles, name: &str) -> Result<f64> {
    let plan = finger.routing();
    let path = plan.tendon(name)?;
    Ok(path_length(finger, angles, path)? - path_length(finger, &FingerAngles::ZERO, path)?)
}

/// Summed deviation of the two cables of an antagonistic pair.
pub fn paired_deviation(finger: &FingerModel, angles: &FingerAngles, pair: &str) -> Result<f64> {
    let plan = finger.routing();
    let p = plan.pair(pair)?;
    Ok(tendon_deviation(finger, angles, p.flexor)? + tendon_deviation(finger, angles, p.extensor)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TendonState {
    pub name: &'static str,
    pub length: f64,
    pub deviation: f64,
}

/// Length and deviation of every tendon of a finger.
#[derive(Debug, Clone, PartialEq)]
pub struct CableState(pub Vec<TendonState>);

impl CableState {
    pub fn of(finger: &FingerModel, angles: &FingerAngles) -> Result<Self> {
        let plan = finger.routing();
        let mut out = Vec::with_capacity(plan.tendons.len());
        for t in &plan.tendons {
            let length = path_length(finger, angles, t)?;
            let zero = path_length(finger, &FingerAngles::ZERO, t)?;
            out.push(TendonState {
                name: t.name,
                length,
                deviation: length - zero,
            });
        }
        Ok(Self(out))
    }

    pub fn get(&self, name: &str) -> Result<&TendonState> {
        self.0
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::UnknownTendon(name.to_string()))
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Flexor => "flexor",
            Side::Extensor => "extensor",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index() -> FingerModel {
        FingerModel::design_finger()
    }

    #[test]
    fn zero_angle_is_two_r() {
        for f in [index(), FingerModel::design_thumb()] {
            for j in &f.joints {
                for side in [Side::Flexor, Side::Extensor] {
                    for lat in [Lateral::Radial, Lateral::Ulnar] {
                        let l = joint_cable_length(j, 0.0, CableHole::new(side, lat)).unwrap();
                        assert!((l - 2.0 * j.radius).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn transform_length_matches_section_formula() {
        let f = index();
        for (i, j) in f.joints.iter().enumerate() {
            let s = j.section(None);
            for a in [j.rom_min, j.rom_min / 2.0 + j.rom_max / 4.0, j.rom_max] {
                for lat in [Lateral::Radial, Lateral::Ulnar] {
                    for side in [Side::Flexor, Side::Extensor] {
                        let h = CableHole::new(side, lat);
                        let l = joint_cable_length(j, a, h).unwrap();
                        let expect = s.length(h.face(j).unwrap(), a.to_radians());
                        assert!((l - expect).abs() < 1e-9, "joint {i} angle {a}");
                    }
                }
            }
        }
    }

    #[test]
    fn flexor_shortens_monotonically() {
        let j = index().joints[1];
        let h = CableHole::new(Side::Flexor, Lateral::Center);
        let mut prev = f64::INFINITY;
        for k in 0..=200 {
            let a = k as f64 * 0.5;
            let l = joint_cable_length(&j, a, h).unwrap();
            assert!(l < prev || k == 0);
            prev = l;
        }
    }

    #[test]
    fn deviation_mirror_symmetry() {
        let j = index().joints[0];
        for a in [5.0, 12.5, 30.0] {
            let p = cable_deviation(&j, a, None).unwrap();
            let m = cable_deviation(&j, -a, None).unwrap();
            assert!((p.closing - m.opening).abs() < 1e-12);
            assert!((p.opening - m.closing).abs() < 1e-12);
        }
        let z = cable_deviation(&j, 0.0, None).unwrap();
        assert_eq!((z.closing, z.opening), (0.0, 0.0));
    }

    #[test]
    fn rom_violation_reported() {
        let j = index().joints[1];
        assert!(matches!(
            cable_deviation(&j, 101.0, None),
            Err(Error::RomViolation(_))
        ));
    }

    #[test]
    fn routing_tables() {
        let plan = TendonRoutingPlan::for_kind(FingerKind::Finger);
        assert_eq!(plan.tendons.len(), 6);
        assert_eq!(plan.pairs.len(), 3);
        assert_eq!(plan.tendon("FU").unwrap().joints, vec![0, 1]);
        assert_eq!(plan.tendon("DF").unwrap().joints, vec![2, 3]);
        assert_eq!(plan.pair("FU-ER").unwrap().extensor, "ER");
        assert!(matches!(plan.tendon("XX"), Err(Error::UnknownTendon(_))));
        assert!(matches!(plan.pair("FU-EU"), Err(Error::UnknownPair(_))));
        let thumb = TendonRoutingPlan::for_kind(FingerKind::Thumb);
        assert_eq!(thumb.tendon("ER").unwrap().joints, vec![0, 1, 2]);
        assert_eq!(thumb.tendon("DE").unwrap().joints, vec![3]);
    }

    #[test]
    fn zero_pose_tendon_lengths() {
        let f = index();
        let l = tendon_length(&f, &FingerAngles::ZERO, "FU").unwrap();
        let expect = 2.0 * 1.9 + 2.0 * 4.9 + (15.5 - 1.9 - 4.9);
        assert!((l - expect).abs() < 1e-12);
        let l = tendon_length(&f, &FingerAngles::ZERO, "DF").unwrap();
        let expect = 2.0 * 3.3 + 2.0 * 3.1 + (24.5 - 3.3 - 3.1);
        assert!((l - expect).abs() < 1e-12);
        let state = CableState::of(&f, &FingerAngles::ZERO).unwrap();
        assert!(state.0.iter().all(|t| t.deviation == 0.0));
    }

    #[test]
    fn distal_tendon_ignores_base_joints() {
        let f = index();
        let a = tendon_length(&f, &FingerAngles::new(0.0, 0.0, 40.0, 70.0), "DF").unwrap();
        let b = tendon_length(&f, &FingerAngles::new(-20.0, 80.0, 40.0, 70.0), "DF").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pure_flexion_moves_both_base_flexors_equally() {
        let f = index();
        let a = FingerAngles::new(0.0, 60.0, 0.0, 0.0);
        let fu = tendon_deviation(&f, &a, "FU").unwrap();
        let fr = tendon_deviation(&f, &a, "FR").unwrap();
        assert!((fu - fr).abs() < 1e-12);
        assert!(fu < -5.0);
        assert!(paired_deviation(&f, &a, "FU-ER").unwrap().abs() <= 0.05);
    }
}

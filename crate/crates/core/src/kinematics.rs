//! Forward kinematics of rolling-contact finger chains.
//!
//! A rolling joint of radius `r` turned by `θ` maps the proximal circle
//! center to the distal one by `Rot(θ/2) · Trans_z(2r) · Rot(θ/2)`: each
//! circle carries half of the relative rotation.

use nalgebra::Vector3;

use crate::error::{Error, Result, RomViolation};
use crate::geometry::{FingerAngles, FingerModel, FingerName, HandModel, JointAxis, Pose};
use crate::tol;
use crate::transform::RigidTransform;

/// Relative transform across one rolling joint.
pub fn roll_transform(radius: f64, axis: JointAxis, angle_deg: f64) -> RigidTransform {
    let half = tol::rad(angle_deg) / 2.0;
    let rot = match axis {
        JointAxis::Deviation => RigidTransform::rot_x(half),
        JointAxis::Flexion => RigidTransform::rot_y(half),
    };
    rot * RigidTransform::from_translation(0.0, 0.0, 2.0 * radius) * rot
}

/// Fixed transform along link `i` from its proximal rolling-circle center
/// to its distal one (or to the tip point for `i = 3`).
pub fn link_offset(finger: &FingerModel, i: usize) -> Result<RigidTransform> {
    let j = &finger.joints;
    let l = &finger.links;
    let (x, z) = match i {
        0 => (0.0, l[0].length - j[1].radius - j[0].radius),
        1 | 2 => (
            j[i + 1].center_offset() - j[i].center_offset(),
            l[i].length - j[i].radius - j[i + 1].radius,
        ),
        3 => (0.0, finger.tip_offset()),
        _ => {
            return Err(Error::InvalidGeometry(format!(
                "link index {i} out of range 0..=3"
            )))
        }
    };
    if z <= 0.0 {
        return Err(Error::InvalidGeometry(format!(
            "link {i} has non-positive length between rolling centers ({z} mm)"
        )));
    }
    Ok(RigidTransform::from_translation(x, 0.0, z))
}

/// How joint angles outside the ROM are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RomMode {
    /// Reject angles outside the ROM.
    #[default]
    Strict,
    /// Saturate angles to the ROM.
    Clamp,
    /// Accept any angle.
    Unchecked,
}

/// Checks `angles` against the finger's ROM, returning the (possibly
/// clamped) angles.
pub fn validate_rom(
    finger: &FingerModel,
    angles: &FingerAngles,
    mode: RomMode,
) -> Result<FingerAngles> {
    let labels = finger.joint_labels();
    match mode {
        RomMode::Unchecked => Ok(*angles),
        RomMode::Clamp => {
            let mut out = *angles;
            for (i, j) in finger.joints.iter().enumerate() {
                out[i] = j.clamp(out[i]);
            }
            Ok(out)
        }
        RomMode::Strict => {
            let mut violations = Vec::new();
            for (i, j) in finger.joints.iter().enumerate() {
                let a = angles[i];
                if !a.is_finite() || !j.contains(a) {
                    violations.push(RomViolation {
                        joint: labels[i].to_string(),
                        angle_deg: a,
                        min_deg: j.rom_min,
                        max_deg: j.rom_max,
                    });
                }
            }
            if violations.is_empty() {
                Ok(*angles)
            } else {
                Err(Error::RomViolation(violations))
            }
        }
    }
}

pub const FRAME_NAMES: [&str; 8] = ["J0", "L0", "J1", "L1", "J2", "L2", "J3", "tip"];

/// Frames `J0, L0, J1, L1, J2, L2, J3, tip` in finger-origin coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerFrames(pub [RigidTransform; 8]);

impl FingerFrames {
    pub fn tip(&self) -> &RigidTransform {
        &self.0[7]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &RigidTransform)> {
        FRAME_NAMES.iter().copied().zip(self.0.iter())
    }
}

/// A finger with its link offsets resolved, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct FingerChain {
    radii: [f64; 4],
    offsets: [RigidTransform; 4],
}

impl FingerChain {
    pub fn new(finger: &FingerModel) -> Result<Self> {
        let offsets = [
            link_offset(finger, 0)?,
            link_offset(finger, 1)?,
            link_offset(finger, 2)?,
            link_offset(finger, 3)?,
        ];
        Ok(Self {
            radii: finger.joints.map(|j| j.radius),
            offsets,
        })
    }

    pub fn offsets(&self) -> &[RigidTransform; 4] {
        &self.offsets
    }

    pub fn radii(&self) -> &[f64; 4] {
        &self.radii
    }

    pub fn frames(&self, angles: &FingerAngles) -> FingerFrames {
        let mut frames = [RigidTransform::identity(); 8];
        let mut cur = RigidTransform::identity();
        for i in 0..4 {
            let axis = if i == 0 {
                JointAxis::Deviation
            } else {
                JointAxis::Flexion
            };
            cur = cur * roll_transform(self.radii[i], axis, angles[i]);
            frames[2 * i] = cur;
            cur = cur * self.offsets[i];
            frames[2 * i + 1] = cur;
        }
        FingerFrames(frames)
    }

    pub fn tip(&self, angles: &FingerAngles) -> Vector3<f64> {
        self.frames(angles).tip().translation
    }
}

/// Forward kinematics of a single finger in its origin frame.
pub fn finger_fk(
    finger: &FingerModel,
    angles: &FingerAngles,
    mode: RomMode,
) -> Result<FingerFrames> {
    let angles = validate_rom(finger, angles, mode)?;
    Ok(FingerChain::new(finger)?.frames(&angles))
}

/// Fingertip frames of all five fingers in palm coordinates.
pub fn hand_fk(hand: &HandModel, pose: &Pose, mode: RomMode) -> Result<[RigidTransform; 5]> {
    let mut out = [RigidTransform::identity(); 5];
    for name in FingerName::ALL {
        let frames = finger_fk(hand.finger(name), pose.finger(name), mode)?;
        out[name.index()] = hand.placement(name).compose(frames.tip());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index() -> FingerModel {
        FingerModel::design_finger()
    }

    #[test]
    fn roll_zero_angle_is_translation() {
        let t = roll_transform(5.0, JointAxis::Flexion, 0.0);
        assert!(t.max_abs_diff(&RigidTransform::from_translation(0.0, 0.0, 10.0)) < 1e-12);
    }

    #[test]
    fn roll_zero_radius_is_rotation() {
        let t = roll_transform(0.0, JointAxis::Flexion, 30.0);
        let expect = RigidTransform::rot_y(30f64.to_radians());
        assert!(t.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn roll_hundred_degrees() {
        let t = roll_transform(4.9, JointAxis::Flexion, 100.0);
        let (s, c) = 50f64.to_radians().sin_cos();
        assert!((t.translation - Vector3::new(9.8 * s, 0.0, 9.8 * c)).norm() < 1e-12);
        assert!((t.translation.x - 7.507).abs() < 5e-4);
        assert!((t.translation.z - 6.2993).abs() < 5e-4);
        let r = RigidTransform::rot_y(100f64.to_radians());
        assert!((t.rotation - r.rotation).abs().max() < 1e-12);
    }

    #[test]
    fn link_offsets_index() {
        let f = index();
        let t0 = link_offset(&f, 0).unwrap();
        assert!((t0.translation - Vector3::new(0.0, 0.0, 8.7)).norm() < 1e-12);
        let t1 = link_offset(&f, 1).unwrap();
        let tan = 25f64.to_radians().tan();
        let x = (8.7 - 3.3 * tan) - (12.7 - 4.9 * tan);
        assert!((t1.translation.x - x).abs() < 1e-12);
        assert!((t1.translation.x + 3.254).abs() < 5e-4);
        assert!((t1.translation.z - 34.3).abs() < 1e-12);
        let t3 = link_offset(&f, 3).unwrap();
        assert!((t3.translation.z - (24.5 - 3.1)).abs() < 1e-12);
        assert!(link_offset(&f, 4).is_err());
    }

    #[test]
    fn degenerate_link_rejected() {
        let mut f = index();
        f.links[1].length = f.joints[1].radius + f.joints[2].radius;
        assert!(matches!(link_offset(&f, 1), Err(Error::InvalidGeometry(_))));
        assert!(finger_fk(&f, &FingerAngles::ZERO, RomMode::Strict).is_err());
    }

    #[test]
    fn rom_checks() {
        let f = index();
        assert!(validate_rom(&f, &FingerAngles::new(0.0, 0.0, 50.0, 0.0), RomMode::Strict).is_ok());
        let e =
            validate_rom(&f, &FingerAngles::new(31.0, 0.0, 0.0, 0.0), RomMode::Strict).unwrap_err();
        match e {
            Error::RomViolation(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].joint, "MCP-dev");
            }
            other => panic!("{other:?}"),
        }
        let thumb = FingerModel::design_thumb();
        let c = validate_rom(
            &thumb,
            &FingerAngles::new(60.0, -5.0, 120.0, 10.0),
            RomMode::Clamp,
        )
        .unwrap();
        assert_eq!(c.0, [45.0, 0.0, 100.0, 10.0]);
        assert!(validate_rom(
            &f,
            &FingerAngles::new(f64::NAN, 0.0, 0.0, 0.0),
            RomMode::Strict
        )
        .is_err());
    }

    #[test]
    fn zero_pose_frames_are_unrotated_and_planar() {
        for f in [index(), FingerModel::design_thumb()] {
            let frames = finger_fk(&f, &FingerAngles::ZERO, RomMode::Strict).unwrap();
            for (_, fr) in frames.iter() {
                assert!((fr.rotation - nalgebra::Matrix3::identity()).abs().max() < 1e-12);
                assert!(fr.translation.y.abs() < 1e-12);
            }
            let j3 = frames.0[6].translation.z;
            let j = &f.joints;
            let l = &f.links;
            let expect: f64 = (0..3)
                .map(|i| l[i].length - j[i].radius + j[i + 1].radius)
                .sum::<f64>()
                + 2.0 * j[0].radius;
            assert!((j3 - expect).abs() < 1e-9, "{j3} vs {expect}");
        }
    }

    #[test]
    fn deviation_keeps_tip_x() {
        let f = FingerModel::design_thumb();
        let zero = finger_fk(&f, &FingerAngles::ZERO, RomMode::Strict).unwrap();
        let dev = finger_fk(&f, &FingerAngles::new(45.0, 0.0, 0.0, 0.0), RomMode::Strict).unwrap();
        assert!((zero.tip().translation.x - dev.tip().translation.x).abs() < 1e-9);
        assert!((dev.tip().translation.y).abs() > 1.0);
    }

    #[test]
    fn small_perturbation_small_motion() {
        let f = index();
        let chain = FingerChain::new(&f).unwrap();
        let base = FingerAngles::new(10.0, 40.0, 60.0, 30.0);
        let p0 = chain.tip(&base);
        for i in 0..4 {
            let mut a = base;
            a[i] += 1e-6;
            assert!((chain.tip(&a) - p0).norm() < 1e-4);
        }
    }
}

//! Parametric description of rolling-contact-joint fingers and the hand.
//!
//! Every finger is a four-joint chain: a radial-ulnar deviation joint
//! (rotation about local X) followed by three flexion-extension joints
//! (rotation about local Y). Frames follow one convention throughout:
//! `z` runs distally along the link, `x` points toward the palmar side,
//! `y` completes a right-handed frame.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::section::JointSection;
use crate::tol;
use crate::transform::RigidTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JointAxis {
    /// Radial-ulnar deviation, rotation about local X.
    Deviation,
    /// Flexion-extension, rotation about local Y.
    Flexion,
}

impl JointAxis {
    pub fn name(self) -> &'static str {
        match self {
            JointAxis::Deviation => "deviation",
            JointAxis::Flexion => "flexion",
        }
    }
}

/// Rolling parameters of one joint. Lengths in mm, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointGeometry {
    pub axis: JointAxis,
    /// Rolling radius `r`.
    pub radius: f64,
    /// Flexion-extension hole distance `κ` from the virtual pivot.
    pub hole_offset: f64,
    /// Radial-ulnar hole spacing `γ`.
    pub lateral_spacing: f64,
    /// `β` for flexion joints (half the ROM), `α` for the deviation joint
    /// (a quarter of the ROM).
    pub surface_angle: f64,
    pub rom_min: f64,
    pub rom_max: f64,
}

impl JointGeometry {
    /// Flexion joint with ROM `[0, 2β]`.
    pub fn flexion(radius: f64, kappa: f64, gamma: f64, beta_deg: f64) -> Self {
        Self {
            axis: JointAxis::Flexion,
            radius,
            hole_offset: kappa,
            lateral_spacing: gamma,
            surface_angle: beta_deg,
            rom_min: 0.0,
            rom_max: 2.0 * beta_deg,
        }
    }

    /// Deviation joint with symmetric ROM `[-2α, 2α]`.
    pub fn deviation(radius: f64, kappa: f64, gamma: f64, alpha_deg: f64) -> Self {
        Self {
            axis: JointAxis::Deviation,
            radius,
            hole_offset: kappa,
            lateral_spacing: gamma,
            surface_angle: alpha_deg,
            rom_min: -2.0 * alpha_deg,
            rom_max: 2.0 * alpha_deg,
        }
    }

    /// Distance from the virtual pivot to the holes that act across this
    /// joint: `κ` for flexion, `γ` for deviation.
    pub fn moment_arm(&self) -> f64 {
        match self.axis {
            JointAxis::Flexion => self.hole_offset,
            JointAxis::Deviation => self.lateral_spacing,
        }
    }

    /// Offset of the rolling-circle center from the straight extensor line,
    /// `κ − r·tan(β/2)`. Zero for the deviation joint, whose wedge is
    /// symmetric about the link axis.
    pub fn center_offset(&self) -> f64 {
        match self.axis {
            JointAxis::Flexion => {
                self.hole_offset - self.radius * (tol::rad(self.surface_angle) / 2.0).tan()
            }
            JointAxis::Deviation => 0.0,
        }
    }

    pub fn contains(&self, angle_deg: f64) -> bool {
        angle_deg >= self.rom_min - tol::GEOMETRIC && angle_deg <= self.rom_max + tol::GEOMETRIC
    }

    pub fn clamp(&self, angle_deg: f64) -> f64 {
        angle_deg.clamp(self.rom_min, self.rom_max)
    }

    /// Wedge profile used for hole placement, optionally with an overridden
    /// rolling radius.
    pub fn section(&self, radius: Option<f64>) -> JointSection {
        JointSection::from_rom(
            radius.unwrap_or(self.radius),
            self.moment_arm(),
            self.rom_min,
            self.rom_max,
        )
    }

    pub fn validate(&self, label: &str) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(format!("{label}: {msg}")));
        for (name, v) in [
            ("r", self.radius),
            ("kappa", self.hole_offset),
            ("gamma", self.lateral_spacing),
            ("surface angle", self.surface_angle),
            ("rom_min", self.rom_min),
            ("rom_max", self.rom_max),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.radius <= 0.0 {
            return bad("r > 0 required".into());
        }
        if self.hole_offset <= 0.0 {
            return bad("kappa > 0 required".into());
        }
        if self.lateral_spacing <= 0.0 {
            return bad("gamma > 0 required".into());
        }
        if self.radius >= self.hole_offset {
            return bad(format!(
                "r < kappa required (r = {}, kappa = {})",
                self.radius, self.hole_offset
            ));
        }
        if self.surface_angle < 0.0 {
            return bad("surface angle must be non-negative".into());
        }
        if self.rom_min > self.rom_max {
            return bad("rom_min <= rom_max required".into());
        }
        let span = self.rom_max - self.rom_min;
        match self.axis {
            JointAxis::Flexion => {
                if !tol::close(span, 2.0 * self.surface_angle, tol::GEOMETRIC) {
                    return bad(format!(
                        "flexion ROM span {span} deg must equal 2*beta = {} deg",
                        2.0 * self.surface_angle
                    ));
                }
                if !self.contains(0.0) {
                    return bad("flexion ROM must contain the straight pose".into());
                }
            }
            JointAxis::Deviation => {
                if !tol::close(span, 4.0 * self.surface_angle, tol::GEOMETRIC) {
                    return bad(format!(
                        "deviation ROM span {span} deg must equal 4*alpha = {} deg",
                        4.0 * self.surface_angle
                    ));
                }
                if !tol::close(self.rom_min, -self.rom_max, tol::GEOMETRIC) {
                    return bad("deviation ROM must be symmetric (rom_min = -rom_max)".into());
                }
            }
        }
        self.section(None).validate(label)
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            radius: self.radius * s,
            hole_offset: self.hole_offset * s,
            lateral_spacing: self.lateral_spacing * s,
            ..*self
        }
    }
}

/// Link dimensions in mm. The widths only describe solid geometry and are
/// carried through for validation and serialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub length: f64,
    pub width_g: Option<f64>,
    pub width_k: Option<f64>,
    /// Distance from the last rolling-circle center to the fingertip point;
    /// only meaningful on the distal phalanx. Defaults to `l − r`.
    pub tip_offset: Option<f64>,
}

impl LinkGeometry {
    pub fn new(length: f64) -> Self {
        Self {
            length,
            width_g: None,
            width_k: None,
            tip_offset: None,
        }
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            length: self.length * s,
            width_g: self.width_g.map(|w| w * s),
            width_k: self.width_k.map(|w| w * s),
            tip_offset: self.tip_offset.map(|t| t * s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FingerKind {
    Thumb,
    Finger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FingerName {
    Thumb,
    Index,
    Middle,
    Ring,
    Little,
}

impl FingerName {
    pub const ALL: [FingerName; 5] = [
        FingerName::Thumb,
        FingerName::Index,
        FingerName::Middle,
        FingerName::Ring,
        FingerName::Little,
    ];

    pub const OPPOSED: [FingerName; 4] = [
        FingerName::Index,
        FingerName::Middle,
        FingerName::Ring,
        FingerName::Little,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FingerName::Thumb => "thumb",
            FingerName::Index => "index",
            FingerName::Middle => "middle",
            FingerName::Ring => "ring",
            FingerName::Little => "little",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn kind(self) -> FingerKind {
        match self {
            FingerName::Thumb => FingerKind::Thumb,
            _ => FingerKind::Finger,
        }
    }
}

impl fmt::Display for FingerName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FingerName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FingerName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown finger `{s}`")))
    }
}

/// A four-joint rolling-contact finger.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerModel {
    pub kind: FingerKind,
    pub joints: [JointGeometry; 4],
    pub links: [LinkGeometry; 4],
}

pub const JOINT_LABELS_FINGER: [&str; 4] = ["MCP-dev", "MCP", "PIP", "DIP"];
pub const JOINT_LABELS_THUMB: [&str; 4] = ["CMC-dev", "CMC", "MCP", "IP"];

impl FingerModel {
    /// Design values of the thumb.
    pub fn design_thumb() -> Self {
        Self {
            kind: FingerKind::Thumb,
            joints: [
                JointGeometry::deviation(3.4, 9.1, 9.5, 22.5),
                JointGeometry::flexion(4.5, 11.7, 9.5, 50.0),
                JointGeometry::flexion(3.9, 10.2, 8.2, 50.0),
                JointGeometry::flexion(3.3, 8.7, 7.5, 50.0),
            ],
            links: [16.0, 35.0, 27.5, 27.5].map(LinkGeometry::new),
        }
    }

    /// Design values shared by the index, middle, ring and little fingers.
    pub fn design_finger() -> Self {
        Self {
            kind: FingerKind::Finger,
            joints: [
                JointGeometry::deviation(1.9, 9.5, 7.5, 15.0),
                JointGeometry::flexion(4.9, 12.7, 7.5, 50.0),
                JointGeometry::flexion(3.3, 8.7, 6.5, 50.0),
                JointGeometry::flexion(3.1, 8.2, 6.0, 50.0),
            ],
            links: [15.5, 42.5, 24.5, 24.5].map(LinkGeometry::new),
        }
    }

    pub fn design(kind: FingerKind) -> Self {
        match kind {
            FingerKind::Thumb => Self::design_thumb(),
            FingerKind::Finger => Self::design_finger(),
        }
    }

    pub fn joint_labels(&self) -> [&'static str; 4] {
        match self.kind {
            FingerKind::Thumb => JOINT_LABELS_THUMB,
            FingerKind::Finger => JOINT_LABELS_FINGER,
        }
    }

    /// Distance from the distal rolling-circle center to the tip point.
    pub fn tip_offset(&self) -> f64 {
        self.links[3]
            .tip_offset
            .unwrap_or(self.links[3].length - self.joints[3].radius)
    }

    /// Sum of phalanx lengths.
    pub fn total_length(&self) -> f64 {
        self.links.iter().map(|l| l.length).sum()
    }

    /// Uniformly scaled copy: lengths multiply by `s`, angles unchanged.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            kind: self.kind,
            joints: self.joints.map(|j| j.scaled(s)),
            links: self.links.map(|l| l.scaled(s)),
        }
    }

    pub fn validate(&self, label: &str) -> Result<()> {
        if self.joints[0].axis != JointAxis::Deviation {
            return Err(Error::Validation(format!(
                "{label}: joint 0 must be a deviation joint"
            )));
        }
        for (i, j) in self.joints.iter().enumerate().skip(1) {
            if j.axis != JointAxis::Flexion {
                return Err(Error::Validation(format!(
                    "{label}: joint {i} must be a flexion joint"
                )));
            }
        }
        let names = self.joint_labels();
        for (j, name) in self.joints.iter().zip(names) {
            j.validate(&format!("{label} {name}"))?;
        }
        for (i, l) in self.links.iter().enumerate() {
            if !(l.length.is_finite() && l.length > 0.0) {
                return Err(Error::Validation(format!(
                    "{label}: link {i} length l > 0 required"
                )));
            }
            for w in [l.width_g, l.width_k].into_iter().flatten() {
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::Validation(format!(
                        "{label}: link {i} widths must be positive"
                    )));
                }
            }
        }
        for i in 0..3 {
            let need = self.joints[i].radius + self.joints[i + 1].radius;
            if self.links[i].length <= need {
                return Err(Error::InvalidGeometry(format!(
                    "{label}: link {i} length {} must exceed r_{i} + r_{} = {need}",
                    self.links[i].length,
                    i + 1
                )));
            }
        }
        if self.tip_offset() <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "{label}: tip offset must be positive"
            )));
        }
        for i in 1..3 {
            let (a, b) = (&self.links[i], &self.links[i + 1]);
            if let (Some(g0), Some(g1)) = (a.width_g, b.width_g) {
                if g1 > g0 + tol::GEOMETRIC {
                    return Err(Error::Validation(format!(
                        "{label}: width G must taper distally (G_{} = {g1} > G_{i} = {g0})",
                        i + 1
                    )));
                }
            }
            if let (Some(k0), Some(k1)) = (a.width_k, b.width_k) {
                if k1 > k0 + tol::GEOMETRIC {
                    return Err(Error::Validation(format!(
                        "{label}: width K must taper distally (K_{} = {k1} > K_{i} = {k0})",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Five fingers and their placements in the palm frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HandModel {
    pub fingers: [FingerModel; 5],
    /// Palm frame → finger origin (proximal rolling-circle center of the
    /// deviation joint).
    pub placements: [RigidTransform; 5],
    /// Thumb length `d` used to normalize the opposability index.
    pub thumb_length: f64,
}

impl HandModel {
    pub fn new(fingers: [FingerModel; 5], placements: [RigidTransform; 5]) -> Self {
        let thumb_length = fingers[0].total_length();
        Self {
            fingers,
            placements,
            thumb_length,
        }
    }

    pub fn finger(&self, name: FingerName) -> &FingerModel {
        &self.fingers[name.index()]
    }

    pub fn placement(&self, name: FingerName) -> &RigidTransform {
        &self.placements[name.index()]
    }

    /// Uniform geometric scaling of every length, including placements and
    /// thumb length.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            fingers: self.fingers.clone().map(|f| f.scaled(s)),
            placements: self.placements.map(|p| p.scaled(s)),
            thumb_length: self.thumb_length * s,
        }
    }

    /// The same hand carried by a rigid motion of the palm.
    pub fn transformed(&self, x: &RigidTransform) -> Self {
        Self {
            fingers: self.fingers.clone(),
            placements: self.placements.map(|p| x.compose(&p)),
            thumb_length: self.thumb_length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for name in FingerName::ALL {
            let f = self.finger(name);
            if f.kind != name.kind() {
                return Err(Error::Validation(format!(
                    "{name}: finger kind must be {:?}",
                    name.kind()
                )));
            }
            f.validate(name.as_str())?;
            if !self.placement(name).is_rigid(tol::GEOMETRIC) {
                return Err(Error::Validation(format!(
                    "{name}: placement is not a rigid transform"
                )));
            }
        }
        if !(self.thumb_length.is_finite() && self.thumb_length > 0.0) {
            return Err(Error::Validation("thumb length d > 0 required".into()));
        }
        Ok(())
    }
}

/// Joint angles of one finger in degrees: deviation `φ0`, then flexion
/// `θ1..θ3`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FingerAngles(pub [f64; 4]);

impl FingerAngles {
    pub const ZERO: FingerAngles = FingerAngles([0.0; 4]);

    pub fn new(deviation: f64, t1: f64, t2: f64, t3: f64) -> Self {
        Self([deviation, t1, t2, t3])
    }

    pub fn deviation(&self) -> f64 {
        self.0[0]
    }

    /// Exact at both ends: `s = 0` gives `self`, `s = 1` gives `other`.
    pub fn lerp(&self, other: &FingerAngles, s: f64) -> FingerAngles {
        let mut out = [0.0; 4];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = if a == b { *a } else { a * (1.0 - s) + b * s };
        }
        FingerAngles(out)
    }
}

impl std::ops::Index<usize> for FingerAngles {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for FingerAngles {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Whole-hand joint configuration, indexed by [`FingerName`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose(pub [FingerAngles; 5]);

impl Pose {
    pub const ZERO: Pose = Pose([FingerAngles::ZERO; 5]);

    pub fn finger(&self, name: FingerName) -> &FingerAngles {
        &self.0[name.index()]
    }

    pub fn finger_mut(&mut self, name: FingerName) -> &mut FingerAngles {
        &mut self.0[name.index()]
    }

    pub fn lerp(&self, other: &Pose, s: f64) -> Pose {
        let mut out = Pose::ZERO;
        for i in 0..5 {
            out.0[i] = self.0[i].lerp(&other.0[i], s);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn design_models_validate() {
        FingerModel::design_thumb().validate("thumb").unwrap();
        FingerModel::design_finger().validate("index").unwrap();
    }

    #[test]
    fn rom_relations_hold_exactly() {
        for f in [
            FingerModel::design_thumb(),
            FingerModel::design_finger(),
        ] {
            let dev = &f.joints[0];
            assert_eq!(dev.rom_max - dev.rom_min, 4.0 * dev.surface_angle);
            assert_eq!(dev.rom_min, -dev.rom_max);
            for j in &f.joints[1..] {
                assert_eq!(j.rom_max - j.rom_min, 2.0 * j.surface_angle);
                assert_eq!((j.rom_min, j.rom_max), (0.0, 100.0));
            }
        }
        assert_eq!(FingerModel::design_thumb().joints[0].rom_max, 45.0);
        assert_eq!(FingerModel::design_finger().joints[0].rom_max, 30.0);
    }

    #[test]
    fn thumb_length_is_106() {
        assert_eq!(FingerModel::design_thumb().total_length(), 106.0);
    }

    #[test]
    fn rejects_bad_joint() {
        let mut f = FingerModel::design_finger();
        f.joints[1].radius = -1.0;
        let e = f.validate("index").unwrap_err();
        assert!(e.to_string().contains("r > 0"), "{e}");

        let mut f = FingerModel::design_finger();
        f.joints[1].rom_max = 90.0;
        let e = f.validate("index").unwrap_err();
        assert!(e.to_string().contains("2*beta"), "{e}");

        let mut f = FingerModel::design_finger();
        f.joints[0].rom_min = -20.0;
        f.joints[0].rom_max = 40.0;
        assert!(f.validate("index").is_err());

        let mut f = FingerModel::design_finger();
        f.joints[2].radius = 9.0;
        assert!(f
            .validate("index")
            .unwrap_err()
            .to_string()
            .contains("r < kappa"));
    }

    #[test]
    fn rejects_short_link_and_widening() {
        let mut f = FingerModel::design_finger();
        f.links[1].length = f.joints[1].radius + f.joints[2].radius;
        assert!(matches!(
            f.validate("index"),
            Err(Error::InvalidGeometry(_))
        ));

        let mut f = FingerModel::design_finger();
        f.links[1].width_g = Some(10.0);
        f.links[2].width_g = Some(11.0);
        assert!(f
            .validate("index")
            .unwrap_err()
            .to_string()
            .contains("taper"));
    }

    #[test]
    fn finger_names_parse() {
        for n in FingerName::ALL {
            assert_eq!(n.as_str().parse::<FingerName>().unwrap(), n);
        }
        assert!("pinky".parse::<FingerName>().is_err());
    }
}

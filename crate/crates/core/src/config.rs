//! Hand configuration documents (TOML).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::actuation::ActuatorConfig;
use crate::error::{Error, Result};
use crate::geometry::{
    FingerAngles, FingerKind, FingerModel, FingerName, HandModel, JointAxis, JointGeometry,
    LinkGeometry, Pose,
};
use crate::presets::PresetCatalog;
use crate::transform::RigidTransform;

pub const CONFIG_VERSION: u32 = 1;

/// The shipped default configuration.
pub const DEFAULT_CONFIG: &str = include_str!("../data/default_hand.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointDoc {
    pub axis: JointAxis,
    pub r: f64,
    pub kappa: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub rom: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub l: f64,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tip_offset: Option<f64>,
}

/// Finger placement as translation (mm) and axis-angle rotation (deg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub translation: [f64; 3],
    pub axis: [f64; 3],
    pub angle_deg: f64,
}

impl Placement {
    pub const IDENTITY: Placement = Placement {
        translation: [0.0; 3],
        axis: [0.0, 0.0, 1.0],
        angle_deg: 0.0,
    };

    pub fn transform(&self) -> Result<RigidTransform> {
        if self
            .translation
            .iter()
            .chain(&self.axis)
            .any(|v| !v.is_finite())
            || !self.angle_deg.is_finite()
        {
            return Err(Error::Validation("placement values must be finite".into()));
        }
        let t = Vector3::from(self.translation);
        RigidTransform::from_axis_angle_deg(Vector3::from(self.axis), self.angle_deg)
            .map(|r| r.with_translation(t))
            .ok_or_else(|| Error::Validation("placement axis must be non-zero".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerDoc {
    pub kind: FingerKind,
    pub placement: Placement,
    pub joints: [JointDoc; 4],
    pub links: [LinkDoc; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingersDoc {
    pub thumb: FingerDoc,
    pub index: FingerDoc,
    pub middle: FingerDoc,
    pub ring: FingerDoc,
    pub little: FingerDoc,
}

impl FingersDoc {
    fn get(&self, f: FingerName) -> &FingerDoc {
        match f {
            FingerName::Thumb => &self.thumb,
            FingerName::Index => &self.index,
            FingerName::Middle => &self.middle,
            FingerName::Ring => &self.ring,
            FingerName::Little => &self.little,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseDoc {
    pub thumb: [f64; 4],
    pub index: [f64; 4],
    pub middle: [f64; 4],
    pub ring: [f64; 4],
    pub little: [f64; 4],
}

impl From<&PoseDoc> for Pose {
    fn from(d: &PoseDoc) -> Self {
        Pose([d.thumb, d.index, d.middle, d.ring, d.little].map(FingerAngles))
    }
}

impl From<&Pose> for PoseDoc {
    fn from(p: &Pose) -> Self {
        let a = p.0.map(|f| f.0);
        PoseDoc {
            thumb: a[0],
            index: a[1],
            middle: a[2],
            ring: a[3],
            little: a[4],
        }
    }
}

/// On-disk layout of a hand configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandConfigDocument {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thumb_length: Option<f64>,
    pub actuator: ActuatorConfig,
    pub fingers: FingersDoc,
    #[serde(default)]
    pub presets: BTreeMap<String, PoseDoc>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct HandConfig {
    pub hand: HandModel,
    pub placements: [Placement; 5],
    /// Explicit thumb length, when the document overrides `Σ l`.
    pub thumb_length: Option<f64>,
    pub actuator: ActuatorConfig,
    pub presets: PresetCatalog,
}

fn joint_from_doc(d: &JointDoc, label: &str) -> Result<JointGeometry> {
    let surface = match (d.axis, d.beta, d.alpha) {
        (JointAxis::Flexion, Some(b), None) => b,
        (JointAxis::Deviation, None, Some(a)) => a,
        (JointAxis::Flexion, _, _) => {
            return Err(Error::Validation(format!(
                "{label}: flexion joints take `beta` and no `alpha`"
            )))
        }
        (JointAxis::Deviation, _, _) => {
            return Err(Error::Validation(format!(
                "{label}: deviation joints take `alpha` and no `beta`"
            )))
        }
    };
    Ok(JointGeometry {
        axis: d.axis,
        radius: d.r,
        hole_offset: d.kappa,
        lateral_spacing: d.gamma,
        surface_angle: surface,
        rom_min: d.rom[0],
        rom_max: d.rom[1],
    })
}

fn joint_to_doc(j: &JointGeometry) -> JointDoc {
    let (beta, alpha) = match j.axis {
        JointAxis::Flexion => (Some(j.surface_angle), None),
        JointAxis::Deviation => (None, Some(j.surface_angle)),
    };
    JointDoc {
        axis: j.axis,
        r: j.radius,
        kappa: j.hole_offset,
        gamma: j.lateral_spacing,
        beta,
        alpha,
        rom: [j.rom_min, j.rom_max],
    }
}

fn finger_from_doc(d: &FingerDoc, name: FingerName) -> Result<FingerModel> {
    let labels = match d.kind {
        FingerKind::Thumb => crate::geometry::JOINT_LABELS_THUMB,
        FingerKind::Finger => crate::geometry::JOINT_LABELS_FINGER,
    };
    let mut joints = Vec::with_capacity(4);
    for (j, label) in d.joints.iter().zip(labels) {
        joints.push(joint_from_doc(j, &format!("{name} {label}"))?);
    }
    Ok(FingerModel {
        kind: d.kind,
        joints: joints.try_into().expect("four joints"),
        links: d.links.clone().map(|l| LinkGeometry {
            length: l.l,
            width_g: l.g,
            width_k: l.k,
            tip_offset: l.tip_offset,
        }),
    })
}

fn finger_to_doc(f: &FingerModel, placement: Placement) -> FingerDoc {
    FingerDoc {
        kind: f.kind,
        placement,
        joints: f.joints.map(|j| joint_to_doc(&j)),
        links: f.links.map(|l| LinkDoc {
            l: l.length,
            g: l.width_g,
            k: l.width_k,
            tip_offset: l.tip_offset,
        }),
    }
}

impl HandConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))
    }

    /// Canonical text form.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn into_config(self) -> Result<HandConfig> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Validation(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        let mut fingers = Vec::with_capacity(5);
        let mut placements = [Placement::IDENTITY; 5];
        let mut transforms = [RigidTransform::identity(); 5];
        for name in FingerName::ALL {
            let d = self.fingers.get(name);
            fingers.push(finger_from_doc(d, name)?);
            placements[name.index()] = d.placement;
            transforms[name.index()] = d
                .placement
                .transform()
                .map_err(|e| Error::Validation(format!("{name} placement: {e}")))?;
        }
        let mut hand = HandModel::new(fingers.try_into().expect("five fingers"), transforms);
        if let Some(d) = self.thumb_length {
            hand.thumb_length = d;
        }
        hand.validate()?;
        self.actuator.validate()?;
        let presets = PresetCatalog(
            self.presets
                .iter()
                .map(|(k, v)| (k.clone(), Pose::from(v)))
                .collect(),
        );
        presets.validate(&hand, &self.actuator)?;
        Ok(HandConfig {
            hand,
            placements,
            thumb_length: self.thumb_length,
            actuator: self.actuator,
            presets,
        })
    }
}

impl HandConfig {
    pub fn to_document(&self) -> HandConfigDocument {
        let f = |n: FingerName| finger_to_doc(self.hand.finger(n), self.placements[n.index()]);
        HandConfigDocument {
            version: CONFIG_VERSION,
            thumb_length: self.thumb_length,
            actuator: self.actuator,
            fingers: FingersDoc {
                thumb: f(FingerName::Thumb),
                index: f(FingerName::Index),
                middle: f(FingerName::Middle),
                ring: f(FingerName::Ring),
                little: f(FingerName::Little),
            },
            presets: self
                .presets
                .0
                .iter()
                .map(|(k, v)| (k.clone(), PoseDoc::from(v)))
                .collect(),
        }
    }

    /// SHA-256 of the canonical document text, lowercase hex.
    pub fn digest(&self) -> Result<String> {
        let text = self.to_document().to_toml()?;
        Ok(Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }
}

pub fn parse_config(text: &str) -> Result<HandConfig> {
    HandConfigDocument::parse(text)?.into_config()
}

pub fn default_config() -> HandConfig {
    parse_config(DEFAULT_CONFIG).expect("shipped default config is valid")
}

pub fn load_config(path: &Path) -> Result<HandConfig> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn save_config(config: &HandConfig, path: &Path) -> Result<()> {
    let text = config.to_document().to_toml()?;
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

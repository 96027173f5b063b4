//! Named hand postures.

use std::collections::BTreeMap;

use crate::actuation::{ActuatorConfig, COUPLING_TOLERANCE_DEG};
use crate::error::{Error, Result};
use crate::geometry::{FingerName, HandModel, Pose};
use crate::kinematics::{validate_rom, RomMode};

/// Grasp classes of the Cutkosky taxonomy plus three gestures.
pub const STANDARD_PRESETS: [&str; 19] = [
    "large-heavy-wrap",
    "small-heavy-wrap",
    "medium-wrap",
    "adducted-thumb",
    "light-tool",
    "thumb-4-fingers",
    "thumb-3-fingers",
    "thumb-2-fingers",
    "thumb-index",
    "power-disk",
    "power-sphere",
    "precision-disk",
    "precision-sphere",
    "tripod",
    "platform-push",
    "lateral-pinch",
    "open",
    "close",
    "pinch",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PresetCatalog(pub BTreeMap<String, Pose>);

impl PresetCatalog {
    pub fn get(&self, name: &str) -> Result<Pose> {
        self.0
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownPreset(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every preset must be inside the ROM and respect the coupling of
    /// the underactuated joints.
    pub fn validate(&self, hand: &HandModel, actuator: &ActuatorConfig) -> Result<()> {
        for (name, pose) in &self.0 {
            for f in FingerName::ALL {
                let finger = hand.finger(f);
                validate_rom(finger, pose.finger(f), RomMode::Strict)
                    .map_err(|e| Error::Validation(format!("preset `{name}` {f}: {e}")))?;
            }
            let coupled = actuator.couple(hand, pose);
            for f in FingerName::ALL {
                let (a, b) = (pose.finger(f), coupled.finger(f));
                if (0..4).any(|j| (a[j] - b[j]).abs() > COUPLING_TOLERANCE_DEG) {
                    return Err(Error::Validation(format!(
                        "preset `{name}` {f}: coupled joints must follow the coupling ratio"
                    )));
                }
            }
        }
        Ok(())
    }
}

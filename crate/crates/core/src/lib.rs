//! Kinematics, cable modeling and design optimization for antagonistic
//! cable-driven rolling-contact-joint hands.

pub mod actuation;
pub mod cable;
pub mod config;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kinematics;
pub mod presets;
pub mod radius;
pub mod registry;
pub mod section;
pub mod tol;
pub mod trajectory;
pub mod transform;
pub mod workspace;

pub use error::{Error, Result};
pub use geometry::{
    FingerAngles, FingerKind, FingerModel, FingerName, HandModel, JointAxis, JointGeometry,
    LinkGeometry, Pose,
};
pub use transform::RigidTransform;

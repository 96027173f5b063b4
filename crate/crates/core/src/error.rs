use thiserror::Error;

/// Errors produced by the kinematic, cable, optimization and I/O layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("range-of-motion violation: {}", format_violations(.0))]
    RomViolation(Vec<RomViolation>),

    #[error("unknown tendon `{0}`")]
    UnknownTendon(String),

    #[error("unknown antagonistic pair `{0}`")]
    UnknownPair(String),

    #[error("no minimum found: {0}")]
    NoMinimumFound(String),

    #[error("empty range of motion: {0}")]
    EmptyRom(String),

    #[error("voxel resolution mismatch: {0} mm vs {1} mm")]
    ResolutionMismatch(f64, f64),

    #[error("coupling violation on {finger}: expected {expected:.6} deg, found {found:.6} deg")]
    CouplingViolation {
        finger: String,
        expected: f64,
        found: f64,
    },

    #[error("unreachable payout on {0}")]
    UnreachablePayout(String),

    #[error("root finder did not converge on {what} (residual {residual:e} mm)")]
    NoConvergence { what: String, residual: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("trajectories do not overlap in time")]
    NoOverlap,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// One joint outside its range of motion.
#[derive(Debug, Clone, PartialEq)]
pub struct RomViolation {
    pub joint: String,
    pub angle_deg: f64,
    pub min_deg: f64,
    pub max_deg: f64,
}

fn format_violations(v: &[RomViolation]) -> String {
    v.iter()
        .map(|x| {
            format!(
                "{} = {} deg outside [{}, {}]",
                x.joint, x.angle_deg, x.min_deg, x.max_deg
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

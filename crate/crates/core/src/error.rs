use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// A computation could not be completed (singular system, root finder, ...).
    Numerical,
    /// The request itself is invalid (bad parameters, inadmissible orders, ...).
    Usage,
    /// Reading or writing files failed, or their content is malformed.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("inadmissible Padé pair [{m},{n}]: the boundary condition requires M = N or M = N + 1")]
    InadmissiblePair { m: usize, n: usize },

    #[error("singular Padé system for type [{m},{n}]")]
    SingularPade { m: usize, n: usize },

    #[error("root finder did not converge on [{lo}, {hi}]: {reason}")]
    RootFinder { lo: f64, hi: f64, reason: String },

    #[error("angle {theta} rad is outside [0, π/2): glancing or invalid incidence")]
    Glancing { theta: f64 },

    #[error("vanishing denominator √r·q + p at t = {t}")]
    VanishingDenominator { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("mismatched meshes: {0}")]
    MeshMismatch(String),

    #[error("ray tracing error: {0}")]
    Ray(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::SingularPade { .. }
            | Error::RootFinder { .. }
            | Error::VanishingDenominator { .. }
            | Error::Solver(_)
            | Error::Ray(_) => ErrorCategory::Numerical,
            Error::Parse { .. } | Error::Io(_) => ErrorCategory::Io,
            Error::InadmissiblePair { .. }
            | Error::Glancing { .. }
            | Error::InvalidParameter(_)
            | Error::Geometry(_)
            | Error::Mesh(_)
            | Error::MeshMismatch(_)
            | Error::Config(_) => ErrorCategory::Usage,
        }
    }

    /// Short machine-readable tag for one-line error reports.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InadmissiblePair { .. } => "inadmissible-pair",
            Error::SingularPade { .. } => "singular-pade",
            Error::RootFinder { .. } => "root-finder",
            Error::Glancing { .. } => "glancing",
            Error::VanishingDenominator { .. } => "vanishing-denominator",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Geometry(_) => "geometry",
            Error::Mesh(_) => "mesh",
            Error::Parse { .. } => "parse",
            Error::Solver(_) => "solver",
            Error::MeshMismatch(_) => "mesh-mismatch",
            Error::Ray(_) => "ray",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

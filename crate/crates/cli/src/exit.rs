//! Mapping of failures to stable exit codes.

use std::fmt;
use std::path::PathBuf;
use stokes_core::Error;

#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
    /// Tracing found a saddle connection or could not decide.
    Saddle(String),
    /// Round trip ran but missed the tolerance.
    Tolerance { worst: f64, tol: f64 },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io(..) | Failure::Usage(_) => 1,
            Failure::Saddle(_) => 3,
            Failure::Tolerance { .. } => 4,
            Failure::Lib(e) => match e {
                Error::SchemaViolation { .. } => 1,
                Error::NonGenericResidue { .. } | Error::OnHypersurface { .. } | Error::NonGenericDifferential(_) => 2,
                Error::InconsistentConstraints(_) => 5,
                Error::BranchMonodromyNontrivial { .. } => 6,
                Error::TransversalityFailure { .. } => 7,
                Error::DegenerateMonodromy { .. } => 8,
                Error::BranchAmbiguity { .. }
                | Error::PathThroughSingularity
                | Error::StepUnderflow { .. }
                | Error::NonQuadrilateralFace { .. }
                | Error::CountMismatch(_)
                | Error::InconsistentCover(_)
                | Error::DisconnectedCover
                | Error::FrameMismatch(_)
                | Error::InvalidPath(_)
                | Error::NormalizationFailure { .. }
                | Error::RelationViolated { .. }
                | Error::RootFinding => 4,
            },
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Usage(m) | Failure::Saddle(m) => f.write_str(m),
            Failure::Tolerance { worst, tol } => write!(f, "round-trip deviation {worst:e} exceeds {tol:e}"),
        }
    }
}

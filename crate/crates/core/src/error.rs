use thiserror::Error;

/// Every failure the library reports. Numeric payloads are carried as `f64` for display.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("non-generic residue {re}+{im}i: {reason}")]
    NonGenericResidue { re: f64, im: f64, reason: &'static str },
    #[error("residues lie on the quadratic hypersurface (value {value:e})")]
    OnHypersurface { value: f64 },
    #[error("non-generic differential: {0}")]
    NonGenericDifferential(String),
    #[error("branch of sqrt(phi) ambiguous near {re}+{im}i")]
    BranchAmbiguity { re: f64, im: f64 },
    #[error("integration path passes within clearance of a singular point")]
    PathThroughSingularity,
    #[error("adaptive step collapsed at w = {w}")]
    StepUnderflow { w: f64 },
    #[error("face {face} is not a quadrilateral ({len} darts)")]
    NonQuadrilateralFace { face: usize, len: usize },
    #[error("count mismatch: {0}")]
    CountMismatch(String),
    #[error("inconsistent spectral cover: {0}")]
    InconsistentCover(String),
    #[error("schema violation at {location}: {message}")]
    SchemaViolation { location: String, message: String },
    #[error("spectral cover is disconnected")]
    DisconnectedCover,
    #[error("inconsistent constraints: {0}")]
    InconsistentConstraints(String),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("monodromy around branch vertex {branch} is not trivial (sup deviation {deviation:e})")]
    BranchMonodromyNontrivial { branch: usize, deviation: f64 },
    #[error("transversality fails in regions {regions:?}")]
    TransversalityFailure { regions: Vec<usize> },
    #[error("degenerate monodromy at puncture {puncture}: {reason}")]
    DegenerateMonodromy { puncture: usize, reason: String },
    #[error("normalization failure in region {region}")]
    NormalizationFailure { region: usize },
    #[error("sphere relation violated (sup deviation {deviation:e})")]
    RelationViolated { deviation: f64 },
    #[error("root finder did not converge")]
    RootFinding,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaViolation { location: location.into(), message: message.into() }
    }
}

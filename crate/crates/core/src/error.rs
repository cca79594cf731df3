use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precision exhausted after reaching {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    #[error("construction failed after {attempts} attempts: {diagnostics}")]
    ConstructionFailed { attempts: u32, diagnostics: String },

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("marked point is singular on the cubic")]
    MarkedPointSingular,

    #[error("fiber is reducible")]
    ReducibleFiber,

    #[error("singular fiber: {0}")]
    SingularFiber(String),

    #[error("transformation degenerates: {0}")]
    ChartDegenerate(String),

    #[error("point is not on the curve")]
    InvalidPoint,

    #[error("operation unsupported for this coefficient domain: {0}")]
    UnsupportedDomain(String),

    #[error("section is torsion identically in the parameter")]
    SectionTorsion,

    #[error("degenerate family: {0}")]
    DegenerateFamily(String),

    #[error("map undefined at this point: {0}")]
    UndefinedMap(String),

    #[error("fiber is ill-conditioned: |discriminant| = {0:e}")]
    IllConditionedFiber(f64),

    #[error("branch tracking failed at step {step}; refine the path (hint: step <= {hint:e})")]
    BranchTracking { step: usize, hint: f64 },

    #[error("degenerate elimination: {0}")]
    DegenerateElimination(String),

    #[error("zero divisor encountered in quotient ring")]
    ZeroDivisor,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

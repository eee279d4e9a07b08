use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (max |A - A*| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("operator is not a projection (max |P^2 - P| = {defect:.3e})")]
    NotProjection { defect: f64 },

    #[error("family is not orthonormal (max |<e_i|e_j> - delta_ij| = {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("threshold must be positive, got {0}")]
    InvalidThreshold(f64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: zero denominator in `{token}`")]
    ZeroDenominator { line: usize, token: String },

    #[error("line {line}: duplicate rule {rule}")]
    DuplicateRule { line: usize, rule: String },

    #[error("amplitude `{0}` is irrational; the exact backend accepts Gaussian rationals only")]
    IrrationalAmplitude(String),

    #[error("no rule for reachable configuration {0}")]
    MissingRule(String),

    #[error("input of {len} symbols does not fit a window of {window} cells")]
    InputTooLong { len: usize, window: usize },

    #[error("output string of length {len} exceeds max length {max_len}")]
    OutputTooLong { len: usize, max_len: usize },

    #[error("window of {window} cells exceeds the supported maximum of {max}")]
    WindowTooLarge { window: usize, max: usize },

    #[error("{0} is out of range")]
    OutOfRange(String),

    #[error("input is not dominated by any halting projection: {0}")]
    NotDominated(String),

    #[error("partial sums decrease at stream index {index}")]
    Monotonicity { index: usize },

    #[error("trace {trace} exceeds 1 at stream index {index}")]
    TraceOverflow { index: usize, trace: f64 },

    #[error("not a semi-measure: total mass {0}")]
    NotSemiMeasure(f64),

    #[error("empty program dictionary")]
    EmptyDictionary,

    #[error("diagnostics: {0}")]
    Diagnostics(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("malformed machine: {0}")]
    Malformed(String),

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::ZeroDenominator { .. }
            | Error::DuplicateRule { .. }
            | Error::IrrationalAmplitude(_) => 2,
            Error::Stage { source, .. } => source.exit_code(),
            Error::BoundViolation(_) => 4,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}

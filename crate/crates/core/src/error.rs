use thiserror::Error;

/// Parse failure with the byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("variable x{index} out of range for dimension {dimension}")]
    VariableOutOfRange { index: usize, dimension: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("domain error in `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },

    #[error("environment has {got} values, expression expects {expected}")]
    Arity { expected: usize, got: usize },

    #[error("multi-index degree {degree} exceeds jet order {order}")]
    OrderOverflow { degree: usize, order: usize },

    #[error("non-finite function value at {0:?}")]
    NonFinite(Vec<f64>),

    #[error("metric `{role}` is not positive definite at {x:?}")]
    NotPositiveDefinite { role: String, x: Vec<f64> },

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("metric components are not symmetric: ({i},{j}) differs from ({j},{i})")]
    Asymmetric { i: usize, j: usize },

    #[error("({x:?}, {y:?}) lies outside the conic domain")]
    OutsideDomain { x: Vec<f64>, y: Vec<f64> },

    #[error("nonpositive determinant of the fundamental tensor")]
    NonPositiveDeterminant,

    #[error("geodesic left the conic domain at t = {t}")]
    LeftDomain { t: f64 },

    #[error("step underflow in geodesic integration")]
    StepUnderflow,

    #[error("degenerate sublevel set: {0}")]
    DegenerateSublevel(&'static str),

    #[error("vector field is not h-unit: |W|_h = {norm} at {x:?}")]
    NotUnit { norm: f64, x: Vec<f64> },

    #[error("gauge b(x) must be positive, got {value} at {x:?}")]
    NonPositiveGauge { value: f64, x: Vec<f64> },

    #[error("1-form b vanishes at {0:?}")]
    DegenerateBeta(Vec<f64>),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("rank-deficient least-squares system ({rank} < {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("theorem {theorem} does not apply: {reason}")]
    Dispatch { theorem: String, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("scenario error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

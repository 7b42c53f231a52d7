use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("elements live in incompatible towers (heights {0} and {1}); re-embed explicitly")]
    IncompatibleTowers(usize, usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand {0} is not positive under the real embedding")]
    NotPositive(String),
    #[error("radicand {0} is already a square in the prefix tower")]
    AlreadySquare(String),
    #[error("malformed element encoding: {0}")]
    Decode(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CmError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected {expected} points, got {got}")]
    WrongPointCount { expected: usize, got: usize },
    #[error("unsupported symbolic configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("symbolic determinant routes disagree")]
    RouteMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("PythagSub needs value(a) > value(b)")]
    Domain,
    #[error("endpoint distance mismatch: phi(x, y) != value(w)^2")]
    EndpointMismatch,
    #[error("construction infeasible: circle-intersection discriminant is not positive")]
    ConstructionInfeasible,
    #[error("word depth {depth} exceeds the depth limit {limit}")]
    DepthExceeded { depth: usize, limit: usize },
    #[error("malformed witness set: {0}")]
    Malformed(String),
    #[error("cannot parse distance word: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("map has no image for label {0}")]
    MissingLabel(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Cm(#[from] CmError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("target and eps must be positive")]
    NonPositive,
    #[error("no (k, l) with k, l <= {0} approximates the target within eps")]
    SearchExhausted(u32),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

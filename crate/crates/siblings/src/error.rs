//! Error types shared across the crate.

use thiserror::Error;

/// Singular or out-of-domain evaluation of an expression. Samplers treat
/// these as "reject the point".
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("ln of nonpositive value {0}")]
    NonPositiveLog(f64),
    #[error("sqrt of nonpositive value {0}")]
    NonPositiveSqrt(f64),
    #[error("real power of nonpositive base {0}")]
    NonPositivePower(f64),
    #[error("abs is not differentiable at zero")]
    AbsAtZero,
    #[error("evaluation produced a non-finite value")]
    NonFinite,
    #[error("point has dimension {got}, expression expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Positioned parse failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` expects {expected} argument(s), got {got} (at byte {offset})")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
        offset: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("metric is singular at the requested point (|det| = {det:.3e})")]
    SingularMetric { det: f64 },
    #[error("metric signature does not match its declaration ({negative} negative eigenvalue(s) in dimension {dim})")]
    SignatureError { negative: usize, dim: usize },
    #[error("degenerate 2-plane: |g(u,u)g(v,v) - g(u,v)^2| = {0:.3e}")]
    DegeneratePlane(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SiblingError {
    #[error("T is not unit: |g(T,T) - 1| = {residual:.3e} at {point:?}")]
    NotUnit { residual: f64, point: Vec<f64> },
    #[error("shape operator is not symmetric (residual {0:.3e}); spectrum undefined")]
    NotSymmetric(f64),
    #[error("T does not satisfy the required properties (worst residual {residual:.3e})")]
    TPropertiesViolated { residual: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("metric entry ({i},{j}) = `{lower}` is not written identically to ({j},{i}) = `{upper}`")]
    AsymmetricMetric {
        i: usize,
        j: usize,
        lower: String,
        upper: String,
    },
    #[error("config field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Gallery(#[from] GalleryError),
    #[error(transparent)]
    Sibling(#[from] SiblingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GalleryError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("pp-wave integrability conditions violated (max residual {0:.3e})")]
    Big3Violated(f64),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sibling(#[from] SiblingError),
}

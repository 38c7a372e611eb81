use thiserror::Error;

/// Failure while evaluating a transformation, condition or weight against a
/// state.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{var}` is undefined")]
    Undefined { var: String },
    #[error("variable `{var}` holds a {found}, expected a {expected}")]
    WrongKind {
        var: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("variable `{var}` holds {value}, which is not an integral index")]
    NonIntegralIndex { var: String, value: f64 },
    #[error("index {index} read from `{var}` is out of range")]
    IndexOutOfRange { var: String, index: usize },
    #[error("list `{var}` is empty")]
    EmptyList { var: String },
    #[error("ant {ant} has no allowed vertex left")]
    NoAllowedVertex { ant: usize },
    #[error("every allowed vertex of ant {ant} has zero attractiveness")]
    ZeroDenominator { ant: usize },
    #[error("path {path} has zero length but a non-empty edge list")]
    ZeroLength { path: usize },
    #[error("ant {ant} has an empty edge list")]
    EmptyEdgeList { ant: usize },
    #[error("{0}")]
    Invalid(String),
}

use thiserror::Error;

use crate::algebra::EvalError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("leaf {leaf}: {source}")]
    Eval {
        leaf: usize,
        #[source]
        source: EvalError,
    },
    #[error("leaf {leaf}: weights sum to {sum}, expected 1")]
    WeightSum { leaf: usize, sum: f64 },
    #[error("leaf {leaf}: weight {weight} of branch {branch} is not a probability")]
    BadWeight { leaf: usize, branch: usize, weight: f64 },
    #[error("leaf {leaf}: ill-formed term: {reason}")]
    IllFormed { leaf: usize, reason: String },
    #[error("nested parallel compositions are not supported")]
    NestedParallel,
    #[error("committed configuration names winner {winner} of {len} components")]
    BadWinner { winner: usize, len: usize },
    #[error("scheduler script exhausted after {used} choices")]
    ScriptExhausted { used: usize },
    #[error("scheduler script chose option {index} of {count}")]
    ScriptOutOfRange { index: usize, count: usize },
}

impl SemanticsError {
    pub(crate) fn eval(leaf: usize) -> impl FnOnce(EvalError) -> SemanticsError {
        move |source| SemanticsError::Eval { leaf, source }
    }
}

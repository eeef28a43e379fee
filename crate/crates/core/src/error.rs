use num_rational::BigRational;
use thiserror::Error;

use crate::model::number::to_decimal;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("edge id {id} out of range (instance has {len} edges)")]
    EdgeOutOfRange { id: usize, len: usize },

    #[error("vertex {vertex} out of range (instance has {n} vertices)")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large for exact oracle: {what} = {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: u64,
        cap: u64,
    },

    #[error("partition grounds differ: {0}")]
    MismatchedGround(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(
        "no grid point balances the gadget: zeta ranges over [{}, {}] across {grid_len} grid points",
        to_decimal(zeta_low, 10),
        to_decimal(zeta_high, 10)
    )]
    NoCrossing {
        zeta_low: Box<BigRational>,
        zeta_high: Box<BigRational>,
        grid_len: u64,
    },

    #[error("gadget with N = {n} is beyond the exact tuner limit {limit}")]
    GadgetTooLarge { n: u64, limit: u64 },

    #[error("coupling containment violated at step {step} (edge {edge})")]
    CouplingViolation { step: u64, edge: usize },

    #[error("weight implementation needs {needed} parallel branches, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for the failures that signal "outside the exact/asymptotic regime" rather
    /// than bad input. The CLI maps these to exit code 2.
    pub fn is_regime_error(&self) -> bool {
        match self {
            Error::CapExceeded { .. }
            | Error::NoCrossing { .. }
            | Error::GadgetTooLarge { .. }
            | Error::BudgetExceeded { .. } => true,
            Error::Stage { source, .. } => source.is_regime_error(),
            _ => false,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

//! Rate analysis: entropy, the reversed rule chain, mean description length
//! and marginal bit probabilities.

mod bitprob;
mod chain;
mod mdl;

use thiserror::Error;

pub use bitprob::{empirical_bit_stats, marginal_bit_trace, mirror_pairs, sample_sequence, BitProbabilityTrace, BitStats};
pub use chain::{
    rule_transition_matrix, stationary_rule_distribution, ChainStructure, RuleChainModel, StationaryDistribution,
    StationaryMethod,
};
pub use mdl::{asymptotic_mdl, chain_mdl, entropy, exact_mdl, vlc_mdl};

use crate::codec::CodecError;
use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("column {column} of the transition matrix sums to {sum}")]
    NotStochastic { column: usize, sum: f64 },
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("not a mirror code: {0}")]
    NotMirror(String),
    #[error("sequence length must be at least 1")]
    EmptySequence,
}

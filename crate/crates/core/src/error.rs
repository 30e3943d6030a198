use thiserror::Error;

use crate::multiset::Multiset;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("uniformity must be at least 2, got {0}")]
    Uniformity(usize),

    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("negative weight {weight} on face {face}")]
    NegativeWeight { face: String, weight: f64 },

    #[error("face {face} has size {size}, expected {expected}")]
    FaceSize {
        face: String,
        size: usize,
        expected: usize,
    },

    #[error("vertex index {index} out of range for {len} vertices")]
    VertexIndex { index: usize, len: usize },

    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),

    #[error("face {0} has zero induced mass")]
    NotAFace(Multiset),

    #[error("uniformity mismatch: {0} vs {1}")]
    UniformityMismatch(usize, usize),

    #[error("level {level} out of range 0..={max}")]
    Level { level: usize, max: usize },

    #[error("size cap exceeded: {needed} > {cap}")]
    SizeCap { needed: usize, cap: usize },

    #[error("operator has empty support")]
    EmptySupport,

    #[error("generator {generator} does not preserve the measure at {pair}")]
    Symmetry { generator: usize, pair: String },

    #[error("orbit quotient is not well defined (residual {0:e})")]
    Quotient(f64),

    #[error("infeasible: residual {0:e}")]
    Infeasible(f64),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("hypergraph has no faces")]
    Empty,
}

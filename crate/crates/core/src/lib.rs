//! Spectral upper bounds on the independence number of weighted uniform
//! hypergraphs.
//!
//! A weighted `k`-uniform hypergraph is a vertex table with a probability
//! measure on `k`-multisets. From the measure come the induced measures
//! `μ_i`, the links of faces and the normalized adjacency operators of their
//! skeletons. The smallest eigenvalues `λ_0, …, λ_{k−2}` of those operators
//! give the bound
//!
//! ```text
//! α(X) ≤ 1 − 1 / ((1 − λ_0)(1 − λ_1)···(1 − λ_{k−2}))
//! ```
//!
//! which stays valid for every tensor power of `X` once all `λ_i ≤ 0`.
//!
//! ```
//! use hhb_core::{catalog, hoffman_bound};
//!
//! let entry = catalog::frankl_triangle_biased(0.6).unwrap();
//! let report = hoffman_bound(&entry.hypergraph).unwrap();
//! assert!((report.bound - 0.6).abs() < 1e-12);
//! ```

pub mod bound;
pub mod catalog;
pub mod error;
pub mod format;
pub mod hypergraph;
pub mod kpartite;
pub mod multiset;
pub mod optimizer;
pub mod oracle;
pub mod spectral;
pub mod tensor;

pub use bound::{certify_lambda, hoffman_bound, symmetric_hoffman_bound, tensor_bound, BoundReport, Certificate};
pub use error::{Error, Result};
pub use hypergraph::{numbered_labels, FaceMeasure, WeightedHypergraph};
pub use kpartite::{from_kpartite, KPartiteSpec};
pub use multiset::{submultiset_count, Multiset};
pub use optimizer::{feasible_point, objective, optimize_weights, OptimizerConfig, OptimizerResult, SupportProblem};
pub use oracle::{brute_force_alpha, brute_force_symmetric_cross, cross_independent, is_independent, IndependenceResult};
pub use spectral::{
    invariant_lambda_min, lambda_level, skeleton_operator, spectrum, SkeletonOperator, Spectrum, SymmetrySpec,
};
pub use tensor::{tensor_power, tensor_product};

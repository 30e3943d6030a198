//! The generalized Hoffman bound and its variants.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{serialize_g17, serialize_g17_vec};
use crate::hypergraph::WeightedHypergraph;
use crate::multiset::Multiset;
use crate::spectral::{invariant_lambda_min, lambda_levels, link_minima, SkeletonOperator, SymmetrySpec};

/// Levels with `1 − λ_i` at or below this make the bound trivial.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// A bound is tensor-stable when every `λ_i` is at most this.
pub const STABILITY_EPS: f64 = 1e-12;

/// Slack allowed by [`certify_lambda`].
pub const CERTIFY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "serialize_g17_vec")]
    pub lambdas: Vec<f64>,
    pub witnesses: Vec<Multiset>,
    #[serde(serialize_with = "serialize_g17")]
    pub product: f64,
    #[serde(serialize_with = "serialize_g17")]
    pub bound: f64,
    pub tensor_stable: bool,
    pub conditional_symmetry: bool,
    /// Some `1 − λ_i` vanished and the bound was reported as 1.
    #[serde(skip)]
    pub degenerate: bool,
}

/// `(∏(1 − λ_i), bound, degenerate)`.
///
/// A single level uses `−λ/(1 − λ)`, the classical ratio bound, so graph
/// bounds are computed along exactly that path.
///
/// The formula only constrains nonempty independent sets. A negative value
/// means none exist, and the bound is reported as 0.
pub fn bound_from_lambdas(lambdas: &[f64]) -> (f64, f64, bool) {
    let product: f64 = lambdas.iter().map(|l| 1.0 - l).product();
    if lambdas.iter().any(|l| 1.0 - l <= DEGENERACY_EPS) {
        return (product, 1.0, true);
    }
    let bound = match lambdas {
        [l] => -l / (1.0 - l),
        _ => 1.0 - 1.0 / product,
    };
    (product, bound.max(0.0), false)
}

impl BoundReport {
    pub fn from_lambdas(lambdas: Vec<f64>, witnesses: Vec<Multiset>, conditional_symmetry: bool) -> Self {
        let (product, bound, degenerate) = bound_from_lambdas(&lambdas);
        BoundReport {
            tensor_stable: lambdas.iter().all(|&l| l <= STABILITY_EPS),
            lambdas,
            witnesses,
            product,
            bound,
            conditional_symmetry,
            degenerate,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

/// `α(X) ≤ 1 − 1/∏_{i=0}^{k−2} (1 − λ_i(X))`.
pub fn hoffman_bound(x: &WeightedHypergraph) -> Result<BoundReport> {
    let levels = lambda_levels(x)?;
    let (lambdas, witnesses) = levels.into_iter().map(|l| (l.value, l.witness)).unzip();
    Ok(BoundReport::from_lambdas(lambdas, witnesses, false))
}

/// The bound for `X^{⊗n}` without building the power: nonpositive `λ_i`
/// are unchanged and positive ones become `λ_i^n`.
pub fn tensor_bound(x: &WeightedHypergraph, n: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Parameter("tensor power must be at least 1".into()));
    }
    let base = hoffman_bound(x)?;
    Ok(tensor_report(&base, n))
}

/// Apply the tensor-power rule to an existing report.
pub fn tensor_report(base: &BoundReport, n: usize) -> BoundReport {
    let exp = i32::try_from(n).unwrap_or(i32::MAX);
    let lambdas = base
        .lambdas
        .iter()
        .map(|&l| if l <= 0.0 { l } else { l.powi(exp) })
        .collect();
    BoundReport::from_lambdas(lambdas, base.witnesses.clone(), base.conditional_symmetry)
}

/// The bound for independent sets invariant under `sym`: `λ_0` is replaced
/// by the smallest eigenvalue of the skeleton operator on invariant
/// functions. The report is marked conditional.
pub fn symmetric_hoffman_bound(x: &WeightedHypergraph, sym: &SymmetrySpec) -> Result<BoundReport> {
    let op = SkeletonOperator::new(x)?;
    let inv = invariant_lambda_min(&op, sym)?;
    let mut levels = lambda_levels(x)?;
    levels[0].value = inv.value;
    let (lambdas, witnesses) = levels.into_iter().map(|l| (l.value, l.witness)).unzip();
    Ok(BoundReport::from_lambdas(lambdas, witnesses, true))
}

/// Outcome of checking `T_{X_s} ⪰ λ_{|s|} Id` for every face `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub ok: bool,
    /// Smallest `λ(S(X_s)) − λ_{|s|}` over all levels.
    pub worst_margin: f64,
    pub witness: Multiset,
    pub level: usize,
    /// Smallest margin at each level.
    pub margins: Vec<f64>,
}

/// Certify that `lambdas[i]` lower-bounds every level-`i` link spectrum,
/// with slack [`CERTIFY_TOL`].
pub fn certify_lambda(x: &WeightedHypergraph, lambdas: &[f64]) -> Result<Certificate> {
    if lambdas.len() != x.k() - 1 {
        return Err(Error::Dimension(format!(
            "expected {} lambdas, got {}",
            x.k() - 1,
            lambdas.len()
        )));
    }
    let mut margins = Vec::with_capacity(lambdas.len());
    let mut worst = (f64::INFINITY, Multiset::empty(), 0);
    for (i, &lambda) in lambdas.iter().enumerate() {
        let mut level_min = f64::INFINITY;
        for (face, value) in link_minima(x, i)? {
            let margin = value - lambda;
            level_min = level_min.min(margin);
            if margin < worst.0 {
                worst = (margin, face, i);
            }
        }
        margins.push(level_min);
    }
    Ok(Certificate {
        ok: worst.0 >= -CERTIFY_TOL,
        worst_margin: worst.0,
        witness: worst.1,
        level: worst.2,
        margins,
    })
}

//! Choosing face weights for the best bound.
//!
//! Over all measures `μ` supported on a fixed face list with a fixed vertex
//! marginal `μ_1 = ν`, minimize `∏(1 − λ_i)`. The feasible set is an affine
//! slice of the simplex; the search runs Nelder–Mead in coordinates of the
//! null space of the equality constraints, from several seeded starting
//! points. Any feasible `μ` yields a valid bound, so the result is an upper
//! bound with no claim of global optimality.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bound::bound_from_lambdas;
use crate::error::{Error, Result};
use crate::format::{serialize_g17, serialize_g17_vec};
use crate::hypergraph::{WeightedHypergraph, MEASURE_TOL};
use crate::multiset::Multiset;
use crate::spectral::lambda_levels;

const MAX_REPAIR_ROUNDS: usize = 10_000;
const STALL_WINDOW: usize = 500;
const NEGATIVE_TOL: f64 = 1e-12;

/// Allowed faces and a target vertex measure.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportProblem {
    k: usize,
    vertices: Vec<String>,
    faces: Vec<Multiset>,
    nu: Vec<f64>,
}

impl SupportProblem {
    /// Faces are canonicalized and deduplicated.
    pub fn new(k: usize, vertices: Vec<String>, faces: Vec<Multiset>, nu: Vec<f64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Uniformity(k));
        }
        let mut faces = faces;
        faces.sort();
        faces.dedup();
        if faces.is_empty() {
            return Err(Error::Empty);
        }
        for f in &faces {
            if f.len() != k {
                return Err(Error::FaceSize {
                    face: f.to_string(),
                    size: f.len(),
                    expected: k,
                });
            }
            if let Some(m) = f.max_vertex() {
                if m >= vertices.len() {
                    return Err(Error::VertexIndex {
                        index: m,
                        len: vertices.len(),
                    });
                }
            }
        }
        if nu.len() != vertices.len() {
            return Err(Error::Dimension(format!(
                "nu has {} entries for {} vertices",
                nu.len(),
                vertices.len()
            )));
        }
        if nu.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Malformed("nu entries must be finite and nonnegative".into()));
        }
        Ok(SupportProblem { k, vertices, faces, nu })
    }

    /// The support and vertex measure of an existing hypergraph.
    pub fn from_hypergraph(x: &WeightedHypergraph) -> Self {
        SupportProblem {
            k: x.k(),
            vertices: x.vertices().to_vec(),
            faces: x.faces().keys().cloned().collect(),
            nu: x.vertex_measure(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Multiset] {
        &self.faces
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// The hypergraph carrying weights `mu` (aligned with [`Self::faces`]);
    /// entries below zero are clipped.
    pub fn hypergraph(&self, mu: &[f64]) -> Result<WeightedHypergraph> {
        WeightedHypergraph::from_unnormalized(
            self.k,
            self.vertices.clone(),
            self.faces.iter().cloned().zip(mu.iter().map(|w| w.max(0.0))),
        )
    }

    /// Uniform weights on the support, ignoring `nu`.
    pub fn support_hypergraph(&self) -> WeightedHypergraph {
        self.hypergraph(&vec![1.0; self.faces.len()]).expect("non-empty support")
    }

    /// Rows `v`: `Σ_f μ_f · mult_f(v)/k = ν_v`; last row: `Σ_f μ_f = 1`.
    fn constraints(&self) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.vertices.len();
        let m = self.faces.len();
        let mut a = DMatrix::zeros(n + 1, m);
        for (j, f) in self.faces.iter().enumerate() {
            for (v, mult) in f.entries() {
                a[(v, j)] += mult as f64 / self.k as f64;
            }
            a[(n, j)] = 1.0;
        }
        let mut b = DVector::zeros(n + 1);
        for v in 0..n {
            b[v] = self.nu[v];
        }
        b[n] = 1.0;
        (a, b)
    }

    /// `(max_v |μ_1(v) − ν_v|, |Σ μ − 1|)`.
    pub fn residuals(&self, mu: &[f64]) -> (f64, f64) {
        let (a, b) = self.constraints();
        let r = &a * DVector::from_column_slice(mu) - b;
        let n = self.vertices.len();
        let marginal = (0..n).map(|v| r[v].abs()).fold(0.0, f64::max);
        (marginal, r[n].abs())
    }
}

/// Projection onto `{x : A x = b}` and a basis of `ker A`.
struct Affine {
    a: DMatrix<f64>,
    b: DVector<f64>,
    /// `A⁺ = V_r Λ_r⁻¹ V_rᵀ Aᵀ`.
    pinv: DMatrix<f64>,
    null: DMatrix<f64>,
}

impl Affine {
    fn new(a: DMatrix<f64>, b: DVector<f64>) -> Self {
        let m = a.ncols();
        let eig = SymmetricEigen::new(a.transpose() * &a);
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let cut = 1e-10 * top.max(1.0);
        let mut range = Vec::new();
        let mut null = Vec::new();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        for i in order {
            if eig.eigenvalues[i] > cut {
                range.push(i);
            } else {
                null.push(i);
            }
        }
        let mut inv_gram = DMatrix::zeros(m, m);
        for &i in &range {
            let v = eig.eigenvectors.column(i);
            inv_gram += v * v.transpose() / eig.eigenvalues[i];
        }
        let pinv = inv_gram * a.transpose();
        let null = DMatrix::from_fn(m, null.len(), |r, c| eig.eigenvectors[(r, null[c])]);
        Affine { a, b, pinv, null }
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        x - &self.pinv * (&self.a * x - &self.b)
    }

    fn residual(&self, x: &DVector<f64>) -> f64 {
        (&self.a * x - &self.b).amax()
    }
}

fn clip(x: &DVector<f64>) -> DVector<f64> {
    x.map(|v| v.max(0.0))
}

/// A nonnegative weight vector with the prescribed marginal: project the
/// uniform vector onto the affine constraints, then alternate clipping and
/// re-projection.
pub fn feasible_point(problem: &SupportProblem, tolerance: f64) -> Result<Vec<f64>> {
    let (a, b) = problem.constraints();
    let affine = Affine::new(a, b);
    Ok(find_feasible(&affine, problem.faces.len(), tolerance)?.as_slice().to_vec())
}

fn find_feasible(affine: &Affine, m: usize, tolerance: f64) -> Result<DVector<f64>> {
    let mut x = affine.project(&DVector::from_element(m, 1.0 / m as f64));
    let consistency = affine.residual(&x);
    if consistency > tolerance {
        return Err(Error::Infeasible(consistency));
    }
    let mut best = f64::INFINITY;
    let mut best_round = 0;
    for round in 0..MAX_REPAIR_ROUNDS {
        if x.min() >= -NEGATIVE_TOL {
            return Ok(clip(&x));
        }
        let c = clip(&x);
        let r = affine.residual(&c);
        if r <= tolerance * 1e-2 {
            return Ok(c);
        }
        if r < best * (1.0 - 1e-6) {
            best = r;
            best_round = round;
        } else if round - best_round > STALL_WINDOW {
            break;
        }
        x = affine.project(&c);
    }
    Err(Error::Infeasible(best))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Initial simplex edge, relative to the largest starting weight.
    pub step: f64,
    /// Stop a restart once the simplex values agree to this.
    pub tolerance: f64,
    pub marginal_tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            iterations: 2000,
            seed: 0,
            step: 0.1,
            tolerance: 1e-7,
            marginal_tolerance: 1e-8,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.iterations == 0 {
            return Err(Error::Parameter("restarts and iterations must be positive".into()));
        }
        if !(self.step > 0.0 && self.tolerance > 0.0 && self.marginal_tolerance > 0.0) {
            return Err(Error::Parameter("step and tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residuals {
    #[serde(serialize_with = "serialize_g17")]
    pub marginal: f64,
    #[serde(serialize_with = "serialize_g17")]
    pub normalization: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerResult {
    pub faces: Vec<Multiset>,
    #[serde(serialize_with = "serialize_g17_vec")]
    pub mu_star: Vec<f64>,
    #[serde(serialize_with = "serialize_g17_vec")]
    pub lambdas: Vec<f64>,
    /// `∏(1 − λ_i)`.
    #[serde(serialize_with = "serialize_g17")]
    pub objective: f64,
    #[serde(serialize_with = "serialize_g17")]
    pub bound: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    /// Dimension of the feasible affine slice.
    pub free_dimension: usize,
}

impl OptimizerResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize") + "\n"
    }
}

/// `(λ_0, …, λ_{k−2}, ∏(1 − λ_i))` of the hypergraph with weights `mu`.
pub fn objective(problem: &SupportProblem, mu: &[f64]) -> Result<(Vec<f64>, f64)> {
    let x = problem.hypergraph(mu)?;
    let lambdas: Vec<f64> = lambda_levels(&x)?.into_iter().map(|l| l.value).collect();
    let product = lambdas.iter().map(|l| 1.0 - l).product();
    Ok((lambdas, product))
}

/// Search value: the bound itself, so degenerate points score as 1.
fn score(problem: &SupportProblem, mu: &DVector<f64>) -> f64 {
    if mu.min() < -NEGATIVE_TOL {
        return f64::INFINITY;
    }
    match objective(problem, mu.as_slice()) {
        Ok((lambdas, _)) => bound_from_lambdas(&lambdas).1,
        Err(_) => f64::INFINITY,
    }
}

struct Restart {
    value: f64,
    point: DVector<f64>,
    iterations: usize,
}

pub fn optimize_weights(problem: &SupportProblem, config: &OptimizerConfig) -> Result<OptimizerResult> {
    config.validate()?;
    let (a, b) = problem.constraints();
    let affine = Affine::new(a, b);
    let m = problem.faces.len();
    let start = find_feasible(&affine, m, config.marginal_tolerance)?;
    let d = affine.null.ncols();

    let runs: Vec<Restart> = if d == 0 {
        vec![Restart {
            value: score(problem, &start),
            point: start.clone(),
            iterations: 0,
        }]
    } else {
        (0..config.restarts)
            .into_par_iter()
            .map(|r| run_restart(problem, &affine, &start, config, r))
            .collect()
    };
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = i;
        }
    }
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let mu_star: Vec<f64> = clip(&runs[best].point).as_slice().to_vec();
    let (lambdas, objective) = objective(problem, &mu_star)?;
    let (_, bound, _) = bound_from_lambdas(&lambdas);
    let (marginal, normalization) = problem.residuals(&mu_star);
    if marginal > config.marginal_tolerance || normalization > MEASURE_TOL {
        return Err(Error::Infeasible(marginal.max(normalization)));
    }
    Ok(OptimizerResult {
        faces: problem.faces.clone(),
        mu_star,
        lambdas,
        objective,
        bound,
        residuals: Residuals {
            marginal,
            normalization,
        },
        iterations,
        free_dimension: d,
    })
}

/// Nelder–Mead over null-space coordinates `y`, with `μ = start + N y`.
fn run_restart(
    problem: &SupportProblem,
    affine: &Affine,
    start: &DVector<f64>,
    config: &OptimizerConfig,
    r: usize,
) -> Restart {
    let null = &affine.null;
    let d = null.ncols();
    let point = |y: &DVector<f64>| start + null * y;
    let eval = |y: &DVector<f64>| score(problem, &point(y));
    let scale = config.step * start.max().max(f64::MIN_POSITIVE);

    let mut origin = DVector::zeros(d);
    if r > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(r as u64));
        let dir = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        let dir = dir.normalize() * (scale * 10.0);
        let mut t = 1.0;
        for _ in 0..60 {
            if point(&(&dir * t)).min() >= -NEGATIVE_TOL {
                origin = &dir * t;
                break;
            }
            t *= 0.5;
        }
    }

    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(&origin);
    simplex.push((origin.clone(), v0));
    for i in 0..d {
        let mut y = origin.clone();
        y[i] += scale;
        let v = eval(&y);
        simplex.push((y, v));
    }

    let mut iterations = 0;
    while iterations < config.iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[d].1);
        if hi.is_finite() && hi - lo <= config.tolerance {
            break;
        }
        let diameter = simplex
            .iter()
            .map(|(y, _)| (y - &simplex[0].0).amax())
            .fold(0.0, f64::max);
        if diameter < 1e-14 {
            break;
        }
        iterations += 1;
        let centroid = simplex[..d].iter().fold(DVector::zeros(d), |acc, (y, _)| acc + y) / d as f64;
        let worst = simplex[d].0.clone();
        let reflected = &centroid + (&centroid - &worst);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = &centroid + (&centroid - &worst) * 2.0;
            let fe = eval(&expanded);
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let (towards, ft) = if fr < simplex[d].1 {
                (reflected, fr)
            } else {
                (worst, simplex[d].1)
            };
            let contracted = &centroid + (&towards - &centroid) * 0.5;
            let fc = eval(&contracted);
            if fc < ft {
                simplex[d] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let y = &best + (&entry.0 - &best) * 0.5;
                    let v = eval(&y);
                    *entry = (y, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (y, value) = simplex.swap_remove(0);
    Restart {
        value,
        point: point(&y),
        iterations,
    }
}

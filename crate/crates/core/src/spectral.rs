//! Normalized adjacency operators of skeletons, their spectra, the per-level
//! link minima `λ_i`, and minima restricted to symmetry-invariant functions.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{FaceMeasure, WeightedHypergraph};
use crate::multiset::Multiset;

/// Vertices whose `μ_1` mass is at or below this are left out of operators.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Tolerance for treating two level minima as tied when choosing a witness.
const TIE_EPS: f64 = 1e-12;

/// The normalized adjacency operator `T_X` of a weighted graph, restricted to
/// the vertices of positive `μ_1` mass.
///
/// `T(u,u) = μ_2([u,u]) / μ_1(u)` and `T(u,v) = μ_2([u,v]) / (2 μ_1(u))`.
/// It is a Markov matrix, self-adjoint for the `μ_1` inner product.
#[derive(Clone, Debug)]
pub struct SkeletonOperator {
    num_vertices: usize,
    support: Vec<usize>,
    mu1: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl SkeletonOperator {
    /// Operator of a 2-uniform hypergraph. Higher uniformities go through
    /// their skeleton first.
    pub fn new(graph: &WeightedHypergraph) -> Result<Self> {
        let g = if graph.k() == 2 {
            graph.measure().clone()
        } else {
            graph.measure().pushdown(2)
        };
        Self::from_edge_measure(graph.num_vertices(), &g)
    }

    /// Operator of the edge measure `mu2` on `num_vertices` vertices.
    pub fn from_edge_measure(num_vertices: usize, mu2: &FaceMeasure) -> Result<Self> {
        assert_eq!(mu2.level(), 2, "skeleton operators need a level-2 measure");
        let full_mu1 = mu2.pushdown(1).vertex_masses(num_vertices);
        let support: Vec<usize> = (0..num_vertices).filter(|&v| full_mu1[v] > SUPPORT_EPS).collect();
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut local = vec![usize::MAX; num_vertices];
        for (i, &v) in support.iter().enumerate() {
            local[v] = i;
        }
        let mu1: Vec<f64> = support.iter().map(|&v| full_mu1[v]).collect();
        let n = support.len();
        let mut matrix = DMatrix::zeros(n, n);
        for (edge, &w) in mu2.masses() {
            let (a, b) = (edge.as_slice()[0], edge.as_slice()[1]);
            let (i, j) = (local[a], local[b]);
            if i == usize::MAX || j == usize::MAX {
                continue;
            }
            if i == j {
                matrix[(i, i)] += w / mu1[i];
            } else {
                matrix[(i, j)] += w / (2.0 * mu1[i]);
                matrix[(j, i)] += w / (2.0 * mu1[j]);
            }
        }
        Ok(SkeletonOperator {
            num_vertices,
            support,
            mu1,
            matrix,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Global vertex indices of the rows, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `μ_1` on the support, row-aligned with the matrix.
    pub fn stationary(&self) -> &[f64] {
        &self.mu1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.support.len()
    }

    /// `D^{1/2} T D^{-1/2}` with `D = diag(μ_1)`; symmetric and similar to `T`.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let n = self.dim();
        let s: Vec<f64> = self.mu1.iter().map(|m| m.sqrt()).collect();
        let mut out = DMatrix::from_fn(n, n, |i, j| self.matrix[(i, j)] * s[i] / s[j]);
        // the product above is symmetric only up to rounding
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        out
    }

    /// Connected components of the support graph, as lists of row indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if self.matrix[(i, j)] != 0.0 || self.matrix[(j, i)] != 0.0 {
                    uf.union(i, j);
                }
            }
        }
        uf.groups()
    }

    pub fn spectrum(&self) -> Spectrum {
        let sym = self.symmetrized();
        let mut values = Vec::with_capacity(self.dim());
        for comp in self.components() {
            let block = DMatrix::from_fn(comp.len(), comp.len(), |i, j| sym[(comp[i], comp[j])]);
            values.extend(symmetric_eigenvalues(block));
        }
        Spectrum::from_values(values)
    }

    pub fn lambda_min(&self) -> f64 {
        self.spectrum().min()
    }

    /// Largest `‖T y − λ y‖ / ‖y‖` over the eigenpairs, with `y = D^{-1/2} x`
    /// built from eigenvectors `x` of the symmetrized matrix.
    pub fn eigen_residual(&self) -> f64 {
        let eig = SymmetricEigen::new(self.symmetrized());
        let inv_sqrt: Vec<f64> = self.mu1.iter().map(|m| 1.0 / m.sqrt()).collect();
        let mut worst: f64 = 0.0;
        for (c, &lambda) in eig.eigenvalues.iter().enumerate() {
            let x = eig.eigenvectors.column(c);
            let y = nalgebra::DVector::from_fn(self.dim(), |i, _| x[i] * inv_sqrt[i]);
            let r = &self.matrix * &y - &y * lambda;
            worst = worst.max(r.norm() / y.norm());
        }
        worst
    }
}

pub fn skeleton_operator(graph: &WeightedHypergraph) -> Result<SkeletonOperator> {
    SkeletonOperator::new(graph)
}

pub fn spectrum(op: &SkeletonOperator) -> Spectrum {
    op.spectrum()
}

/// All eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        2 => {
            let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            vec![mid + rad, mid - rad]
        }
        _ => m.symmetric_eigenvalues().iter().copied().collect(),
    }
}

/// Eigenvalues sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum { eigenvalues: values }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// `λ_i` together with the face whose link attains it.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMinimum {
    pub level: usize,
    pub value: f64,
    pub witness: Multiset,
}

/// Smallest skeleton eigenvalue of the link measure `link`.
fn link_lambda(num_vertices: usize, link: &FaceMeasure) -> Result<f64> {
    let mu2 = link.pushdown(2);
    Ok(SkeletonOperator::from_edge_measure(num_vertices, &mu2)?.lambda_min())
}

/// Reduce per-face minima to `(value, witness)`: the value is the exact
/// minimum, the witness the first face in canonical order within `TIE_EPS`.
fn reduce_level(level: usize, per_face: Vec<(Multiset, f64)>) -> LevelMinimum {
    let value = per_face.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let witness = per_face
        .iter()
        .find(|p| p.1 <= value + TIE_EPS)
        .map(|p| p.0.clone())
        .expect("every hypergraph has faces at each level");
    LevelMinimum {
        level,
        value,
        witness,
    }
}

/// `λ_i(X) = min over σ ∈ X^(i) of λ(S(X_σ))`, for `0 ≤ i ≤ k − 2`.
pub fn lambda_level(x: &WeightedHypergraph, i: usize) -> Result<LevelMinimum> {
    if x.k() < 2 || i > x.k() - 2 {
        return Err(Error::Level {
            level: i,
            max: x.k().saturating_sub(2),
        });
    }
    let n = x.num_vertices();
    let links: Vec<(Multiset, FaceMeasure)> = x.measure().links_at_level(i).into_iter().collect();
    let per_face = links
        .par_iter()
        .map(|(sigma, link)| link_lambda(n, link).map(|v| (sigma.clone(), v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce_level(i, per_face))
}

/// `λ_0, …, λ_{k−2}`.
pub fn lambda_levels(x: &WeightedHypergraph) -> Result<Vec<LevelMinimum>> {
    (0..=x.k() - 2).map(|i| lambda_level(x, i)).collect()
}

/// Every face at level `i` with the smallest eigenvalue of its link skeleton.
pub fn link_minima(x: &WeightedHypergraph, i: usize) -> Result<Vec<(Multiset, f64)>> {
    if i > x.k() - 2 {
        return Err(Error::Level {
            level: i,
            max: x.k() - 2,
        });
    }
    let n = x.num_vertices();
    let links: Vec<(Multiset, FaceMeasure)> = x.measure().links_at_level(i).into_iter().collect();
    links
        .par_iter()
        .map(|(sigma, link)| link_lambda(n, link).map(|v| (sigma.clone(), v)))
        .collect()
}

/// Vertex permutations under which an independent set is promised invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrySpec {
    generators: Vec<Vec<usize>>,
}

impl SymmetrySpec {
    /// Each generator lists the image of every vertex and must be a
    /// permutation; all generators act on the same number of vertices.
    pub fn new(generators: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(first) = generators.first() {
            let n = first.len();
            for (g, gen) in generators.iter().enumerate() {
                if gen.len() != n {
                    return Err(Error::Dimension(format!(
                        "generator {g} has length {}, expected {n}",
                        gen.len()
                    )));
                }
                let mut seen = vec![false; n];
                for &img in gen {
                    if img >= n || seen[img] {
                        return Err(Error::Malformed(format!("generator {g} is not a permutation")));
                    }
                    seen[img] = true;
                }
            }
        }
        Ok(SymmetrySpec { generators })
    }

    pub fn identity(n: usize) -> Self {
        SymmetrySpec {
            generators: vec![(0..n).collect()],
        }
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// Check that every generator preserves `μ_1` pointwise and `μ_2` on
    /// every 2-multiset, i.e. commutes with the operator.
    pub fn check(&self, op: &SkeletonOperator) -> Result<()> {
        let n = op.num_vertices();
        let mut local = vec![usize::MAX; n];
        for (i, &v) in op.support().iter().enumerate() {
            local[v] = i;
        }
        let mu = |v: usize| {
            if local[v] == usize::MAX {
                0.0
            } else {
                op.stationary()[local[v]]
            }
        };
        for (g, gen) in self.generators.iter().enumerate() {
            if gen.len() != n {
                return Err(Error::Dimension(format!(
                    "generator {g} has length {}, hypergraph has {n} vertices",
                    gen.len()
                )));
            }
            for v in 0..n {
                if (mu(v) - mu(gen[v])).abs() > 1e-9 {
                    return Err(Error::Symmetry {
                        generator: g,
                        pair: format!("vertex {v} -> {}", gen[v]),
                    });
                }
            }
            // μ̃_2(u,v) = μ_1(u)·T(u,v) is the ordered edge mass
            for (i, &u) in op.support().iter().enumerate() {
                for (j, &v) in op.support().iter().enumerate() {
                    let here = op.stationary()[i] * op.matrix()[(i, j)];
                    let (gi, gj) = (local[gen[u]], local[gen[v]]);
                    let there = op.stationary()[gi] * op.matrix()[(gi, gj)];
                    if (here - there).abs() > 1e-9 {
                        return Err(Error::Symmetry {
                            generator: g,
                            pair: format!("[{u},{v}] -> [{},{}]", gen[u], gen[v]),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Result of restricting the operator to functions constant on orbits.
#[derive(Clone, Debug)]
pub struct InvariantMinimum {
    pub value: f64,
    pub orbits: Vec<Vec<usize>>,
    /// `T_orb(O, O') = Σ_{v ∈ O'} T(u, v)` for any `u ∈ O`.
    pub quotient: DMatrix<f64>,
    pub spectrum: Spectrum,
    /// Largest disagreement between rows of the same orbit.
    pub row_residual: f64,
}

impl InvariantMinimum {
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }
}

/// Minimum eigenvalue of `T` on the subspace of functions invariant under
/// the group generated by `sym`. Orbits are connected components of the
/// generator graph and are listed by their smallest global vertex.
pub fn invariant_lambda_min(op: &SkeletonOperator, sym: &SymmetrySpec) -> Result<InvariantMinimum> {
    sym.check(op)?;
    let n = op.dim();
    let mut local = vec![usize::MAX; op.num_vertices()];
    for (i, &v) in op.support().iter().enumerate() {
        local[v] = i;
    }
    let mut uf = UnionFind::new(n);
    for gen in sym.generators() {
        for (i, &v) in op.support().iter().enumerate() {
            uf.union(i, local[gen[v]]);
        }
    }
    let orbits = uf.groups();
    let mut orbit_of = vec![0; n];
    for (o, members) in orbits.iter().enumerate() {
        for &i in members {
            orbit_of[i] = o;
        }
    }
    let m = orbits.len();
    let mut quotient = DMatrix::zeros(m, m);
    let mut row_residual: f64 = 0.0;
    for (o, members) in orbits.iter().enumerate() {
        let mut first: Option<Vec<f64>> = None;
        for &u in members {
            let mut row = vec![0.0; m];
            for v in 0..n {
                row[orbit_of[v]] += op.matrix()[(u, v)];
            }
            match &first {
                None => first = Some(row),
                Some(r) => {
                    for (a, b) in r.iter().zip(&row) {
                        row_residual = row_residual.max((a - b).abs());
                    }
                }
            }
        }
        for (c, val) in first.expect("orbits are non-empty").into_iter().enumerate() {
            quotient[(o, c)] = val;
        }
    }
    if row_residual > 1e-8 {
        return Err(Error::Quotient(row_residual));
    }
    let mass: Vec<f64> = orbits
        .iter()
        .map(|members| members.iter().map(|&i| op.stationary()[i]).sum())
        .collect();
    let mut sym_q = DMatrix::from_fn(m, m, |a, b| quotient[(a, b)] * (mass[a] / mass[b]).sqrt());
    for a in 0..m {
        for b in 0..a {
            let avg = 0.5 * (sym_q[(a, b)] + sym_q[(b, a)]);
            sym_q[(a, b)] = avg;
            sym_q[(b, a)] = avg;
        }
    }
    let spectrum = Spectrum::from_values(symmetric_eigenvalues(sym_q));
    let orbits = orbits
        .into_iter()
        .map(|members| members.into_iter().map(|i| op.support()[i]).collect())
        .collect();
    Ok(InvariantMinimum {
        value: spectrum.min(),
        orbits,
        quotient,
        spectrum,
        row_residual,
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so groups are keyed by their minimum
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Groups in order of their smallest member, members ascending.
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut index = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            if index[r] == usize::MAX {
                index[r] = out.len();
                out.push(Vec::new());
            }
            out[index[r]].push(x);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::numbered_labels;

    fn graph(n: usize, edges: &[([usize; 2], f64)]) -> WeightedHypergraph {
        WeightedHypergraph::from_unnormalized(
            2,
            numbered_labels(n),
            edges.iter().map(|(e, w)| (Multiset::from(*e), *w)),
        )
        .unwrap()
    }

    fn cycle(n: usize) -> WeightedHypergraph {
        let edges: Vec<([usize; 2], f64)> = (0..n).map(|i| ([i, (i + 1) % n], 1.0)).collect();
        graph(n, &edges)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn biased_triangle_operator() {
        let x = WeightedHypergraph::new(
            3,
            numbered_labels(2),
            [([1, 1, 0].into(), 0.9), ([0, 0, 0].into(), 0.1)],
        )
        .unwrap();
        let op = skeleton_operator(&x.skeleton()).unwrap();
        let t = op.matrix();
        assert_close(t[(0, 0)], 0.25, 1e-12);
        assert_close(t[(0, 1)], 0.75, 1e-12);
        assert_close(t[(1, 0)], 0.5, 1e-12);
        assert_close(t[(1, 1)], 0.5, 1e-12);
        let s = op.spectrum();
        assert_close(s.max(), 1.0, 1e-12);
        assert_close(s.min(), -0.25, 1e-12);
    }

    #[test]
    fn biased_intersecting_operator() {
        let g = graph(2, &[([1, 0], 0.6), ([0, 0], 0.4)]);
        let op = skeleton_operator(&g).unwrap();
        let t = op.matrix();
        assert_close(t[(0, 0)], 4.0 / 7.0, 1e-12);
        assert_close(t[(0, 1)], 3.0 / 7.0, 1e-12);
        assert_close(t[(1, 0)], 1.0, 1e-12);
        assert_close(t[(1, 1)], 0.0, 1e-12);
    }

    #[test]
    fn single_loop_and_matching() {
        let op = skeleton_operator(&graph(1, &[([0, 0], 1.0)])).unwrap();
        assert_eq!(op.matrix()[(0, 0)], 1.0);
        let op = skeleton_operator(&graph(2, &[([0, 1], 1.0)])).unwrap();
        assert_eq!(op.spectrum().eigenvalues(), &[1.0, -1.0]);
    }

    #[test]
    fn five_cycle_spectrum_is_circulant() {
        let op = skeleton_operator(&cycle(5)).unwrap();
        let got = op.spectrum();
        let mut want: Vec<f64> = (0..5)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / 5.0).cos())
            .collect();
        want.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in got.eigenvalues().iter().zip(&want) {
            assert_close(*a, *b, 1e-12);
        }
        assert!(op.eigen_residual() < 1e-10);
    }

    #[test]
    fn two_vertex_closed_form() {
        // λ_min = 1 − 2 p2 / (1 − (p1 − p3)^2) for loops p1, p3 and edge p2
        for &(p1, p2, p3) in &[(0.2, 0.5, 0.3), (0.0, 0.7, 0.3), (0.45, 0.1, 0.45)] {
            let g = graph(2, &[([0, 0], p1), ([0, 1], p2), ([1, 1], p3)]);
            let got = skeleton_operator(&g).unwrap().lambda_min();
            let want = 1.0 - 2.0 * p2 / (1.0 - (p1 - p3) * (p1 - p3));
            assert_close(got, want, 1e-12);
        }
    }

    #[test]
    fn zero_mass_vertices_are_dropped() {
        let g = graph(4, &[([0, 2], 1.0)]);
        let op = skeleton_operator(&g).unwrap();
        assert_eq!(op.support(), &[0, 2]);
        assert_eq!(op.components(), vec![vec![0, 1]]);
    }

    #[test]
    fn level_minima_of_biased_triangle() {
        let x = WeightedHypergraph::new(
            3,
            numbered_labels(2),
            [([1, 1, 0].into(), 0.9), ([0, 0, 0].into(), 0.1)],
        )
        .unwrap();
        let l0 = lambda_level(&x, 0).unwrap();
        assert_close(l0.value, -0.25, 1e-12);
        assert_eq!(l0.witness, Multiset::empty());
        let l1 = lambda_level(&x, 1).unwrap();
        assert_close(l1.value, -1.0, 1e-12);
        assert_eq!(l1.witness, Multiset::singleton(1));
        assert!(matches!(lambda_level(&x, 2), Err(Error::Level { .. })));
    }

    #[test]
    fn identity_symmetry_changes_nothing() {
        let op = skeleton_operator(&cycle(5)).unwrap();
        let inv = invariant_lambda_min(&op, &SymmetrySpec::identity(5)).unwrap();
        assert_eq!(inv.orbit_count(), 5);
        assert_close(inv.value, op.lambda_min(), 1e-12);
    }

    #[test]
    fn full_symmetric_group_on_complete_graph() {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push(([i, j], 1.0));
            }
        }
        let op = skeleton_operator(&graph(4, &edges)).unwrap();
        let sym = SymmetrySpec::new(vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]]).unwrap();
        let inv = invariant_lambda_min(&op, &sym).unwrap();
        assert_eq!(inv.orbit_count(), 1);
        assert_close(inv.value, 1.0, 1e-12);
    }

    #[test]
    fn non_automorphism_is_reported() {
        let g = graph(3, &[([0, 1], 0.5), ([1, 2], 0.5)]);
        let op = skeleton_operator(&g).unwrap();
        let sym = SymmetrySpec::new(vec![vec![1, 0, 2]]).unwrap();
        assert!(matches!(invariant_lambda_min(&op, &sym), Err(Error::Symmetry { generator: 0, .. })));
        let rev = SymmetrySpec::new(vec![vec![2, 1, 0]]).unwrap();
        let inv = invariant_lambda_min(&op, &rev).unwrap();
        assert_eq!(inv.orbit_count(), 2);
    }
}

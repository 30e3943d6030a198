//! Weighted uniform hypergraphs and the measures they induce on faces.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::multiset::{binomial, Multiset};

/// Tolerance for "sums to one" checks on probability measures.
pub const MEASURE_TOL: f64 = 1e-9;

/// A probability measure on the `level`-multisets of a vertex set.
///
/// Only faces of positive mass are stored, so the key set is exactly the
/// support `X^(level)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceMeasure {
    level: usize,
    masses: BTreeMap<Multiset, f64>,
}

impl FaceMeasure {
    /// Build from raw masses, merging duplicates and dropping non-positive
    /// entries. No normalization is applied.
    pub fn from_masses(level: usize, masses: impl IntoIterator<Item = (Multiset, f64)>) -> Self {
        let mut map: BTreeMap<Multiset, f64> = BTreeMap::new();
        for (face, w) in masses {
            debug_assert_eq!(face.len(), level);
            *map.entry(face).or_insert(0.0) += w;
        }
        map.retain(|_, w| *w > 0.0);
        FaceMeasure { level, masses: map }
    }

    /// The point mass on the empty multiset.
    pub fn empty_face() -> Self {
        let mut masses = BTreeMap::new();
        masses.insert(Multiset::empty(), 1.0);
        FaceMeasure { level: 0, masses }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn masses(&self) -> &BTreeMap<Multiset, f64> {
        &self.masses
    }

    pub fn mass(&self, face: &Multiset) -> f64 {
        self.masses.get(face).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = &Multiset> {
        self.masses.keys()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn normalized(&self) -> Result<FaceMeasure> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::Empty);
        }
        Ok(FaceMeasure {
            level: self.level,
            masses: self.masses.iter().map(|(f, w)| (f.clone(), w / total)).collect(),
        })
    }

    /// Push the measure down to level `i` by choosing a uniformly random
    /// `i`-sub-multiset of a random face.
    pub fn pushdown(&self, i: usize) -> FaceMeasure {
        assert!(i <= self.level, "cannot push level {} up to {}", self.level, i);
        if i == self.level {
            return self.clone();
        }
        let denom = binomial(self.level as u64, i as u64) as f64;
        let mut out: BTreeMap<Multiset, f64> = BTreeMap::new();
        for (tau, &w) in &self.masses {
            for (sigma, n) in tau.submultisets(i) {
                *out.entry(sigma).or_insert(0.0) += w * n as f64 / denom;
            }
        }
        FaceMeasure { level: i, masses: out }
    }

    /// Level-1 masses as a dense per-vertex vector of length `n`.
    pub fn vertex_masses(&self, n: usize) -> Vec<f64> {
        assert_eq!(self.level, 1);
        let mut out = vec![0.0; n];
        for (f, &w) in &self.masses {
            out[f.as_slice()[0]] += w;
        }
        out
    }

    /// The link measure of `sigma`: `ρ ↦ μ(σ⊎ρ)·N(σ, σ⊎ρ)`, normalized.
    pub fn link(&self, sigma: &Multiset) -> Result<FaceMeasure> {
        if sigma.len() > self.level {
            return Err(Error::NotAFace(sigma.clone()));
        }
        let mut out: BTreeMap<Multiset, f64> = BTreeMap::new();
        for (tau, &w) in &self.masses {
            if let Some(rho) = tau.difference(sigma) {
                let n = crate::multiset::submultiset_count(sigma, tau);
                *out.entry(rho).or_insert(0.0) += w * n as f64;
            }
        }
        let total: f64 = out.values().sum();
        if total <= 0.0 {
            return Err(Error::NotAFace(sigma.clone()));
        }
        for w in out.values_mut() {
            *w /= total;
        }
        Ok(FaceMeasure {
            level: self.level - sigma.len(),
            masses: out,
        })
    }

    /// Links of every face at level `i`, computed in one pass over the top
    /// faces. Keys are the `i`-faces in canonical order.
    pub fn links_at_level(&self, i: usize) -> BTreeMap<Multiset, FaceMeasure> {
        assert!(i <= self.level);
        let mut buckets: BTreeMap<Multiset, BTreeMap<Multiset, f64>> = BTreeMap::new();
        for (tau, &w) in &self.masses {
            for (sigma, n) in tau.submultisets(i) {
                let rho = tau.difference(&sigma).expect("sub-multiset");
                *buckets.entry(sigma).or_default().entry(rho).or_insert(0.0) += w * n as f64;
            }
        }
        buckets
            .into_iter()
            .map(|(sigma, mut m)| {
                let total: f64 = m.values().sum();
                for w in m.values_mut() {
                    *w /= total;
                }
                (
                    sigma,
                    FaceMeasure {
                        level: self.level - i,
                        masses: m,
                    },
                )
            })
            .collect()
    }
}

/// A weighted `k`-uniform hypergraph `(V, μ)`: a vertex table and a
/// probability distribution on `k`-multisets of vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedHypergraph {
    k: usize,
    vertices: Vec<String>,
    measure: FaceMeasure,
}

/// Labels `"0"`, `"1"`, ... for `n` vertices.
pub fn numbered_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl WeightedHypergraph {
    /// Validating constructor. Duplicate faces are merged, zero-weight faces
    /// dropped, and the weights must already sum to one.
    pub fn new(
        k: usize,
        vertices: Vec<String>,
        faces: impl IntoIterator<Item = (Multiset, f64)>,
    ) -> Result<Self> {
        let faces = Self::checked_faces(k, &vertices, faces)?;
        let measure = FaceMeasure::from_masses(k, faces);
        let sum = measure.total();
        if (sum - 1.0).abs() > MEASURE_TOL {
            return Err(Error::WeightSum(sum));
        }
        Ok(WeightedHypergraph { k, vertices, measure })
    }

    /// Like [`WeightedHypergraph::new`] but rescales the weights to sum to one.
    pub fn from_unnormalized(
        k: usize,
        vertices: Vec<String>,
        faces: impl IntoIterator<Item = (Multiset, f64)>,
    ) -> Result<Self> {
        let faces = Self::checked_faces(k, &vertices, faces)?;
        let measure = FaceMeasure::from_masses(k, faces).normalized()?;
        Ok(WeightedHypergraph { k, vertices, measure })
    }

    fn checked_faces(
        k: usize,
        vertices: &[String],
        faces: impl IntoIterator<Item = (Multiset, f64)>,
    ) -> Result<Vec<(Multiset, f64)>> {
        if k < 2 {
            return Err(Error::Uniformity(k));
        }
        let mut seen = HashSet::new();
        for v in vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateLabel(v.clone()));
            }
        }
        let faces: Vec<(Multiset, f64)> = faces.into_iter().collect();
        for (face, w) in &faces {
            if face.len() != k {
                return Err(Error::FaceSize {
                    face: face.to_string(),
                    size: face.len(),
                    expected: k,
                });
            }
            if let Some(m) = face.max_vertex() {
                if m >= vertices.len() {
                    return Err(Error::VertexIndex {
                        index: m,
                        len: vertices.len(),
                    });
                }
            }
            if !w.is_finite() {
                return Err(Error::Malformed(format!("non-finite weight on face {face}")));
            }
            if *w < 0.0 {
                return Err(Error::NegativeWeight {
                    face: face.to_string(),
                    weight: *w,
                });
            }
        }
        Ok(faces)
    }

    pub(crate) fn from_measure_unchecked(vertices: Vec<String>, measure: FaceMeasure) -> Self {
        WeightedHypergraph {
            k: measure.level(),
            vertices,
            measure,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn measure(&self) -> &FaceMeasure {
        &self.measure
    }

    pub fn faces(&self) -> &BTreeMap<Multiset, f64> {
        self.measure.masses()
    }

    pub fn weight(&self, face: &Multiset) -> f64 {
        self.measure.mass(face)
    }

    /// `μ_i`, for `0 ≤ i ≤ k`.
    pub fn induced_measure(&self, i: usize) -> FaceMeasure {
        self.measure.pushdown(i)
    }

    /// `μ_1` as a dense vector indexed by vertex.
    pub fn vertex_measure(&self) -> Vec<f64> {
        self.measure.pushdown(1).vertex_masses(self.vertices.len())
    }

    /// `X^(i)` in canonical order.
    pub fn faces_at(&self, i: usize) -> Vec<Multiset> {
        self.measure.pushdown(i).support().cloned().collect()
    }

    /// The link measure of `sigma` (any size up to `k`).
    pub fn link_measure(&self, sigma: &Multiset) -> Result<FaceMeasure> {
        self.measure.link(sigma)
    }

    /// The link `X_σ` as a `(k − |σ|)`-uniform hypergraph on the same vertex
    /// table. Links below uniformity 2 are not hypergraphs in this crate's
    /// sense; use [`WeightedHypergraph::link_measure`] for those.
    pub fn link(&self, sigma: &Multiset) -> Result<WeightedHypergraph> {
        let m = self.measure.link(sigma)?;
        if m.level() < 2 {
            return Err(Error::Uniformity(m.level()));
        }
        Ok(WeightedHypergraph::from_measure_unchecked(self.vertices.clone(), m))
    }

    /// The skeleton `S(X)`: the graph with edge weights `μ_2`.
    pub fn skeleton(&self) -> WeightedHypergraph {
        if self.k == 2 {
            return self.clone();
        }
        WeightedHypergraph::from_measure_unchecked(self.vertices.clone(), self.measure.pushdown(2))
    }

    /// Same vertex table, different measure of the same uniformity.
    pub fn with_weights(&self, faces: impl IntoIterator<Item = (Multiset, f64)>) -> Result<Self> {
        WeightedHypergraph::new(self.k, self.vertices.clone(), faces)
    }
}

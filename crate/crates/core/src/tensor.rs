//! Tensor products and powers of weighted uniform hypergraphs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hypergraph::{FaceMeasure, WeightedHypergraph};
use crate::multiset::Multiset;

/// Default cap on the number of face pairings an explicit product may
/// enumerate.
pub const DEFAULT_FACE_CAP: usize = 1_000_000;

/// `X ⊗ X'` on the vertex set `V × V'`, with vertex `(a, b)` at index
/// `a·|V'| + b`.
///
/// The product measure lives on ordered faces: a face of each factor is read
/// in a uniformly random order, the two orders are zipped coordinatewise and
/// the result is forgotten back to a multiset. Fixing the order of the first
/// factor and averaging over the distinct orders of the second gives the same
/// distribution, which is what is enumerated here.
pub fn tensor_product(x: &WeightedHypergraph, y: &WeightedHypergraph) -> Result<WeightedHypergraph> {
    tensor_product_capped(x, y, DEFAULT_FACE_CAP)
}

pub fn tensor_product_capped(
    x: &WeightedHypergraph,
    y: &WeightedHypergraph,
    cap: usize,
) -> Result<WeightedHypergraph> {
    if x.k() != y.k() {
        return Err(Error::UniformityMismatch(x.k(), y.k()));
    }
    let orders: Vec<(Vec<Vec<usize>>, f64)> = y
        .faces()
        .iter()
        .map(|(f, &w)| (f.distinct_permutations(), w))
        .collect();
    let per_face: usize = orders.iter().map(|(p, _)| p.len()).sum();
    let needed = per_face.saturating_mul(x.faces().len());
    if needed > cap {
        return Err(Error::SizeCap { needed, cap });
    }
    let ny = y.num_vertices();
    let mut faces: BTreeMap<Multiset, f64> = BTreeMap::new();
    for (tau, &w) in x.faces() {
        let t = tau.as_slice();
        for (perms, w2) in &orders {
            let share = w * w2 / perms.len() as f64;
            for p in perms {
                let face = Multiset::new(t.iter().zip(p).map(|(&a, &b)| a * ny + b));
                *faces.entry(face).or_insert(0.0) += share;
            }
        }
    }
    let labels = x
        .vertices()
        .iter()
        .flat_map(|a| y.vertices().iter().map(move |b| format!("({a},{b})")))
        .collect();
    Ok(WeightedHypergraph::from_measure_unchecked(
        labels,
        FaceMeasure::from_masses(x.k(), faces),
    ))
}

/// `X^{⊗n}`, built by iterated products.
pub fn tensor_power(x: &WeightedHypergraph, n: usize) -> Result<WeightedHypergraph> {
    tensor_power_capped(x, n, DEFAULT_FACE_CAP)
}

pub fn tensor_power_capped(x: &WeightedHypergraph, n: usize, cap: usize) -> Result<WeightedHypergraph> {
    if n == 0 {
        return Err(Error::Parameter("tensor power must be at least 1".into()));
    }
    let mut acc = x.clone();
    for _ in 1..n {
        acc = tensor_product_capped(&acc, x, cap)?;
    }
    Ok(acc)
}

//! Hypergraph families with known spectral data.
//!
//! Each constructor returns a [`CatalogEntry`] holding the hypergraph, any
//! k-partite form or symmetry group it comes with, and the expected `λ`
//! values and bound, which [`CatalogEntry::check`] compares against the
//! computed pipeline.

use std::collections::BTreeMap;

use crate::bound::{hoffman_bound, symmetric_hoffman_bound, tensor_report};
use crate::error::{Error, Result};
use crate::hypergraph::{numbered_labels, WeightedHypergraph};
use crate::kpartite::KPartiteSpec;
use crate::multiset::{binomial, Multiset};
use crate::spectral::SymmetrySpec;

/// Power used to evaluate the limit of the tensor bound.
pub const TENSOR_LIMIT_POWER: usize = 64;

/// Size cap on the vertex count of uniform Frankl instances.
pub const FRANKL_VERTEX_CAP: u64 = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    /// The bound of the hypergraph itself.
    Static,
    /// The bound of high tensor powers.
    TensorLimit,
    /// The bound for independent sets invariant under the entry's symmetry.
    Symmetric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    /// Expected `λ_0, …, λ_{k−2}` of the hypergraph itself.
    pub lambdas: Vec<f64>,
    pub bound: f64,
    pub kind: ReferenceKind,
    pub tolerance: f64,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub hypergraph: WeightedHypergraph,
    pub kpartite: Option<KPartiteSpec>,
    pub symmetry: Option<SymmetrySpec>,
    pub reference: Option<Reference>,
}

/// Computed values next to the reference.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub lambdas: Vec<f64>,
    pub bound: f64,
    pub lambda_error: f64,
    pub bound_error: f64,
    pub pass: bool,
}

impl CatalogEntry {
    fn new(name: &str, params: &[(&str, String)], hypergraph: WeightedHypergraph) -> Self {
        CatalogEntry {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            hypergraph,
            kpartite: None,
            symmetry: None,
            reference: None,
        }
    }

    fn with_reference(mut self, lambdas: Vec<f64>, bound: f64, kind: ReferenceKind, tolerance: f64) -> Self {
        self.reference = Some(Reference {
            lambdas,
            bound,
            kind,
            tolerance,
        });
        self
    }

    /// Run the pipeline and compare with the reference, if any.
    pub fn check(&self) -> Result<Option<CheckOutcome>> {
        let Some(reference) = &self.reference else {
            return Ok(None);
        };
        let base = hoffman_bound(&self.hypergraph)?;
        let bound = match reference.kind {
            ReferenceKind::Static => base.bound,
            ReferenceKind::TensorLimit => tensor_report(&base, TENSOR_LIMIT_POWER).bound,
            ReferenceKind::Symmetric => {
                let sym = self
                    .symmetry
                    .as_ref()
                    .ok_or_else(|| Error::Parameter("entry has no symmetry".into()))?;
                symmetric_hoffman_bound(&self.hypergraph, sym)?.bound
            }
        };
        let lambda_error = base
            .lambdas
            .iter()
            .zip(&reference.lambdas)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let bound_error = (bound - reference.bound).abs();
        let pass = base.lambdas.len() == reference.lambdas.len()
            && lambda_error <= reference.tolerance
            && bound_error <= reference.tolerance;
        Ok(Some(CheckOutcome {
            lambdas: base.lambdas,
            bound,
            lambda_error,
            bound_error,
            pass,
        }))
    }
}

fn in_range(name: &str, value: f64, lo_exclusive: f64, hi: f64) -> Result<()> {
    if value > lo_exclusive && value <= hi + 1e-15 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {value} outside ({lo_exclusive}, {hi}]")))
    }
}

fn two_vertex(k: usize, faces: Vec<(Multiset, f64)>) -> Result<WeightedHypergraph> {
    WeightedHypergraph::new(k, numbered_labels(2), faces)
}

/// The p-biased intersecting graph: `[1,0]` with weight `2p`, `[0,0]` with
/// weight `1 − 2p`.
pub fn ekr_biased(p: f64) -> Result<CatalogEntry> {
    in_range("p", p, 0.0, 0.5)?;
    let x = two_vertex(
        2,
        vec![([0, 1].into(), 2.0 * p), ([0, 0].into(), (1.0 - 2.0 * p).max(0.0))],
    )?;
    let lambda = -p / (1.0 - p);
    Ok(CatalogEntry::new("ekr", &[("p", p.to_string())], x).with_reference(
        vec![lambda],
        p,
        ReferenceKind::Static,
        1e-9,
    ))
}

/// Matchings of size `s`: `[0^(s−1), 1]` with weight `sp`, `[0^s]` with the
/// rest.
pub fn matching_hypergraph(s: usize, p: f64) -> Result<CatalogEntry> {
    if s < 2 {
        return Err(Error::Parameter(format!("s = {s} must be at least 2")));
    }
    in_range("p", p, 0.0, 1.0 / s as f64)?;
    let sp = s as f64 * p;
    let mut one = vec![0; s - 1];
    one.push(1);
    let x = two_vertex(
        s,
        vec![(Multiset::new(one), sp), (Multiset::repeat(0, s), (1.0 - sp).max(0.0))],
    )?;
    // the link of [0^l] is the same family with p / (1 − l p)
    let lambdas: Vec<f64> = (0..=s - 2).map(|l| -p / (1.0 - (l + 1) as f64 * p)).collect();
    let product: f64 = lambdas.iter().map(|l| 1.0 - l).product();
    let bound = if s == 2 { -lambdas[0] / (1.0 - lambdas[0]) } else { 1.0 - 1.0 / product };
    Ok(
        CatalogEntry::new("matching", &[("s", s.to_string()), ("p", p.to_string())], x).with_reference(
            lambdas,
            bound,
            ReferenceKind::Static,
            1e-9,
        ),
    )
}

/// Triangles in the p-biased cube: `[1,1,0]` with weight `3p/2`, `[0,0,0]`
/// with the rest.
pub fn frankl_triangle_biased(p: f64) -> Result<CatalogEntry> {
    in_range("p", p, 0.0, 2.0 / 3.0)?;
    let x = two_vertex(
        3,
        vec![([0, 1, 1].into(), 1.5 * p), ([0, 0, 0].into(), (1.0 - 1.5 * p).max(0.0))],
    )?;
    let lambda0 = (1.0 - 2.0 * p) / (2.0 * (1.0 - p));
    Ok(
        CatalogEntry::new("frankl-biased", &[("p", p.to_string())], x).with_reference(
            vec![lambda0, -1.0],
            p.max(0.5),
            ReferenceKind::TensorLimit,
            1e-9,
        ),
    )
}

/// All `size`-subsets of `0..n` in lexicographic order, as bitmasks.
fn combinations(n: usize, size: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | 1 << i));
        let mut i = size;
        while i > 0 && idx[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn set_label(mask: u64) -> String {
    let items: Vec<String> = (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Uniform measure on triangles `{D∪E, D∪F, E∪F}` of `2k`-subsets of `[n]`,
/// for disjoint `k`-sets `D, E, F`.
pub fn frankl_triangle_uniform(n: usize, k: usize) -> Result<CatalogEntry> {
    if k == 0 || n < 3 * k || n > 4 * k - 1 {
        return Err(Error::Parameter(format!(
            "need 3k <= n <= 4k - 1, got n = {n}, k = {k}"
        )));
    }
    let vertices = binomial(n as u64, 2 * k as u64);
    if vertices > FRANKL_VERTEX_CAP {
        return Err(Error::SizeCap {
            needed: vertices as usize,
            cap: FRANKL_VERTEX_CAP as usize,
        });
    }
    let sets = combinations(n, 2 * k);
    let index: BTreeMap<u64, usize> = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let blocks = combinations(n, k);
    let mut faces = Vec::new();
    for (a, &d) in blocks.iter().enumerate() {
        for (b, &e) in blocks.iter().enumerate().skip(a + 1) {
            if d & e != 0 {
                continue;
            }
            for &f in &blocks[b + 1..] {
                if f & (d | e) != 0 {
                    continue;
                }
                let face = Multiset::new([index[&(d | e)], index[&(d | f)], index[&(e | f)]]);
                faces.push((face, 1.0));
            }
        }
    }
    let x = WeightedHypergraph::from_unnormalized(3, sets.into_iter().map(set_label).collect(), faces)?;
    let lambda0 = (n as f64 - 4.0 * k as f64) / (2.0 * (n as f64 - 2.0 * k as f64));
    let tolerance = if vertices > 100 { 1e-6 } else { 1e-9 };
    Ok(
        CatalogEntry::new("frankl-uniform", &[("n", n.to_string()), ("k", k.to_string())], x).with_reference(
            vec![lambda0, -1.0],
            2.0 * k as f64 / n as f64,
            ReferenceKind::Static,
            tolerance,
        ),
    )
}

/// k-wise intersecting families: `[0^k]` with weight `1 − kp/(k−1)` and
/// `[0, 1^(k−1)]` with weight `kp/(k−1)`.
pub fn kwise_intersecting(k: usize, p: f64) -> Result<CatalogEntry> {
    if k < 2 {
        return Err(Error::Parameter(format!("k = {k} must be at least 2")));
    }
    let kf = k as f64;
    in_range("p", p, 0.0, (kf - 1.0) / kf)?;
    let heavy = kf * p / (kf - 1.0);
    let mut face = vec![0];
    face.extend(std::iter::repeat_n(1, k - 1));
    let x = two_vertex(
        k,
        vec![(Multiset::new(face), heavy), (Multiset::repeat(0, k), (1.0 - heavy).max(0.0))],
    )?;
    let threshold = (kf - 2.0) / (kf - 1.0);
    let mut lambdas = vec![(threshold - p) / (1.0 - p)];
    lambdas.extend((1..=k - 2).map(|l| -1.0 / (kf - 1.0 - l as f64)));
    Ok(
        CatalogEntry::new("kwise", &[("k", k.to_string()), ("p", p.to_string())], x).with_reference(
            lambdas,
            p.max(threshold),
            ReferenceKind::TensorLimit,
            1e-9,
        ),
    )
}

/// Local index of `(i, j)` (1-based) in a Mantel part.
fn cell(m: usize, i: usize, j: usize) -> usize {
    (i - 1) * m + (j - 1)
}

/// The transposition `(i, j) ↦ (j, i)` on one Mantel part.
pub fn mantel_swap(m: usize) -> Vec<usize> {
    let mut perm = vec![0; m * m];
    for i in 1..=m {
        for j in 1..=m {
            perm[cell(m, i, j)] = cell(m, j, i);
        }
    }
    perm
}

/// Triangles `((i,j), (j,l), (l,i))` across three copies of `[m]×[m]`,
/// uniformly weighted, with the part rotation and the transposition
/// `V_1(i,j) → V_2(j,i)`, `V_2(i,j) → V_1(j,i)`, `V_3(i,j) → V_3(j,i)` as
/// symmetries.
pub fn mantel(m: usize) -> Result<CatalogEntry> {
    if ![2, 4, 8].contains(&m) {
        return Err(Error::Parameter(format!("m = {m} must be 2, 4 or 8")));
    }
    let labels: Vec<String> = (1..=m)
        .flat_map(|i| (1..=m).map(move |j| format!("({i},{j})")))
        .collect();
    let w = 1.0 / (m * m * m) as f64;
    let mut tuples = Vec::with_capacity(m * m * m);
    for i in 1..=m {
        for j in 1..=m {
            for l in 1..=m {
                tuples.push((vec![cell(m, i, j), cell(m, j, l), cell(m, l, i)], w));
            }
        }
    }
    let spec = KPartiteSpec::new(vec![labels.clone(), labels.clone(), labels], tuples)?;
    let x = spec.realize();
    let size = m * m;
    let rotation: Vec<usize> = (0..3 * size).map(|g| (g + size) % (3 * size)).collect();
    let swap = mantel_swap(m);
    let transposition: Vec<usize> = (0..3 * size)
        .map(|g| {
            let (part, local) = (g / size, g % size);
            let target = [1, 0, 2][part];
            target * size + swap[local]
        })
        .collect();
    for gen in [&rotation, &transposition] {
        for (face, &w) in x.faces() {
            let image = face.map(|v| gen[v]);
            if (x.weight(&image) - w).abs() > 1e-15 {
                return Err(Error::Symmetry {
                    generator: 0,
                    pair: format!("{face} -> {image}"),
                });
            }
        }
    }
    let symmetry = SymmetrySpec::new(vec![rotation, transposition])?;
    let mut entry = CatalogEntry::new("mantel", &[("m", m.to_string())], x).with_reference(
        vec![-0.5, -1.0],
        0.5,
        ReferenceKind::Symmetric,
        1e-9,
    );
    entry.kpartite = Some(spec);
    entry.symmetry = Some(symmetry);
    Ok(entry)
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Solutions of `A x = b` over `F_q`, read as `m`-multisets of field
/// elements and weighted by their number of orderings that solve the
/// system. With `exclude_degenerate`, constant solutions are dropped.
pub fn linear_system_hypergraph(
    q: u64,
    rows: &[Vec<u64>],
    b: &[u64],
    exclude_degenerate: bool,
) -> Result<CatalogEntry> {
    if !is_prime(q) || q > 13 {
        return Err(Error::Parameter(format!("q = {q} must be a prime at most 13")));
    }
    if rows.len() != b.len() || rows.is_empty() {
        return Err(Error::Dimension("need one constant per equation".into()));
    }
    let m = rows[0].len();
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension("equations have different lengths".into()));
    }
    if m < 2 {
        return Err(Error::Uniformity(m));
    }
    let total = (q as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > 1_000_000 {
        return Err(Error::SizeCap {
            needed: total.min(usize::MAX as u128) as usize,
            cap: 1_000_000,
        });
    }
    let mut counts: BTreeMap<Multiset, f64> = BTreeMap::new();
    let mut x = vec![0u64; m];
    for code in 0..total as u64 {
        let mut c = code;
        for slot in x.iter_mut().rev() {
            *slot = c % q;
            c /= q;
        }
        let solves = rows
            .iter()
            .zip(b)
            .all(|(row, &bj)| row.iter().zip(&x).map(|(a, v)| a * v).sum::<u64>() % q == bj % q);
        if !solves {
            continue;
        }
        if exclude_degenerate && x.iter().all(|&v| v == x[0]) {
            continue;
        }
        *counts.entry(Multiset::new(x.iter().map(|&v| v as usize))).or_insert(0.0) += 1.0;
    }
    if counts.is_empty() {
        return Err(Error::Empty);
    }
    let hypergraph = WeightedHypergraph::from_unnormalized(m, numbered_labels(q as usize), counts)?;
    let system: Vec<String> = rows
        .iter()
        .zip(b)
        .map(|(r, bj)| format!("{r:?}={bj}"))
        .collect();
    Ok(CatalogEntry::new(
        "linear-system",
        &[
            ("q", q.to_string()),
            ("system", system.join(";")),
            ("exclude_degenerate", exclude_degenerate.to_string()),
        ],
        hypergraph,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lambda_level;

    #[test]
    fn parameter_windows() {
        assert!(ekr_biased(0.6).is_err());
        assert!(matching_hypergraph(3, 0.4).is_err());
        assert!(frankl_triangle_biased(0.7).is_err());
        assert!(frankl_triangle_uniform(8, 2).is_err());
        assert!(kwise_intersecting(3, 0.7).is_err());
        assert!(mantel(3).is_err());
        assert!(linear_system_hypergraph(4, &[vec![1, 1]], &[0], false).is_err());
    }

    #[test]
    fn small_instances_reproduce_references() {
        let entries = [
            ekr_biased(0.3).unwrap(),
            ekr_biased(0.5).unwrap(),
            matching_hypergraph(3, 0.2).unwrap(),
            matching_hypergraph(4, 0.25).unwrap(),
            frankl_triangle_biased(0.6).unwrap(),
            frankl_triangle_biased(0.4).unwrap(),
            frankl_triangle_uniform(7, 2).unwrap(),
            kwise_intersecting(4, 0.7).unwrap(),
            kwise_intersecting(4, 0.5).unwrap(),
            mantel(2).unwrap(),
        ];
        for e in &entries {
            let outcome = e.check().unwrap().unwrap();
            assert!(outcome.pass, "{} {:?}: {outcome:?}", e.name, e.params);
        }
    }

    #[test]
    fn reductions_to_ekr() {
        let ekr = ekr_biased(0.3).unwrap().hypergraph;
        assert_eq!(matching_hypergraph(2, 0.3).unwrap().hypergraph, ekr);
        let kwise = kwise_intersecting(2, 0.3).unwrap().hypergraph;
        for (a, b) in kwise.faces().values().zip(ekr.faces().values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn frankl_uniform_shape() {
        let e = frankl_triangle_uniform(7, 2).unwrap();
        assert_eq!(e.hypergraph.num_vertices(), 35);
        assert_eq!(e.hypergraph.faces().len(), 105);
        assert_eq!(e.hypergraph.vertices()[0], "{0,1,2,3}");
        let l1 = lambda_level(&e.hypergraph, 1).unwrap();
        assert!((l1.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn mantel_shape() {
        let e = mantel(2).unwrap();
        assert_eq!(e.hypergraph.num_vertices(), 12);
        assert_eq!(e.hypergraph.faces().len(), 8);
        assert_eq!(e.hypergraph.vertices()[1], "V1:(1,2)");
        assert_eq!(mantel_swap(2), vec![0, 2, 1, 3]);
    }

    #[test]
    fn linear_systems() {
        let e = linear_system_hypergraph(3, &[vec![1, 1, 1]], &[0], false).unwrap();
        let faces = e.hypergraph.faces();
        assert_eq!(faces.len(), 4);
        assert!((faces[&Multiset::from([0, 1, 2])] - 6.0 / 9.0).abs() < 1e-15);
        assert!((faces[&Multiset::from([1, 1, 1])] - 1.0 / 9.0).abs() < 1e-15);
        let e = linear_system_hypergraph(3, &[vec![1, 1, 1]], &[0], true).unwrap();
        assert_eq!(e.hypergraph.faces().len(), 1);
        let e = linear_system_hypergraph(2, &[vec![1, 1]], &[0], false).unwrap();
        assert_eq!(e.hypergraph.faces().len(), 2);
        assert!((e.hypergraph.weight(&[1, 1].into()) - 0.5).abs() < 1e-15);
        assert_eq!(
            linear_system_hypergraph(2, &[vec![1, 1]], &[0], true).unwrap_err(),
            Error::Empty
        );
    }
}

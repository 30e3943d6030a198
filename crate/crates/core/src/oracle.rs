//! Exact independence numbers by exhaustive search.
//!
//! A face is contained in a vertex set when its support is: a loop face
//! `[v, v, w]` forbids `{v, w}`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hypergraph::WeightedHypergraph;
use crate::kpartite::KPartiteSpec;

/// Largest `μ_1` support [`brute_force_alpha`] accepts.
pub const DEFAULT_ALPHA_CAP: usize = 30;

/// Largest part [`brute_force_symmetric_cross`] accepts.
pub const SYMMETRIC_PART_CAP: usize = 20;

const TIE_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceResult {
    pub alpha: f64,
    /// Sorted vertex indices; the lexicographically least maximizer.
    pub witness: Vec<usize>,
}

/// True iff no face of `x` has its support inside `set`.
pub fn is_independent(x: &WeightedHypergraph, set: &[usize]) -> bool {
    let mut member = vec![false; x.num_vertices()];
    for &v in set {
        if v < member.len() {
            member[v] = true;
        }
    }
    !x.faces().keys().any(|f| f.as_slice().iter().all(|&v| member[v]))
}

pub fn brute_force_alpha(x: &WeightedHypergraph) -> Result<IndependenceResult> {
    brute_force_alpha_capped(x, DEFAULT_ALPHA_CAP)
}

/// Exact `α(X) = max μ_1(I)` over independent `I`, searching only the
/// vertices of positive `μ_1` mass.
pub fn brute_force_alpha_capped(x: &WeightedHypergraph, cap: usize) -> Result<IndependenceResult> {
    let mu = x.vertex_measure();
    let support: Vec<usize> = (0..mu.len()).filter(|&v| mu[v] > 0.0).collect();
    let n = support.len();
    if n > cap || n > 63 {
        return Err(Error::SizeCap { needed: n, cap: cap.min(63) });
    }
    let mut local = vec![usize::MAX; mu.len()];
    for (i, &v) in support.iter().enumerate() {
        local[v] = i;
    }
    let mass: Vec<f64> = support.iter().map(|&v| mu[v]).collect();
    // faces touching each local vertex, as support bitmasks
    let mut touching: Vec<Vec<u64>> = vec![Vec::new(); n];
    for face in x.faces().keys() {
        let mask = face.as_slice().iter().fold(0u64, |m, &v| m | 1 << local[v]);
        for i in 0..n {
            if mask >> i & 1 == 1 {
                touching[i].push(mask);
            }
        }
    }
    for list in &mut touching {
        list.sort_unstable();
        list.dedup();
    }
    let search = Search {
        mass: &mass,
        touching: &touching,
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mass[b].total_cmp(&mass[a]).then(a.cmp(&b)));
    let alpha = search.maximum(&order);

    let ascending: Vec<usize> = (0..n).collect();
    let set = search
        .first_reaching(&ascending, alpha - TIE_EPS)
        .expect("the maximum is reachable");
    let witness: Vec<usize> = (0..n).filter(|&i| set >> i & 1 == 1).map(|i| support[i]).collect();
    Ok(IndependenceResult { alpha, witness })
}

struct Search<'a> {
    mass: &'a [f64],
    touching: &'a [Vec<u64>],
}

impl Search<'_> {
    fn can_add(&self, set: u64, v: usize) -> bool {
        let next = set | 1 << v;
        self.touching[v].iter().all(|&f| f & next != f)
    }

    /// Branch and bound over `order`, seeded with the greedy solution.
    fn maximum(&self, order: &[usize]) -> f64 {
        let mut greedy = 0u64;
        let mut best = 0.0;
        for &v in order {
            if self.can_add(greedy, v) {
                greedy |= 1 << v;
                best += self.mass[v];
            }
        }
        let suffix = suffix_sums(order, self.mass);
        self.branch(order, &suffix, 0, 0, 0.0, &mut best);
        best
    }

    fn branch(&self, order: &[usize], suffix: &[f64], depth: usize, set: u64, value: f64, best: &mut f64) {
        if value > *best {
            *best = value;
        }
        if depth == order.len() || value + suffix[depth] <= *best {
            return;
        }
        let v = order[depth];
        if self.can_add(set, v) {
            self.branch(order, suffix, depth + 1, set | 1 << v, value + self.mass[v], best);
        }
        self.branch(order, suffix, depth + 1, set, value, best);
    }

    /// First independent set in include-first order over `order` whose
    /// value reaches `target`. Over ascending indices this is the
    /// lexicographically least such maximal set.
    fn first_reaching(&self, order: &[usize], target: f64) -> Option<u64> {
        let suffix = suffix_sums(order, self.mass);
        self.reach(order, &suffix, 0, 0, 0.0, target)
    }

    fn reach(&self, order: &[usize], suffix: &[f64], depth: usize, set: u64, value: f64, target: f64) -> Option<u64> {
        if value + suffix[depth] < target {
            return None;
        }
        if depth == order.len() {
            return Some(set);
        }
        let v = order[depth];
        if self.can_add(set, v) {
            if let Some(s) = self.reach(order, suffix, depth + 1, set | 1 << v, value + self.mass[v], target) {
                return Some(s);
            }
        }
        self.reach(order, suffix, depth + 1, set, value, target)
    }
}

fn suffix_sums(order: &[usize], mass: &[f64]) -> Vec<f64> {
    let mut suffix = vec![0.0; order.len() + 1];
    for d in (0..order.len()).rev() {
        suffix[d] = suffix[d + 1] + mass[order[d]];
    }
    suffix
}

/// True iff `A_1 × … × A_k` carries no face mass.
pub fn cross_independent(spec: &KPartiteSpec, sets: &[Vec<usize>]) -> Result<bool> {
    if sets.len() != spec.k() {
        return Err(Error::Dimension(format!("expected {} sets, got {}", spec.k(), sets.len())));
    }
    let mut member: Vec<Vec<bool>> = spec.parts().iter().map(|p| vec![false; p.len()]).collect();
    for (a, set) in sets.iter().enumerate() {
        for &i in set {
            if i >= member[a].len() {
                return Err(Error::VertexIndex {
                    index: i,
                    len: member[a].len(),
                });
            }
            member[a][i] = true;
        }
    }
    Ok(!spec
        .faces()
        .keys()
        .any(|t| t.iter().enumerate().all(|(a, &i)| member[a][i])))
}

/// Best single set used in every part of a k-partite hypergraph.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricCrossResult {
    /// `μ_1` measure of the realized vertex set.
    pub value: f64,
    /// Indices into the first part, ascending.
    pub set: Vec<usize>,
}

/// Maximize the `μ_1` measure of `A` placed in every part (matched by label)
/// over cross-independent choices. With `closure`, a permutation of the
/// first part, only sets closed under it are considered.
pub fn brute_force_symmetric_cross(
    spec: &KPartiteSpec,
    closure: Option<&[usize]>,
) -> Result<SymmetricCrossResult> {
    let base = &spec.parts()[0];
    let n = base.len();
    if n > SYMMETRIC_PART_CAP {
        return Err(Error::SizeCap {
            needed: n,
            cap: SYMMETRIC_PART_CAP,
        });
    }
    // position of each first-part label inside every part
    let mut to_part: Vec<Vec<usize>> = Vec::with_capacity(spec.k());
    for part in spec.parts() {
        let index: HashMap<&str, usize> = part.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if part.len() != n {
            return Err(Error::Dimension("parts have different sizes".into()));
        }
        let map = base
            .iter()
            .map(|l| {
                index
                    .get(l.as_str())
                    .copied()
                    .ok_or_else(|| Error::Dimension(format!("label {l} missing from a part")))
            })
            .collect::<Result<Vec<_>>>()?;
        to_part.push(map);
    }
    let k = spec.k() as f64;
    let mut weight = vec![0.0; n];
    for (t, &w) in spec.faces() {
        for (a, &i) in t.iter().enumerate() {
            let j = to_part[a].iter().position(|&x| x == i).expect("labels match");
            weight[j] += w / k;
        }
    }

    let orbits: Vec<Vec<usize>> = match closure {
        None => (0..n).map(|i| vec![i]).collect(),
        Some(perm) => {
            if perm.len() != n || {
                let mut seen = vec![false; n];
                perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
            } {
                return Err(Error::Malformed("closure is not a permutation of the first part".into()));
            }
            let mut seen = vec![false; n];
            let mut out = Vec::new();
            for start in 0..n {
                if seen[start] {
                    continue;
                }
                let mut cycle = Vec::new();
                let mut v = start;
                while !seen[v] {
                    seen[v] = true;
                    cycle.push(v);
                    v = perm[v];
                }
                cycle.sort_unstable();
                out.push(cycle);
            }
            out
        }
    };

    let faces: Vec<&Vec<usize>> = spec.faces().keys().collect();
    let mut best = SymmetricCrossResult {
        value: 0.0,
        set: Vec::new(),
    };
    for mask in 0u64..(1u64 << orbits.len()) {
        let mut member = vec![false; n];
        for (o, orbit) in orbits.iter().enumerate() {
            if mask >> o & 1 == 1 {
                for &i in orbit {
                    member[i] = true;
                }
            }
        }
        let blocked = faces.iter().any(|t| {
            t.iter()
                .enumerate()
                .all(|(a, &i)| member[to_part[a].iter().position(|&x| x == i).expect("labels match")])
        });
        if blocked {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&i| member[i]).collect();
        let value: f64 = set.iter().map(|&i| weight[i]).sum();
        if value > best.value + TIE_EPS || (value >= best.value - TIE_EPS && set < best.set && value > 0.0) {
            best = SymmetricCrossResult { value, set };
        }
    }
    Ok(best)
}

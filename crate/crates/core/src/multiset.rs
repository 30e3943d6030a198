//! Finite multisets of vertex indices.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A multiset of vertex indices, stored as a sorted list with repetitions.
///
/// The sorted representation is canonical, so derived equality, hashing and
/// ordering act on multisets. The ordering is lexicographic on the expanded
/// list, which is the order used by the file format.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiset(Vec<usize>);

impl Multiset {
    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        Multiset(v)
    }

    pub fn empty() -> Self {
        Multiset(Vec::new())
    }

    pub fn singleton(v: usize) -> Self {
        Multiset(vec![v])
    }

    /// `count` copies of `v`.
    pub fn repeat(v: usize, count: usize) -> Self {
        Multiset(vec![v; count])
    }

    /// Total size, counting multiplicity.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sorted vertex list with repetitions.
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// `(vertex, multiplicity)` pairs, ascending by vertex.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &v in &self.0 {
            match out.last_mut() {
                Some((u, m)) if *u == v => *m += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    pub fn multiplicity(&self, v: usize) -> usize {
        let lo = self.0.partition_point(|&x| x < v);
        let hi = self.0.partition_point(|&x| x <= v);
        hi - lo
    }

    /// Distinct vertices.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.0.clone();
        s.dedup();
        s
    }

    pub fn max_vertex(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Multiset sum `self ⊎ other`.
    pub fn union(&self, other: &Multiset) -> Multiset {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i] <= other.0[j] {
                v.push(self.0[i]);
                i += 1;
            } else {
                v.push(other.0[j]);
                j += 1;
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        Multiset(v)
    }

    /// `self ∖ sub`, or `None` when `sub` is not a sub-multiset.
    pub fn difference(&self, sub: &Multiset) -> Option<Multiset> {
        let mut out = Vec::with_capacity(self.len().saturating_sub(sub.len()));
        let mut j = 0;
        for &v in &self.0 {
            if j < sub.0.len() && sub.0[j] == v {
                j += 1;
            } else {
                if j < sub.0.len() && sub.0[j] < v {
                    return None;
                }
                out.push(v);
            }
        }
        if j == sub.0.len() {
            Some(Multiset(out))
        } else {
            None
        }
    }

    pub fn is_submultiset_of(&self, other: &Multiset) -> bool {
        other.difference(self).is_some()
    }

    /// Every distinct sub-multiset of size `size` together with the number of
    /// position subsets of `self` that produce it.
    pub fn submultisets(&self, size: usize) -> Vec<(Multiset, u64)> {
        let entries = self.entries();
        let mut out = Vec::new();
        let mut picked: Vec<usize> = Vec::with_capacity(size);
        fn rec(
            entries: &[(usize, usize)],
            idx: usize,
            left: usize,
            count: u64,
            picked: &mut Vec<usize>,
            out: &mut Vec<(Multiset, u64)>,
        ) {
            if left == 0 {
                out.push((Multiset(picked.clone()), count));
                return;
            }
            if idx == entries.len() {
                return;
            }
            let remaining: usize = entries[idx..].iter().map(|e| e.1).sum();
            if remaining < left {
                return;
            }
            let (v, m) = entries[idx];
            for take in (0..=m.min(left)).rev() {
                let base = picked.len();
                picked.extend(std::iter::repeat_n(v, take));
                rec(
                    entries,
                    idx + 1,
                    left - take,
                    count * binomial(m as u64, take as u64),
                    picked,
                    out,
                );
                picked.truncate(base);
            }
        }
        rec(&entries, 0, size, 1, &mut picked, &mut out);
        out
    }

    /// Number of distinct orderings of the elements.
    pub fn orderings(&self) -> u64 {
        let mut n = factorial(self.len() as u64);
        for (_, m) in self.entries() {
            n /= factorial(m as u64);
        }
        n
    }

    /// Every distinct ordering of the elements, in lexicographic order.
    pub fn distinct_permutations(&self) -> Vec<Vec<usize>> {
        let mut cur = self.0.clone();
        let mut out = vec![cur.clone()];
        // next_permutation over a sorted start visits each distinct ordering once
        loop {
            let n = cur.len();
            if n < 2 {
                break;
            }
            let mut i = n - 1;
            while i > 0 && cur[i - 1] >= cur[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = n - 1;
            while cur[j] <= cur[i - 1] {
                j -= 1;
            }
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(cur.clone());
        }
        out
    }

    /// Apply a vertex map and re-canonicalize.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Multiset {
        Multiset::new(self.0.iter().map(|&v| f(v)))
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<usize>> for Multiset {
    fn from(v: Vec<usize>) -> Self {
        Multiset::new(v)
    }
}

impl<const N: usize> From<[usize; N]> for Multiset {
    fn from(v: [usize; N]) -> Self {
        Multiset::new(v)
    }
}

/// `N(σ, τ) = ∏_v C(mult_τ(v), mult_σ(v))`: the number of position subsets of
/// `tau` whose elements form `sigma`. Zero when `sigma` is not contained in `tau`.
pub fn submultiset_count(sigma: &Multiset, tau: &Multiset) -> u64 {
    if sigma.len() > tau.len() {
        return 0;
    }
    let mut count = 1u64;
    for (v, m) in sigma.entries() {
        let have = tau.multiplicity(v);
        if have < m {
            return 0;
        }
        count *= binomial(have as u64, m as u64);
    }
    count
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

//! Weighted k-partite hypergraphs and their realization as ordinary uniform
//! hypergraphs on the disjoint union of the parts.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::hypergraph::{WeightedHypergraph, MEASURE_TOL};
use crate::multiset::Multiset;

/// A probability distribution on `V_1 × … × V_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct KPartiteSpec {
    parts: Vec<Vec<String>>,
    faces: BTreeMap<Vec<usize>, f64>,
}

impl KPartiteSpec {
    pub fn new(
        parts: Vec<Vec<String>>,
        faces: impl IntoIterator<Item = (Vec<usize>, f64)>,
    ) -> Result<Self> {
        let k = parts.len();
        if k < 2 {
            return Err(Error::Uniformity(k));
        }
        for part in &parts {
            let mut seen = HashSet::new();
            for label in part {
                if !seen.insert(label.as_str()) {
                    return Err(Error::DuplicateLabel(label.clone()));
                }
            }
        }
        let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (t, w) in faces {
            if t.len() != k {
                return Err(Error::FaceSize {
                    face: format!("{t:?}"),
                    size: t.len(),
                    expected: k,
                });
            }
            for (a, &i) in t.iter().enumerate() {
                if i >= parts[a].len() {
                    return Err(Error::VertexIndex {
                        index: i,
                        len: parts[a].len(),
                    });
                }
            }
            if !w.is_finite() {
                return Err(Error::Malformed(format!("non-finite weight on tuple {t:?}")));
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight {
                    face: format!("{t:?}"),
                    weight: w,
                });
            }
            *map.entry(t).or_insert(0.0) += w;
        }
        map.retain(|_, w| *w > 0.0);
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > MEASURE_TOL {
            return Err(Error::WeightSum(sum));
        }
        Ok(KPartiteSpec { parts, faces: map })
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<String>] {
        &self.parts
    }

    pub fn faces(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.faces
    }

    /// Global vertex index of local vertex `i` in part `part` after
    /// [`KPartiteSpec::realize`].
    pub fn global_index(&self, part: usize, i: usize) -> usize {
        self.parts[..part].iter().map(Vec::len).sum::<usize>() + i
    }

    /// Label given to local vertex `i` of part `part` in the realization.
    pub fn global_label(&self, part: usize, i: usize) -> String {
        format!("V{}:{}", part + 1, self.parts[part][i])
    }

    /// The k-uniform hypergraph on the disjoint union of the parts whose faces
    /// are the tuples read as multisets.
    pub fn realize(&self) -> WeightedHypergraph {
        let mut labels = Vec::new();
        for (a, part) in self.parts.iter().enumerate() {
            for i in 0..part.len() {
                labels.push(self.global_label(a, i));
            }
        }
        let offsets: Vec<usize> = (0..self.k()).map(|a| self.global_index(a, 0)).collect();
        let faces = self.faces.iter().map(|(t, &w)| {
            (
                Multiset::new(t.iter().enumerate().map(|(a, &i)| offsets[a] + i)),
                w,
            )
        });
        WeightedHypergraph::new(self.k(), labels, faces)
            .expect("a valid k-partite spec realizes to a valid hypergraph")
    }

    /// Part-wise tensor product: parts `V_a × V'_a`, product measure on tuples.
    pub fn tensor_product(&self, other: &KPartiteSpec) -> Result<KPartiteSpec> {
        if self.k() != other.k() {
            return Err(Error::UniformityMismatch(self.k(), other.k()));
        }
        let parts: Vec<Vec<String>> = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(p, q)| {
                p.iter()
                    .flat_map(|a| q.iter().map(move |b| format!("({a},{b})")))
                    .collect()
            })
            .collect();
        let mut faces = Vec::with_capacity(self.faces.len() * other.faces.len());
        for (t, &w) in &self.faces {
            for (s, &v) in &other.faces {
                let tuple = t
                    .iter()
                    .zip(s)
                    .enumerate()
                    .map(|(a, (&i, &j))| i * other.parts[a].len() + j)
                    .collect();
                faces.push((tuple, w * v));
            }
        }
        KPartiteSpec::new(parts, faces)
    }

    pub fn tensor_power(&self, n: usize) -> Result<KPartiteSpec> {
        if n == 0 {
            return Err(Error::Parameter("tensor power must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.tensor_product(self)?;
        }
        Ok(acc)
    }
}

/// Realize a k-partite specification as a uniform hypergraph.
pub fn from_kpartite(spec: &KPartiteSpec) -> WeightedHypergraph {
    spec.realize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_bipartite() {
        let spec = KPartiteSpec::new(vec![vec!["a".into()], vec!["b".into()]], [(vec![0, 0], 1.0)])
            .unwrap();
        let x = from_kpartite(&spec);
        assert_eq!(x.k(), 2);
        assert_eq!(x.vertices(), &["V1:a".to_string(), "V2:b".to_string()]);
        assert_eq!(x.faces().len(), 1);
        assert_eq!(x.weight(&[0, 1].into()), 1.0);
    }

    #[test]
    fn one_part_rejected() {
        let spec = KPartiteSpec::new(vec![vec!["a".into()]], [(vec![0], 1.0)]);
        assert_eq!(spec, Err(Error::Uniformity(1)));
    }

    #[test]
    fn tensor_of_parts_is_product_measure() {
        let spec = KPartiteSpec::new(
            vec![vec!["0".into(), "1".into()], vec!["0".into()]],
            [(vec![0, 0], 0.25), (vec![1, 0], 0.75)],
        )
        .unwrap();
        let sq = spec.tensor_product(&spec).unwrap();
        assert_eq!(sq.parts()[0].len(), 4);
        assert_eq!(sq.parts()[1].len(), 1);
        assert!((sq.faces()[&vec![3, 0]] - 0.5625).abs() < 1e-15);
        assert!((sq.faces()[&vec![1, 0]] - 0.1875).abs() < 1e-15);
        assert_eq!(spec.tensor_power(1).unwrap(), spec);
    }
}

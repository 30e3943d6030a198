//! JSON file formats: hypergraphs, k-partite specifications, symmetry
//! generators and optimizer support files.
//!
//! Canonical hypergraph documents list faces in lexicographic order of `m`
//! and print weights with 17 significant digits, so a parse/serialize cycle
//! is the identity on canonical input.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::hypergraph::WeightedHypergraph;
use crate::kpartite::KPartiteSpec;
use crate::multiset::Multiset;
use crate::optimizer::SupportProblem;
use crate::spectral::SymmetrySpec;

/// `%.17g`-style rendering: 17 significant digits, trailing zeros removed.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..17).contains(&exp) {
        let mut frac = digits[1..].trim_end_matches('0').to_string();
        if !frac.is_empty() {
            frac.insert(0, '.');
        }
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{}{frac}e{esign}{:02}", &digits[..1], exp.abs());
    }
    let (int_part, frac_part) = if exp >= 0 {
        let e = exp as usize + 1;
        (digits[..e].to_string(), digits[e..].to_string())
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        ("0".to_string(), format!("{zeros}{digits}"))
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Serde helper writing an `f64` as a raw 17-significant-digit number.
pub fn serialize_g17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(fmt_g17(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn serialize_g17_vec<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct G(f64);
    impl Serialize for G {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            serialize_g17(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&G(x))?;
    }
    seq.end()
}

#[derive(Serialize, Deserialize)]
struct FaceDoc {
    m: Vec<usize>,
    #[serde(serialize_with = "serialize_g17")]
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct HypergraphDoc {
    k: usize,
    vertices: Vec<String>,
    faces: Vec<FaceDoc>,
}

fn malformed(e: serde_json::Error) -> Error {
    Error::Malformed(e.to_string())
}

fn to_pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn parse_hypergraph(text: &str) -> Result<WeightedHypergraph> {
    let doc: HypergraphDoc = serde_json::from_str(text).map_err(malformed)?;
    if doc.k < 2 {
        return Err(Error::Uniformity(doc.k));
    }
    WeightedHypergraph::new(
        doc.k,
        doc.vertices,
        doc.faces.into_iter().map(|f| (Multiset::new(f.m), f.w)),
    )
}

pub fn hypergraph_to_json(x: &WeightedHypergraph) -> String {
    let doc = HypergraphDoc {
        k: x.k(),
        vertices: x.vertices().to_vec(),
        faces: x
            .faces()
            .iter()
            .map(|(f, &w)| FaceDoc {
                m: f.as_slice().to_vec(),
                w,
            })
            .collect(),
    };
    to_pretty(&doc)
}

#[derive(Serialize, Deserialize)]
struct TupleDoc {
    t: Vec<usize>,
    #[serde(serialize_with = "serialize_g17")]
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct KPartiteDoc {
    parts: Vec<Vec<String>>,
    faces: Vec<TupleDoc>,
}

pub fn parse_kpartite(text: &str) -> Result<KPartiteSpec> {
    let doc: KPartiteDoc = serde_json::from_str(text).map_err(malformed)?;
    KPartiteSpec::new(doc.parts, doc.faces.into_iter().map(|f| (f.t, f.w)))
}

pub fn kpartite_to_json(spec: &KPartiteSpec) -> String {
    let doc = KPartiteDoc {
        parts: spec.parts().to_vec(),
        faces: spec
            .faces()
            .iter()
            .map(|(t, &w)| TupleDoc { t: t.clone(), w })
            .collect(),
    };
    to_pretty(&doc)
}

#[derive(Serialize, Deserialize)]
struct SymmetryDoc {
    generators: Vec<Vec<usize>>,
}

/// Parse a generator list. Each generator must be a permutation; whether it
/// fits a particular hypergraph is checked when it is used.
pub fn parse_symmetry(text: &str) -> Result<SymmetrySpec> {
    let doc: SymmetryDoc = serde_json::from_str(text).map_err(malformed)?;
    SymmetrySpec::new(doc.generators)
}

pub fn symmetry_to_json(sym: &SymmetrySpec) -> String {
    to_pretty(&SymmetryDoc {
        generators: sym.generators().to_vec(),
    })
}

#[derive(Deserialize)]
struct SupportFaceDoc {
    m: Vec<usize>,
    #[allow(dead_code)]
    w: Option<f64>,
}

#[derive(Deserialize)]
struct SupportDoc {
    k: usize,
    vertices: Vec<String>,
    faces: Vec<SupportFaceDoc>,
    nu: Vec<f64>,
}

/// A support file: hypergraph layout whose weights are ignored, plus a
/// target vertex measure `nu`.
pub fn parse_support(text: &str) -> Result<SupportProblem> {
    let doc: SupportDoc = serde_json::from_str(text).map_err(malformed)?;
    SupportProblem::new(
        doc.k,
        doc.vertices,
        doc.faces.into_iter().map(|f| Multiset::new(f.m)).collect(),
        doc.nu,
    )
}

#[derive(Serialize)]
struct SupportOutDoc<'a> {
    k: usize,
    vertices: &'a [String],
    faces: Vec<SupportFaceOut>,
    #[serde(serialize_with = "serialize_g17_vec")]
    nu: &'a [f64],
}

#[derive(Serialize)]
struct SupportFaceOut {
    m: Vec<usize>,
}

pub fn support_to_json(problem: &SupportProblem) -> String {
    to_pretty(&SupportOutDoc {
        k: problem.k(),
        vertices: problem.vertices(),
        faces: problem
            .faces()
            .iter()
            .map(|f| SupportFaceOut {
                m: f.as_slice().to_vec(),
            })
            .collect(),
        nu: problem.nu(),
    })
}

//! Acceptance suite. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line each, and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use hhb_core::bound::{hoffman_bound, symmetric_hoffman_bound, tensor_bound};
use hhb_core::catalog::{self, mantel_swap};
use hhb_core::hypergraph::{numbered_labels, WeightedHypergraph};
use hhb_core::multiset::Multiset;
use hhb_core::optimizer::{optimize_weights, OptimizerConfig, SupportProblem};
use hhb_core::oracle::brute_force_symmetric_cross;
use hhb_core::spectral::{invariant_lambda_min, SkeletonOperator};
use hhb_core::tensor::{tensor_power, tensor_product};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got:.12}, want {want:.12} (tol {tol:e})"))
    }
}

// ---------------------------------------------------------------------------
// independent oracles

/// Random k-uniform hypergraph on at most `max_n` vertices.
fn random_hypergraph(rng: &mut ChaCha8Rng, k: usize, max_n: usize) -> WeightedHypergraph {
    let n = rng.gen_range(2..=max_n);
    let count = rng.gen_range(1..=2 * n);
    let faces: Vec<(Multiset, f64)> = (0..count)
        .map(|_| {
            let face = Multiset::new((0..k).map(|_| rng.gen_range(0..n)));
            (face, rng.gen_range(0.05..1.0))
        })
        .collect();
    WeightedHypergraph::from_unnormalized(k, numbered_labels(n), faces).unwrap()
}

/// `α` by enumerating every vertex subset.
fn exhaustive_alpha(x: &WeightedHypergraph) -> f64 {
    let n = x.num_vertices();
    let mu = x.vertex_measure();
    let supports: Vec<u32> = x
        .faces()
        .keys()
        .map(|f| f.as_slice().iter().fold(0, |m, &v| m | 1 << v))
        .collect();
    let mut best: f64 = 0.0;
    for set in 0u32..(1 << n) {
        if supports.iter().all(|&s| s & set != s) {
            best = best.max((0..n).filter(|&v| set >> v & 1 == 1).map(|v| mu[v]).sum());
        }
    }
    best
}

/// `μ_i` by dropping every set of `k − i` slot positions from every face.
fn slot_measure(x: &WeightedHypergraph, i: usize) -> BTreeMap<Multiset, f64> {
    let k = x.k();
    let subsets: Vec<u32> = (0u32..(1 << k)).filter(|s| s.count_ones() as usize == i).collect();
    let mut out = BTreeMap::new();
    for (face, &w) in x.faces() {
        for s in &subsets {
            let kept = (0..k).filter(|&p| s >> p & 1 == 1).map(|p| face.as_slice()[p]);
            *out.entry(Multiset::new(kept)).or_insert(0.0) += w / subsets.len() as f64;
        }
    }
    out
}

/// Skeleton spectrum from the dense symmetrized matrix, built here from `μ_2`.
fn skeleton_eigenvalues(x: &WeightedHypergraph) -> Vec<f64> {
    let n = x.num_vertices();
    let mu2 = slot_measure(x, 2);
    let mut mu1 = vec![0.0; n];
    for (e, &w) in &mu2 {
        mu1[e.as_slice()[0]] += w / 2.0;
        mu1[e.as_slice()[1]] += w / 2.0;
    }
    let support: Vec<usize> = (0..n).filter(|&v| mu1[v] > 1e-12).collect();
    let mut s = DMatrix::zeros(support.len(), support.len());
    for (a, &u) in support.iter().enumerate() {
        for (b, &v) in support.iter().enumerate() {
            let w = mu2.get(&Multiset::from([u, v])).copied().unwrap_or(0.0);
            let entry = if u == v { w / mu1[u] } else { w / (2.0 * (mu1[u] * mu1[v]).sqrt()) };
            s[(a, b)] = entry;
        }
    }
    let mut eig: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

// ---------------------------------------------------------------------------
// criteria

fn criterion_1() -> Outcome {
    for p in [0.5, 0.55, 0.6, 2.0 / 3.0] {
        let x = catalog::frankl_triangle_biased(p).map_err(|e| e.to_string())?.hypergraph;
        let r = hoffman_bound(&x).map_err(|e| e.to_string())?;
        close(&format!("p={p} lambda_0"), r.lambdas[0], (1.0 - 2.0 * p) / (2.0 * (1.0 - p)), 1e-9)?;
        close(&format!("p={p} lambda_1"), r.lambdas[1], -1.0, 1e-9)?;
        for n in [1, 2, 10, 50] {
            let t = tensor_bound(&x, n).map_err(|e| e.to_string())?;
            close(&format!("p={p} n={n} tensor bound"), t.bound, p.max(0.5), 1e-9)?;
        }
    }
    Ok("p in {0.50, 0.55, 0.60, 2/3}".into())
}

fn criterion_2() -> Outcome {
    let x = catalog::frankl_triangle_uniform(7, 2).map_err(|e| e.to_string())?.hypergraph;
    let r = hoffman_bound(&x).map_err(|e| e.to_string())?;
    close("(7,2) lambda_0", r.lambdas[0], -1.0 / 6.0, 1e-9)?;
    close("(7,2) lambda_1", r.lambdas[1], -1.0, 1e-9)?;
    close("(7,2) bound", r.bound, 4.0 / 7.0, 1e-9)?;
    let start = Instant::now();
    let x = catalog::frankl_triangle_uniform(11, 3).map_err(|e| e.to_string())?.hypergraph;
    if x.num_vertices() != 462 {
        return Err(format!("(11,3) has {} vertices", x.num_vertices()));
    }
    let r = hoffman_bound(&x).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    close("(11,3) lambda_0", r.lambdas[0], -0.1, 1e-6)?;
    close("(11,3) bound", r.bound, 6.0 / 11.0, 1e-6)?;
    if elapsed >= 60.0 {
        return Err(format!("(11,3) took {elapsed:.1}s"));
    }
    Ok(format!("(11,3) in {elapsed:.2}s"))
}

fn criterion_3() -> Outcome {
    for k in [3usize, 4, 5] {
        let kf = k as f64;
        let (lo, hi) = ((kf - 2.0) / (kf - 1.0), (kf - 1.0) / kf);
        for t in [0.25, 0.5, 1.0] {
            let p = lo + t * (hi - lo);
            let x = catalog::kwise_intersecting(k, p).map_err(|e| e.to_string())?.hypergraph;
            let r = hoffman_bound(&x).map_err(|e| e.to_string())?;
            close(&format!("k={k} p={p:.4} bound"), r.bound, p, 1e-9)?;
            for l in 1..=k - 2 {
                close(
                    &format!("k={k} p={p:.4} lambda_{l}"),
                    r.lambdas[l],
                    -1.0 / (kf - 1.0 - l as f64),
                    1e-9,
                )?;
            }
        }
    }
    Ok("k in {3,4,5}, three p each".into())
}

fn criterion_4() -> Outcome {
    for p in [0.1, 0.3, 0.5] {
        let x = catalog::ekr_biased(p).map_err(|e| e.to_string())?.hypergraph;
        let r = hoffman_bound(&x).map_err(|e| e.to_string())?;
        close(&format!("p={p} bound"), r.bound, p, 1e-9)?;
    }
    Ok("p in {0.1, 0.3, 0.5}".into())
}

/// Largest `2|E|/m²` over triangle-free loopless graphs on `m` vertices.
fn mantel_graph_oracle(m: usize) -> f64 {
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let mut best = 0usize;
    for mask in 0u32..(1 << pairs.len()) {
        let mut adj = vec![vec![false; m]; m];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
        let triangle = (0..m).any(|a| (0..m).any(|b| (0..m).any(|c| adj[a][b] && adj[b][c] && adj[c][a])));
        if !triangle {
            best = best.max(mask.count_ones() as usize);
        }
    }
    2.0 * best as f64 / (m * m) as f64
}

fn criterion_5() -> Outcome {
    let entry = catalog::mantel(2).map_err(|e| e.to_string())?;
    let x = &entry.hypergraph;
    let sym = entry.symmetry.as_ref().ok_or("mantel entry has no symmetry")?;
    let plain = hoffman_bound(x).map_err(|e| e.to_string())?;
    close("m=2 unrestricted bound", plain.bound, 2.0 / 3.0, 1e-9)?;
    let symmetric = symmetric_hoffman_bound(x, sym).map_err(|e| e.to_string())?;
    close("m=2 symmetric bound", symmetric.bound, 0.5, 1e-9)?;
    let op = SkeletonOperator::new(x).map_err(|e| e.to_string())?;
    let inv = invariant_lambda_min(&op, sym).map_err(|e| e.to_string())?;
    let spectrum = inv.spectrum.eigenvalues();
    if spectrum.len() != 3 {
        return Err(format!("quotient has {} eigenvalues", spectrum.len()));
    }
    for (got, want) in spectrum.iter().zip([1.0, 0.5, 0.0]) {
        close("m=2 quotient eigenvalue", *got, want, 1e-9)?;
    }
    for m in [2usize, 4] {
        let entry = catalog::mantel(m).map_err(|e| e.to_string())?;
        let spec = entry.kpartite.as_ref().ok_or("mantel entry has no k-partite form")?;
        let best = brute_force_symmetric_cross(spec, Some(&mantel_swap(m))).map_err(|e| e.to_string())?;
        close(&format!("m={m} symmetric cross"), best.value, 0.5, 1e-12)?;
        close(&format!("m={m} graph oracle"), mantel_graph_oracle(m), 0.5, 0.0)?;
        let bound = symmetric_hoffman_bound(&entry.hypergraph, entry.symmetry.as_ref().unwrap())
            .map_err(|e| e.to_string())?;
        close(&format!("m={m} symmetric bound"), bound.bound, best.value, 1e-9)?;
    }
    Ok("m=2 quotient {1, 1/2, 0}; m in {2,4} cross value 1/2".into())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::INFINITY;
    let count = 600;
    for i in 0..count {
        let k = 2 + i % 2;
        let x = random_hypergraph(&mut rng, k, 5);
        let bound = hoffman_bound(&x).map_err(|e| e.to_string())?.bound;
        let alpha = exhaustive_alpha(&x);
        let slack = bound + 1e-7 - alpha;
        worst = worst.min(slack);
        if slack < 0.0 {
            return Err(format!("instance {i}: bound {bound} < alpha {alpha}"));
        }
    }
    Ok(format!("{count} instances, smallest slack {worst:.3e}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let k = 2 + i % 2;
        let x = random_hypergraph(&mut rng, k, 4);
        let y = random_hypergraph(&mut rng, k, 4);
        let p = tensor_product(&x, &y).map_err(|e| e.to_string())?;
        let got = skeleton_eigenvalues(&p);
        let (ex, ey) = (skeleton_eigenvalues(&x), skeleton_eigenvalues(&y));
        let mut want: Vec<f64> = ex.iter().flat_map(|a| ey.iter().map(move |b| a * b)).collect();
        want.sort_by(f64::total_cmp);
        if got.len() != want.len() {
            return Err(format!("pair {i}: {} eigenvalues, want {}", got.len(), want.len()));
        }
        for (a, b) in got.iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
        if worst > 1e-8 {
            return Err(format!("pair {i}: Kronecker deviation {worst:e}"));
        }
    }
    let mut stable = 0;
    let mut attempts = 0;
    let mut worst_bound: f64 = 0.0;
    while stable < 20 {
        attempts += 1;
        if attempts > 10_000 {
            return Err(format!("only {stable} instances with all lambda_i <= 0"));
        }
        let k = 2 + attempts % 2;
        let x = random_hypergraph(&mut rng, k, 4);
        let base = hoffman_bound(&x).map_err(|e| e.to_string())?;
        if !base.tensor_stable {
            continue;
        }
        stable += 1;
        let explicit = hoffman_bound(&tensor_power(&x, 2).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .bound;
        let shortcut = tensor_bound(&x, 2).map_err(|e| e.to_string())?.bound;
        worst_bound = worst_bound.max((explicit - shortcut).abs());
        if worst_bound > 1e-8 {
            return Err(format!("explicit square {explicit} vs shortcut {shortcut}"));
        }
    }
    Ok(format!(
        "50 pairs (max deviation {worst:.1e}); 20 stable squares (max deviation {worst_bound:.1e})"
    ))
}

fn criterion_8() -> Outcome {
    let config = OptimizerConfig::default();
    let c5 = SupportProblem::new(
        2,
        numbered_labels(5),
        (0..5).map(|i| Multiset::from([i, (i + 1) % 5])).collect(),
        vec![0.2; 5],
    )
    .map_err(|e| e.to_string())?;
    let r = optimize_weights(&c5, &config).map_err(|e| e.to_string())?;
    let c = (4.0 * std::f64::consts::PI / 5.0).cos();
    let target = -c / (1.0 - c);
    close("C5 circulant oracle", target, 1.0 / 5f64.sqrt(), 1e-12)?;
    close("C5 bound", r.bound, target, 5e-3)?;

    let ekr = SupportProblem::new(
        2,
        numbered_labels(2),
        vec![[1, 0].into(), [0, 0].into()],
        vec![0.7, 0.3],
    )
    .map_err(|e| e.to_string())?;
    let r = optimize_weights(&ekr, &config).map_err(|e| e.to_string())?;
    close("EKR bound", r.bound, 0.3, 1e-3)?;

    let frankl = SupportProblem::new(
        3,
        numbered_labels(2),
        vec![[1, 1, 0].into(), [0, 0, 0].into()],
        vec![0.4, 0.6],
    )
    .map_err(|e| e.to_string())?;
    let first = optimize_weights(&frankl, &config).map_err(|e| e.to_string())?;
    close("Frankl forced bound", first.bound, 0.6, 1e-9)?;

    let a = optimize_weights(&c5, &config).map_err(|e| e.to_string())?.to_json();
    let b = optimize_weights(&c5, &config).map_err(|e| e.to_string())?.to_json();
    if a != b {
        return Err("two seed-0 runs differ".into());
    }
    Ok("C5, EKR p=0.3, Frankl p=0.6, seed-0 determinism".into())
}

/// Random loopless weighted graph: the setting of the classical ratio bound.
fn random_loopless_graph(rng: &mut ChaCha8Rng, max_n: usize) -> WeightedHypergraph {
    let n = rng.gen_range(2..=max_n);
    let count = rng.gen_range(1..=2 * n);
    let edges: Vec<(Multiset, f64)> = (0..count)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            (Multiset::from([u, v]), rng.gen_range(0.05..1.0))
        })
        .collect();
    WeightedHypergraph::from_unnormalized(2, numbered_labels(n), edges).unwrap()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..20 {
        let x = random_loopless_graph(&mut rng, 6);
        let r = hoffman_bound(&x).map_err(|e| e.to_string())?;
        let lambda = skeleton_eigenvalues(&x)[0];
        close(&format!("instance {i} lambda_min"), r.lambdas[0], lambda, 1e-10)?;
        let l = r.lambdas[0];
        close(&format!("instance {i} classical form"), r.bound, -l / (1.0 - l), 1e-12)?;
    }
    Ok("20 loopless graphs".into())
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let k = 2 + i % 3;
        let x = random_hypergraph(&mut rng, k, 5);
        for level in 0..=k {
            let oracle = slot_measure(&x, level);
            let got = x.induced_measure(level);
            if got.len() != oracle.len() {
                return Err(format!("instance {i} level {level}: support size differs"));
            }
            for (face, w) in &oracle {
                worst = worst.max((got.mass(face) - w).abs());
            }
            for j in level..=k {
                let down = x.induced_measure(j).pushdown(level);
                for (face, w) in &oracle {
                    worst = worst.max((down.mass(face) - w).abs());
                }
            }
        }
        let mu1 = x.vertex_measure();
        let mu2 = x.induced_measure(2);
        let n = x.num_vertices();
        let link_mu1: Vec<Option<Vec<f64>>> = (0..n)
            .map(|u| {
                (mu1[u] > 0.0).then(|| {
                    x.link_measure(&Multiset::singleton(u))
                        .unwrap()
                        .pushdown(1)
                        .vertex_masses(n)
                })
            })
            .collect();
        for u in 0..n {
            for v in u..n {
                let a = link_mu1[u].as_ref().map_or(0.0, |l| mu1[u] * l[v]);
                let b = link_mu1[v].as_ref().map_or(0.0, |l| mu1[v] * l[u]);
                let sampled = if u == v { a } else { a + b };
                worst = worst.max((mu2.mass(&Multiset::from([u, v])) - sampled).abs());
            }
        }
        for level in 0..k {
            for sigma in x.faces_at(level) {
                let total = x.link_measure(&sigma).map_err(|e| e.to_string())?.total();
                worst = worst.max((total - 1.0).abs());
            }
        }
        if worst > 1e-9 {
            return Err(format!("instance {i}: deviation {worst:e}"));
        }
    }
    Ok(format!("100 instances, max deviation {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Frankl p-biased", criterion_1),
        ("Frankl uniform", criterion_2),
        ("k-wise intersecting", criterion_3),
        ("EKR", criterion_4),
        ("Mantel", criterion_5),
        ("soundness sweep", criterion_6),
        ("tensor law", criterion_7),
        ("optimizer", criterion_8),
        ("classical equivalence", criterion_9),
        ("measure machinery", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

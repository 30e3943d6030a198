use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use hhb_core::bound::{hoffman_bound, symmetric_hoffman_bound, tensor_report, BoundReport};
use hhb_core::catalog::{self, CatalogEntry, ReferenceKind};
use hhb_core::format::{
    hypergraph_to_json, kpartite_to_json, parse_hypergraph, parse_kpartite, parse_support, parse_symmetry,
    serialize_g17, serialize_g17_vec, symmetry_to_json,
};
use hhb_core::optimizer::{optimize_weights, OptimizerConfig};
use hhb_core::oracle::{brute_force_alpha_capped, DEFAULT_ALPHA_CAP};
use hhb_core::spectral::{lambda_level, lambda_levels, LevelMinimum};
use hhb_core::tensor::{tensor_power_capped, DEFAULT_FACE_CAP};
use hhb_core::{Error, KPartiteSpec, Multiset, WeightedHypergraph};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hhb", version, about = "Spectral bounds on independent sets of weighted hypergraphs")]
struct Cli {
    /// Print a JSON document instead of the human-readable report
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Hypergraph file
    file: PathBuf,

    /// Read the file as a k-partite specification
    #[arg(long)]
    kpartite: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Uniformity, vertex count and face counts per level
    Info {
        #[command(flatten)]
        input: Input,
    },
    /// The spectral bound on the independence number
    Bound {
        #[command(flatten)]
        input: Input,
        /// Generators of a symmetry group; restricts to invariant sets
        #[arg(long)]
        symmetry: Option<PathBuf>,
        /// Report the bound of the n-th tensor power
        #[arg(long, value_name = "N")]
        tensor: Option<usize>,
    },
    /// Smallest link eigenvalue at each level, with the attaining face
    Eigs {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Exact independence number by exhaustive search
    Alpha {
        #[command(flatten)]
        input: Input,
        /// Largest number of supported vertices to search
        #[arg(long, default_value_t = DEFAULT_ALPHA_CAP)]
        cap: usize,
    },
    /// Write an explicit tensor power
    Tensor {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'n', value_name = "N")]
        power: usize,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Largest number of faces to build
        #[arg(long, default_value_t = DEFAULT_FACE_CAP)]
        cap: usize,
    },
    /// Choose face weights with given vertex marginals to minimize the bound
    Optimize {
        /// Support file: faces plus target vertex measure `nu`
        file: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a known instance and compare the pipeline with its reference values
    Catalog(CatalogArgs),
}

#[derive(Args)]
struct CatalogArgs {
    /// ekr, matching, frankl-biased, frankl-uniform, kwise, mantel or linear-system
    name: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Field size for linear-system
    #[arg(long)]
    q: Option<u64>,
    /// Equations for linear-system, e.g. "1,1,1=0;1,2,3=0"
    #[arg(long)]
    system: Option<String>,
    /// Drop constant solutions (linear-system)
    #[arg(long)]
    exclude_degenerate: bool,
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeCap { .. } | Error::Infeasible(_) => 3,
            Error::Symmetry { .. } | Error::Quotient(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// A finished command: the human report and its JSON counterpart.
struct Outcome {
    text: String,
    json: String,
}

type Run = std::result::Result<Outcome, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = configure_threads().and_then(|()| run(cli.command));
    match result {
        Ok(outcome) => {
            if cli.json {
                print!("{}", outcome.json);
            } else {
                print!("{}", outcome.text);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(value) = std::env::var("HHB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::input(format!("HHB_THREADS must be a nonnegative integer, got {value:?}")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::input(e.to_string()))?;
    }
    Ok(())
}

fn run(command: Command) -> Run {
    match command {
        Command::Info { input } => info(&input),
        Command::Bound {
            input,
            symmetry,
            tensor,
        } => bound(&input, symmetry.as_deref(), tensor),
        Command::Eigs { input, level } => eigs(&input, level),
        Command::Alpha { input, cap } => alpha(&input, cap),
        Command::Tensor {
            input,
            power,
            out,
            cap,
        } => tensor(&input, power, &out, cap),
        Command::Optimize {
            file,
            restarts,
            iters,
            seed,
        } => optimize(&file, restarts, iters, seed),
        Command::Catalog(args) => catalog_cmd(&args),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure {
        code: 3,
        message: format!("{}: {e}", path.display()),
    })
}

fn load(input: &Input) -> std::result::Result<(WeightedHypergraph, Option<KPartiteSpec>), Failure> {
    let text = read(&input.file)?;
    if input.kpartite {
        let spec = parse_kpartite(&text)?;
        Ok((spec.realize(), Some(spec)))
    } else {
        Ok((parse_hypergraph(&text)?, None))
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("output documents serialize") + "\n"
}

fn labels(x: &WeightedHypergraph, vertices: &[usize]) -> Vec<String> {
    vertices.iter().map(|&v| x.vertices()[v].clone()).collect()
}

fn face_label(x: &WeightedHypergraph, face: &Multiset) -> String {
    format!("[{}]", labels(x, face.as_slice()).join(","))
}

fn decimals(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct LevelCount {
    level: usize,
    faces: usize,
}

#[derive(Serialize)]
struct InfoDoc {
    k: usize,
    vertices: usize,
    top_faces: usize,
    levels: Vec<LevelCount>,
    #[serde(serialize_with = "serialize_g17")]
    residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    parts: Option<Vec<usize>>,
}

fn info(input: &Input) -> Run {
    let (x, spec) = load(input)?;
    let levels: Vec<LevelCount> = (1..x.k())
        .rev()
        .map(|i| LevelCount {
            level: i,
            faces: x.induced_measure(i).len(),
        })
        .collect();
    let doc = InfoDoc {
        k: x.k(),
        vertices: x.num_vertices(),
        top_faces: x.faces().len(),
        residual: (x.measure().total() - 1.0).abs(),
        parts: spec.map(|s| s.parts().iter().map(Vec::len).collect()),
        levels,
    };
    let mut text = format!("k={}, |V|={}", doc.k, doc.vertices);
    for l in &doc.levels {
        text += &format!(", |X^({})|={}", l.level, l.faces);
    }
    text += &format!("\ntop faces: {}\nmeasure-sum residual: {:.9}\n", doc.top_faces, doc.residual);
    if let Some(parts) = &doc.parts {
        let sizes: Vec<String> = parts.iter().map(usize::to_string).collect();
        text += &format!("part sizes: {}\n", sizes.join(", "));
    }
    Ok(Outcome {
        text,
        json: to_json(&doc),
    })
}

fn bound(input: &Input, symmetry: Option<&Path>, tensor: Option<usize>) -> Run {
    let (x, _) = load(input)?;
    let mut report = match symmetry {
        Some(path) => {
            let sym = parse_symmetry(&read(path)?)?;
            if sym.generators().iter().any(|g| g.len() != x.num_vertices()) {
                return Err(Error::Dimension(format!(
                    "generators must act on {} vertices",
                    x.num_vertices()
                ))
                .into());
            }
            symmetric_hoffman_bound(&x, &sym)?
        }
        None => hoffman_bound(&x)?,
    };
    if let Some(n) = tensor {
        if n == 0 {
            return Err(Failure::input("tensor power must be at least 1"));
        }
        report = tensor_report(&report, n);
    }
    Ok(Outcome {
        text: bound_text(&x, &report, tensor),
        json: report.to_json(),
    })
}

fn bound_text(x: &WeightedHypergraph, r: &BoundReport, tensor: Option<usize>) -> String {
    let mut text = String::new();
    if let Some(n) = tensor {
        text += &format!("tensor power n={n}\n");
    }
    for (i, (l, w)) in r.lambdas.iter().zip(&r.witnesses).enumerate() {
        text += &format!("lambda_{i} = {l:.9}  witness {}\n", face_label(x, w));
    }
    text += &format!("product = {:.9}\nbound = {:.9}\n", r.product, r.bound);
    text += &format!("tensor_stable = {}\n", r.tensor_stable);
    text += &format!("conditional_symmetry = {}\n", r.conditional_symmetry);
    text
}

#[derive(Serialize)]
struct LevelDoc {
    level: usize,
    #[serde(serialize_with = "serialize_g17")]
    lambda: f64,
    witness: Multiset,
    witness_labels: Vec<String>,
}

fn eigs(input: &Input, level: Option<usize>) -> Run {
    let (x, _) = load(input)?;
    let minima: Vec<LevelMinimum> = match level {
        Some(i) => vec![lambda_level(&x, i)?],
        None => lambda_levels(&x)?,
    };
    let mut text = String::new();
    let mut docs = Vec::with_capacity(minima.len());
    for m in minima {
        text += &format!("lambda_{} = {:.9}  witness {}\n", m.level, m.value, face_label(&x, &m.witness));
        docs.push(LevelDoc {
            level: m.level,
            lambda: m.value,
            witness_labels: labels(&x, m.witness.as_slice()),
            witness: m.witness,
        });
    }
    Ok(Outcome {
        text,
        json: to_json(&docs),
    })
}

#[derive(Serialize)]
struct AlphaDoc {
    #[serde(serialize_with = "serialize_g17")]
    alpha: f64,
    witness: Vec<usize>,
    witness_labels: Vec<String>,
}

fn alpha(input: &Input, cap: usize) -> Run {
    let (x, _) = load(input)?;
    let r = brute_force_alpha_capped(&x, cap)?;
    let names = labels(&x, &r.witness);
    let text = format!("alpha = {:.9}\nwitness = {{{}}}\n", r.alpha, names.join(", "));
    Ok(Outcome {
        text,
        json: to_json(&AlphaDoc {
            alpha: r.alpha,
            witness: r.witness,
            witness_labels: names,
        }),
    })
}

#[derive(Serialize)]
struct TensorDoc {
    out: String,
    k: usize,
    vertices: usize,
    faces: usize,
}

fn tensor(input: &Input, power: usize, out: &Path, cap: usize) -> Run {
    let (x, _) = load(input)?;
    let p = tensor_power_capped(&x, power, cap)?;
    write(out, &hypergraph_to_json(&p))?;
    let doc = TensorDoc {
        out: out.display().to_string(),
        k: p.k(),
        vertices: p.num_vertices(),
        faces: p.faces().len(),
    };
    Ok(Outcome {
        text: format!("wrote {}: k={}, |V|={}, faces={}\n", doc.out, doc.k, doc.vertices, doc.faces),
        json: to_json(&doc),
    })
}

fn optimize(file: &Path, restarts: usize, iters: usize, seed: u64) -> Run {
    let problem = parse_support(&read(file)?)?;
    let config = OptimizerConfig {
        restarts,
        iterations: iters,
        seed,
        ..OptimizerConfig::default()
    };
    let r = optimize_weights(&problem, &config)?;
    let x = problem.support_hypergraph();
    let mut text = String::new();
    for (i, l) in r.lambdas.iter().enumerate() {
        text += &format!("lambda_{i} = {l:.9}\n");
    }
    text += &format!("objective = {:.9}\nbound = {:.9}\n", r.objective, r.bound);
    text += &format!(
        "marginal residual = {:.9}\nnormalization residual = {:.9}\n",
        r.residuals.marginal, r.residuals.normalization
    );
    text += &format!("iterations = {}\nfree dimension = {}\n", r.iterations, r.free_dimension);
    for (face, w) in r.faces.iter().zip(&r.mu_star) {
        text += &format!("  {} {w:.9}\n", face_label(&x, face));
    }
    Ok(Outcome {
        text,
        json: r.to_json(),
    })
}

#[derive(Serialize)]
struct ReferenceDoc {
    #[serde(serialize_with = "serialize_g17_vec")]
    lambdas: Vec<f64>,
    #[serde(serialize_with = "serialize_g17")]
    bound: f64,
    kind: &'static str,
}

#[derive(Serialize)]
struct ComputedDoc {
    #[serde(serialize_with = "serialize_g17_vec")]
    lambdas: Vec<f64>,
    #[serde(serialize_with = "serialize_g17")]
    bound: f64,
}

#[derive(Serialize)]
struct CatalogDoc {
    name: String,
    params: Vec<(String, String)>,
    vertices: usize,
    faces: usize,
    reference: Option<ReferenceDoc>,
    computed: Option<ComputedDoc>,
    pass: Option<bool>,
    files: Vec<String>,
}

fn kind_name(kind: ReferenceKind) -> &'static str {
    match kind {
        ReferenceKind::Static => "static",
        ReferenceKind::TensorLimit => "tensor limit",
        ReferenceKind::Symmetric => "symmetric",
    }
}

fn catalog_cmd(args: &CatalogArgs) -> Run {
    let entry = build_entry(args)?;
    let outcome = entry.check()?;
    let mut files = Vec::new();
    if let Some(out) = &args.out {
        write(out, &hypergraph_to_json(&entry.hypergraph))?;
        files.push(out.display().to_string());
        if let Some(sym) = &entry.symmetry {
            let path = out.with_extension("symmetry.json");
            write(&path, &symmetry_to_json(sym))?;
            files.push(path.display().to_string());
        }
        if let Some(spec) = &entry.kpartite {
            let path = out.with_extension("kpartite.json");
            write(&path, &kpartite_to_json(spec))?;
            files.push(path.display().to_string());
        }
    }
    let params: Vec<String> = entry.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut text = format!(
        "{} {}: |V|={}, faces={}\n",
        entry.name,
        params.join(" "),
        entry.hypergraph.num_vertices(),
        entry.hypergraph.faces().len()
    );
    match (&entry.reference, &outcome) {
        (Some(reference), Some(o)) => {
            text += &format!(
                "lambdas  reference {}  computed {}\n",
                decimals(&reference.lambdas),
                decimals(&o.lambdas)
            );
            text += &format!(
                "bound    reference {:.9}  computed {:.9}  ({})\n",
                reference.bound,
                o.bound,
                kind_name(reference.kind)
            );
            text += if o.pass { "PASS\n" } else { "FAIL\n" };
        }
        _ => text += "no reference values\n",
    }
    if !files.is_empty() {
        text += &format!("wrote {}\n", files.join(", "));
    }
    let doc = CatalogDoc {
        name: entry.name.clone(),
        params: entry.params.clone(),
        vertices: entry.hypergraph.num_vertices(),
        faces: entry.hypergraph.faces().len(),
        reference: entry.reference.as_ref().map(|r| ReferenceDoc {
            lambdas: r.lambdas.clone(),
            bound: r.bound,
            kind: kind_name(r.kind),
        }),
        computed: outcome.as_ref().map(|o| ComputedDoc {
            lambdas: o.lambdas.clone(),
            bound: o.bound,
        }),
        pass: outcome.as_ref().map(|o| o.pass),
        files,
    };
    Ok(Outcome {
        text,
        json: to_json(&doc),
    })
}

fn build_entry(args: &CatalogArgs) -> std::result::Result<CatalogEntry, Failure> {
    let given = [
        ("p", args.p.is_some()),
        ("k", args.k.is_some()),
        ("n", args.n.is_some()),
        ("m", args.m.is_some()),
        ("s", args.s.is_some()),
        ("q", args.q.is_some()),
        ("system", args.system.is_some()),
        ("exclude-degenerate", args.exclude_degenerate),
    ];
    let accepted: &[&str] = match args.name.as_str() {
        "ekr" | "frankl-biased" => &["p"],
        "matching" => &["s", "p"],
        "frankl-uniform" => &["n", "k"],
        "kwise" => &["k", "p"],
        "mantel" => &["m"],
        "linear-system" => &["q", "system", "exclude-degenerate"],
        other => return Err(Failure::input(format!("unknown catalog entry {other:?}"))),
    };
    if let Some((flag, _)) = given.iter().find(|(f, set)| *set && !accepted.contains(f)) {
        return Err(Failure::input(format!("{} does not take --{flag}", args.name)));
    }
    let need = |flag: &str| Failure::input(format!("{} needs --{flag}", args.name));
    let p = || args.p.ok_or_else(|| need("p"));
    let k = || args.k.ok_or_else(|| need("k"));
    let entry = match args.name.as_str() {
        "ekr" => catalog::ekr_biased(p()?)?,
        "frankl-biased" => catalog::frankl_triangle_biased(p()?)?,
        "matching" => catalog::matching_hypergraph(args.s.ok_or_else(|| need("s"))?, p()?)?,
        "frankl-uniform" => catalog::frankl_triangle_uniform(args.n.ok_or_else(|| need("n"))?, k()?)?,
        "kwise" => catalog::kwise_intersecting(k()?, p()?)?,
        "mantel" => catalog::mantel(args.m.ok_or_else(|| need("m"))?)?,
        _ => {
            let q = args.q.ok_or_else(|| need("q"))?;
            let (rows, b) = parse_system(args.system.as_deref().ok_or_else(|| need("system"))?)?;
            catalog::linear_system_hypergraph(q, &rows, &b, args.exclude_degenerate)?
        }
    };
    Ok(entry)
}

/// `"1,1,1=0;1,2,3=0"` as coefficient rows and right-hand sides.
fn parse_system(text: &str) -> std::result::Result<(Vec<Vec<u64>>, Vec<u64>), Failure> {
    let bad = || Failure::input(format!("cannot read system {text:?}; expected e.g. \"1,1,1=0;1,2,3=0\""));
    let number = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for eq in text.split(';').filter(|s| !s.trim().is_empty()) {
        let (lhs, rhs) = eq.split_once('=').ok_or_else(bad)?;
        rows.push(lhs.split(',').map(number).collect::<std::result::Result<Vec<_>, _>>()?);
        b.push(number(rhs)?);
    }
    Ok((rows, b))
}

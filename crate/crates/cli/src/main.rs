use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use plumbtw::braid::{apply_braid, core_orbit_witness, twist, BraidWord};
use plumbtw::cover::{boundary_rank_check, decompose, fibre_rank, specialize, truncation_feasibility};
use plumbtw::cover::{BettiVector, CoverIndex, CoverSpec};
use plumbtw::document::ComplexDocument;
use plumbtw::equiv::equivalent_seeded;
use plumbtw::hom::{euler_characteristic, hf_ranks, total_rank};
use plumbtw::normalizer::{admissible, complexity, normalize};
use plumbtw::{Category, CategoryParams, Error, Field, FieldSpec, PrimeField, Rationals, TwistedComplex};

const DEFAULT_N: i64 = 3;

#[derive(Parser)]
#[command(name = "plumbtw", version, about = "Twisted complexes over the two-sphere plumbing category")]
struct Cli {
    /// Real dimension of the cores
    #[arg(long, global = true)]
    n: Option<i64>,
    /// Field characteristic, 0 for the rationals
    #[arg(long = "char", global = true)]
    characteristic: Option<u64>,
    /// Betti vector of a non-spherical Q0, comma separated
    #[arg(long, global = true)]
    betti0: Option<String>,
    /// Seed for the randomized equivalence search
    #[arg(long, global = true, default_value_t = plumbtw::equiv::DEFAULT_SEED)]
    seed: u64,
    /// Include wall-clock time in the report (makes output nondeterministic)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct One {
    /// Complex document path, or a core literal such as Q0 or Q1[2]
    #[arg(long = "in")]
    input: String,
}

#[derive(Args)]
struct Two {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check a complex against the twisted-complex axioms
    Validate(One),
    /// Ranks of the morphism cohomology between two complexes
    Hf(Two),
    /// Apply a single twist or inverse twist
    Twist {
        #[command(flatten)]
        one: One,
        #[arg(long)]
        vertex: u8,
        #[arg(long)]
        inverse: bool,
    },
    /// Apply a braid word such as "s0 S1 s0"
    Braid {
        #[arg(long = "in", default_value = "Q0")]
        input: String,
        #[arg(long)]
        word: String,
    },
    /// Reduce an admissible complex to copies of one core
    Normalize(One),
    /// Decide quasi-isomorphism (yes / no / inconclusive)
    Equiv(Two),
    /// Kill fundamental-class arrows on a covered vertex
    Specialize {
        #[command(flatten)]
        one: One,
        #[arg(long)]
        vertex: u8,
        /// Cover index, a positive integer or "inf"
        #[arg(long)]
        index: String,
    },
    /// Split the minimal model into connected pieces
    Decompose(One),
    /// Cohomology of the fibre pairing against a vertex
    FibreRank {
        #[command(flatten)]
        one: One,
        #[arg(long)]
        vertex: u8,
    },
    /// Betti-number feasibility of a twist along a non-sphere
    Feasibility {
        #[arg(long)]
        betti: String,
    },
    /// Rank and multiplicity checks on a complex over a non-spherical Q0
    BoundaryRank(One),
    /// CSV of HF(Q0, (T1 T0)^k Q0) for k = 1..K
    RankTable {
        #[arg(long, default_value_t = 8)]
        k: usize,
    },
    /// A word carrying Q0 to a shift of Q1
    OrbitWitness,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Hf(_) => "hf",
            Command::Twist { .. } => "twist",
            Command::Braid { .. } => "braid",
            Command::Normalize(_) => "normalize",
            Command::Equiv(_) => "equiv",
            Command::Specialize { .. } => "specialize",
            Command::Decompose(_) => "decompose",
            Command::FibreRank { .. } => "fibre-rank",
            Command::Feasibility { .. } => "feasibility",
            Command::BoundaryRank(_) => "boundary-rank",
            Command::RankTable { .. } => "rank-table",
            Command::OrbitWitness => "orbit-witness",
        }
    }

    fn complex_args(&self) -> Vec<&str> {
        match self {
            Command::Validate(o) | Command::Normalize(o) | Command::Decompose(o) | Command::BoundaryRank(o) => {
                vec![&o.input]
            }
            Command::Twist { one, .. } | Command::Specialize { one, .. } | Command::FibreRank { one, .. } => {
                vec![&one.input]
            }
            Command::Braid { input, .. } => vec![input],
            Command::Hf(t) | Command::Equiv(t) => vec![&t.a, &t.b],
            _ => Vec::new(),
        }
    }
}

struct Failure {
    reason: &'static str,
    exit: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { reason: "usage", exit: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (reason, exit) = match &e {
            Error::InvalidField(_) => ("invalid-field", 2),
            Error::InvalidParams(_) => ("invalid-params", 2),
            Error::Parse(_) => ("parse", 2),
            Error::InvalidComplex(_) => ("invalid-complex", 1),
            Error::NotAdmissible(_) => ("not-admissible", 1),
            Error::CoverCharacteristic { .. } => ("cover-characteristic", 1),
            Error::PreconditionViolated(_) => ("precondition", 1),
            Error::ComplexityNotReduced { .. } => ("complexity-not-reduced", 1),
            Error::StructuralCheck(_) => ("structural-check", 1),
            Error::IterationLimit(_) => ("iteration-limit", 1),
            Error::CertificateRejected(_) => ("certificate-rejected", 1),
            Error::SearchExhausted(_) => ("search-exhausted", 1),
            Error::NotComposable { .. } | Error::CategoryMismatch | Error::Shape(_) => ("shape", 1),
            Error::NotClosed | Error::DegreeMismatch(_) => ("not-closed", 1),
        };
        Self { reason, exit, message: e.to_string() }
    }
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    status: &'static str,
    inputs_sha256: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    outputs: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<u128>,
}

enum Input {
    Document(ComplexDocument),
    Literal { vertex: u8, shift: i64 },
}

fn parse_literal(s: &str) -> Option<(u8, i64)> {
    let s = s.trim();
    let rest = s.strip_prefix('Q')?;
    let (v, shift) = match rest.split_once('[') {
        Some((v, k)) => (v, k.strip_suffix(']')?.trim().parse().ok()?),
        None => (rest, 0),
    };
    match v {
        "0" => Some((0, shift)),
        "1" => Some((1, shift)),
        _ => None,
    }
}

fn read_input(arg: &str) -> Result<(Input, String), Failure> {
    if let Some((vertex, shift)) = parse_literal(arg) {
        return Ok((Input::Literal { vertex, shift }, format!("Q{vertex}[{shift}]")));
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { reason: "io", exit: 2, message: format!("{}: {e}", path.display()) })?;
    let doc = ComplexDocument::from_json(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })?;
    let canon = doc.to_json();
    Ok((Input::Document(doc), canon))
}

fn parse_betti(s: &str) -> Result<Vec<u32>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::usage(format!("bad betti entry {t:?}"))))
        .collect()
}

/// Documents carry their own parameters; flags must agree with them when given.
fn resolve_params(cli: &Cli, inputs: &[Input]) -> Result<CategoryParams, Failure> {
    let flag_betti = cli.betti0.as_deref().map(parse_betti).transpose()?;
    let mut from_docs: Option<CategoryParams> = None;
    for i in inputs {
        if let Input::Document(d) = i {
            let p = d.params();
            match &from_docs {
                Some(q) if q != &p => return Err(Failure::usage("input documents declare different parameters")),
                _ => from_docs = Some(p),
            }
        }
    }
    let params = match from_docs {
        Some(p) => {
            let clash = cli.n.is_some_and(|n| n != p.n)
                || cli.characteristic.is_some_and(|c| c != p.field.characteristic)
                || flag_betti.as_ref().is_some_and(|b| Some(b) != p.betti0.as_ref());
            if clash {
                return Err(Failure::usage("global flags contradict the parameters of the input document"));
            }
            p
        }
        None => CategoryParams {
            n: cli.n.unwrap_or(DEFAULT_N),
            betti0: flag_betti,
            field: FieldSpec::new(cli.characteristic.unwrap_or(plumbtw::field::DEFAULT_CHARACTERISTIC)),
        },
    };
    plumbtw::validate_params(&params)?;
    Ok(params)
}

fn build<F: Field>(cat: &Arc<Category<F>>, input: &Input) -> Result<TwistedComplex<F>, Failure> {
    match input {
        Input::Literal { vertex, shift } => Ok(TwistedComplex::core(cat, *vertex, -shift)),
        Input::Document(d) => Ok(d.build(cat)?),
    }
}

fn doc<F: Field>(c: &TwistedComplex<F>) -> Value {
    serde_json::to_value(ComplexDocument::from_complex(c)).expect("documents serialize")
}

fn vertex_arg(v: u8) -> Result<u8, Failure> {
    if v > 1 {
        return Err(Failure::usage(format!("vertex {v} is not 0 or 1")));
    }
    Ok(v)
}

fn rank_table<F: Field>(cat: &Arc<Category<F>>, k: usize) -> Result<String, Failure> {
    let q0 = TwistedComplex::core(cat, 0, 0);
    let step: BraidWord = "s0 s1".parse()?;
    let mut out = String::from("k,total_rank,ranks\n");
    let mut cur = q0.clone();
    for i in 1..=k {
        cur = apply_braid(&step, &cur)?;
        let ranks = hf_ranks(&q0, &cur)?;
        let cells: Vec<String> = ranks.iter().map(|(d, r)| format!("{d}:{r}")).collect();
        writeln!(out, "{i},{},{}", total_rank(&ranks), cells.join(";")).unwrap();
    }
    Ok(out)
}

enum Output {
    Json(Value),
    Csv(String),
}

fn run<F: Field>(field: F, cli: &Cli, params: CategoryParams, inputs: &[Input]) -> Result<Output, Failure> {
    let cat = Arc::new(Category::new(field, params)?);
    let complexes: Vec<TwistedComplex<F>> = inputs.iter().map(|i| build(&cat, i)).collect::<Result<_, _>>()?;
    let first = || &complexes[0];
    let value = match &cli.command {
        Command::Validate(_) => {
            let c = first();
            let adm = admissible(c)?;
            json!({ "valid": true, "summands": c.len(), "complexity": complexity(&c.minimize()).cx, "admissibility": adm })
        }
        Command::Hf(_) => {
            let ranks = hf_ranks(&complexes[0], &complexes[1])?;
            json!({ "ranks": ranks, "total_rank": total_rank(&ranks), "euler_characteristic": euler_characteristic(&ranks) })
        }
        Command::Twist { vertex, inverse, .. } => {
            let out = twist(first(), vertex_arg(*vertex)?, if *inverse { -1 } else { 1 })?;
            json!({ "complex": doc(&out) })
        }
        Command::Braid { word, .. } => {
            let w: BraidWord = word.parse()?;
            let out = apply_braid(&w, first())?;
            json!({ "word": w, "complex": doc(&out) })
        }
        Command::Normalize(_) => json!({ "certificate": normalize(first())? }),
        Command::Equiv(_) => json!({ "verdict": equivalent_seeded(&complexes[0], &complexes[1], cli.seed)? }),
        Command::Specialize { vertex, index, .. } => {
            let index = match index.as_str() {
                "inf" | "infinite" => CoverIndex::Infinite,
                k => CoverIndex::Finite(k.parse().map_err(|_| Failure::usage(format!("bad cover index {k:?}")))?),
            };
            let cover = CoverSpec { covered_vertex: vertex_arg(*vertex)?, index };
            json!({ "cover": cover, "complex": doc(&specialize(first(), &cover)?) })
        }
        Command::Decompose(_) => {
            let pieces = decompose(first())?;
            json!({ "count": pieces.len(), "pieces": pieces.iter().map(doc).collect::<Vec<_>>() })
        }
        Command::FibreRank { vertex, .. } => {
            let ranks = fibre_rank(first(), vertex_arg(*vertex)?)?;
            json!({ "ranks": ranks, "total_rank": total_rank(&ranks) })
        }
        Command::Feasibility { betti } => {
            let b = BettiVector::new(parse_betti(betti)?)?;
            if cli.n.is_some_and(|n| n as usize != b.n()) {
                return Err(Failure::usage(format!("betti vector has length {}, expected n + 1", b.0.len())));
            }
            json!(truncation_feasibility(&b))
        }
        Command::BoundaryRank(_) => json!(boundary_rank_check(first())?),
        Command::RankTable { k } => return Ok(Output::Csv(rank_table(&cat, *k)?)),
        Command::OrbitWitness => json!(core_orbit_witness(&cat)?),
    };
    Ok(Output::Json(value))
}

fn digest(cli: &Cli, params: Option<&CategoryParams>, canon: &[String]) -> String {
    let mut h = Sha256::new();
    h.update(cli.command.name());
    h.update(serde_json::to_string(&params).unwrap_or_default());
    h.update(cli.seed.to_le_bytes());
    match &cli.command {
        Command::Twist { vertex, inverse, .. } => h.update(format!("{vertex}/{inverse}")),
        Command::Braid { word, .. } => h.update(word),
        Command::Specialize { vertex, index, .. } => h.update(format!("{vertex}/{index}")),
        Command::FibreRank { vertex, .. } => h.update(vertex.to_string()),
        Command::Feasibility { betti } => h.update(betti),
        Command::RankTable { k } => h.update(k.to_string()),
        _ => {}
    }
    for c in canon {
        h.update(c);
    }
    hex::encode(h.finalize())
}

fn execute(cli: &Cli) -> (Option<CategoryParams>, Vec<String>, Result<Output, Failure>) {
    let mut inputs = Vec::new();
    let mut canon = Vec::new();
    for arg in cli.command.complex_args() {
        match read_input(arg) {
            Ok((i, c)) => {
                inputs.push(i);
                canon.push(c);
            }
            Err(f) => return (None, canon, Err(f)),
        }
    }
    if let Command::Feasibility { .. } = cli.command {
        return (None, canon, run(Rationals, cli, CategoryParams::sphere(3, FieldSpec::rationals()), &inputs));
    }
    let params = match resolve_params(cli, &inputs) {
        Ok(p) => p,
        Err(f) => return (None, canon, Err(f)),
    };
    let result = match params.field.characteristic {
        0 => run(Rationals, cli, params.clone(), &inputs),
        p => match PrimeField::new(p) {
            Ok(field) => run(field, cli, params.clone(), &inputs),
            Err(e) => Err(e.into()),
        },
    };
    (Some(params), canon, result)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let report = json!({ "status": "error", "reason": "usage", "message": e.to_string() });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let (params, canon, result) = execute(&cli);
    let mut report = RunReport {
        command: cli.command.name(),
        status: "ok",
        inputs_sha256: digest(&cli, params.as_ref(), &canon),
        seed: cli.seed,
        outputs: None,
        reason: None,
        message: None,
        wall_time_ms: None,
    };
    let code = match result {
        Ok(Output::Csv(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Ok(Output::Json(v)) => {
            report.outputs = Some(v);
            0
        }
        Err(f) => {
            report.status = "error";
            report.reason = Some(f.reason);
            report.message = Some(f.message);
            f.exit
        }
    };
    if cli.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    ExitCode::from(code)
}

//! Deterministic batch front-end: parse JSON documents, dispatch one
//! operation, emit a JSON report.
//!
//! Exit codes: 0 success, 1 domain error (reported as JSON), 2 usage error.
//! The report contains the input hashes and the result; wall-clock timing
//! goes to stderr so that identical inputs produce byte-identical reports.

use clap::{Parser, ValueEnum};
use finspan::json::{
    self, load_document, span_to_value, Document, JsonError,
};
use finspan::linalg::RatMatrix;
use finspan::{selftest, DEFAULT_SEARCH_BUDGET};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    Validate,
    Skeleton,
    Cardinality,
    Equiv,
    Compose,
    Tensor,
    Linearize,
    NormCheck,
    TraceForm,
    QuantizePoint,
    QuantizeCircle,
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Skeleton => "skeleton",
            Command::Cardinality => "cardinality",
            Command::Equiv => "equiv",
            Command::Compose => "compose",
            Command::Tensor => "tensor",
            Command::Linearize => "linearize",
            Command::NormCheck => "norm-check",
            Command::TraceForm => "trace-form",
            Command::QuantizePoint => "quantize-point",
            Command::QuantizeCircle => "quantize-circle",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Parser)]
#[command(
    name = "finspan",
    about = "Exact span calculus on finite groupoids: batch JSON front-end"
)]
struct Args {
    /// Operation to run.
    #[arg(long, value_enum)]
    command: Command,
    /// Input document (repeatable; order matters for compose/tensor).
    #[arg(long = "input")]
    inputs: Vec<PathBuf>,
    /// Output file for the JSON report (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on exhaustive-search candidate extensions.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: u64,
    /// Seed for corpus generation in selftest.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Normalize (skeletonize) span apexes before emitting them.
    #[arg(long, default_value_t = false)]
    normalize: bool,
}

enum CliError {
    /// Domain error: reported as JSON, exit 1.
    Domain(Value),
    /// Usage error: message to stderr, exit 2.
    Usage(String),
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> CliError {
        let payload = match &e {
            JsonError::Io { path, message } => json!({
                "kind": "IoError",
                "file": path.display().to_string(),
                "message": message,
            }),
            JsonError::Parse { path, message } => json!({
                "kind": "ParseError",
                "path": path,
                "message": message,
            }),
            JsonError::Invariant {
                path,
                axiom,
                message,
            } => json!({
                "kind": "InvariantViolation",
                "path": path,
                "axiom": axiom,
                "message": message,
            }),
        };
        CliError::Domain(payload)
    }
}

fn domain(kind: &str, message: impl Into<String>) -> CliError {
    CliError::Domain(json!({ "kind": kind, "message": message.into() }))
}

fn span_error(e: finspan::SpanError) -> CliError {
    let kind = match &e {
        finspan::SpanError::MismatchedBoundary => "MismatchedBoundary",
        finspan::SpanError::SearchBudgetExceeded => "SearchBudgetExceeded",
        finspan::SpanError::NotDiscrete => "NotDiscrete",
        finspan::SpanError::LeftLegNotMono => "LeftLegNotMono",
        finspan::SpanError::Groupoid(_) => "GroupoidError",
    };
    domain(kind, e.to_string())
}

fn matrix_payload(m: &RatMatrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": json::matrix_to_value(m),
    })
}

fn input_hashes(paths: &[PathBuf]) -> Result<Value, CliError> {
    let mut out = Vec::with_capacity(paths.len());
    for p in paths {
        let bytes = std::fs::read(p).map_err(|e| {
            domain(
                "IoError",
                format!("cannot read {}: {e}", p.display()),
            )
        })?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        out.push(json!({ "path": p.display().to_string(), "sha256": hex }));
    }
    Ok(Value::Array(out))
}

fn want_inputs(args: &Args, expect: usize) -> Result<(), CliError> {
    if args.inputs.len() != expect {
        return Err(CliError::Usage(format!(
            "command {} expects exactly {expect} --input document(s), got {}",
            args.command.name(),
            args.inputs.len()
        )));
    }
    Ok(())
}

fn load_groupoid(path: &std::path::Path) -> Result<finspan::Gpd, CliError> {
    match load_document(path)? {
        Document::Groupoid(g) => Ok(g),
        other => Err(domain(
            "WrongKind",
            format!("{} is a {}, expected groupoid", path.display(), other.kind()),
        )),
    }
}

fn load_span(path: &std::path::Path) -> Result<finspan::Span, CliError> {
    match load_document(path)? {
        Document::Span(s) => Ok(s),
        other => Err(domain(
            "WrongKind",
            format!("{} is a {}, expected span", path.display(), other.kind()),
        )),
    }
}

fn load_decorated(path: &std::path::Path) -> Result<finspan::DecoratedObject, CliError> {
    match load_document(path)? {
        Document::DecoratedObject(d) => Ok(d),
        other => Err(domain(
            "WrongKind",
            format!(
                "{} is a {}, expected decorated_object",
                path.display(),
                other.kind()
            ),
        )),
    }
}

fn execute(args: &Args) -> Result<Value, CliError> {
    match args.command {
        Command::Validate => {
            if args.inputs.is_empty() {
                return Err(CliError::Usage("validate expects at least one --input".into()));
            }
            let mut kinds = Vec::new();
            for p in &args.inputs {
                let doc = load_document(p)?;
                kinds.push(json!({ "path": p.display().to_string(), "kind": doc.kind() }));
            }
            Ok(json!({ "valid": true, "documents": kinds }))
        }
        Command::Skeleton => {
            want_inputs(args, 1)?;
            let g = load_groupoid(&args.inputs[0])?;
            let sk = finspan::skeleton(&g);
            let comps: Vec<Value> = sk
                .components()
                .iter()
                .map(|c| {
                    json!({
                        "representative": c.rep,
                        "automorphism_order": c.aut.order(),
                        "members": c.members,
                        "automorphism_table": c.aut.table_rows(),
                    })
                })
                .collect();
            Ok(json!({ "components": comps }))
        }
        Command::Cardinality => {
            want_inputs(args, 1)?;
            let g = load_groupoid(&args.inputs[0])?;
            Ok(json!({ "result": finspan::cardinality(&g).to_string() }))
        }
        Command::Equiv => {
            want_inputs(args, 2)?;
            let a = load_groupoid(&args.inputs[0])?;
            let b = load_groupoid(&args.inputs[1])?;
            let witness = finspan::are_equivalent(&a, &b, args.budget)
                .map_err(|e| domain("SearchBudgetExceeded", e.to_string()))?;
            Ok(json!({ "equivalent": witness.is_some() }))
        }
        Command::Compose => {
            if args.inputs.len() < 2 {
                return Err(CliError::Usage("compose expects at least two --input spans".into()));
            }
            let mut acc = load_span(&args.inputs[0])?;
            for p in &args.inputs[1..] {
                let next = load_span(p)?;
                acc = finspan::compose(&acc, &next).map_err(span_error)?;
                if args.normalize {
                    acc = finspan::normalize(&acc);
                }
            }
            Ok(json!({ "span": span_to_value(&acc) }))
        }
        Command::Tensor => {
            if args.inputs.len() < 2 {
                return Err(CliError::Usage("tensor expects at least two --input spans".into()));
            }
            let mut acc = load_span(&args.inputs[0])?;
            for p in &args.inputs[1..] {
                let next = load_span(p)?;
                acc = finspan::tensor(&acc, &next);
                if args.normalize {
                    acc = finspan::normalize(&acc);
                }
            }
            Ok(json!({ "span": span_to_value(&acc) }))
        }
        Command::Linearize => {
            want_inputs(args, 1)?;
            let s = load_span(&args.inputs[0])?;
            Ok(json!({ "matrix": matrix_payload(&finspan::linearize_span(&s)) }))
        }
        Command::NormCheck => {
            want_inputs(args, 1)?;
            let l = match load_document(&args.inputs[0])? {
                Document::LocalSystem(l) => l,
                other => {
                    return Err(domain(
                        "WrongKind",
                        format!("expected local_system, found {}", other.kind()),
                    ))
                }
            };
            let report = finspan::norm_map(&l).map_err(|e| domain("DescentFailure", e.to_string()))?;
            Ok(json!({
                "kind": "norm_report",
                "colim_dim": report.colim_dim,
                "lim_dim": report.lim_dim,
                "is_iso": report.is_iso,
                "norm": matrix_payload(&report.norm),
            }))
        }
        Command::TraceForm => {
            want_inputs(args, 1)?;
            let g = load_groupoid(&args.inputs[0])?;
            Ok(json!({ "matrix": matrix_payload(&finspan::trace_form(&g)) }))
        }
        Command::QuantizePoint => {
            want_inputs(args, 1)?;
            let d = load_decorated(&args.inputs[0])?;
            let colim = finspan::quantize_object(&d);
            Ok(json!({
                "dim": colim.dim,
                "projections": colim.projections.iter().map(matrix_payload).collect::<Vec<_>>(),
            }))
        }
        Command::QuantizeCircle => {
            want_inputs(args, 1)?;
            let d = load_decorated(&args.inputs[0])?;
            let value = finspan::quantize_circle(&d)
                .map_err(|e| domain("QuantizationError", e.to_string()))?;
            Ok(json!({ "result": value.to_string() }))
        }
        Command::Selftest => {
            if !args.inputs.is_empty() {
                return Err(CliError::Usage("selftest takes no --input documents".into()));
            }
            Ok(selftest::run(args.seed, args.budget).to_value())
        }
    }
}

fn emit(args: &Args, report: &Value) -> Result<(), CliError> {
    let text = format!("{}\n", serde_json::to_string_pretty(report).expect("serializable"));
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Usage(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let started = Instant::now();
    let hashes = match input_hashes(&args.inputs) {
        Ok(h) => h,
        Err(CliError::Domain(payload)) => {
            let report = json!({
                "command": args.command.name(),
                "error": payload,
            });
            let _ = emit(&args, &report);
            return ExitCode::from(1);
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            return ExitCode::from(2);
        }
    };
    let outcome = execute(&args);
    let elapsed = started.elapsed().as_millis();
    eprintln!("# command={} elapsed_ms={elapsed}", args.command.name());
    match outcome {
        Ok(result) => {
            let report = json!({
                "command": args.command.name(),
                "inputs": hashes,
                "result": result,
            });
            if emit(&args, &report).is_err() {
                return ExitCode::from(2);
            }
            let all_pass = args.command != Command::Selftest
                || result.get("all_pass").and_then(Value::as_bool).unwrap_or(false);
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Domain(payload)) => {
            let report = json!({
                "command": args.command.name(),
                "inputs": hashes,
                "error": payload,
            });
            let _ = emit(&args, &report);
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

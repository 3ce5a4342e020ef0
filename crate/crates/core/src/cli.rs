//! Command-line front end. Every command prints one JSON document (keys
//! sorted, rationals as canonical strings) and exits with
//! 0 pass, 2 invalid input, 3 I/O error, 4 verification failure, 5 resource limit.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{edge_removal_report, rate_region_micro, AnalysisError, RegionLimits, VerifyInput};
use crate::code::file::{descriptor_json, load_code, table_json};
use crate::code::{check_feasibility, CheckMode, CodeError, FeasibilityTarget, DEFAULT_ENUMERATION_LIMIT};
use crate::graph::{validation_errors, InstanceError, NetworkInstance, RateVector};
use crate::rational::Rational;
use crate::transforms::chain::{parse_mode, run_chain, ChainStep};
use crate::transforms::code_error_kind;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_FAIL: i32 = 4;
pub const EXIT_LIMIT: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "edgerem", version, about = "Network coding workbench for undirected networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate an instance file.
    Validate { instance: PathBuf },
    /// Edge-removal report for adding an edge to an instance.
    Analyze(AnalyzeArgs),
    /// Apply a transform chain to a code.
    Transform(TransformArgs),
    /// Measure the error of a code on an instance.
    Check(CheckArgs),
    /// Zero-error rate points of a micro instance by exhaustive code search.
    Region(RegionArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub instance: PathBuf,
    /// Probed edge as `u,u2`.
    #[arg(long)]
    pub edge: String,
    #[arg(long)]
    pub lambda: String,
    /// Code on the instance with the edge added; runs the verification chain.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Comma-separated per-source rates.
    #[arg(long)]
    pub rate: Option<String>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub limit: u64,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    pub instance: PathBuf,
    pub code: PathBuf,
    /// JSON list of `{op, params, seed}` steps.
    pub chain: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the instance the transformed code runs on.
    #[arg(long)]
    pub instance_out: Option<PathBuf>,
    /// Largest table (in entries) written in table form; larger codes are
    /// written as descriptors.
    #[arg(long, default_value_t = 1 << 16)]
    pub table_limit: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub instance: PathBuf,
    pub code: PathBuf,
    #[arg(long)]
    pub rate: Option<String>,
    #[arg(long, default_value = "0")]
    pub epsilon: String,
    /// `exhaustive`, `exhaustive:LIMIT` or `sampled:TRIALS:SEED`.
    #[arg(long, default_value = "exhaustive")]
    pub mode: String,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[arg(long = "N", default_value_t = 1)]
    pub big_n: usize,
    #[arg(long, default_value_t = RegionLimits::default().max_edges)]
    pub max_edges: usize,
    #[arg(long, default_value_t = RegionLimits::default().max_alphabet)]
    pub max_alphabet: u64,
    #[arg(long, default_value_t = RegionLimits::default().max_rounds)]
    pub max_rounds: usize,
    #[arg(long, default_value_t = RegionLimits::default().max_messages)]
    pub max_messages: u64,
    #[arg(long, default_value_t = RegionLimits::default().max_search)]
    pub max_search: u64,
}

/// A finished command: exit code and the JSON document for standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: Value,
}

impl Outcome {
    fn new(code: i32, output: Value) -> Self {
        Outcome { code, output }
    }

    fn error(code: i32, kind: &str, message: impl ToString) -> Self {
        Outcome::new(
            code,
            json!({"error": {"kind": kind, "message": message.to_string()}}),
        )
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Pretty JSON with sorted keys.
pub fn render(v: &Value) -> String {
    // serde_json's default map is ordered by key
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome::error(EXIT_IO, "IoError", format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Outcome> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Outcome::error(EXIT_INVALID, "MalformedDocument", format!("{}: {e}", path.display())))
}

fn instance_error(e: &InstanceError) -> Outcome {
    Outcome::error(EXIT_INVALID, e.kind(), e)
}

fn load_instance(path: &Path) -> Result<NetworkInstance, Outcome> {
    let text = read(path)?;
    let errors = validation_errors(&text);
    if !errors.is_empty() {
        return Err(Outcome::new(EXIT_INVALID, error_list(&errors)));
    }
    crate::graph::validate_instance(&text).map_err(|e| instance_error(&e))
}

fn error_list(errors: &[InstanceError]) -> Value {
    json!({
        "valid": false,
        "errors": errors
            .iter()
            .map(|e| json!({"kind": e.kind(), "message": e.to_string()}))
            .collect::<Vec<_>>(),
    })
}

fn code_error(e: &CodeError) -> Outcome {
    let exit = match e {
        CodeError::EnumerationTooLarge { .. } | CodeError::TableTooLarge(_) => EXIT_LIMIT,
        _ => EXIT_INVALID,
    };
    Outcome::error(exit, code_error_kind(e), e)
}

fn analysis_error(e: &AnalysisError) -> Outcome {
    let exit = if e.is_resource_limit() { EXIT_LIMIT } else { EXIT_INVALID };
    let mut out = Outcome::error(exit, &e.kind(), e);
    if let AnalysisError::Chain(c) = e {
        out.output["error"]["step"] = json!(c.index);
        out.output["error"]["op"] = json!(c.op);
    }
    out
}

fn parse_rational(s: &str, what: &str) -> Result<Rational, Outcome> {
    s.parse()
        .map_err(|e| Outcome::error(EXIT_INVALID, "BadArgument", format!("{what}: {e}")))
}

fn parse_rates(s: Option<&String>, inst: &NetworkInstance) -> Result<Option<RateVector>, Outcome> {
    s.map(|s| RateVector::parse(s, inst.sources().len()).map_err(|e| instance_error(&e)))
        .transpose()
}

fn validate(path: &Path) -> Outcome {
    let text = match read(path) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let errors = validation_errors(&text);
    if !errors.is_empty() {
        return Outcome::new(EXIT_INVALID, error_list(&errors));
    }
    match crate::graph::validate_instance(&text) {
        Ok(inst) => Outcome::new(
            EXIT_PASS,
            json!({
                "valid": true,
                "vertices": inst.num_vertices(),
                "edges": inst.edges().len(),
                "sources": inst.sources().len(),
                "terminals": inst.terminals().len(),
            }),
        ),
        Err(e) => Outcome::new(EXIT_INVALID, error_list(&[e])),
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<Outcome, Outcome> {
    let inst = load_instance(&args.instance)?;
    let (u, u2) = args
        .edge
        .split_once(',')
        .ok_or_else(|| Outcome::error(EXIT_INVALID, "BadArgument", "--edge must be u,u2"))?;
    let lambda = parse_rational(&args.lambda, "--lambda")?;
    let rates = parse_rates(args.rate.as_ref(), &inst)?;
    let verify = match &args.code {
        None => None,
        Some(path) => {
            let with_edge = inst.add_edge(u, u2, &lambda).map_err(|e| instance_error(&e))?;
            let loaded = load_code(&read_json(path)?, &with_edge).map_err(|e| code_error(&e))?;
            Some(VerifyInput {
                code: loaded.code,
                limit: args.limit,
            })
        }
    };
    let report = edge_removal_report(&inst, u, u2, &lambda, rates.as_ref(), verify.as_ref())
        .map_err(|e| analysis_error(&e))?;
    let exit = match &report.verification {
        Some(v) if !v.pass => EXIT_FAIL,
        _ => EXIT_PASS,
    };
    Ok(Outcome::new(exit, to_value(&report)))
}

fn transform(args: &TransformArgs) -> Result<Outcome, Outcome> {
    let inst = load_instance(&args.instance)?;
    let code_value = read_json(&args.code)?;
    let loaded = load_code(&code_value, &inst).map_err(|e| code_error(&e))?;
    let steps: Vec<ChainStep> = serde_json::from_value(read_json(&args.chain)?)
        .map_err(|e| Outcome::error(EXIT_INVALID, "MalformedChain", e))?;
    let (state, resolved) = run_chain(loaded.code, &inst, &steps)
        .map_err(|e| analysis_error(&AnalysisError::from(e)))?;
    let (form, written) = match table_json(state.code.as_ref(), &state.inst, args.table_limit) {
        Ok(table) => ("table", table),
        Err(CodeError::TableTooLarge(_)) | Err(CodeError::EnumerationTooLarge { .. }) => {
            ("descriptor", descriptor_json(&inst, &code_value, &resolved))
        }
        Err(e) => return Err(code_error(&e)),
    };
    let instance_doc = to_value(&state.inst.to_document());
    let write = |path: &Path, v: &Value| {
        fs::write(path, render(v))
            .map_err(|e| Outcome::error(EXIT_IO, "IoError", format!("{}: {e}", path.display())))
    };
    write(&args.out, &written)?;
    if let Some(path) = &args.instance_out {
        write(path, &instance_doc)?;
    }
    Ok(Outcome::new(
        EXIT_PASS,
        json!({
            "form": form,
            "chain": to_value(&resolved),
            "kind": state.code.kind(),
            "instance": instance_doc,
            "n": state.code.inner_blocklength(),
            "N": state.code.outer_blocklength(),
            "message_sizes": state.code.message_sizes(),
        }),
    ))
}

fn check(args: &CheckArgs) -> Result<Outcome, Outcome> {
    let inst = load_instance(&args.instance)?;
    let loaded = load_code(&read_json(&args.code)?, &inst).map_err(|e| code_error(&e))?;
    let epsilon = parse_rational(&args.epsilon, "--epsilon")?;
    if epsilon.is_negative() || epsilon > Rational::one() {
        return Err(Outcome::error(EXIT_INVALID, "BadArgument", "--epsilon must lie in [0, 1]"));
    }
    let mode: CheckMode =
        parse_mode(&args.mode).map_err(|e| Outcome::error(EXIT_INVALID, "BadArgument", e))?;
    let target = FeasibilityTarget {
        rates: parse_rates(args.rate.as_ref(), &inst)?,
        epsilon,
    };
    let report =
        check_feasibility(loaded.code.as_ref(), &inst, &target, mode).map_err(|e| code_error(&e))?;
    let exit = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    Ok(Outcome::new(exit, to_value(&report)))
}

fn region(args: &RegionArgs) -> Result<Outcome, Outcome> {
    let inst = load_instance(&args.instance)?;
    let limits = RegionLimits {
        max_edges: args.max_edges,
        max_alphabet: args.max_alphabet,
        max_rounds: args.max_rounds,
        max_messages: args.max_messages,
        max_search: args.max_search,
    };
    let report =
        rate_region_micro(&inst, args.n, args.big_n, &limits).map_err(|e| analysis_error(&e))?;
    Ok(Outcome::new(EXIT_PASS, to_value(&report)))
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Validate { instance } => Ok(validate(instance)),
        Command::Analyze(a) => analyze(a),
        Command::Transform(a) => transform(a),
        Command::Check(a) => check(a),
        Command::Region(a) => region(a),
    };
    result.unwrap_or_else(|e| e)
}

/// Parses `args` (including the program name), runs the command and prints
/// its JSON to standard output. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = execute(&cli);
    if let Some(err) = outcome.output.get("error") {
        eprintln!("error: {}", err["message"].as_str().unwrap_or_default());
    }
    print!("{}", render(&outcome.output));
    outcome.code
}

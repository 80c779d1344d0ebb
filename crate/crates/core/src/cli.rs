//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 input error.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bits::BitString;
use crate::bounds;
use crate::error::Error;
use crate::fourier::{self, SymmetricFn};
use crate::linalg;
use crate::predicate::{self, Predicate};
use crate::protocol;
use crate::rational;
use crate::reduction;
use crate::signrep::{self, CertificateRecord, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Hard ceiling for `certify --verify-n-max`.
pub const VERIFY_N_CEILING: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "signrank", version, about = "Sign-rank certificates for symmetric XOR functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SpecArg {
    /// Sign string such as "--+++", @file, or a family such as threshold:n=16,t=5
    #[arg(allow_hyphen_values = true)]
    spec: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degree measures and XOR/AND bound reports
    Analyze {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        json: bool,
    },
    /// Build and verify the sparse sign representation
    Certify {
        #[command(flatten)]
        spec: SpecArg,
        /// Also compare the explicit matrix rank with the support
        #[arg(long)]
        rank: bool,
        #[arg(long, default_value_t = 8)]
        verify_n_max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Embed the AND function into the XOR function and check it
    Reduce {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Monte-Carlo run of the sampling protocol on one input pair
    Simulate {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent RNG streams; results are reproducible per worker count
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Brute-force oracles
    Oracle {
        #[command(subcommand)]
        oracle: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Full Walsh-Hadamard transform of D(|x|)
    Wht {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Exact rank of the explicit lifted matrix
    Rank {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// LP feasibility of a sign-representing polynomial of given degree
    Lp {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        degree: usize,
    },
    /// Re-check a stored certificate
    Verify {
        /// @file or inline JSON of a certify report or bare certificate
        certificate: String,
        #[arg(long)]
        rank: bool,
    },
}

/// Command outcome before wall time is attached.
struct Outcome {
    inputs: Value,
    outputs: Map<String, Value>,
    verdicts: Map<String, Value>,
    table: Option<Vec<(String, String)>>,
}

enum Failure {
    Input(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(m) => Failure::Verify(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn read_arg(raw: &str) -> Result<String, Failure> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}"))),
        None => Ok(raw.to_string()),
    }
}

/// Resolves an inline sign string, `@file`, or family expression.
pub fn parse_spec(raw: &str) -> crate::Result<Predicate> {
    let text = match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?,
        None => raw.to_string(),
    };
    predicate::parse_expr(&text)
}

fn spec_inputs(raw: &str, p: &Predicate) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("spec".into(), json!(raw));
    m.insert("predicate".into(), json!(p.to_string()));
    m.insert("n".into(), json!(p.n()));
    m
}

fn biguint_value(v: &BigUint) -> Value {
    to_value(&Wrapped(v))
}

struct Wrapped<'a>(&'a BigUint);

impl Serialize for Wrapped<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational::serde_biguint::serialize(self.0, s)
    }
}

fn verdict_map(report: &VerifyReport) -> Map<String, Value> {
    let mut v = Map::new();
    v.insert("sign_ok".into(), json!(report.sign_ok));
    v.insert("support_ok".into(), json!(report.support_ok));
    v.insert("structural_ok".into(), json!(report.structural_ok));
    v.insert("power_bound_ok".into(), json!(report.power_bound_ok));
    v.insert("levels_consistent".into(), json!(report.levels_consistent));
    v.insert("spectrum_consistent".into(), json!(report.spectrum_consistent));
    v.insert("support_consistent".into(), json!(report.support_consistent));
    v.insert("bound_consistent".into(), json!(report.bound_consistent));
    if let Some(ok) = report.rank_check {
        v.insert("rank_equals_support".into(), json!(ok));
    }
    v
}

fn cmd_analyze(raw: &str) -> CmdResult {
    let p = parse_spec(raw)?;
    let profile = p.degree_profile();
    let xor = bounds::xor_bounds(&p);
    let and = bounds::and_bounds(&p);
    let mut outputs = object(to_value(&profile));
    outputs.insert("M".into(), json!(profile.deg2));
    outputs.insert("K".into(), json!(profile.deg));
    outputs.insert("support_upper".into(), to_value(&xor).get("support_upper").cloned().unwrap_or(Value::Null));
    let table = vec![
        ("n".into(), p.n().to_string()),
        ("predicate".into(), p.to_string()),
        ("deg".into(), profile.deg.to_string()),
        ("deg2".into(), profile.deg2.to_string()),
        ("support_upper".into(), xor.support_upper.as_ref().map_or("-".into(), |s| s.to_string())),
        ("log2_rank_upper".into(), xor.log2_rank_upper.map_or("-".into(), |v| format!("{v:.4}"))),
        ("protocol_cost_bits".into(), xor.protocol_cost_bits.map_or("-".into(), |v| v.to_string())),
        ("forster_lower".into(), xor.forster_lower.as_ref().map_or("-".into(), rational::encode)),
        ("xor lower".into(), xor.lower_expr.clone()),
        ("xor upper".into(), xor.upper_expr.clone()),
        ("and lower".into(), and.lower_expr.clone()),
        ("and upper".into(), and.upper_expr.clone()),
        ("caveat".into(), xor.caveat.clone()),
    ];
    outputs.insert("xor".into(), to_value(&xor));
    outputs.insert("and".into(), to_value(&and));
    Ok(Outcome { inputs: Value::Object(spec_inputs(raw, &p)), outputs, verdicts: Map::new(), table: Some(table) })
}

fn cmd_certify(raw: &str, rank: bool, verify_n_max: usize) -> CmdResult {
    if rank && verify_n_max > VERIFY_N_CEILING {
        return Err(Failure::Input(format!("--verify-n-max {verify_n_max} exceeds {VERIFY_N_CEILING}")));
    }
    let p = parse_spec(raw)?;
    let cert = signrep::lift(&p);
    let check_rank = rank && p.n() <= verify_n_max.min(fourier::EXPLICIT_N_MAX);
    let report = signrep::verify_lift(&cert, &p, check_rank);
    let verdicts = verdict_map(&report);
    let mut outputs = Map::new();
    outputs.insert("support".into(), biguint_value(&cert.support));
    outputs.insert("bound".into(), biguint_value(&cert.bound));
    outputs.insert("rank".into(), json!(report.rank));
    if rank && !check_rank {
        outputs.insert("rank_skipped".into(), json!(format!("n = {} above the explicit-matrix limit", p.n())));
    }
    outputs.insert("certificate".into(), to_value(&cert.to_record(&p)));
    let mut table = vec![
        ("n".into(), p.n().to_string()),
        ("M".into(), cert.m.to_string()),
        ("deg q1".into(), cert.q1.degree().map_or("-".into(), |d| d.to_string())),
        ("deg q2".into(), cert.q2.degree().map_or("-".into(), |d| d.to_string())),
        ("support".into(), cert.support.to_string()),
        ("bound".into(), cert.bound.to_string()),
    ];
    if let Some(r) = report.rank {
        table.push(("rank".into(), r.to_string()));
    }
    table.extend(verdicts.iter().map(|(k, v)| (k.clone(), v.to_string())));
    let mut inputs = spec_inputs(raw, &p);
    inputs.insert("rank".into(), json!(rank));
    inputs.insert("verify_n_max".into(), json!(verify_n_max));
    Ok(Outcome { inputs: Value::Object(inputs), outputs, verdicts, table: Some(table) })
}

fn cmd_reduce(raw: &str) -> CmdResult {
    let p = parse_spec(raw)?;
    let record = reduction::reduce(&p)?;
    let mut verdicts = Map::new();
    verdicts.insert("embedding_verified".into(), json!(record.verified));
    verdicts.insert("degree_transfer_ok".into(), json!(record.degree_transfer_ok));
    Ok(Outcome { inputs: Value::Object(spec_inputs(raw, &p)), outputs: object(to_value(&record)), verdicts, table: None })
}

fn parse_bits(flag: &str, raw: &str, n: usize) -> Result<u64, Failure> {
    let bits: BitString = raw.parse().map_err(|e: Error| Failure::Input(format!("--{flag}: {e}")))?;
    if bits.len() != n {
        return Err(Failure::Input(format!("--{flag} has length {}, expected {n}", bits.len())));
    }
    Ok(bits.to_mask())
}

fn cmd_simulate(raw: &str, x: &str, y: &str, trials: u64, seed: u64, workers: usize) -> CmdResult {
    let p = parse_spec(raw)?;
    let n = p.n();
    if n > protocol::FACTORIZE_N_MAX {
        return Err(Failure::Input(format!("simulate needs n ≤ {}, got {n}", protocol::FACTORIZE_N_MAX)));
    }
    let xm = parse_bits("x", x, n)?;
    let ym = parse_bits("y", y, n)?;
    let cert = signrep::lift(&p);
    let f = protocol::factorize(&cert, protocol::FACTORIZE_N_MAX)?;
    let report = f.simulate(xm, ym, trials, seed, workers)?;
    let expected = p.at((xm ^ ym).count_ones() as usize);
    let sign_ok = rational::signum(&report.exact_bias) == expected;
    let mut outputs = object(to_value(&report));
    outputs.insert("d".into(), json!(f.d()));
    outputs.insert("cost_bits".into(), json!(f.cost()));
    outputs.insert("target".into(), json!(expected));
    let mut verdicts = Map::new();
    verdicts.insert("sign_correct".into(), json!(sign_ok));
    let mut inputs = spec_inputs(raw, &p);
    inputs.insert("x".into(), json!(x));
    inputs.insert("y".into(), json!(y));
    inputs.insert("trials".into(), json!(trials));
    inputs.insert("seed".into(), json!(seed));
    inputs.insert("workers".into(), json!(workers));
    Ok(Outcome { inputs: Value::Object(inputs), outputs, verdicts, table: None })
}

fn gate(what: &'static str, n: usize, max: usize) -> Result<(), Failure> {
    if n > max {
        return Err(Error::Gate { what, n, max }.into());
    }
    Ok(())
}

fn cmd_oracle(oracle: &OracleCommand) -> CmdResult {
    match oracle {
        OracleCommand::Wht { spec } => {
            let p = parse_spec(&spec.spec)?;
            gate("oracle wht", p.n(), fourier::EXPLICIT_N_MAX)?;
            let f = SymmetricFn::from_predicate(&p);
            let values = f.to_values()?;
            let full = fourier::wht_full(&values)?;
            // the unnormalised transform inverts the normalised one
            let scale = rational::int(1i64 << p.n());
            let back: Vec<_> = fourier::wht_full(&full.coeffs)?.coeffs.into_iter().map(|c| c * &scale).collect();
            let levels = fourier::symmetric_spectrum(&f);
            let collapsed = full.level_collapse()?;
            let mut outputs = Map::new();
            outputs.insert("coeffs".into(), json!(full.coeffs.iter().map(rational::encode).collect::<Vec<_>>()));
            outputs.insert("level_coeffs".into(), json!(levels.coeffs.iter().map(rational::encode).collect::<Vec<_>>()));
            outputs.insert("nonzero".into(), json!(full.nonzero_count()));
            let mut verdicts = Map::new();
            verdicts.insert("round_trip".into(), json!(back == values));
            verdicts.insert("matches_level_transform".into(), json!(collapsed == levels));
            Ok(Outcome { inputs: Value::Object(spec_inputs(&spec.spec, &p)), outputs, verdicts, table: None })
        }
        OracleCommand::Rank { spec } => {
            let p = parse_spec(&spec.spec)?;
            gate("oracle rank", p.n(), fourier::EXPLICIT_N_MAX)?;
            let cert = signrep::lift(&p);
            let rank = linalg::exact_rank(&fourier::xor_matrix(&cert.lifted)?);
            let mut outputs = Map::new();
            outputs.insert("rank".into(), json!(rank));
            outputs.insert("support".into(), biguint_value(&cert.support));
            let mut verdicts = Map::new();
            verdicts.insert("rank_equals_support".into(), json!(BigUint::from(rank) == cert.support));
            Ok(Outcome { inputs: Value::Object(spec_inputs(&spec.spec, &p)), outputs, verdicts, table: None })
        }
        OracleCommand::Lp { spec, degree } => {
            let p = parse_spec(&spec.spec)?;
            let poly = signrep::lp_min_degree(&p, *degree)?;
            let mut outputs = Map::new();
            outputs.insert("degree".into(), json!(degree));
            outputs.insert("status".into(), json!(if poly.is_some() { "feasible" } else { "infeasible" }));
            outputs.insert("feasible".into(), json!(poly.is_some()));
            outputs.insert(
                "coeffs".into(),
                poly.map_or(Value::Null, |q| json!(q.coeffs().iter().map(rational::encode).collect::<Vec<_>>())),
            );
            let mut inputs = spec_inputs(&spec.spec, &p);
            inputs.insert("degree".into(), json!(degree));
            Ok(Outcome { inputs: Value::Object(inputs), outputs, verdicts: Map::new(), table: None })
        }
        OracleCommand::Verify { certificate, rank } => {
            let text = read_arg(certificate)?;
            let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(e.to_string()))?;
            let record_value = match value.get("certificate") {
                Some(inner) => inner.clone(),
                None => value,
            };
            let record: CertificateRecord =
                serde_json::from_value(record_value).map_err(|e| Failure::Input(format!("certificate: {e}")))?;
            let (cert, p) = record.into_parts()?;
            let check_rank = *rank && p.n() <= fourier::EXPLICIT_N_MAX;
            let report = signrep::verify_lift(&cert, &p, check_rank);
            let mut outputs = Map::new();
            outputs.insert("support".into(), biguint_value(&cert.support));
            outputs.insert("rank".into(), json!(report.rank));
            let mut inputs = Map::new();
            inputs.insert("certificate".into(), json!(certificate));
            inputs.insert("predicate".into(), json!(p.to_string()));
            inputs.insert("n".into(), json!(p.n()));
            Ok(Outcome { inputs: Value::Object(inputs), outputs, verdicts: verdict_map(&report), table: None })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze { .. } => "analyze",
        Command::Certify { .. } => "certify",
        Command::Reduce { .. } => "reduce",
        Command::Simulate { .. } => "simulate",
        Command::Oracle { oracle } => match oracle {
            OracleCommand::Wht { .. } => "oracle wht",
            OracleCommand::Rank { .. } => "oracle rank",
            OracleCommand::Lp { .. } => "oracle lp",
            OracleCommand::Verify { .. } => "oracle verify",
        },
    }
}

/// Assembles the report: the command's outputs at top level plus
/// `command`, `inputs`, `verdicts`, `verified` and `wall_time_ms`.
fn report_json(command: &str, outcome: &Outcome, wall_ms: f64) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("inputs".into(), outcome.inputs.clone());
    for (k, v) in &outcome.outputs {
        m.insert(k.clone(), v.clone());
    }
    let all_ok = outcome.verdicts.values().all(|v| v.as_bool() == Some(true));
    m.insert("verdicts".into(), Value::Object(outcome.verdicts.clone()));
    if !m.contains_key("verified") {
        m.insert("verified".into(), json!(all_ok));
    }
    m.insert("wall_time_ms".into(), json!(wall_ms));
    Value::Object(m)
}

fn write_table(out: &mut dyn Write, command: &str, rows: &[(String, String)], wall_ms: f64) -> std::io::Result<()> {
    writeln!(out, "{command}")?;
    writeln!(out, "{:<22} value", "field")?;
    writeln!(out, "{:-<22} {:-<40}", "", "")?;
    for (k, v) in rows {
        writeln!(out, "{k:<22} {v}")?;
    }
    writeln!(out, "{:<22} {wall_ms:.1}", "wall_time_ms")
}

/// Sizes the global rayon pool from `SIGNRANK_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = protocol::workers_from_env() {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let start = Instant::now();
    let json_flag = match &cli.command {
        Command::Analyze { json, .. } | Command::Certify { json, .. } => *json,
        _ => true,
    };
    let result = match &cli.command {
        Command::Analyze { spec, .. } => cmd_analyze(&spec.spec),
        Command::Certify { spec, rank, verify_n_max, .. } => cmd_certify(&spec.spec, *rank, *verify_n_max),
        Command::Reduce { spec } => cmd_reduce(&spec.spec),
        Command::Simulate { spec, x, y, trials, seed, workers } => {
            cmd_simulate(&spec.spec, x, y, *trials, *seed, *workers)
        }
        Command::Oracle { oracle } => cmd_oracle(oracle),
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let name = command_name(&cli.command);
    match result {
        Ok(outcome) => {
            let report = report_json(name, &outcome, wall_ms);
            let written = match (&outcome.table, json_flag) {
                (Some(rows), false) => write_table(out, name, rows, wall_ms),
                _ => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json")),
            };
            if written.is_err() {
                return EXIT_INPUT;
            }
            if report["verified"] == json!(true) {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Verify(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            EXIT_VERIFY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("signrank").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn analyze_alternating() {
        let (code, out) = call(&["analyze", "+-+-+", "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["deg"], 4);
        assert_eq!(v["deg2"], 0);
        assert_eq!(v["support_upper"], 1);
        let (code, table) = call(&["analyze", "+-+-+"]);
        assert_eq!(code, 0);
        assert!(table.lines().any(|l| l.starts_with("deg2") && l.trim_end().ends_with('0')));
    }

    #[test]
    fn input_errors() {
        assert_eq!(call(&["analyze", "+0-"]).0, 2);
        assert_eq!(call(&["analyze", "threshold:n=4"]).0, 2);
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(call(&["certify", "+-", "--rank", "--verify-n-max", "13"]).0, 2);
        assert_eq!(call(&["oracle", "wht", "parity:n=11"]).0, 2);
        assert_eq!(call(&["oracle", "lp", "parity:n=17", "--degree", "3"]).0, 2);
    }

    #[test]
    fn lp_infeasible_and_rank() {
        let (code, out) = call(&["oracle", "lp", "+-+", "--degree", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["status"], "infeasible");
        let (code, out) = call(&["oracle", "rank", "parity:n=6"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rank"], 1);
    }

    #[test]
    fn wht_round_trip() {
        let (code, out) = call(&["oracle", "wht", "threshold:n=5,t=2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdicts"]["round_trip"], true);
        assert_eq!(v["verdicts"]["matches_level_transform"], true);
    }

    #[test]
    fn help_is_success() {
        assert_eq!(call(&["--help"]).0, 0);
    }
}

//! `lcp-learn`: learn, compile and stress-test the LCP secret-learning algorithms.
//!
//! Every command prints one JSON report on stdout and a short human summary
//! on stderr. Exit codes: 0 success, 1 verification or runtime failure,
//! 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lcp_learn::circuit::{Circuit, GateCounts};
use lcp_learn::classical::learn_classical;
use lcp_learn::exec::Execution;
use lcp_learn::noise::{estimate_asp, AspOptions, AspReport, NoiseProfile};
use lcp_learn::oracle::{LedgerSnapshot, SecretString, SecretTeacher, Teacher};
use lcp_learn::quantum::{run_quantum_learn_with, HadamardStyle, LearnOptions, RoundTrace};
use lcp_learn::synth::{build_full_circuit, FullCircuitOptions};
use lcp_learn::transpile::{transpile, CouplingGraph, MappingChoice, PassReport, QubitMapping, TranspileOptions};
use lcp_learn::verify::{run_suite, Check, Suite};

const SCHEMA_VERSION: u32 = 1;
const THREADS_ENV: &str = "LCP_LEARN_THREADS";

#[derive(Parser)]
#[command(
    name = "lcp-learn",
    version,
    about = "Learn a secret bit string through a longest-common-prefix oracle"
)]
struct Cli {
    /// Run every data-parallel loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover a secret with the classical or the quantum learner.
    Learn {
        #[arg(long, value_parser = parse_secret)]
        secret: SecretString,
        #[arg(long, value_enum, default_value_t = Mode::Quantum)]
        mode: Mode,
        /// Include per-round amplitude snapshots (quantum mode).
        #[arg(long)]
        trace: bool,
    },
    /// Write the full algorithm circuit for a secret as OpenQASM 2.
    Synth {
        #[arg(long, value_parser = parse_secret)]
        secret: SecretString,
        /// Width of the q register (defaults to the algorithm's choice).
        #[arg(long)]
        t: Option<usize>,
        /// Plain compute/uncompute CNOT chains instead of Gray ordering.
        #[arg(long)]
        no_gray: bool,
        /// Emit each H as RZ(π/2)·SX·RZ(π/2).
        #[arg(long)]
        decompose_h: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile a circuit onto a device topology.
    Transpile {
        #[arg(long = "in")]
        input: PathBuf,
        /// `linear3`, `quito`, or a JSON coupling-graph file.
        #[arg(long)]
        target: String,
        /// 1 runs the peephole optimizer, 0 skips it.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
        opt: u8,
        /// Fixed placement such as `0,1,2` (physical qubit per logical qubit).
        #[arg(long)]
        mapping: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the success probability under a noise profile.
    Asp {
        #[arg(long, value_parser = parse_secret)]
        secret: SecretString,
        /// `default` (noiseless), `quito`, `average`, or a JSON profile file.
        #[arg(long, default_value = "default")]
        noise: String,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 8192, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Classical,
    Quantum,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Classical,
    Quantum,
    Synth,
    Transpile,
}

fn parse_secret(s: &str) -> Result<SecretString, String> {
    s.parse::<SecretString>().map_err(|e| e.to_string())
}

#[derive(Serialize, Default)]
struct RunReport {
    schema_version: u32,
    command: &'static str,
    parameters: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovered: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ledger: Option<LedgerSnapshot>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gate_counts: Option<GateCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_gate_counts: Option<GateCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass_report: Option<PassReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asp: Option<AspReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    traces: Option<Vec<RoundTrace>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<Vec<Check>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    passed: Option<bool>,
}

impl RunReport {
    fn new(command: &'static str, parameters: Value) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command,
            parameters,
            ..Default::default()
        }
    }
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)
}

fn load_graph(target: &str) -> Result<CouplingGraph, Failure> {
    if let Some(g) = CouplingGraph::by_name(target) {
        return Ok(g);
    }
    if !target.ends_with(".json") {
        return Err(usage(anyhow!(
            "unknown target {target:?}; use linear3, quito or a .json file"
        )));
    }
    CouplingGraph::from_json(&read_input(Path::new(target))?).map_err(usage)
}

fn load_profile(noise: &str) -> Result<NoiseProfile, Failure> {
    if let Some(p) = NoiseProfile::by_name(noise) {
        return Ok(p);
    }
    if !noise.ends_with(".json") {
        return Err(usage(anyhow!(
            "unknown noise profile {noise:?}; use default, quito, average or a .json file"
        )));
    }
    NoiseProfile::from_json(&read_input(Path::new(noise))?).map_err(usage)
}

fn cmd_learn(secret: &SecretString, mode: Mode, trace: bool) -> Result<RunReport, Failure> {
    let teacher = SecretTeacher::new(secret.clone());
    let mut report = RunReport::new("learn", json!({ "secret": secret, "mode": mode, "trace": trace }));
    let recovered = match mode {
        Mode::Classical => learn_classical(&teacher)?.recovered,
        Mode::Quantum => {
            let out = run_quantum_learn_with(&teacher, LearnOptions { trace })?;
            if trace {
                report.traces = Some(out.traces);
            }
            out.recovered
        }
    };
    let ledger = teacher.ledger().snapshot();
    eprintln!(
        "recovered {recovered} with {} classical queries and {} oracle uses",
        ledger.classical_queries, ledger.quantum_oracle_uses
    );
    report.passed = Some(recovered == *secret.bits());
    report.recovered = Some(recovered.to_string());
    report.ledger = Some(ledger);
    Ok(report)
}

fn cmd_synth(
    secret: &SecretString,
    t: Option<usize>,
    no_gray: bool,
    decompose_h: bool,
    out: &Path,
) -> Result<RunReport, Failure> {
    let opts = FullCircuitOptions {
        hadamards: if decompose_h {
            HadamardStyle::Decomposed
        } else {
            HadamardStyle::Native
        },
        no_gray,
        t,
    };
    let full = build_full_circuit(secret, opts).map_err(usage)?;
    std::fs::write(out, full.circuit.to_qasm()).with_context(|| format!("cannot write {}", out.display()))?;
    let counts = full.circuit.gate_counts();
    let oracle = full.oracle_counts();
    eprintln!(
        "wrote {} ({} qubits, {} gates, depth {}); oracle block: {} CX, {} RZ",
        out.display(),
        full.circuit.width(),
        counts.total(),
        full.circuit.depth(),
        oracle.cx,
        oracle.rz
    );
    let mut report = RunReport::new(
        "synth",
        json!({ "secret": secret, "t": full.layout.t, "no_gray": no_gray, "decompose_h": decompose_h, "out": out }),
    );
    report.gate_counts = Some(counts);
    report.depth = Some(full.circuit.depth());
    report.oracle_gate_counts = Some(oracle);
    Ok(report)
}

/// Published budget for the two-bit circuit on the 3-qubit line.
fn reference_budget(counts: &GateCounts, depth: usize) -> Value {
    let (cx, rz, sx, x, d) = (9i64, 10i64, 4i64, 2i64, 15i64);
    json!({
        "reference": { "cx": cx, "rz": rz, "sx": sx, "x": x, "depth": d },
        "delta": {
            "cx": counts.cx as i64 - cx,
            "rz": counts.rz as i64 - rz,
            "sx": counts.sx as i64 - sx,
            "x": counts.x as i64 - x,
            "depth": depth as i64 - d,
        }
    })
}

fn cmd_transpile(
    input: &Path,
    target: &str,
    opt: u8,
    mapping: Option<&str>,
    out: &Path,
    exec: Execution,
) -> Result<RunReport, Failure> {
    let graph = load_graph(target)?;
    let circuit = Circuit::from_qasm(&read_input(input)?)
        .with_context(|| format!("cannot parse {}", input.display()))
        .map_err(usage)?;
    let mapping = match mapping {
        None => MappingChoice::Auto,
        Some(text) => {
            let physical = text
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage(anyhow!("bad --mapping {text:?}: {e}")))?;
            MappingChoice::Fixed(QubitMapping::new(physical, graph.num_qubits()).map_err(usage)?)
        }
    };
    let opts = TranspileOptions {
        mapping,
        optimize: opt == 1,
        exec,
        ..TranspileOptions::default()
    };
    let (compiled, pass) = transpile(&circuit, &graph, &opts).map_err(|e| match e {
        lcp_learn::transpile::TranspileError::TooWide { .. } | lcp_learn::transpile::TranspileError::BadMapping(_) => {
            usage(e)
        }
        e => Failure::Runtime(e.into()),
    })?;
    std::fs::write(out, compiled.to_qasm()).with_context(|| format!("cannot write {}", out.display()))?;
    eprintln!(
        "{} → {}: {} CX, {} RZ, {} SX, {} X, depth {}, legal {}",
        input.display(),
        out.display(),
        pass.final_counts.cx,
        pass.final_counts.rz,
        pass.final_counts.sx,
        pass.final_counts.x,
        pass.final_depth,
        pass.legal()
    );
    let mut report = RunReport::new(
        "transpile",
        json!({ "in": input, "target": target, "opt": opt, "out": out }),
    );
    if circuit.width() == 3 && graph == CouplingGraph::linear3() {
        report.reference = Some(reference_budget(&pass.final_counts, pass.final_depth));
    }
    report.gate_counts = Some(pass.final_counts);
    report.depth = Some(pass.final_depth);
    report.passed = Some(pass.legal());
    report.pass_report = Some(pass);
    Ok(report)
}

fn cmd_asp(
    secret: &SecretString,
    noise: &str,
    trials: u64,
    shots: u64,
    seed: u64,
    exec: Execution,
) -> Result<RunReport, Failure> {
    let profile = load_profile(noise)?;
    // Named profiles target the 5-qubit device; a file brings its own edges.
    let graph = if NoiseProfile::by_name(noise).is_some() {
        CouplingGraph::quito()
    } else {
        profile.coupling_graph()
    };
    let opts = AspOptions {
        graph,
        trials: trials as usize,
        shots: shots as usize,
        seed,
        exec,
    };
    let asp = estimate_asp(secret, &profile, &opts).map_err(|e| match e {
        lcp_learn::noise::NoiseError::NoCircuit(_)
        | lcp_learn::noise::NoiseError::TooWide { .. }
        | lcp_learn::noise::NoiseError::Transpile(lcp_learn::transpile::TranspileError::TooWide { .. }) => usage(e),
        e => Failure::Runtime(e.into()),
    })?;
    eprintln!(
        "ASP for {secret}: {:.4} ± {:.4} over {trials} × {shots} shots",
        asp.mean, asp.stddev
    );
    let mut report = RunReport::new(
        "asp",
        json!({ "secret": secret, "noise": noise, "trials": trials, "shots": shots, "seed": seed }),
    );
    report.gate_counts = Some(asp.gate_counts);
    report.depth = Some(asp.depth);
    report.asp = Some(asp);
    Ok(report)
}

fn cmd_verify(suite: SuiteArg, max_n: usize, exec: Execution) -> RunReport {
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Classical => vec![Suite::Classical],
        SuiteArg::Quantum => vec![Suite::Quantum],
        SuiteArg::Synth => vec![Suite::Synth],
        SuiteArg::Transpile => vec![Suite::Transpile],
    };
    let checks: Vec<Check> = suites.into_iter().flat_map(|s| run_suite(s, max_n, exec)).collect();
    for c in &checks {
        eprintln!(
            "{:<5} {:<10} {:<28} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite.name(),
            c.name,
            c.detail
        );
    }
    let passed = checks.iter().all(|c| c.passed);
    eprintln!(
        "{} of {} checks passed",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    let mut report = RunReport::new("verify", json!({ "suite": suite_name(suite), "max_n": max_n }));
    report.checks = Some(checks);
    report.passed = Some(passed);
    report
}

fn suite_name(s: SuiteArg) -> &'static str {
    match s {
        SuiteArg::All => "all",
        SuiteArg::Classical => "classical",
        SuiteArg::Quantum => "quantum",
        SuiteArg::Synth => "synth",
        SuiteArg::Transpile => "transpile",
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| usage(anyhow!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot configure the thread pool")?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> Result<RunReport, Failure> {
    configure_threads()?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Learn { secret, mode, trace } => cmd_learn(&secret, mode, trace),
        Command::Synth {
            secret,
            t,
            no_gray,
            decompose_h,
            out,
        } => cmd_synth(&secret, t, no_gray, decompose_h, &out),
        Command::Transpile {
            input,
            target,
            opt,
            mapping,
            out,
        } => cmd_transpile(&input, &target, opt, mapping.as_deref(), &out, exec),
        Command::Asp {
            secret,
            noise,
            trials,
            shots,
            seed,
        } => cmd_asp(&secret, &noise, trials, shots, seed, exec),
        Command::Verify { suite, max_n } => Ok(cmd_verify(suite, max_n, exec)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.passed == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

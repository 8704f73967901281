//! Self-check suites run by `lcp-learn verify`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{phase_aligned_deviation, Circuit};
use crate::classical::verify_optimality;
use crate::exec::Execution;
use crate::oracle::{oracle_diagonal, SecretString, SecretTeacher};
use crate::quantum::{certify_round, run_quantum_learn, AlgorithmLayout};
use crate::synth::{build_full_circuit, decode_with_tail, synth_diagonal, FullCircuitOptions};
use crate::transpile::{transpile, CouplingGraph, TranspileOptions};

/// Unitary and probability tolerance used throughout the suites.
pub const TOL: f64 = 1e-9;

/// Upper bounds for `s = 00` compiled onto the 3-qubit line.
pub const S00_CX_BUDGET: usize = 11;
pub const S00_DEPTH_BUDGET: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Classical,
    Quantum,
    Synth,
    Transpile,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Classical, Suite::Quantum, Suite::Synth, Suite::Transpile];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Classical => "classical",
            Suite::Quantum => "quantum",
            Suite::Synth => "synth",
            Suite::Transpile => "transpile",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: Suite, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        suite,
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// The twelve worked instances: every secret of length 2 and 3.
pub fn worked_instances() -> Vec<SecretString> {
    SecretString::all(2).chain(SecretString::all(3)).collect()
}

/// Probability that measuring `compiled` and decoding (with the classical
/// tail for odd `n`) yields `s`. `device_qubits` is the compiled width.
pub fn compiled_success_probability(
    s: &SecretString,
    compiled: &Circuit,
    mapping: &crate::transpile::QubitMapping,
    layout: &AlgorithmLayout,
) -> Result<f64, Box<dyn std::error::Error + Send + Sync>> {
    let state = compiled.run_on_basis(0)?;
    let teacher = SecretTeacher::new(s.clone());
    let mut p = 0.0;
    for (idx, prob) in state.probabilities().into_iter().enumerate() {
        if prob < 1e-15 {
            continue;
        }
        let logical = mapping.logical_index(idx, compiled.width());
        if decode_with_tail(logical, layout, &teacher)? == *s.bits() {
            p += prob;
        }
    }
    Ok(p)
}

fn classical(max_n: usize, exec: Execution) -> Vec<Check> {
    (1..=max_n.min(20))
        .map(|n| {
            let r = verify_optimality(n, exec);
            check(
                Suite::Classical,
                format!("n={n} exhaustive"),
                r.passed(),
                format!(
                    "{}/{} recovered, avg {} queries (bound {})",
                    r.recovered, r.secrets, r.average_queries, r.bound.min_avg_queries
                ),
            )
        })
        .collect()
}

fn quantum(max_n: usize, exec: Execution) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 2..=max_n.min(16) {
        let want_uses = n.div_ceil(2);
        let bad: Vec<String> = exec
            .map_range(1 << n, |v| {
                let s = SecretString::from_index(v as u64, n).expect("n ≤ 16");
                match run_quantum_learn(&s) {
                    Ok(o)
                        if o.recovered == *s.bits()
                            && o.quantum_uses + o.classical_queries == want_uses
                            && o.final_peak_probability >= 1.0 - TOL =>
                    {
                        None
                    }
                    Ok(o) => Some(format!("{s}: got {} with {} uses", o.recovered, o.quantum_uses)),
                    Err(e) => Some(format!("{s}: {e}")),
                }
            })
            .into_iter()
            .flatten()
            .collect();
        out.push(check(
            Suite::Quantum,
            format!("n={n} exhaustive"),
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} secrets, {want_uses} oracle interactions each", 1usize << n)
            } else {
                bad.join("; ")
            },
        ));
    }
    for n in 2..=max_n.min(6) {
        let rounds = AlgorithmLayout::for_n(n).rounds;
        let bad: Vec<String> = SecretString::all(n)
            .flat_map(|s| (1..=rounds).map(move |i| (s.clone(), i)))
            .filter_map(|(s, i)| certify_round(&s, i).err().map(|e| format!("{s} round {i}: {e}")))
            .collect();
        out.push(check(
            Suite::Quantum,
            format!("n={n} round certification"),
            bad.is_empty(),
            bad.join("; "),
        ));
    }
    out
}

fn diagonal_deviation(signs: &[i8]) -> Result<f64, Box<dyn std::error::Error + Send + Sync>> {
    let c = synth_diagonal(signs)?;
    let want = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        signs.len(),
        signs.iter().map(|&s| num_complex::Complex64::new(s as f64, 0.0)),
    ));
    Ok(phase_aligned_deviation(&c.unitary()?, &want))
}

fn synth() -> Vec<Check> {
    let mut out = Vec::new();
    for s in worked_instances() {
        let signs = oracle_diagonal(&s, AlgorithmLayout::for_n(s.len()).t).expect("small instance");
        let counts = synth_diagonal(&signs).expect("valid diagonal").gate_counts();
        let within = signs.len() != 8 || (counts.cx <= 6 && counts.rz <= 7);
        match diagonal_deviation(&signs) {
            Ok(d) => out.push(check(
                Suite::Synth,
                format!("oracle {s}"),
                d <= TOL && within,
                format!("deviation {d:.2e}, {} CX, {} RZ", counts.cx, counts.rz),
            )),
            Err(e) => out.push(check(Suite::Synth, format!("oracle {s}"), false, e.to_string())),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut over_budget = 0;
    for _ in 0..100 {
        let m = rng.gen_range(1..=5);
        let signs: Vec<i8> = (0..1 << m).map(|_| if rng.gen() { 1 } else { -1 }).collect();
        worst = worst.max(diagonal_deviation(&signs).unwrap_or(f64::INFINITY));
        if m == 3 {
            let c = synth_diagonal(&signs).expect("valid diagonal").gate_counts();
            over_budget += usize::from(c.cx > 6 || c.rz > 7);
        }
    }
    out.push(check(
        Suite::Synth,
        "100 random diagonals",
        worst <= TOL && over_budget == 0,
        format!("max deviation {worst:.2e}, {over_budget} over the 3-qubit budget"),
    ));
    out
}

fn transpile_suite(exec: Execution) -> Vec<Check> {
    let opts = TranspileOptions {
        exec,
        ..TranspileOptions::default()
    };
    worked_instances()
        .into_iter()
        .map(|s| {
            let graph = if s.len() == 2 {
                CouplingGraph::linear3()
            } else {
                CouplingGraph::quito()
            };
            let result = (|| -> Result<Check, Box<dyn std::error::Error + Send + Sync>> {
                let full = build_full_circuit(&s, FullCircuitOptions::default())?;
                let (compiled, rep) = transpile(&full.circuit, &graph, &opts)?;
                let mapping = rep.mapping.clone().expect("mapping recorded");
                let p = compiled_success_probability(&s, &compiled, &mapping, &full.layout)?;
                let budget = s.to_string() != "00"
                    || (rep.final_counts.cx <= S00_CX_BUDGET && rep.final_depth <= S00_DEPTH_BUDGET);
                Ok(check(
                    Suite::Transpile,
                    format!("{s} on {}", if s.len() == 2 { "linear3" } else { "quito" }),
                    rep.legal() && p >= 1.0 - TOL && budget,
                    format!(
                        "legal={} p={p:.12} cx={} rz={} sx={} x={} depth={} mapping={:?}",
                        rep.legal(),
                        rep.final_counts.cx,
                        rep.final_counts.rz,
                        rep.final_counts.sx,
                        rep.final_counts.x,
                        rep.final_depth,
                        mapping.as_slice()
                    ),
                ))
            })();
            result.unwrap_or_else(|e| check(Suite::Transpile, format!("{s}"), false, e.to_string()))
        })
        .collect()
}

/// Runs one suite. `max_n` bounds the exhaustive classical and quantum sweeps.
pub fn run_suite(suite: Suite, max_n: usize, exec: Execution) -> Vec<Check> {
    match suite {
        Suite::Classical => classical(max_n, exec),
        Suite::Quantum => quantum(max_n, exec),
        Suite::Synth => synth(),
        Suite::Transpile => transpile_suite(exec),
    }
}

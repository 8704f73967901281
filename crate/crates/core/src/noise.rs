//! Monte-Carlo noisy replay: Pauli errors after gates, readout flips at
//! measurement, and success-probability estimates for the learning circuit.
//!
//! Every shot owns a ChaCha8 stream keyed by `(seed, trial, shot)` and draws
//! the same number of variates whatever the error rates are. Two runs that
//! differ only in the profile therefore share their randomness, and an error
//! that fires at rate `p` also fires at any rate `p' ≥ p`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, GateCounts};
use crate::exec::Execution;
use crate::oracle::SecretString;
use crate::statevector::{format_bits, Histogram, SimError, Statevector};
use crate::synth::{build_full_circuit, FullCircuitOptions, SynthError};
use crate::transpile::{transpile, CouplingGraph, QubitMapping, TranspileError, TranspileOptions};

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("malformed noise profile: {0}")]
    BadProfile(String),
    #[error("circuit uses {width} qubits but the profile covers {qubits}")]
    TooWide { width: usize, qubits: usize },
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("success probability is only defined for the quantum circuit (n ≥ 2), got n = {0}")]
    NoCircuit(usize),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Transpile(#[from] TranspileError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Error rates per physical qubit and coupling edge (0-based qubits).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileFile", into = "ProfileFile")]
pub struct NoiseProfile {
    cx_error: BTreeMap<(usize, usize), f64>,
    readout_error: Vec<f64>,
    sq_error: Vec<f64>,
    t1: Option<Vec<f64>>,
    t2: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ProfileFile {
    cx_error: BTreeMap<String, f64>,
    readout_error: Vec<f64>,
    #[serde(default, alias = "single_qubit_error")]
    sq_error: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t2: Option<Vec<f64>>,
}

fn parse_edge(key: &str) -> Option<(usize, usize)> {
    let (a, b) = key.split_once('-')?;
    let (a, b) = (a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?);
    (a != b).then(|| (a.min(b), a.max(b)))
}

impl TryFrom<ProfileFile> for NoiseProfile {
    type Error = NoiseError;

    fn try_from(f: ProfileFile) -> Result<Self, NoiseError> {
        let mut cx_error = BTreeMap::new();
        for (key, p) in f.cx_error {
            let edge = parse_edge(&key).ok_or_else(|| NoiseError::BadProfile(format!("bad edge key {key:?}")))?;
            cx_error.insert(edge, p);
        }
        let sq_error = f.sq_error.unwrap_or_else(|| vec![0.0; f.readout_error.len()]);
        NoiseProfile::new(cx_error, f.readout_error, sq_error).map(|p| NoiseProfile {
            t1: f.t1,
            t2: f.t2,
            ..p
        })
    }
}

impl From<NoiseProfile> for ProfileFile {
    fn from(p: NoiseProfile) -> Self {
        ProfileFile {
            cx_error: p.cx_error.iter().map(|(&(a, b), &v)| (format!("{a}-{b}"), v)).collect(),
            readout_error: p.readout_error,
            sq_error: Some(p.sq_error),
            t1: p.t1,
            t2: p.t2,
        }
    }
}

fn check_probability(what: &str, p: f64) -> Result<(), NoiseError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(NoiseError::BadProfile(format!("{what} = {p} is not a probability")))
    }
}

/// Average CX error over the 5-qubit calibration table.
pub const AVERAGE_CX_ERROR: f64 = 1.080e-2;
/// Average readout error over the 5-qubit calibration table.
pub const AVERAGE_READOUT_ERROR: f64 = 4.424e-2;

const QUITO_CX: [((usize, usize), f64); 4] = [
    ((0, 1), 7.401e-3),
    ((1, 2), 6.435e-3),
    ((1, 3), 1.044e-2),
    ((3, 4), 1.890e-2),
];
const QUITO_READOUT: [f64; 5] = [3.81e-2, 4.11e-2, 7.17e-2, 3.41e-2, 3.62e-2];
const QUITO_SQ: [f64; 5] = [3.23e-4, 2.90e-4, 2.74e-4, 3.44e-4, 4.57e-4];
const QUITO_T1: [f64; 5] = [79.19, 117.96, 95.79, 107.55, 92.27];
const QUITO_T2: [f64; 5] = [126.78, 132.4, 115.86, 22.83, 110.84];

impl NoiseProfile {
    pub fn new(
        cx_error: BTreeMap<(usize, usize), f64>,
        readout_error: Vec<f64>,
        sq_error: Vec<f64>,
    ) -> Result<Self, NoiseError> {
        let n = readout_error.len();
        if n == 0 {
            return Err(NoiseError::BadProfile("readout_error is empty".into()));
        }
        if sq_error.len() != n {
            return Err(NoiseError::BadProfile(format!(
                "sq_error has {} entries, readout_error has {n}",
                sq_error.len()
            )));
        }
        for (&(a, b), &p) in &cx_error {
            if a == b || b >= n {
                return Err(NoiseError::BadProfile(format!("edge {a}-{b} outside 0..{n}")));
            }
            check_probability(&format!("cx_error[{a}-{b}]"), p)?;
        }
        for (q, &p) in readout_error.iter().enumerate() {
            check_probability(&format!("readout_error[{q}]"), p)?;
        }
        for (q, &p) in sq_error.iter().enumerate() {
            check_probability(&format!("sq_error[{q}]"), p)?;
        }
        let cx_error = cx_error
            .into_iter()
            .map(|((a, b), p)| ((a.min(b), a.max(b)), p))
            .collect();
        Ok(NoiseProfile {
            cx_error,
            readout_error,
            sq_error,
            t1: None,
            t2: None,
        })
    }

    /// Noiseless profile over the edges of `graph`.
    pub fn zero(graph: &CouplingGraph) -> Self {
        Self::uniform(graph, 0.0, 0.0, 0.0)
    }

    pub fn uniform(graph: &CouplingGraph, cx: f64, readout: f64, sq: f64) -> Self {
        let n = graph.num_qubits();
        NoiseProfile::new(
            graph.edges().iter().map(|&e| (e, cx)).collect(),
            vec![readout; n],
            vec![sq; n],
        )
        .expect("uniform rates are validated by the caller")
    }

    /// Per-qubit calibration of the 5-qubit T-shaped device.
    pub fn quito() -> Self {
        NoiseProfile {
            t1: Some(QUITO_T1.to_vec()),
            t2: Some(QUITO_T2.to_vec()),
            ..NoiseProfile::new(
                QUITO_CX.into_iter().collect(),
                QUITO_READOUT.to_vec(),
                QUITO_SQ.to_vec(),
            )
            .expect("built-in rates are probabilities")
        }
    }

    /// Calibration averages spread uniformly over the T-shaped device.
    pub fn quito_average() -> Self {
        let sq = QUITO_SQ.iter().sum::<f64>() / QUITO_SQ.len() as f64;
        Self::uniform(&CouplingGraph::quito(), AVERAGE_CX_ERROR, AVERAGE_READOUT_ERROR, sq)
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "zero" | "default" => Some(Self::zero(&CouplingGraph::quito())),
            "quito" => Some(Self::quito()),
            "average" => Some(Self::quito_average()),
            _ => None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, NoiseError> {
        serde_json::from_str(text).map_err(|e| NoiseError::BadProfile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    /// Device whose edges are the ones this profile assigns a CX rate to.
    pub fn coupling_graph(&self) -> CouplingGraph {
        CouplingGraph::new(self.num_qubits(), self.cx_error.keys().copied()).expect("edges validated on construction")
    }

    pub fn num_qubits(&self) -> usize {
        self.readout_error.len()
    }

    /// Error rate of a CX on physical qubits `a`, `b`; 0 for unlisted pairs.
    pub fn cx_error(&self, a: usize, b: usize) -> f64 {
        self.cx_error.get(&(a.min(b), a.max(b))).copied().unwrap_or(0.0)
    }

    pub fn readout_error(&self, q: usize) -> f64 {
        self.readout_error[q]
    }

    pub fn sq_error(&self, q: usize) -> f64 {
        self.sq_error[q]
    }

    /// Relaxation times, carried along but not simulated.
    pub fn t1(&self) -> Option<&[f64]> {
        self.t1.as_deref()
    }

    pub fn t2(&self) -> Option<&[f64]> {
        self.t2.as_deref()
    }

    pub fn is_noiseless(&self) -> bool {
        self.cx_error
            .values()
            .chain(&self.readout_error)
            .chain(&self.sq_error)
            .all(|&p| p == 0.0)
    }

    /// Multiplies the selected rates by `factor`, clamping to 1.
    pub fn scaled(&self, cx: f64, readout: f64, sq: f64) -> Self {
        let f = |p: f64, k: f64| (p * k).min(1.0);
        NoiseProfile {
            cx_error: self.cx_error.iter().map(|(&e, &p)| (e, f(p, cx))).collect(),
            readout_error: self.readout_error.iter().map(|&p| f(p, readout)).collect(),
            sq_error: self.sq_error.iter().map(|&p| f(p, sq)).collect(),
            t1: self.t1.clone(),
            t2: self.t2.clone(),
        }
    }

    /// Same profile with qubit `q`'s readout error replaced.
    pub fn with_readout_error(mut self, q: usize, p: f64) -> Result<Self, NoiseError> {
        check_probability("readout_error", p)?;
        self.readout_error[q] = p;
        Ok(self)
    }
}

fn apply_pauli(state: &mut Statevector, q: usize, code: u32) -> Result<(), SimError> {
    // 1 = X, 2 = Y (as X then Z, equal up to phase), 3 = Z.
    if code == 1 || code == 2 {
        state.apply_gate(&Gate::X(q))?;
    }
    if code == 2 || code == 3 {
        state.apply_gate(&Gate::Z(q))?;
    }
    Ok(())
}

/// An error drawn for the gate at `index`: Pauli codes on its one or two qubits.
struct Fault {
    index: usize,
    paulis: (u32, u32),
}

fn shot_rng(seed: u64, trial: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 32) | shot);
    rng
}

/// Inverse-CDF sample from `cdf` (last entry is the total mass).
fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Precomputed pieces shared by every shot of one circuit/profile pair.
struct Replay<'a> {
    circuit: &'a Circuit,
    profile: &'a NoiseProfile,
    rates: Vec<f64>,
    clean_cdf: Vec<f64>,
}

impl<'a> Replay<'a> {
    fn new(circuit: &'a Circuit, profile: &'a NoiseProfile) -> Result<Self, NoiseError> {
        let (width, qubits) = (circuit.width(), profile.num_qubits());
        if width > qubits {
            return Err(NoiseError::TooWide { width, qubits });
        }
        let rates = circuit
            .gates()
            .iter()
            .map(|g| match g.qubit_pair() {
                (a, Some(b)) => profile.cx_error(a - 1, b - 1),
                (a, None) => profile.sq_error(a - 1),
            })
            .collect();
        let clean = circuit.run_on_basis(0)?;
        Ok(Replay {
            circuit,
            profile,
            rates,
            clean_cdf: cumulative(&clean.probabilities()),
        })
    }

    /// Basis index read out by one shot.
    fn shot(&self, rng: &mut ChaCha8Rng) -> Result<usize, SimError> {
        let mut faults = Vec::new();
        for (index, (&p, g)) in self.rates.iter().zip(self.circuit.gates()).enumerate() {
            let u: f64 = rng.gen();
            let two_qubit = g.qubit_pair().1.is_some();
            let code: u32 = rng.gen_range(1..if two_qubit { 16 } else { 4 });
            if u < p {
                let paulis = if two_qubit { (code / 4, code % 4) } else { (code, 0) };
                faults.push(Fault { index, paulis });
            }
        }
        let u_measure: f64 = rng.gen();
        let outcome = if faults.is_empty() {
            sample_cdf(&self.clean_cdf, u_measure)
        } else {
            let mut state = Statevector::basis(self.circuit.width(), 0)?;
            let mut next = faults.iter().peekable();
            for (index, g) in self.circuit.gates().iter().enumerate() {
                state.apply_gate(g)?;
                if let Some(f) = next.next_if(|f| f.index == index) {
                    let (a, b) = g.qubit_pair();
                    apply_pauli(&mut state, a, f.paulis.0)?;
                    if let Some(b) = b {
                        apply_pauli(&mut state, b, f.paulis.1)?;
                    }
                }
            }
            sample_cdf(&cumulative(&state.probabilities()), u_measure)
        };
        let width = self.circuit.width();
        let mut flipped = outcome;
        for q in 0..width {
            let u: f64 = rng.gen();
            if u < self.profile.readout_error(q) {
                flipped ^= 1 << (width - 1 - q);
            }
        }
        Ok(flipped)
    }

    fn outcomes(&self, shots: usize, seed: u64, trial: u64, exec: Execution) -> Result<Vec<usize>, NoiseError> {
        exec.map_range(shots, |shot| self.shot(&mut shot_rng(seed, trial, shot as u64)))
            .into_iter()
            .collect::<Result<_, _>>()
            .map_err(NoiseError::from)
    }
}

/// Samples `shots` noisy runs of `circuit` from `|0…0⟩`. Circuit qubit `k`
/// is physical qubit `k − 1` of the profile. Keys are bit strings over the
/// circuit width, qubit 1 first.
pub fn run_noisy(
    circuit: &Circuit,
    profile: &NoiseProfile,
    shots: usize,
    seed: u64,
    exec: Execution,
) -> Result<Histogram, NoiseError> {
    let replay = Replay::new(circuit, profile)?;
    let mut hist = Histogram::new();
    for idx in replay.outcomes(shots, seed, 0, exec)? {
        *hist.entry(format_bits(idx, circuit.width())).or_insert(0) += 1;
    }
    Ok(hist)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AspReport {
    pub secret: SecretString,
    pub shots: usize,
    pub trials: usize,
    pub seed: u64,
    pub successes: Vec<usize>,
    pub per_trial: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation across trials (0 for one trial).
    pub stddev: f64,
    /// Rule used to score a shot.
    pub success_rule: &'static str,
    pub mapping: QubitMapping,
    pub gate_counts: GateCounts,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AspOptions {
    pub trials: usize,
    pub shots: usize,
    pub seed: u64,
    /// Device the circuit is compiled onto before replay.
    pub graph: CouplingGraph,
    pub exec: Execution,
}

impl Default for AspOptions {
    fn default() -> Self {
        AspOptions {
            trials: 5,
            shots: 8192,
            seed: 0,
            graph: CouplingGraph::quito(),
            exec: Execution::default(),
        }
    }
}

/// Whether a measured x register (n bits, bit 1 most significant) counts as
/// learning `s`. Even n: exact match. Odd n: the measured register precedes
/// the one-query tail, so any last bit counts.
pub fn counts_as_success(s: &SecretString, measured: u64) -> bool {
    let n = s.len();
    let want = s.to_index();
    if n.is_multiple_of(2) {
        measured == want
    } else {
        measured >> 1 == want >> 1
    }
}

/// Compiles the learning circuit for `s` onto `opts.graph` and estimates its
/// success probability under `profile`, `opts.trials` × `opts.shots` times.
pub fn estimate_asp(s: &SecretString, profile: &NoiseProfile, opts: &AspOptions) -> Result<AspReport, NoiseError> {
    if opts.trials == 0 {
        return Err(NoiseError::ZeroCount("trials"));
    }
    if opts.shots == 0 {
        return Err(NoiseError::ZeroCount("shots"));
    }
    if s.len() < 2 {
        return Err(NoiseError::NoCircuit(s.len()));
    }
    let full = build_full_circuit(s, FullCircuitOptions::default())?;
    let topts = TranspileOptions {
        exec: opts.exec,
        ..TranspileOptions::default()
    };
    let (compiled, report) = transpile(&full.circuit, &opts.graph, &topts)?;
    let mapping = report.mapping.expect("transpile always records a mapping");
    let replay = Replay::new(&compiled, profile)?;
    let (device, t) = (compiled.width(), full.layout.t);
    let mut successes = Vec::with_capacity(opts.trials);
    for trial in 0..opts.trials {
        let hits = replay
            .outcomes(opts.shots, opts.seed, trial as u64, opts.exec)?
            .into_iter()
            .filter(|&idx| counts_as_success(s, (mapping.logical_index(idx, device) >> t) as u64))
            .count();
        successes.push(hits);
    }
    let per_trial: Vec<f64> = successes.iter().map(|&k| k as f64 / opts.shots as f64).collect();
    let mean = per_trial.iter().sum::<f64>() / per_trial.len() as f64;
    let stddev = if per_trial.len() > 1 {
        (per_trial.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (per_trial.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(AspReport {
        secret: s.clone(),
        shots: opts.shots,
        trials: opts.trials,
        seed: opts.seed,
        successes,
        per_trial,
        mean,
        stddev,
        success_rule: if s.len().is_multiple_of(2) { "exact" } else { "prefix" },
        mapping,
        gate_counts: compiled.gate_counts(),
        depth: compiled.depth(),
    })
}

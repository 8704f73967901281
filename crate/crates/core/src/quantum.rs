//! The exact quantum learner: two secret bits per oracle use.
//!
//! The register holds `x` (n qubits, qubits `1..=n`) followed by `q`
//! (t qubits). Round `i` acts on the pair `(2i−1, 2i)`:
//!
//! 1. `H ⊗ H` on the pair, spreading the guess over the four candidates
//!    `s₁…s_{2i−2}·k·0…0`;
//! 2. an X mask moving the q register from `2i−3` to `2i−1` (from 0 in the
//!    first round);
//! 3. one phase-oracle call, which marks exactly the candidate whose `k`
//!    equals `s_{2i−1}s_{2i}`;
//! 4. the reflection `R`, which maps that phase pattern onto `|k⟩`.
//!
//! After `⌊n/2⌋` rounds the x register holds the secret (its last bit still
//! 0 for odd `n`); odd lengths finish with one classical question.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::oracle::{Bits, OracleError, PhaseOracle, Query, SecretString, SecretTeacher, Teacher};
use crate::statevector::{format_bits, Matrix4, SimError, Statevector};

/// Per-amplitude tolerance used when certifying a round.
pub const CERT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("round {i} out of range 1..={rounds}")]
    RoundOutOfRange { i: usize, rounds: usize },
    #[error("q register of {t} qubits cannot hold q = {q}")]
    RegisterTooNarrow { t: usize, q: usize },
    #[error("secret length {0} has no quantum round")]
    NoQuantumRound(usize),
    #[error("final state is not a basis state (peak probability {0})")]
    NotDeterministic(f64),
    #[error("certification failed at {stage}: {detail}")]
    Certification { stage: Stage, detail: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// The checkpoints inside one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage {
    /// Round input: `|s₁…s_{2i−2} 0…0⟩|q_prev⟩`.
    Input,
    /// After the Hadamards and the q shift: uniform over the candidates.
    Superposition,
    /// After the oracle: a single −½ among the four candidates.
    PhasePattern,
    /// After `R`: `|s₁…s_{2i} 0…0⟩|q_cur⟩`.
    Output,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Input => "round input",
            Stage::Superposition => "uniform superposition",
            Stage::PhasePattern => "oracle phase pattern",
            Stage::Output => "round output",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Register sizes and round count for a secret length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AlgorithmLayout {
    pub n: usize,
    pub parity: Parity,
    /// Width of the q register.
    pub t: usize,
    pub rounds: usize,
    pub uses_classical_tail: bool,
}

fn ceil_log2(v: usize) -> usize {
    if v <= 1 {
        0
    } else {
        (usize::BITS - (v - 1).leading_zeros()) as usize
    }
}

/// Value of the q register after round `i` (0 before the first round).
pub fn q_value(i: usize) -> usize {
    if i == 0 {
        0
    } else {
        2 * i - 1
    }
}

impl AlgorithmLayout {
    pub fn for_n(n: usize) -> Self {
        assert!(n >= 1, "secret length must be positive");
        if n.is_multiple_of(2) {
            AlgorithmLayout {
                n,
                parity: Parity::Even,
                t: ceil_log2(n),
                rounds: n / 2,
                uses_classical_tail: false,
            }
        } else {
            AlgorithmLayout {
                n,
                parity: Parity::Odd,
                t: ceil_log2(n - 1),
                rounds: (n - 1) / 2,
                uses_classical_tail: true,
            }
        }
    }

    /// Same layout with a different q-register width; it must still hold
    /// every q value the rounds visit.
    pub fn with_t(self, t: usize) -> Result<Self, QuantumError> {
        let q = q_value(self.rounds);
        if self.rounds > 0 && (t == 0 || q >> t != 0) {
            return Err(QuantumError::RegisterTooNarrow { t, q });
        }
        Ok(AlgorithmLayout { t, ..self })
    }

    /// Total qubits `n + t`.
    pub fn width(&self) -> usize {
        self.n + self.t
    }
}

fn real4(rows: [[f64; 4]; 4]) -> Matrix4 {
    rows.map(|r| r.map(|v| Complex64::new(v, 0.0)))
}

/// The 4×4 reflection `R = J/2 − I`, where `J` is all ones.
pub fn r_operator() -> Matrix4 {
    real4([
        [-0.5, 0.5, 0.5, 0.5],
        [0.5, -0.5, 0.5, 0.5],
        [0.5, 0.5, -0.5, 0.5],
        [0.5, 0.5, 0.5, -0.5],
    ])
}

fn hadamard_pair() -> Matrix4 {
    real4([
        [0.5, 0.5, 0.5, 0.5],
        [0.5, -0.5, 0.5, -0.5],
        [0.5, 0.5, -0.5, -0.5],
        [0.5, -0.5, -0.5, 0.5],
    ])
}

/// X gates on a `t`-qubit register taking `|q_value(i−1)⟩` to `|q_value(i)⟩`.
pub fn q_shift(i: usize, t: usize) -> Result<Circuit, QuantumError> {
    let (from, to) = (q_value(i.saturating_sub(1)), q_value(i));
    if i == 0 || t == 0 || to >> t != 0 {
        return Err(QuantumError::RegisterTooNarrow { t, q: to });
    }
    let mask = from ^ to;
    let gates = (0..t).filter(|bit| mask >> bit & 1 == 1).map(|bit| Gate::X(t - bit));
    Ok(Circuit::from_gates(t, gates)?)
}

/// How the two Hadamards of a round are emitted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum HadamardStyle {
    #[default]
    Native,
    /// `RZ(π/2)·SX·RZ(π/2)`, equal to `H` up to global phase.
    Decomposed,
}

/// Gate-level circuit of round `i`: Hadamards, q shift, `oracle` (any
/// circuit implementing the phase diagonal on all `n + t` qubits), then `R`.
pub fn build_round_circuit(
    i: usize,
    layout: &AlgorithmLayout,
    oracle: &Circuit,
    hadamards: HadamardStyle,
) -> Result<Circuit, QuantumError> {
    if i == 0 || i > layout.rounds {
        return Err(QuantumError::RoundOutOfRange {
            i,
            rounds: layout.rounds,
        });
    }
    let (a, b) = (2 * i - 1, 2 * i);
    let mut c = Circuit::new(layout.width())?;
    for q in [a, b] {
        match hadamards {
            HadamardStyle::Native => {
                c.push(Gate::H(q))?;
            }
            HadamardStyle::Decomposed => {
                c.append_mapped(&crate::synth::decompose_h(), &[q])?;
            }
        }
    }
    let q_reg: Vec<usize> = (layout.n + 1..=layout.width()).collect();
    c.append_mapped(&q_shift(i, layout.t)?, &q_reg)?;
    c.append(oracle)?;
    c.append_mapped(&crate::synth::synth_r(), &[a, b])?;
    Ok(c)
}

/// Dense copies of the state at each checkpoint of one round.
#[derive(Clone, Debug)]
struct Snapshots {
    psi0: Statevector,
    psi1: Statevector,
    psi2: Statevector,
    psi3: Statevector,
}

/// Applies round `i` to `state` on the direct (matrix + diagonal) path.
fn apply_round(
    state: &mut Statevector,
    i: usize,
    oracle: &PhaseOracle<'_>,
    keep: bool,
) -> Result<Option<Snapshots>, QuantumError> {
    let (a, b) = (2 * i - 1, 2 * i);
    let psi0 = keep.then(|| state.clone());
    state.apply_matrix2(a, b, &hadamard_pair())?;
    state.apply_x_mask(q_value(i - 1) ^ q_value(i));
    let psi1 = keep.then(|| state.clone());
    oracle.apply(state)?;
    let psi2 = keep.then(|| state.clone());
    state.apply_matrix2(a, b, &r_operator())?;
    Ok(match (psi0, psi1, psi2) {
        (Some(psi0), Some(psi1), Some(psi2)) => Some(Snapshots {
            psi0,
            psi1,
            psi2,
            psi3: state.clone(),
        }),
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplitudeEntry {
    pub basis: String,
    pub re: f64,
    pub im: f64,
}

/// Nonzero amplitudes of a state, labelled `x|q`.
fn sparse(state: &Statevector, n: usize) -> Vec<AmplitudeEntry> {
    let t = state.num_qubits() - n;
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
        .map(|(idx, a)| AmplitudeEntry {
            basis: format!("{}|{}", format_bits(idx >> t, n), format_bits(idx & ((1 << t) - 1), t)),
            re: a.re,
            im: a.im,
        })
        .collect()
}

/// What one round did, as seen from the simulated state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTrace {
    pub round: usize,
    pub q_prev: usize,
    pub q_cur: usize,
    /// The `2i − 2` bits already learned.
    pub prefix: String,
    /// The four candidates `prefix·k·0…0`, for `k = 00, 01, 10, 11`.
    pub candidates: Vec<String>,
    /// Amplitude of each candidate after the oracle call.
    pub alphas: [f64; 4],
    pub psi1: Vec<AmplitudeEntry>,
    pub psi2: Vec<AmplitudeEntry>,
    pub psi3: Vec<AmplitudeEntry>,
}

fn candidate_indices(prefix: u64, i: usize, layout: &AlgorithmLayout) -> [usize; 4] {
    let (n, t) = (layout.n, layout.t);
    [0u64, 1, 2, 3].map(|k| {
        let x = (prefix << 2 | k) << (n - 2 * i);
        ((x as usize) << t) | q_value(i)
    })
}

fn make_trace(snap: &Snapshots, i: usize, layout: &AlgorithmLayout) -> RoundTrace {
    let (n, t) = (layout.n, layout.t);
    let (idx0, _) = snap.psi0.most_likely();
    let prefix = (idx0 >> t) as u64 >> (n - 2 * i + 2);
    let idx = candidate_indices(prefix, i, layout);
    RoundTrace {
        round: i,
        q_prev: q_value(i - 1),
        q_cur: q_value(i),
        prefix: format_bits(prefix as usize, 2 * i - 2),
        candidates: idx.iter().map(|&j| format_bits(j >> t, n)).collect(),
        alphas: idx.map(|j| snap.psi2.amplitude(j).re),
        psi1: sparse(&snap.psi1, n),
        psi2: sparse(&snap.psi2, n),
        psi3: sparse(&snap.psi3, n),
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LearnOptions {
    /// Keep per-round snapshots (allocates four dense copies per round).
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumOutcome {
    pub recovered: Bits,
    pub quantum_uses: usize,
    pub classical_queries: usize,
    /// Probability of the most likely basis state before measurement.
    pub final_peak_probability: f64,
    pub layout: AlgorithmLayout,
    pub traces: Vec<RoundTrace>,
}

/// Runs the learner against `teacher`.
pub fn run_quantum_learn_with(teacher: &SecretTeacher, opts: LearnOptions) -> Result<QuantumOutcome, QuantumError> {
    let n = teacher.secret_len();
    let layout = AlgorithmLayout::for_n(n);
    learn_on_layout(teacher, layout, opts)
}

/// Runs the learner with an explicit layout (e.g. a wider q register).
pub fn learn_on_layout(
    teacher: &SecretTeacher,
    layout: AlgorithmLayout,
    opts: LearnOptions,
) -> Result<QuantumOutcome, QuantumError> {
    let n = layout.n;
    let before = teacher.ledger().snapshot();
    let mut traces = Vec::new();
    let (mut x, peak) = if layout.rounds == 0 {
        (Bits::zeros(n), 1.0)
    } else {
        let oracle = teacher.phase_oracle(layout.t)?;
        let mut state = Statevector::basis(layout.width(), 0)?;
        for i in 1..=layout.rounds {
            if let Some(snap) = apply_round(&mut state, i, &oracle, opts.trace)? {
                traces.push(make_trace(&snap, i, &layout));
            }
        }
        let (idx, peak) = state.most_likely();
        let outcome = state
            .deterministic_outcome()
            .ok_or(QuantumError::NotDeterministic(peak))?;
        debug_assert_eq!(outcome, idx);
        (Bits::from_index((idx >> layout.t) as u64, n), peak)
    };
    if layout.uses_classical_tail {
        let query = Query::new(x.clone(), n - 1)?;
        if teacher.answer(&query) == 0 {
            x.flip(n);
        }
    }
    let after = teacher.ledger().snapshot();
    Ok(QuantumOutcome {
        recovered: x,
        quantum_uses: after.quantum_oracle_uses - before.quantum_oracle_uses,
        classical_queries: after.classical_queries - before.classical_queries,
        final_peak_probability: peak,
        layout,
        traces,
    })
}

pub fn run_quantum_learn(s: &SecretString) -> Result<QuantumOutcome, QuantumError> {
    run_quantum_learn_with(&SecretTeacher::new(s.clone()), LearnOptions::default())
}

fn expect_state(stage: Stage, got: &Statevector, expected: &[(usize, f64)]) -> Result<(), QuantumError> {
    let mut want = vec![Complex64::new(0.0, 0.0); got.amplitudes().len()];
    for &(idx, amp) in expected {
        want[idx] = Complex64::new(amp, 0.0);
    }
    let worst = got
        .amplitudes()
        .iter()
        .zip(&want)
        .enumerate()
        .map(|(idx, (g, w))| (idx, (g - w).norm()))
        .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    if worst.1 > CERT_TOL {
        let t = got.num_qubits();
        return Err(QuantumError::Certification {
            stage,
            detail: format!("amplitude of basis {} off by {:.3e}", format_bits(worst.0, t), worst.1),
        });
    }
    Ok(())
}

/// Simulates rounds `1..=i` for `s` and checks round `i` against the
/// predicted states at every checkpoint, to within [`CERT_TOL`] per amplitude.
pub fn certify_round(s: &SecretString, i: usize) -> Result<RoundTrace, QuantumError> {
    let layout = AlgorithmLayout::for_n(s.len());
    if layout.rounds == 0 {
        return Err(QuantumError::NoQuantumRound(s.len()));
    }
    if i == 0 || i > layout.rounds {
        return Err(QuantumError::RoundOutOfRange {
            i,
            rounds: layout.rounds,
        });
    }
    let teacher = SecretTeacher::new(s.clone());
    let oracle = teacher.phase_oracle(layout.t)?;
    let mut state = Statevector::basis(layout.width(), 0)?;
    for r in 1..i {
        apply_round(&mut state, r, &oracle, false)?;
    }
    let snap = apply_round(&mut state, i, &oracle, true)?.expect("snapshots requested");

    let (n, t) = (layout.n, layout.t);
    let secret = s.to_index();
    let prefix = secret >> (n - 2 * i + 2);
    let learned_pair = (secret >> (n - 2 * i)) & 3;
    let candidates = candidate_indices(prefix, i, &layout);

    let input = (((prefix << (n - 2 * i + 2)) as usize) << t) | q_value(i - 1);
    expect_state(Stage::Input, &snap.psi0, &[(input, 1.0)])?;
    let uniform = candidates.map(|idx| (idx, 0.5));
    expect_state(Stage::Superposition, &snap.psi1, &uniform)?;
    let pattern: Vec<(usize, f64)> = (0..4)
        .map(|k| (candidates[k], if k as u64 == learned_pair { -0.5 } else { 0.5 }))
        .collect();
    expect_state(Stage::PhasePattern, &snap.psi2, &pattern)?;
    expect_state(Stage::Output, &snap.psi3, &[(candidates[learned_pair as usize], 1.0)])?;
    if snap.psi3.deterministic_outcome().is_none() {
        return Err(QuantumError::Certification {
            stage: Stage::Output,
            detail: "output is not a basis state".into(),
        });
    }
    Ok(make_trace(&snap, i, &layout))
}

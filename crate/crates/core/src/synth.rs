//! Compiling the algorithm's unitaries into gates.
//!
//! A ±1 diagonal `diag((−1)^{f(b)})` is written as `e^{iφ(b)}` with
//! `φ = π·f`, and `φ` is expanded over parity characters:
//!
//! ```text
//! φ(b) = Σ_w ĉ_w (−1)^{w·b},    ĉ_w = 2^{−m} Σ_b φ(b) (−1)^{w·b}
//! ```
//!
//! Each term with `w ≠ 0` is a phase on the parity `w·b`: compute the parity
//! onto one qubit with CNOTs, apply `RZ(−2ĉ_w)` there, uncompute. `ĉ_0` is a
//! global phase and is dropped, so every synthesized oracle equals its
//! diagonal only up to global phase.
//!
//! By default the terms sharing a target qubit are visited in Gray-code order
//! of their control subsets, so consecutive parities differ by one CNOT. On
//! `m` qubits this emits at most `2^m − 1` RZ and `2^m − 2` CX.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{canonical_angle, Circuit, CircuitError, Gate, GateCounts};
use crate::oracle::{oracle_diagonal, Bits, OracleError, Query, SecretString, Teacher};
use crate::quantum::{build_round_circuit, AlgorithmLayout, HadamardStyle, QuantumError};

/// Widest diagonal [`synth_diagonal`] accepts.
pub const MAX_SYNTH_WIDTH: usize = 12;

/// Walsh coefficients below this magnitude are treated as zero.
const COEFF_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("diagonal length {0} is not a power of two ≥ 2")]
    NotPowerOfTwo(usize),
    #[error("diagonal on {0} qubits exceeds the synthesis limit of {MAX_SYNTH_WIDTH}")]
    TooWide(usize),
    #[error("diagonal entry {index} is {value}, expected +1 or -1")]
    NotASign { index: usize, value: i8 },
    #[error("full circuit needs a secret of at least 2 bits, got {0}")]
    SecretTooShort(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Coefficients of a phase function over parity characters, indexed by the
/// subset mask `w` (same bit layout as basis indices).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalshSpectrum {
    pub width: usize,
    pub coefficients: Vec<f64>,
}

/// In-place unnormalized Walsh-Hadamard transform.
fn fwht(values: &mut [f64]) {
    let mut h = 1;
    while h < values.len() {
        for block in values.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

impl WalshSpectrum {
    /// Spectrum of an arbitrary phase function `φ(b)`.
    pub fn of_phases(phases: &[f64]) -> Result<Self, SynthError> {
        let len = phases.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SynthError::NotPowerOfTwo(len));
        }
        let mut coefficients = phases.to_vec();
        fwht(&mut coefficients);
        let scale = 1.0 / len as f64;
        coefficients.iter_mut().for_each(|c| *c *= scale);
        Ok(WalshSpectrum {
            width: len.trailing_zeros() as usize,
            coefficients,
        })
    }

    /// `φ(b) = Σ_w ĉ_w (−1)^{w·b}`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut phases = self.coefficients.clone();
        fwht(&mut phases);
        phases
    }
}

fn check_signs(signs: &[i8]) -> Result<(), SynthError> {
    match signs.iter().enumerate().find(|(_, &s)| s != 1 && s != -1) {
        Some((index, &value)) => Err(SynthError::NotASign { index, value }),
        None => Ok(()),
    }
}

/// Spectrum of `φ = π·f` for `signs[b] = (−1)^{f(b)}`.
pub fn walsh_decompose(signs: &[i8]) -> Result<WalshSpectrum, SynthError> {
    check_signs(signs)?;
    let phases: Vec<f64> = signs.iter().map(|&s| if s < 0 { PI } else { 0.0 }).collect();
    WalshSpectrum::of_phases(&phases)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SynthOptions {
    /// Share CNOTs between parity terms via Gray-code ordering.
    pub gray: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { gray: true }
    }
}

fn rz_for(coefficient: f64, qubit: usize) -> Option<Gate> {
    (coefficient.abs() > COEFF_EPS).then(|| Gate::Rz(qubit, canonical_angle(-2.0 * coefficient)))
}

/// Circuit over `{CX, RZ}` implementing `diag(e^{iφ})` from its spectrum.
pub fn synth_spectrum(spectrum: &WalshSpectrum, opts: SynthOptions) -> Result<Circuit, SynthError> {
    let m = spectrum.width;
    if m > MAX_SYNTH_WIDTH {
        return Err(SynthError::TooWide(m));
    }
    let coeff = &spectrum.coefficients;
    let mut c = Circuit::new(m)?;
    if opts.gray {
        // Target j collects every mask whose least significant set bit is
        // qubit j; its controls are qubits 1..j, control bit `c` of the Gray
        // word standing for qubit j − 1 − c.
        for j in 1..=m {
            let low = m - j;
            let controls = j - 1;
            let mask_of = |g: usize| (1usize << low) | (g << (low + 1));
            let words = 1usize << controls;
            if (0..words).all(|g| coeff[mask_of(g)].abs() <= COEFF_EPS) {
                continue;
            }
            if let Some(g) = rz_for(coeff[mask_of(0)], j) {
                c.push(g)?;
            }
            for k in 1..=words {
                if controls == 0 {
                    break;
                }
                let changed = if k == words {
                    controls - 1
                } else {
                    k.trailing_zeros() as usize
                };
                c.push(Gate::Cx(j - 1 - changed, j))?;
                if k < words {
                    let gray = k ^ (k >> 1);
                    if let Some(g) = rz_for(coeff[mask_of(gray)], j) {
                        c.push(g)?;
                    }
                }
            }
        }
    } else {
        for (w, &cw) in coeff.iter().enumerate().skip(1) {
            if cw.abs() <= COEFF_EPS {
                continue;
            }
            let qubits: Vec<usize> = (1..=m).filter(|&q| w >> (m - q) & 1 == 1).collect();
            let (&target, controls) = qubits.split_last().expect("w ≠ 0");
            for &q in controls {
                c.push(Gate::Cx(q, target))?;
            }
            c.push(rz_for(cw, target).expect("nonzero coefficient"))?;
            for &q in controls.iter().rev() {
                c.push(Gate::Cx(q, target))?;
            }
        }
    }
    Ok(c)
}

/// Circuit over `{CX, RZ}` equal to `diag(signs)` up to global phase.
pub fn synth_diagonal(signs: &[i8]) -> Result<Circuit, SynthError> {
    synth_diagonal_with(signs, SynthOptions::default())
}

pub fn synth_diagonal_with(signs: &[i8], opts: SynthOptions) -> Result<Circuit, SynthError> {
    let spectrum = walsh_decompose(signs)?;
    if spectrum.width > MAX_SYNTH_WIDTH {
        return Err(SynthError::TooWide(spectrum.width));
    }
    synth_spectrum(&spectrum, opts)
}

/// Circuit for an arbitrary diagonal phase `diag(e^{iφ(b)})`, up to global phase.
pub fn synth_phases(phases: &[f64], opts: SynthOptions) -> Result<Circuit, SynthError> {
    synth_spectrum(&WalshSpectrum::of_phases(phases)?, opts)
}

/// Widest spectrum [`synth_spectrum_coupled`] will search over.
pub const MAX_COUPLED_WIDTH: usize = 5;

/// Cap on linear states visited by one breadth-first search.
const COUPLED_STATE_LIMIT: usize = 1 << 20;

/// Linear reversible state: `rows[k]` is the parity held by qubit `k + 1`.
type Rows = Vec<u32>;

fn pack(rows: &[u32], m: usize) -> u64 {
    rows.iter()
        .enumerate()
        .fold(0, |acc, (k, &r)| acc | (r as u64) << (k * m))
}

/// Breadth-first search from `start` over CNOTs on `edges` to the nearest
/// states satisfying `score > 0`, preferring the highest score. Returns the
/// CNOT path.
fn nearest(
    start: &Rows,
    m: usize,
    edges: &[(usize, usize)],
    score: impl Fn(&Rows) -> usize,
) -> Option<Vec<(usize, usize)>> {
    use std::collections::HashMap;
    let mut seen: HashMap<u64, (u64, (usize, usize))> = HashMap::new();
    seen.insert(pack(start, m), (u64::MAX, (0, 0)));
    let mut frontier = vec![start.clone()];
    while !frontier.is_empty() {
        let best = frontier
            .iter()
            .map(|r| (score(r), r))
            .filter(|(s, _)| *s > 0)
            .max_by_key(|(s, _)| *s)
            .map(|(_, r)| pack(r, m));
        if let Some(mut key) = best {
            let mut path = Vec::new();
            while let Some(&(parent, mv)) = seen.get(&key) {
                if parent == u64::MAX {
                    break;
                }
                path.push(mv);
                key = parent;
            }
            path.reverse();
            return Some(path);
        }
        let mut next = Vec::new();
        for rows in &frontier {
            let from = pack(rows, m);
            for &(a, b) in edges {
                for (c, t) in [(a, b), (b, a)] {
                    let mut r = rows.clone();
                    r[t] ^= r[c];
                    let key = pack(&r, m);
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                        e.insert((from, (c, t)));
                        next.push(r);
                    }
                }
            }
        }
        if seen.len() > COUPLED_STATE_LIMIT {
            return None;
        }
        frontier = next;
    }
    None
}

/// Like [`synth_spectrum`], but every CNOT acts on a pair `(a, b)` (1-based,
/// either direction) listed in `edges`. Greedily walks the linear state to
/// the nearest configuration exposing an unplaced parity, then back to the
/// identity. Returns `None` when the edges cannot reach some parity or the
/// search exceeds its budget.
pub fn synth_spectrum_coupled(
    spectrum: &WalshSpectrum,
    edges: &[(usize, usize)],
) -> Result<Option<Circuit>, SynthError> {
    let m = spectrum.width;
    if m > MAX_COUPLED_WIDTH {
        return Err(SynthError::TooWide(m));
    }
    let coeff = &spectrum.coefficients;
    let edges: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    let mut remaining: Vec<bool> = coeff.iter().map(|c| c.abs() > COEFF_EPS).collect();
    remaining[0] = false;
    let mut rows: Rows = (0..m).map(|k| 1u32 << (m - 1 - k)).collect();
    let mut c = Circuit::new(m)?;
    let place = |rows: &Rows, remaining: &mut Vec<bool>, c: &mut Circuit| -> Result<(), SynthError> {
        for (k, &r) in rows.iter().enumerate() {
            if remaining[r as usize] {
                remaining[r as usize] = false;
                c.push(rz_for(coeff[r as usize], k + 1).expect("remaining terms are nonzero"))?;
            }
        }
        Ok(())
    };
    place(&rows, &mut remaining, &mut c)?;
    while remaining.iter().any(|&r| r) {
        let path = nearest(&rows, m, &edges, |r| {
            r.iter().filter(|&&w| remaining[w as usize]).count()
        });
        let Some(path) = path else { return Ok(None) };
        for (ctl, tgt) in path {
            rows[tgt] ^= rows[ctl];
            c.push(Gate::Cx(ctl + 1, tgt + 1))?;
            place(&rows, &mut remaining, &mut c)?;
        }
    }
    let identity: Rows = (0..m).map(|k| 1u32 << (m - 1 - k)).collect();
    if rows != identity {
        let Some(path) = nearest(&rows, m, &edges, |r| usize::from(*r == identity)) else {
            return Ok(None);
        };
        for (ctl, tgt) in path {
            c.push(Gate::Cx(ctl + 1, tgt + 1))?;
        }
    }
    Ok(Some(c))
}

/// `R = (H⊗I)(Z⊗X)·CNOT·(H⊗I)` on qubits 1, 2, in application order.
pub fn synth_r() -> Circuit {
    Circuit::from_gates(2, [Gate::H(1), Gate::Cx(1, 2), Gate::Z(1), Gate::X(2), Gate::H(1)])
        .expect("valid 2-qubit gates")
}

/// `H ≃ RZ(π/2)·SX·RZ(π/2)` (global phase differs).
pub fn decompose_h() -> Circuit {
    Circuit::from_gates(1, [Gate::Rz(1, FRAC_PI_2), Gate::Sx(1), Gate::Rz(1, FRAC_PI_2)]).expect("valid 1-qubit gates")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FullCircuitOptions {
    pub hadamards: HadamardStyle,
    /// Use naive compute/uncompute chains instead of Gray ordering.
    pub no_gray: bool,
    /// Override the q-register width.
    pub t: Option<usize>,
}

/// The whole pre-transpilation algorithm circuit for one secret.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullCircuit {
    pub secret: SecretString,
    pub layout: AlgorithmLayout,
    pub circuit: Circuit,
    /// The synthesized oracle block (repeated once per round).
    pub oracle: Circuit,
}

impl FullCircuit {
    pub fn oracle_counts(&self) -> GateCounts {
        self.oracle.gate_counts()
    }
}

pub fn build_full_circuit(s: &SecretString, opts: FullCircuitOptions) -> Result<FullCircuit, SynthError> {
    let n = s.len();
    if n < 2 {
        return Err(SynthError::SecretTooShort(n));
    }
    let mut layout = AlgorithmLayout::for_n(n);
    if let Some(t) = opts.t {
        layout = layout.with_t(t)?;
    }
    let signs = oracle_diagonal(s, layout.t)?;
    let oracle = synth_diagonal_with(&signs, SynthOptions { gray: !opts.no_gray })?;
    let mut circuit = Circuit::new(layout.width())?;
    for i in 1..=layout.rounds {
        circuit.append(&build_round_circuit(i, &layout, &oracle, opts.hadamards)?)?;
    }
    Ok(FullCircuit {
        secret: s.clone(),
        layout,
        circuit,
        oracle,
    })
}

/// Reads the x register out of a measured basis index and, for odd `n`,
/// settles the last bit with one classical question to `teacher`.
pub fn decode_with_tail<T: Teacher + ?Sized>(
    index: usize,
    layout: &AlgorithmLayout,
    teacher: &T,
) -> Result<Bits, OracleError> {
    let mut x = Bits::from_index((index >> layout.t) as u64, layout.n);
    if layout.uses_classical_tail && teacher.answer(&Query::new(x.clone(), layout.n - 1)?) == 0 {
        x.flip(layout.n);
    }
    Ok(x)
}

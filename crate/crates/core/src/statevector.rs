//! Dense statevector simulation.
//!
//! Basis index `b` of an `m`-qubit register stores qubit 1 in its most
//! significant bit, so qubit `k` lives at bit position `m - k`. For the
//! learner's register this makes `index = x * 2^t + q`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::Gate;

/// Largest register this simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Registers at least this long use rayon kernels (with the `parallel` feature).
#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 1 << 14;

/// Outcome bitstring (qubit 1 first) → number of shots.
pub type Histogram = BTreeMap<String, usize>;

pub type Matrix2 = [[Complex64; 2]; 2];
pub type Matrix4 = [[Complex64; 4]; 4];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("register of {0} qubits is outside 1..={MAX_QUBITS}")]
    BadWidth(usize),
    #[error("basis index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit {qubit} out of range 1..={num_qubits}")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("two-qubit operation needs distinct qubits, got {0} twice")]
    RepeatedQubit(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("diagonal entry {index} is {value}, expected +1 or -1")]
    NotASign { index: usize, value: i8 },
    #[error("amplitude vector is not normalized (norm² = {0})")]
    NotNormalized(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, SimError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(SimError::BadWidth(num_qubits));
        }
        let len = 1usize << num_qubits;
        if index >= len {
            return Err(SimError::IndexOutOfRange { index, num_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps an explicit amplitude vector; its length must be a power of two
    /// and its norm 1 within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::LengthMismatch {
                expected: len.next_power_of_two().max(2),
                got: len,
            });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(SimError::BadWidth(num_qubits));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalized(norm_sqr));
        }
        Ok(Self { num_qubits, amps })
    }

    /// A random normalized state drawn from `rng` (Gaussian components).
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self, SimError> {
        let mut state = Self::basis(num_qubits, 0)?;
        let mut gauss = || {
            // Box-Muller
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        for a in state.amps.iter_mut() {
            *a = Complex64::new(gauss(), gauss());
        }
        let norm = state.norm();
        state.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn bit_of(&self, qubit: usize) -> Result<usize, SimError> {
        if qubit == 0 || qubit > self.num_qubits {
            return Err(SimError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(self.num_qubits - qubit)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), SimError> {
        match *gate {
            Gate::Cx(control, target) => self.apply_cx(control, target),
            Gate::X(q) => {
                let bit = self.bit_of(q)?;
                self.apply_x_mask(1 << bit);
                Ok(())
            }
            _ => {
                let (q, _) = gate.qubit_pair();
                let m = gate.single_qubit_matrix().expect("non-CX gates are single-qubit");
                self.apply_matrix1(q, &m)
            }
        }
    }

    pub fn apply_gates<'a, I>(&mut self, gates: I) -> Result<(), SimError>
    where
        I: IntoIterator<Item = &'a Gate>,
    {
        gates.into_iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Applies a 2×2 matrix to `qubit`.
    pub fn apply_matrix1(&mut self, qubit: usize, m: &Matrix2) -> Result<(), SimError> {
        let bit = self.bit_of(qubit)?;
        let stride = 1usize << bit;
        let m = *m;
        let kernel = move |block: &mut [Complex64]| {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (v0, v1) = (*a0, *a1);
                *a0 = m[0][0] * v0 + m[0][1] * v1;
                *a1 = m[1][0] * v0 + m[1][1] * v1;
            }
        };
        #[cfg(feature = "parallel")]
        if self.amps.len() >= PAR_MIN_LEN {
            use rayon::prelude::*;
            let blocks = self.amps.len() / (2 * stride);
            if blocks >= 64 {
                self.amps.par_chunks_mut(2 * stride).for_each(kernel);
            } else {
                for block in self.amps.chunks_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(a0, a1)| {
                        let (v0, v1) = (*a0, *a1);
                        *a0 = m[0][0] * v0 + m[0][1] * v1;
                        *a1 = m[1][0] * v0 + m[1][1] * v1;
                    });
                }
            }
            return Ok(());
        }
        self.amps.chunks_mut(2 * stride).for_each(kernel);
        Ok(())
    }

    /// Applies a 4×4 matrix to the ordered pair (`high`, `low`): `high` is the
    /// more significant bit of the matrix's local index.
    pub fn apply_matrix2(&mut self, high: usize, low: usize, m: &Matrix4) -> Result<(), SimError> {
        let hb = self.bit_of(high)?;
        let lb = self.bit_of(low)?;
        if hb == lb {
            return Err(SimError::RepeatedQubit(high));
        }
        let (hm, lm) = (1usize << hb, 1usize << lb);
        let m = *m;
        let update = move |amps: &mut [Complex64], base: usize| {
            let idx = [base, base | lm, base | hm, base | hm | lm];
            let v = idx.map(|i| amps[i]);
            if v.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                return;
            }
            for (r, &i) in idx.iter().enumerate() {
                amps[i] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        };
        let quarter = self.amps.len() / 4;
        let (small, large) = if hb < lb { (hb, lb) } else { (lb, hb) };
        // Spread a counter over the bits not touched by the pair.
        let base_of = move |mut c: usize| {
            let low_mask = (1usize << small) - 1;
            c = (c & low_mask) | ((c & !low_mask) << 1);
            let mid_mask = (1usize << large) - 1;
            (c & mid_mask) | ((c & !mid_mask) << 1)
        };
        for c in 0..quarter {
            update(&mut self.amps, base_of(c));
        }
        Ok(())
    }

    fn apply_cx(&mut self, control: usize, target: usize) -> Result<(), SimError> {
        let cb = self.bit_of(control)?;
        let tb = self.bit_of(target)?;
        if cb == tb {
            return Err(SimError::RepeatedQubit(control));
        }
        let (cm, tm) = (1usize << cb, 1usize << tb);
        for b in 0..self.amps.len() {
            if b & cm != 0 && b & tm == 0 {
                self.amps.swap(b, b | tm);
            }
        }
        Ok(())
    }

    /// Permutes amplitudes `b ↔ b ^ mask`, i.e. X on every qubit set in `mask`
    /// (mask bits use basis-index positions).
    pub fn apply_x_mask(&mut self, mask: usize) {
        if mask == 0 {
            return;
        }
        let top = 1usize << (usize::BITS - 1 - mask.leading_zeros());
        for b in 0..self.amps.len() {
            if b & top == 0 {
                self.amps.swap(b, b ^ mask);
            }
        }
    }

    /// Multiplies amplitude `b` by `signs[b]`. This is the direct route for a
    /// ±1 phase oracle, bypassing any gate decomposition.
    pub fn apply_phase_diagonal(&mut self, signs: &[i8]) -> Result<(), SimError> {
        if signs.len() != self.amps.len() {
            return Err(SimError::LengthMismatch {
                expected: self.amps.len(),
                got: signs.len(),
            });
        }
        if let Some((index, &value)) = signs.iter().enumerate().find(|(_, &s)| s != 1 && s != -1) {
            return Err(SimError::NotASign { index, value });
        }
        let kernel = |(a, &s): (&mut Complex64, &i8)| {
            if s < 0 {
                *a = -*a;
            }
        };
        #[cfg(feature = "parallel")]
        if self.amps.len() >= PAR_MIN_LEN {
            use rayon::prelude::*;
            self.amps.par_iter_mut().zip(signs.par_iter()).for_each(kernel);
            return Ok(());
        }
        self.amps.iter_mut().zip(signs.iter()).for_each(kernel);
        Ok(())
    }

    /// The basis index carrying probability above `1 - 1e-9`, if any.
    pub fn deterministic_outcome(&self) -> Option<usize> {
        self.amps.iter().position(|a| a.norm_sqr() > 1.0 - 1e-9)
    }

    /// Index of the most likely basis state and its probability.
    pub fn most_likely(&self) -> (usize, f64) {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| (i, a.norm_sqr()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }

    /// Samples `shots` full-register measurements.
    ///
    /// A state that is a basis state within 1e-9 yields that outcome for every
    /// shot without touching the RNG. Otherwise a `Some(seed)` makes the
    /// histogram reproducible.
    pub fn measure_all(&self, shots: usize, seed: Option<u64>) -> Histogram {
        let mut hist = Histogram::new();
        if shots == 0 {
            return hist;
        }
        if let Some(index) = self.deterministic_outcome() {
            hist.insert(self.format_index(index), shots);
            return hist;
        }
        let probs = self.probabilities();
        let dist = WeightedIndex::new(&probs).expect("normalized state has positive weight");
        let mut rng = match seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s),
            None => ChaCha8Rng::from_entropy(),
        };
        let mut counts = vec![0usize; probs.len()];
        for _ in 0..shots {
            counts[dist.sample(&mut rng)] += 1;
        }
        for (i, c) in counts.into_iter().enumerate().filter(|(_, c)| *c > 0) {
            hist.insert(self.format_index(i), c);
        }
        hist
    }

    /// Renders a basis index as a bitstring, qubit 1 first.
    pub fn format_index(&self, index: usize) -> String {
        format_bits(index, self.num_qubits)
    }

    /// True iff some unit-modulus `λ` has `max_b |self[b] - λ·other[b]| ≤ tol`.
    ///
    /// `λ` is fixed from the largest-magnitude amplitude of `self`.
    pub fn equal_up_to_global_phase(&self, other: &Statevector, tol: f64) -> Result<bool, SimError> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::LengthMismatch {
                expected: self.amps.len(),
                got: other.amps.len(),
            });
        }
        Ok(equal_up_to_phase(&self.amps, &other.amps, tol))
    }
}

/// Slice form of [`Statevector::equal_up_to_global_phase`]; also used for
/// comparing unitary columns.
pub fn equal_up_to_phase(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (pivot, _) = a.iter().enumerate().fold(
        (0, -1.0),
        |best, (i, v)| {
            if v.norm() > best.1 {
                (i, v.norm())
            } else {
                best
            }
        },
    );
    let lambda = if b[pivot].norm() > 0.0 {
        let ratio = a[pivot] / b[pivot];
        ratio / ratio.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter().zip(b).all(|(x, y)| (x - lambda * y).norm() <= tol)
}

/// Renders the low `width` bits of `value`, most significant first.
pub fn format_bits(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|bit| if value >> bit & 1 == 1 { '1' } else { '0' })
        .collect()
}

//! The teacher: the longest-common-prefix oracle and its phase form.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::statevector::{SimError, Statevector};

/// Longest secret the integer-packed helpers support.
pub const MAX_BITS: usize = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("bit string must be non-empty")]
    Empty,
    #[error("invalid character {ch:?} at position {position}; expected 0 or 1")]
    BadChar { ch: char, position: usize },
    #[error("bit string of length {0} exceeds the supported {MAX_BITS}")]
    TooLong(usize),
    #[error("length mismatch: secret has {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("q = {q} out of range 0..{n}")]
    QOutOfRange { q: usize, n: usize },
    #[error("q register of {t} qubits is too narrow or too wide")]
    BadRegister { t: usize },
}

/// A bit string `b₁…b_n`, stored first bit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn zeros(n: usize) -> Self {
        Bits(vec![false; n])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    /// The low `n` bits of `value`, most significant first.
    pub fn from_index(value: u64, n: usize) -> Self {
        Bits((0..n).rev().map(|k| value >> k & 1 == 1).collect())
    }

    /// Integer with `b₁` as the most significant bit.
    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| acc << 1 | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit `j`, 1-based.
    pub fn get(&self, j: usize) -> bool {
        self.0[j - 1]
    }

    /// Flips bit `j`, 1-based.
    pub fn flip(&mut self, j: usize) {
        self.0[j - 1] ^= true;
    }

    pub fn set(&mut self, j: usize, value: bool) {
        self.0[j - 1] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(position, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(OracleError::BadChar { ch, position }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The hidden string `s ∈ {0,1}^n`, `1 ≤ n ≤ 63`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SecretString(Bits);

impl SecretString {
    pub fn new(bits: Bits) -> Result<Self, OracleError> {
        if bits.is_empty() {
            return Err(OracleError::Empty);
        }
        if bits.len() > MAX_BITS {
            return Err(OracleError::TooLong(bits.len()));
        }
        Ok(SecretString(bits))
    }

    pub fn from_index(value: u64, n: usize) -> Result<Self, OracleError> {
        Self::new(Bits::from_index(value, n))
    }

    /// Every secret of length `n`, in increasing integer order.
    pub fn all(n: usize) -> impl Iterator<Item = SecretString> {
        (0..1u64 << n).map(move |v| SecretString(Bits::from_index(v, n)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }

    pub fn to_index(&self) -> u64 {
        self.0.to_index()
    }
}

impl fmt::Display for SecretString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for SecretString {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s.parse()?)
    }
}

/// A question `(x, q)` with `|x| = n` and `0 ≤ q ≤ n − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    x: Bits,
    q: usize,
}

impl Query {
    pub fn new(x: Bits, q: usize) -> Result<Self, OracleError> {
        if x.is_empty() {
            return Err(OracleError::Empty);
        }
        if q >= x.len() {
            return Err(OracleError::QOutOfRange { q, n: x.len() });
        }
        Ok(Query { x, q })
    }

    pub fn x(&self) -> &Bits {
        &self.x
    }

    pub fn q(&self) -> usize {
        self.q
    }
}

/// Length of the longest common prefix of `s` and `x`.
pub fn lcp(s: &SecretString, x: &Bits) -> Result<usize, OracleError> {
    if x.len() != s.len() {
        return Err(OracleError::LengthMismatch {
            expected: s.len(),
            got: x.len(),
        });
    }
    Ok(s.bits()
        .as_slice()
        .iter()
        .zip(x.as_slice())
        .take_while(|(a, b)| a == b)
        .count())
}

/// `lcp` on integer-packed strings of `n` bits (first bit most significant).
#[inline]
pub fn lcp_packed(s: u64, x: u64, n: usize) -> usize {
    let diff = (s ^ x) << (64 - n);
    (diff.leading_zeros() as usize).min(n)
}

/// `f_s(x, q)` without ledger accounting: 1 iff `lcp(s, x) > q`.
pub fn f_bit(s: &SecretString, query: &Query) -> Result<u8, OracleError> {
    Ok((lcp(s, query.x())? > query.q()) as u8)
}

/// The phase oracle's diagonal over an `(n + t)`-qubit register.
///
/// Entry `x·2^t + q` is `(−1)^{f_s(x, q)}`. Register values `q ≥ n` can only
/// occur when `2^t > n`; they carry `+1`.
pub fn oracle_diagonal(s: &SecretString, t: usize) -> Result<Vec<i8>, OracleError> {
    let n = s.len();
    if t == 0 || n + t > crate::statevector::MAX_QUBITS {
        return Err(OracleError::BadRegister { t });
    }
    let secret = s.to_index();
    let q_len = 1usize << t;
    let mut signs = vec![1i8; 1usize << (n + t)];
    for (x, block) in signs.chunks_mut(q_len).enumerate() {
        let prefix = lcp_packed(secret, x as u64, n);
        // f = 1 exactly for q < lcp (and q < n)
        for sign in block.iter_mut().take(prefix.min(n)) {
            *sign = -1;
        }
    }
    Ok(signs)
}

/// Per-session query counters. Increments are atomic so one ledger may be
/// shared by concurrent callers.
#[derive(Debug, Default)]
pub struct QueryLedger {
    classical: AtomicUsize,
    quantum: AtomicUsize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub classical_queries: usize,
    pub quantum_oracle_uses: usize,
}

impl LedgerSnapshot {
    pub fn total(&self) -> usize {
        self.classical_queries + self.quantum_oracle_uses
    }
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_classical(&self) {
        self.classical.fetch_add(1, Ordering::Relaxed);
    }

    pub fn record_quantum(&self) {
        self.quantum.fetch_add(1, Ordering::Relaxed);
    }

    pub fn classical_queries(&self) -> usize {
        self.classical.load(Ordering::Relaxed)
    }

    pub fn quantum_oracle_uses(&self) -> usize {
        self.quantum.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            classical_queries: self.classical_queries(),
            quantum_oracle_uses: self.quantum_oracle_uses(),
        }
    }
}

/// `f_s(x, q)` with one classical query charged to `ledger`.
pub fn f(s: &SecretString, query: &Query, ledger: &QueryLedger) -> Result<u8, OracleError> {
    let bit = f_bit(s, query)?;
    ledger.record_classical();
    Ok(bit)
}

/// Anything that answers `(x, q)` questions.
///
/// `answer` returns a raw byte; learners treat anything other than 0 or 1 as
/// a protocol violation.
pub trait Teacher {
    /// Length `n` of the hidden string.
    fn secret_len(&self) -> usize;

    fn answer(&self, query: &Query) -> u8;

    fn ledger(&self) -> &QueryLedger;
}

/// A teacher backed by a known secret, charging every question to its ledger.
#[derive(Debug)]
pub struct SecretTeacher {
    secret: SecretString,
    ledger: QueryLedger,
}

impl SecretTeacher {
    pub fn new(secret: SecretString) -> Self {
        Self {
            secret,
            ledger: QueryLedger::new(),
        }
    }

    /// The quantum oracle on an `(n + t)`-qubit register; each
    /// [`PhaseOracle::apply`] is charged as one quantum use.
    pub fn phase_oracle(&self, t: usize) -> Result<PhaseOracle<'_>, OracleError> {
        Ok(PhaseOracle {
            signs: oracle_diagonal(&self.secret, t)?,
            ledger: &self.ledger,
        })
    }

    /// The secret itself, for checking results; learners must not call this.
    pub fn reveal(&self) -> &SecretString {
        &self.secret
    }
}

impl Teacher for SecretTeacher {
    fn secret_len(&self) -> usize {
        self.secret.len()
    }

    fn answer(&self, query: &Query) -> u8 {
        self.ledger.record_classical();
        f_bit(&self.secret, query).expect("query built for this secret's length")
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}

/// `|x, q⟩ ↦ (−1)^{f_s(x,q)} |x, q⟩`, with the `|−⟩` ancilla left implicit.
#[derive(Debug)]
pub struct PhaseOracle<'a> {
    signs: Vec<i8>,
    ledger: &'a QueryLedger,
}

impl PhaseOracle<'_> {
    pub fn apply(&self, state: &mut Statevector) -> Result<(), SimError> {
        state.apply_phase_diagonal(&self.signs)?;
        self.ledger.record_quantum();
        Ok(())
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> SecretString {
        text.parse().unwrap()
    }

    fn b(text: &str) -> Bits {
        text.parse().unwrap()
    }

    #[test]
    fn lcp_examples() {
        assert_eq!(lcp(&s("0101"), &b("0110")).unwrap(), 2);
        assert_eq!(lcp(&s("0101"), &b("0101")).unwrap(), 4);
        assert_eq!(lcp(&s("110"), &b("000")).unwrap(), 0);
        assert_eq!(
            lcp(&s("110"), &b("00")),
            Err(OracleError::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn f_examples() {
        let ledger = QueryLedger::new();
        let q = |x: &str, q| Query::new(b(x), q).unwrap();
        assert_eq!(f(&s("00"), &q("00", 0), &ledger).unwrap(), 1);
        assert_eq!(f(&s("00"), &q("01", 1), &ledger).unwrap(), 0);
        assert_eq!(f(&s("110"), &q("110", 2), &ledger).unwrap(), 1);
        assert_eq!(ledger.classical_queries(), 3);
        assert_eq!(ledger.quantum_oracle_uses(), 0);
    }

    #[test]
    fn query_validation() {
        assert_eq!(Query::new(b("01"), 2), Err(OracleError::QOutOfRange { q: 2, n: 2 }));
        assert!(Query::new(Bits::zeros(0), 0).is_err());
        assert!(matches!(
            "10a".parse::<SecretString>(),
            Err(OracleError::BadChar { ch: 'a', position: 2 })
        ));
        assert_eq!("".parse::<SecretString>(), Err(OracleError::Empty));
    }

    #[test]
    fn published_diagonals() {
        let d = |text: &str| oracle_diagonal(&s(text), 1).unwrap();
        assert_eq!(d("00"), vec![-1, -1, -1, 1, 1, 1, 1, 1]);
        assert_eq!(d("10"), vec![1, 1, 1, 1, -1, -1, -1, 1]);
        assert_eq!(d("000"), vec![-1, -1, -1, -1, -1, 1, -1, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn padding_q_values_are_positive() {
        // n = 3 on t = 2: q = 3 does not exist in the problem.
        let signs = oracle_diagonal(&s("000"), 2).unwrap();
        assert_eq!(&signs[..4], &[-1, -1, -1, 1]);
        assert!(signs.chunks(4).all(|block| block[3] == 1));
    }

    #[test]
    fn n3_oracles_ignore_last_bit() {
        for prefix in 0..4u64 {
            let a = SecretString::from_index(prefix << 1, 3).unwrap();
            let c = SecretString::from_index(prefix << 1 | 1, 3).unwrap();
            assert_eq!(oracle_diagonal(&a, 1).unwrap(), oracle_diagonal(&c, 1).unwrap());
        }
    }

    #[test]
    fn teacher_counts_both_kinds() {
        let teacher = SecretTeacher::new(s("011"));
        let oracle = teacher.phase_oracle(1).unwrap();
        let mut state = Statevector::basis(4, 0).unwrap();
        oracle.apply(&mut state).unwrap();
        assert_eq!(teacher.ledger().snapshot().quantum_oracle_uses, 1);
        assert_eq!(teacher.answer(&Query::new(b("010"), 2).unwrap()), 0);
        assert_eq!(teacher.ledger().snapshot().total(), 2);
    }

    proptest! {
        #[test]
        fn packed_lcp_matches_scan(n in 1usize..=20, sv in any::<u64>(), xv in any::<u64>()) {
            let mask = (1u64 << n) - 1;
            let (sv, xv) = (sv & mask, xv & mask);
            let secret = SecretString::from_index(sv, n).unwrap();
            let x = Bits::from_index(xv, n);
            prop_assert_eq!(lcp_packed(sv, xv, n), lcp(&secret, &x).unwrap());
        }

        #[test]
        fn f_is_monotone_in_q(n in 1usize..=12, sv in any::<u64>(), xv in any::<u64>()) {
            let mask = (1u64 << n) - 1;
            let secret = SecretString::from_index(sv & mask, n).unwrap();
            let x = Bits::from_index(xv & mask, n);
            let answers: Vec<u8> = (0..n)
                .map(|q| f_bit(&secret, &Query::new(x.clone(), q).unwrap()).unwrap())
                .collect();
            prop_assert!(answers.windows(2).all(|w| w[0] >= w[1]));
            let own: Vec<u8> = (0..n)
                .map(|q| f_bit(&secret, &Query::new(secret.bits().clone(), q).unwrap()).unwrap())
                .collect();
            prop_assert!(own.iter().all(|&v| v == 1));
        }

        #[test]
        fn diagonal_matches_f_and_is_involutive(n in 1usize..=6, sv in any::<u64>(), t in 1usize..=3) {
            let secret = SecretString::from_index(sv & ((1 << n) - 1), n).unwrap();
            let signs = oracle_diagonal(&secret, t).unwrap();
            for (idx, &sign) in signs.iter().enumerate() {
                let (x, q) = (idx >> t, idx & ((1 << t) - 1));
                let expected = if q < n {
                    let query = Query::new(Bits::from_index(x as u64, n), q).unwrap();
                    1 - 2 * f_bit(&secret, &query).unwrap() as i8
                } else {
                    1
                };
                prop_assert_eq!(sign, expected);
                prop_assert_eq!(sign * sign, 1);
            }
        }
    }
}

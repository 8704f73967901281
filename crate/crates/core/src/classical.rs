//! The optimal deterministic classical learner and its lower bound.
//!
//! The learner walks the secret bit by bit: starting from `x = 0^n` it asks
//! `(x, q)` for `q = 0..n-1`; a `0` answer means `x` already disagrees with
//! the secret at position `q + 1`, so that bit is flipped. Exactly `n`
//! questions are asked for every secret, which meets the decision-tree bound
//! computed by [`min_external_path_length`].

use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::oracle::{Bits, Query, SecretString, SecretTeacher, Teacher};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("teacher answered {value} to query q = {q}; expected 0 or 1")]
    NotABit { q: usize, value: u8 },
    #[error("teacher reports a secret of length 0")]
    EmptySecret,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalOutcome {
    pub recovered: Bits,
    pub queries: usize,
}

/// Runs the learner against `teacher`. `observe(q, &x)` is called after each
/// loop iteration with the current guess.
pub fn learn_classical_observed<T, F>(teacher: &T, mut observe: F) -> Result<ClassicalOutcome, ProtocolError>
where
    T: Teacher + ?Sized,
    F: FnMut(usize, &Bits),
{
    let n = teacher.secret_len();
    if n == 0 {
        return Err(ProtocolError::EmptySecret);
    }
    let before = teacher.ledger().classical_queries();
    let mut x = Bits::zeros(n);
    for q in 0..n {
        let query = Query::new(x.clone(), q).expect("q < n by loop bound");
        match teacher.answer(&query) {
            0 => x.flip(q + 1),
            1 => {}
            value => return Err(ProtocolError::NotABit { q, value }),
        }
        observe(q, &x);
    }
    Ok(ClassicalOutcome {
        recovered: x,
        queries: teacher.ledger().classical_queries() - before,
    })
}

pub fn learn_classical<T: Teacher + ?Sized>(teacher: &T) -> Result<ClassicalOutcome, ProtocolError> {
    learn_classical_observed(teacher, |_, _| {})
}

/// Minimum external path length over binary trees with `num_leaves` leaves.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub num_leaves: u64,
    /// `⌈log₂N⌉ − log₂N`, in `[0, 1)`.
    pub gamma: f64,
    pub min_epl: f64,
    pub min_avg_queries: f64,
}

/// `N(log₂N + 1 + γ − 2^γ)`.
///
/// With `k = ⌈log₂N⌉` this is the integer `N(k + 1) − 2^k`; `min_epl` is
/// computed from that exact form, which agrees with the real-valued formula to
/// rounding.
pub fn min_external_path_length(num_leaves: u64) -> LowerBoundReport {
    assert!(num_leaves >= 1, "a decision tree has at least one leaf");
    let n = num_leaves;
    let k = if n.is_power_of_two() {
        n.trailing_zeros() as u64
    } else {
        64 - (n - 1).leading_zeros() as u64
    };
    let log2n = (n as f64).log2();
    let gamma = if n.is_power_of_two() { 0.0 } else { k as f64 - log2n };
    let exact = n as u128 * (k as u128 + 1) - (1u128 << k);
    let min_epl = exact as f64;
    LowerBoundReport {
        num_leaves: n,
        gamma,
        min_epl,
        min_avg_queries: min_epl / n as f64,
    }
}

/// The real-valued formula, kept for cross-checking the integer form.
pub fn min_external_path_length_formula(num_leaves: u64) -> f64 {
    let n = num_leaves as f64;
    let log2n = n.log2();
    let gamma = log2n.ceil() - log2n;
    n * (log2n + 1.0 + gamma - gamma.exp2())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub n: usize,
    pub secrets: usize,
    pub recovered: usize,
    /// Secrets whose run used exactly `n` queries.
    pub exact_n_queries: usize,
    pub max_queries: usize,
    pub average_queries: f64,
    pub bound: LowerBoundReport,
}

impl OptimalityReport {
    pub fn passed(&self) -> bool {
        self.recovered == self.secrets
            && self.exact_n_queries == self.secrets
            && self.max_queries == self.n
            && self.average_queries == self.bound.min_avg_queries
    }
}

/// Runs the learner on all `2^n` secrets and compares against the bound.
pub fn verify_optimality(n: usize, exec: Execution) -> OptimalityReport {
    assert!((1..=20).contains(&n), "exhaustive range is 1..=20");
    let runs = exec.map_range(1 << n, |v| {
        let secret = SecretString::from_index(v as u64, n).expect("1 ≤ n ≤ 20");
        let teacher = SecretTeacher::new(secret.clone());
        let out = learn_classical(&teacher).expect("simulated teacher answers bits");
        (out.recovered == *secret.bits(), out.queries)
    });
    let total: usize = runs.iter().map(|r| r.1).sum();
    OptimalityReport {
        n,
        secrets: runs.len(),
        recovered: runs.iter().filter(|r| r.0).count(),
        exact_n_queries: runs.iter().filter(|r| r.1 == n).count(),
        max_queries: runs.iter().map(|r| r.1).max().unwrap_or(0),
        average_queries: total as f64 / runs.len() as f64,
        bound: min_external_path_length(1 << n),
    }
}

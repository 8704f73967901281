//! Learning a hidden bit string through a longest-common-prefix oracle.
//!
//! The crate bundles everything needed to study the problem end to end:
//!
//! - [`oracle`]: the teacher, answering `(x, q)` questions with one bit, plus
//!   the ±1 phase diagonal of its quantum counterpart.
//! - [`classical`]: the optimal n-query deterministic learner and the
//!   external-path-length lower bound for decision trees.
//! - [`quantum`]: the exact ⌈n/2⌉-query quantum learner, simulated on a dense
//!   statevector, with per-round certification of the state evolution.
//! - [`synth`]: compilation of the phase oracle into `{CX, RZ}` via its Walsh
//!   spectrum, and fixed decompositions of `R` and `H`.
//! - [`transpile`]: qubit mapping onto a coupling graph, CNOT routing,
//!   device gate-set rewriting and peephole optimization.
//! - [`noise`]: Monte-Carlo replay with depolarizing and readout errors.
//! - [`verify`]: the self-check suites behind `lcp-learn verify`.
//!
//! Qubits are numbered from 1 and qubit 1 is the most significant bit of a
//! basis index everywhere in the crate.
//!
//! Data-parallel loops (exhaustive sweeps, shot sampling, mapping search, large
//! statevector kernels) run on rayon when the `parallel` feature is enabled and
//! fall back to plain iterators otherwise. See [`exec::Execution`].

pub mod circuit;
pub mod classical;
pub mod exec;
pub mod noise;
pub mod oracle;
pub mod quantum;
pub mod statevector;
pub mod synth;
pub mod transpile;
pub mod verify;

pub use circuit::{Circuit, Gate, GateCounts, GateKind};
pub use exec::Execution;
pub use oracle::{Bits, Query, QueryLedger, SecretString, SecretTeacher, Teacher};
pub use statevector::Statevector;

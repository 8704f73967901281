//! Gate-list circuit IR over `{X, Z, H, RZ, SX, CX}`.
//!
//! Qubits are 1-based with qubit 1 as the most significant bit. The text
//! format in [`qasm`] uses 0-based register offsets (`q[0]` is qubit 1); the
//! conversion happens there and nowhere else.

pub mod qasm;

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::statevector::{Matrix2, SimError, Statevector};

pub use qasm::ParseError;

/// Widest circuit [`Circuit::unitary`] will expand.
pub const MAX_UNITARY_WIDTH: usize = 12;

/// Tolerance for comparing RZ angles structurally.
pub const ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate {gate} touches qubit {qubit}, circuit width is {width}")]
    QubitOutOfRange { gate: String, qubit: usize, width: usize },
    #[error("cx control and target are both qubit {0}")]
    RepeatedQubit(usize),
    #[error("circuit width {0} exceeds the unitary limit of {MAX_UNITARY_WIDTH}")]
    TooWide(usize),
    #[error("circuit width must be at least 1")]
    Empty,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Z,
    H,
    Rz,
    Sx,
    Cx,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::X,
        GateKind::Z,
        GateKind::H,
        GateKind::Rz,
        GateKind::Sx,
        GateKind::Cx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::Rz => "rz",
            GateKind::Sx => "sx",
            GateKind::Cx => "cx",
        }
    }
}

/// One gate with its (1-based) qubits; `Cx(control, target)`, `Rz(qubit, θ)`
/// with θ in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    Sx(usize),
    Rz(usize, f64),
    Cx(usize, usize),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::X(_) => GateKind::X,
            Gate::Z(_) => GateKind::Z,
            Gate::H(_) => GateKind::H,
            Gate::Sx(_) => GateKind::Sx,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Cx(..) => GateKind::Cx,
        }
    }

    /// First qubit, and the target for CX.
    pub fn qubit_pair(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::X(q) | Gate::Z(q) | Gate::H(q) | Gate::Sx(q) | Gate::Rz(q, _) => (q, None),
            Gate::Cx(c, t) => (c, Some(t)),
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = self.qubit_pair();
        std::iter::once(a).chain(b)
    }

    pub fn touches(&self, qubit: usize) -> bool {
        let (a, b) = self.qubit_pair();
        a == qubit || b == Some(qubit)
    }

    /// The same gate with every qubit index passed through `f`.
    pub fn map_qubits(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        match *self {
            Gate::X(q) => Gate::X(f(q)),
            Gate::Z(q) => Gate::Z(f(q)),
            Gate::H(q) => Gate::H(f(q)),
            Gate::Sx(q) => Gate::Sx(f(q)),
            Gate::Rz(q, theta) => Gate::Rz(f(q), theta),
            Gate::Cx(c, t) => Gate::Cx(f(c), f(t)),
        }
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(self, Gate::Z(_) | Gate::Rz(..))
    }

    /// The 2×2 unitary of a single-qubit gate; `None` for CX.
    pub fn single_qubit_matrix(&self) -> Option<Matrix2> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let o = c(0.0, 0.0);
        Some(match *self {
            Gate::X(_) => [[o, c(1.0, 0.0)], [c(1.0, 0.0), o]],
            Gate::Z(_) => [[c(1.0, 0.0), o], [o, c(-1.0, 0.0)]],
            Gate::H(_) => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::Sx(_) => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            Gate::Rz(_, theta) => [
                [Complex64::from_polar(1.0, -theta / 2.0), o],
                [o, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            Gate::Cx(..) => return None,
        })
    }

    /// Equality with RZ angles compared to within `tol`.
    pub fn approx_eq(&self, other: &Gate, tol: f64) -> bool {
        match (self, other) {
            (Gate::Rz(a, x), Gate::Rz(b, y)) => a == b && (x - y).abs() <= tol,
            _ => self == other,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rz(q, theta) => write!(f, "rz({theta}) {q}"),
            Gate::Cx(c, t) => write!(f, "cx {c},{t}"),
            g => write!(f, "{} {}", g.kind().name(), g.qubit_pair().0),
        }
    }
}

/// Maps an angle into (−2π, 2π]. RZ has period 4π, so this keeps the exact
/// unitary; angles already in range are returned untouched.
pub fn canonical_angle(theta: f64) -> f64 {
    if theta > -TAU && theta <= TAU {
        return theta;
    }
    let r = theta.rem_euclid(2.0 * TAU);
    if r > TAU {
        r - 2.0 * TAU
    } else {
        r
    }
}

/// Maps an angle into (−π, π]; differs from the input by a multiple of 2π,
/// i.e. changes `RZ(θ)` only by a global sign.
pub fn reduce_angle_mod_2pi(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Per-kind gate tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub x: usize,
    pub z: usize,
    pub h: usize,
    pub rz: usize,
    pub sx: usize,
    pub cx: usize,
}

impl GateCounts {
    pub fn get(&self, kind: GateKind) -> usize {
        match kind {
            GateKind::X => self.x,
            GateKind::Z => self.z,
            GateKind::H => self.h,
            GateKind::Rz => self.rz,
            GateKind::Sx => self.sx,
            GateKind::Cx => self.cx,
        }
    }

    fn bump(&mut self, kind: GateKind) {
        match kind {
            GateKind::X => self.x += 1,
            GateKind::Z => self.z += 1,
            GateKind::H => self.h += 1,
            GateKind::Rz => self.rz += 1,
            GateKind::Sx => self.sx += 1,
            GateKind::Cx => self.cx += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.x + self.z + self.h + self.rz + self.sx + self.cx
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self, CircuitError> {
        if width == 0 {
            return Err(CircuitError::Empty);
        }
        Ok(Self {
            width,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(width: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self, CircuitError> {
        let mut c = Self::new(width)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    fn check(&self, gate: &Gate) -> Result<(), CircuitError> {
        for q in gate.qubits() {
            if q == 0 || q > self.width {
                return Err(CircuitError::QubitOutOfRange {
                    gate: gate.to_string(),
                    qubit: q,
                    width: self.width,
                });
            }
        }
        if let Gate::Cx(c, t) = *gate {
            if c == t {
                return Err(CircuitError::RepeatedQubit(c));
            }
        }
        Ok(())
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self, CircuitError> {
        self.check(&gate)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends `other`, placing its qubit `k` on `placement[k - 1]`.
    pub fn append_mapped(&mut self, other: &Circuit, placement: &[usize]) -> Result<&mut Self, CircuitError> {
        for g in &other.gates {
            self.push(g.map_qubits(|q| placement[q - 1]))?;
        }
        Ok(self)
    }

    /// Appends `other` on the same qubit labels.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self, CircuitError> {
        for g in &other.gates {
            self.push(*g)?;
        }
        Ok(self)
    }

    /// Longest chain of gates that share qubits; gates on disjoint qubits are
    /// scheduled together.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.width + 1];
        let mut depth = 0;
        for g in &self.gates {
            let next = g.qubits().map(|q| level[q]).max().unwrap_or(0) + 1;
            for q in g.qubits() {
                level[q] = next;
            }
            depth = depth.max(next);
        }
        depth
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for g in &self.gates {
            counts.bump(g.kind());
        }
        counts
    }

    pub fn simulate(&self, state: &mut Statevector) -> Result<(), SimError> {
        state.apply_gates(&self.gates)
    }

    /// Runs the circuit on `|index⟩`.
    pub fn run_on_basis(&self, index: usize) -> Result<Statevector, CircuitError> {
        let mut s = Statevector::basis(self.width, index)?;
        self.simulate(&mut s)?;
        Ok(s)
    }

    /// The full `2^w × 2^w` unitary; column `j` is the image of `|j⟩`.
    pub fn unitary(&self) -> Result<DMatrix<Complex64>, CircuitError> {
        if self.width > MAX_UNITARY_WIDTH {
            return Err(CircuitError::TooWide(self.width));
        }
        let dim = 1usize << self.width;
        let mut u = DMatrix::<Complex64>::zeros(dim, dim);
        for j in 0..dim {
            let col = self.run_on_basis(j)?;
            for (i, a) in col.amplitudes().iter().enumerate() {
                u[(i, j)] = *a;
            }
        }
        Ok(u)
    }

    /// Structural equality, RZ angles within `tol`.
    pub fn approx_eq(&self, other: &Circuit, tol: f64) -> bool {
        self.width == other.width
            && self.gates.len() == other.gates.len()
            && self.gates.iter().zip(&other.gates).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn to_qasm(&self) -> String {
        qasm::serialize(self)
    }

    pub fn from_qasm(text: &str) -> Result<Self, CircuitError> {
        qasm::parse(text)
    }
}

/// True iff `a = λ·b` entrywise within `tol` for some unit `λ`, with `λ`
/// taken from the largest entry of `a`.
pub fn unitaries_equal_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    a.shape() == b.shape() && crate::statevector::equal_up_to_phase(a.as_slice(), b.as_slice(), tol)
}

/// Largest entrywise deviation between `a` and `λ·b` after phase alignment.
pub fn phase_aligned_deviation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let (pivot, _) = a.iter().enumerate().fold(
        (0, -1.0),
        |best, (i, v)| if v.norm() > best.1 { (i, v.norm()) } else { best },
    );
    let ratio = a.as_slice()[pivot] / b.as_slice()[pivot];
    let lambda = ratio / ratio.norm();
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - lambda * y).norm())
        .fold(0.0, f64::max)
}

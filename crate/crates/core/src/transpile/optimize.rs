//! Peephole optimizer. Every rule deletes or merges gates, so the gate count
//! never grows; each rule holds up to global phase.

use serde::Serialize;

use crate::circuit::{reduce_angle_mod_2pi, Circuit, Gate, ANGLE_TOL};

/// Sweep cap; convergence is reported rather than forced.
pub const MAX_SWEEPS: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RewriteTally {
    pub rz_merged: usize,
    pub rz_elided: usize,
    pub cx_cancelled: usize,
    pub single_qubit_cancelled: usize,
    pub sx_fused: usize,
}

impl RewriteTally {
    pub fn total(&self) -> usize {
        self.rz_merged + self.rz_elided + self.cx_cancelled + self.single_qubit_cancelled + self.sx_fused
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeStats {
    pub sweeps: usize,
    pub converged: bool,
    pub rewrites: RewriteTally,
}

fn is_zero_angle(theta: f64) -> bool {
    reduce_angle_mod_2pi(theta).abs() < ANGLE_TOL
}

fn diag_on(g: &Gate, q: usize) -> bool {
    matches!(*g, Gate::Rz(a, _) | Gate::Z(a) if a == q)
}

/// If `gates[start]` is `CX(c, q)`, finds the end `k` of a block made only of
/// `CX(·, q)` with static controls plus diagonal gates, whose net action on
/// `q` is the identity. Such a block is diagonal and commutes with any
/// diagonal gate on `q`.
fn diagonal_block_end(gates: &[Gate], start: usize, q: usize) -> Option<usize> {
    let Gate::Cx(c0, t0) = gates[start] else { return None };
    if t0 != q {
        return None;
    }
    // Controls currently XORed into q, and every control seen so far.
    let mut parity = vec![c0];
    let mut controls = vec![c0];
    // Qubits hit by non-diagonal gates outside the block's core.
    let mut outer: Vec<usize> = Vec::new();
    for (k, g) in gates.iter().enumerate().skip(start + 1) {
        if g.is_diagonal() {
            continue;
        }
        match *g {
            Gate::Cx(d, t) if t == q => {
                if outer.contains(&d) {
                    return None;
                }
                if let Some(pos) = parity.iter().position(|&p| p == d) {
                    parity.swap_remove(pos);
                } else {
                    parity.push(d);
                }
                if !controls.contains(&d) {
                    controls.push(d);
                }
                if parity.is_empty() {
                    return Some(k);
                }
            }
            _ => {
                if g.touches(q) || controls.iter().any(|&c| g.touches(c)) {
                    return None;
                }
                outer.extend(g.qubits());
            }
        }
    }
    None
}

/// Index of the next diagonal gate on `q` that `gates[i]` can slide onto,
/// matching `want`.
fn diagonal_partner(gates: &[Gate], i: usize, q: usize, want: impl Fn(&Gate) -> bool) -> Option<usize> {
    let mut j = i + 1;
    while j < gates.len() {
        let g = &gates[j];
        if !g.touches(q) {
            j += 1;
            continue;
        }
        if diag_on(g, q) {
            if want(g) {
                return Some(j);
            }
            j += 1;
            continue;
        }
        match *g {
            Gate::Cx(c, _) if c == q => j += 1,
            Gate::Cx(_, t) if t == q => j = diagonal_block_end(gates, j, q)? + 1,
            _ => return None,
        }
    }
    None
}

fn cx_partner(gates: &[Gate], i: usize, c: usize, t: usize) -> Option<usize> {
    for (j, g) in gates.iter().enumerate().skip(i + 1) {
        if *g == Gate::Cx(c, t) {
            return Some(j);
        }
        let commutes = match *g {
            _ if !g.touches(c) && !g.touches(t) => true,
            Gate::Rz(q, _) | Gate::Z(q) => q == c,
            Gate::X(q) | Gate::Sx(q) => q == t,
            Gate::Cx(a, b) => (a == c && b != t) || (b == t && a != c),
            _ => false,
        };
        if !commutes {
            return None;
        }
    }
    None
}

/// Partner for X/SX on `q`: both commute with a CX targeting `q`.
fn x_like_partner(gates: &[Gate], i: usize, q: usize) -> Option<usize> {
    for (j, g) in gates.iter().enumerate().skip(i + 1) {
        if !g.touches(q) {
            continue;
        }
        match *g {
            Gate::X(a) | Gate::Sx(a) if a == q => return Some(j),
            Gate::Cx(c, t) if t == q && c != q => continue,
            _ => return None,
        }
    }
    None
}

fn h_partner(gates: &[Gate], i: usize, q: usize) -> Option<usize> {
    let j = i + 1 + gates[i + 1..].iter().position(|g| g.touches(q))?;
    (gates[j] == Gate::H(q)).then_some(j)
}

/// Tries one reduction anchored at `gates[i]`. Returns true if `gates` changed.
fn reduce_at(gates: &mut Vec<Gate>, i: usize, tally: &mut RewriteTally) -> bool {
    match gates[i] {
        Gate::Rz(q, theta) => {
            if is_zero_angle(theta) {
                gates.remove(i);
                tally.rz_elided += 1;
                return true;
            }
            if let Some(j) = diagonal_partner(gates, i, q, |g| matches!(g, Gate::Rz(..))) {
                let Gate::Rz(_, phi) = gates[j] else { unreachable!() };
                gates[j] = Gate::Rz(q, reduce_angle_mod_2pi(theta + phi));
                gates.remove(i);
                tally.rz_merged += 1;
                return true;
            }
        }
        Gate::Z(q) => {
            if let Some(j) = diagonal_partner(gates, i, q, |g| matches!(g, Gate::Z(_))) {
                gates.remove(j);
                gates.remove(i);
                tally.single_qubit_cancelled += 1;
                return true;
            }
        }
        Gate::Cx(c, t) => {
            if let Some(j) = cx_partner(gates, i, c, t) {
                gates.remove(j);
                gates.remove(i);
                tally.cx_cancelled += 1;
                return true;
            }
        }
        Gate::X(q) | Gate::Sx(q) => {
            if let Some(j) = x_like_partner(gates, i, q) {
                match (gates[i], gates[j]) {
                    (Gate::X(_), Gate::X(_)) => {
                        gates.remove(j);
                        gates.remove(i);
                        tally.single_qubit_cancelled += 1;
                        return true;
                    }
                    (Gate::Sx(_), Gate::Sx(_)) => {
                        gates[j] = Gate::X(q);
                        gates.remove(i);
                        tally.sx_fused += 1;
                        return true;
                    }
                    _ => {}
                }
            }
        }
        Gate::H(q) => {
            if let Some(j) = h_partner(gates, i, q) {
                gates.remove(j);
                gates.remove(i);
                tally.single_qubit_cancelled += 1;
                return true;
            }
        }
    }
    false
}

/// Runs the rewrite rules to a fixed point (or [`MAX_SWEEPS`]), then maps
/// every RZ angle into (−π, π].
pub fn peephole(circuit: &Circuit) -> (Circuit, OptimizeStats) {
    let mut gates = circuit.gates().to_vec();
    let mut tally = RewriteTally::default();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut changed = false;
        let mut i = 0;
        while i < gates.len() {
            if reduce_at(&mut gates, i, &mut tally) {
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    for g in &mut gates {
        if let Gate::Rz(q, theta) = *g {
            *g = Gate::Rz(q, reduce_angle_mod_2pi(theta));
        }
    }
    let out = Circuit::from_gates(circuit.width(), gates).expect("rewrites keep qubits in range");
    (
        out,
        OptimizeStats {
            sweeps,
            converged,
            rewrites: tally,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitaries_equal_up_to_phase;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn circ(width: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::from_gates(width, gates).unwrap()
    }

    fn same(a: &Circuit, b: &Circuit) -> bool {
        unitaries_equal_up_to_phase(&a.unitary().unwrap(), &b.unitary().unwrap(), 1e-9)
    }

    #[test]
    fn merges_adjacent_rz() {
        let c = circ(1, vec![Gate::Rz(1, FRAC_PI_4), Gate::Rz(1, FRAC_PI_4)]);
        let (o, s) = peephole(&c);
        assert_eq!(o.gates().len(), 1);
        let Gate::Rz(1, a) = o.gates()[0] else { panic!() };
        assert!((a - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(s.rewrites.rz_merged, 1);
    }

    #[test]
    fn rz_cancelling_to_identity_vanishes() {
        let c = circ(1, vec![Gate::Rz(1, PI), Gate::Rz(1, PI)]);
        assert!(peephole(&c).0.is_empty());
        let c = circ(1, vec![Gate::Rz(1, 0.3), Gate::Rz(1, -0.3)]);
        assert!(peephole(&c).0.is_empty());
    }

    #[test]
    fn cx_pairs_cancel_across_commuting_gates() {
        let c = circ(
            3,
            vec![
                Gate::Cx(1, 2),
                Gate::Rz(1, 0.4),
                Gate::X(2),
                Gate::Cx(1, 3),
                Gate::Cx(3, 2),
                Gate::Cx(1, 2),
            ],
        );
        let (o, _) = peephole(&c);
        assert_eq!(o.gate_counts().cx, 2);
        assert!(same(&c, &o));
    }

    #[test]
    fn cx_blocked_by_h() {
        let c = circ(2, vec![Gate::Cx(1, 2), Gate::H(2), Gate::Cx(1, 2)]);
        assert_eq!(peephole(&c).0, c);
    }

    #[test]
    fn rz_slides_through_diagonal_block() {
        let c = circ(
            2,
            vec![
                Gate::Rz(2, 0.3),
                Gate::Cx(1, 2),
                Gate::Rz(2, 0.7),
                Gate::Cx(1, 2),
                Gate::Rz(2, 0.2),
            ],
        );
        let (o, _) = peephole(&c);
        assert_eq!(o.gate_counts().rz, 2);
        assert!(same(&c, &o));
    }

    #[test]
    fn rz_does_not_slide_through_open_block() {
        let c = circ(2, vec![Gate::Rz(2, 0.3), Gate::Cx(1, 2), Gate::Rz(2, 0.2)]);
        assert_eq!(peephole(&c).0, c);
    }

    #[test]
    fn x_and_h_pairs() {
        let c = circ(2, vec![Gate::X(2), Gate::Cx(1, 2), Gate::X(2), Gate::H(1), Gate::H(1)]);
        let (o, _) = peephole(&c);
        assert_eq!(o.gates(), &[Gate::Cx(1, 2)]);
        let c = circ(1, vec![Gate::Sx(1), Gate::Sx(1)]);
        let (o, _) = peephole(&c);
        assert_eq!(o.gates(), &[Gate::X(1)]);
        assert!(same(&c, &o));
    }

    #[test]
    fn angles_end_in_half_open_range() {
        let c = circ(1, vec![Gate::Rz(1, 1.5 * PI)]);
        let (o, _) = peephole(&c);
        let Gate::Rz(_, a) = o.gates()[0] else { panic!() };
        assert!((a + FRAC_PI_2).abs() < 1e-12);
    }

    fn arb_gate(width: usize) -> impl Strategy<Value = Gate> {
        let q = 1..=width;
        prop_oneof![
            q.clone().prop_map(Gate::X),
            q.clone().prop_map(Gate::Z),
            q.clone().prop_map(Gate::H),
            q.clone().prop_map(Gate::Sx),
            (
                q.clone(),
                prop_oneof![Just(FRAC_PI_2), Just(-FRAC_PI_2), Just(PI), -3.0..3.0f64]
            )
                .prop_map(|(a, t)| Gate::Rz(a, t)),
            (q.clone(), q)
                .prop_filter("distinct", |(a, b)| a != b)
                .prop_map(|(a, b)| Gate::Cx(a, b)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn preserves_unitary_and_never_grows(gates in prop::collection::vec(arb_gate(3), 0..40)) {
            let c = circ(3, gates);
            let (o, s) = peephole(&c);
            prop_assert!(s.converged);
            prop_assert!(o.len() <= c.len());
            prop_assert!(o.gate_counts().cx <= c.gate_counts().cx);
            prop_assert!(same(&c, &o));
            let (again, _) = peephole(&o);
            prop_assert!(again.approx_eq(&o, 1e-12));
        }
    }
}

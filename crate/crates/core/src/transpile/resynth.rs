//! Connectivity-aware resynthesis of phase-polynomial blocks.
//!
//! A maximal run of CX/RZ/Z gates whose net linear action is the identity is
//! a diagonal unitary. Its parity spectrum can be re-emitted using only CNOTs
//! on coupling edges, which is often cheaper than bridging the original
//! long-range CNOTs.

use std::f64::consts::FRAC_PI_2;

use super::{route_cnot, BridgeOrder, CouplingGraph, QubitMapping, TranspileError};
use crate::circuit::{Circuit, Gate};
use crate::synth::{synth_spectrum_coupled, WalshSpectrum, MAX_COUPLED_WIDTH};

fn in_block(g: &Gate) -> bool {
    matches!(g, Gate::Cx(..) | Gate::Rz(..) | Gate::Z(_))
}

/// Maximal runs `[start, end)` of CX/RZ/Z gates holding at least one CX.
fn blocks(gates: &[Gate]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < gates.len() {
        if !in_block(&gates[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < gates.len() && in_block(&gates[i]) {
            i += 1;
        }
        if gates[start..i].iter().any(|g| matches!(g, Gate::Cx(..))) {
            out.push((start, i));
        }
    }
    out
}

/// Parity spectrum of a block over `support` (circuit qubits, in order), or
/// `None` if its linear part is not the identity.
pub(crate) fn block_spectrum(gates: &[Gate], support: &[usize]) -> Option<WalshSpectrum> {
    let m = support.len();
    let local = |q: usize| support.iter().position(|&s| s == q).expect("gate inside support");
    let identity: Vec<usize> = (0..m).map(|k| 1 << (m - 1 - k)).collect();
    let mut rows = identity.clone();
    let mut coefficients = vec![0.0; 1 << m];
    for g in gates {
        match *g {
            Gate::Cx(c, t) => rows[local(t)] ^= rows[local(c)],
            Gate::Rz(q, theta) => coefficients[rows[local(q)]] -= theta / 2.0,
            Gate::Z(q) => coefficients[rows[local(q)]] -= FRAC_PI_2,
            _ => unreachable!("blocks hold only CX, RZ and Z"),
        }
    }
    (rows == identity).then_some(WalshSpectrum { width: m, coefficients })
}

/// Replaces each diagonal block with a coupling-respecting synthesis when
/// that needs fewer CNOTs than bridging the original. Works on the logical
/// circuit; returns it with the number of blocks replaced.
pub fn resynthesize(
    circuit: &Circuit,
    graph: &CouplingGraph,
    mapping: &QubitMapping,
) -> Result<(Circuit, usize), TranspileError> {
    let gates = circuit.gates();
    let mut out: Vec<Gate> = Vec::with_capacity(gates.len());
    let mut replaced = 0;
    let mut cursor = 0;
    for (start, end) in blocks(gates) {
        out.extend_from_slice(&gates[cursor..start]);
        cursor = end;
        let block = &gates[start..end];
        let mut support: Vec<usize> = block.iter().flat_map(|g| g.qubits()).collect();
        support.sort_unstable();
        support.dedup();
        let candidate = if support.len() <= MAX_COUPLED_WIDTH {
            block_spectrum(block, &support).map(|spectrum| {
                let mut edges = Vec::new();
                for (i, &a) in support.iter().enumerate() {
                    for (j, &b) in support.iter().enumerate().skip(i + 1) {
                        if graph.has_edge(mapping.physical(a), mapping.physical(b)) {
                            edges.push((i + 1, j + 1));
                        }
                    }
                }
                synth_spectrum_coupled(&spectrum, &edges)
            })
        } else {
            None
        };
        let routed_cost = block
            .iter()
            .map(|g| match *g {
                Gate::Cx(c, t) => {
                    route_cnot(mapping.physical(c), mapping.physical(t), graph, BridgeOrder::NearFirst).map(|p| p.len())
                }
                _ => Ok(0),
            })
            .sum::<Result<usize, _>>()?;
        match candidate {
            Some(Ok(Some(new))) if new.gate_counts().cx < routed_cost => {
                out.extend(new.gates().iter().map(|g| g.map_qubits(|k| support[k - 1])));
                replaced += 1;
            }
            _ => out.extend_from_slice(block),
        }
    }
    out.extend_from_slice(&gates[cursor..]);
    Ok((Circuit::from_gates(circuit.width(), out)?, replaced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitaries_equal_up_to_phase;
    use crate::oracle::{oracle_diagonal, SecretString};
    use crate::synth::synth_diagonal;

    #[test]
    fn spectrum_of_synthesized_oracle_round_trips() {
        for text in ["00", "01", "10", "11", "000", "010", "100", "110"] {
            let s: SecretString = text.parse().unwrap();
            let signs = oracle_diagonal(&s, 1).unwrap();
            let c = synth_diagonal(&signs).unwrap();
            let support: Vec<usize> = (1..=c.width()).collect();
            let spec = block_spectrum(c.gates(), &support).unwrap();
            let phases = spec.reconstruct();
            // Phases differ from π·f by a constant.
            let offset = phases[0] - if signs[0] < 0 { std::f64::consts::PI } else { 0.0 };
            for (p, &sg) in phases.iter().zip(&signs) {
                let want = if sg < 0 { std::f64::consts::PI } else { 0.0 };
                let d = (p - offset - want).rem_euclid(std::f64::consts::TAU);
                assert!(!(1e-9..=std::f64::consts::TAU - 1e-9).contains(&d), "{text}");
            }
        }
    }

    #[test]
    fn line_resynthesis_avoids_bridges() {
        let s: SecretString = "00".parse().unwrap();
        let oracle = synth_diagonal(&oracle_diagonal(&s, 1).unwrap()).unwrap();
        let g = CouplingGraph::linear3();
        let m = QubitMapping::identity(3);
        let (new, replaced) = resynthesize(&oracle, &g, &m).unwrap();
        assert_eq!(replaced, 1);
        assert!(crate::transpile::cx_on_edges(&new, &g));
        assert!(unitaries_equal_up_to_phase(
            &oracle.unitary().unwrap(),
            &new.unitary().unwrap(),
            1e-9
        ));
        assert!(new.gate_counts().cx < 10);
    }

    #[test]
    fn non_identity_linear_part_is_left_alone() {
        let c = Circuit::from_gates(3, [Gate::Cx(1, 3), Gate::Rz(3, 0.3)]).unwrap();
        let (new, replaced) = resynthesize(&c, &CouplingGraph::linear3(), &QubitMapping::identity(3)).unwrap();
        assert_eq!(replaced, 0);
        assert_eq!(new, c);
    }
}

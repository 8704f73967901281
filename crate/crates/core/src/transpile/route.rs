//! CNOT routing by the 4-CNOT bridge and the device-basis rewrite.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{CouplingGraph, QubitMapping, TranspileError};
use crate::circuit::{Circuit, Gate};

/// Which half of the bridge identity is emitted first.
///
/// With `b` adjacent to `a` on the path, both orders equal `CX(a, c)`:
/// `CX(a,b) CX(b,c) CX(a,b) CX(b,c)` and `CX(b,c) CX(a,b) CX(b,c) CX(a,b)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgeOrder {
    #[default]
    NearFirst,
    FarFirst,
}

impl BridgeOrder {
    pub const ALL: [BridgeOrder; 2] = [BridgeOrder::NearFirst, BridgeOrder::FarFirst];
}

fn bridge(path: &[usize], order: BridgeOrder, out: &mut Vec<(usize, usize)>) {
    if let [a, c] = *path {
        out.push((a, c));
        return;
    }
    let (a, b) = (path[0], path[1]);
    let mut far = Vec::new();
    bridge(&path[1..], order, &mut far);
    match order {
        BridgeOrder::NearFirst => {
            out.push((a, b));
            out.extend(&far);
            out.push((a, b));
            out.extend(&far);
        }
        BridgeOrder::FarFirst => {
            out.extend(&far);
            out.push((a, b));
            out.extend(&far);
            out.push((a, b));
        }
    }
}

/// Physical CNOTs (0-based) realizing `CX(control, target)` on `graph`, in
/// application order. Uses `2 + 2T(d − 1)` gates at distance `d`.
pub fn route_cnot(
    control: usize,
    target: usize,
    graph: &CouplingGraph,
    order: BridgeOrder,
) -> Result<Vec<(usize, usize)>, TranspileError> {
    if control == target {
        return Err(TranspileError::BadMapping(format!(
            "CX with equal endpoints Q{control}"
        )));
    }
    let path = graph
        .shortest_path(control, target)
        .ok_or_else(|| TranspileError::BadMapping(format!("no path from Q{control} to Q{target}")))?;
    let mut out = Vec::new();
    bridge(&path, order, &mut out);
    Ok(out)
}

/// Places `circuit` on the device through `mapping` and bridges every CNOT
/// whose endpoints are not coupled. Physical qubit `p` is circuit qubit `p + 1`.
pub fn map_and_route(
    circuit: &Circuit,
    graph: &CouplingGraph,
    mapping: &QubitMapping,
    order: BridgeOrder,
) -> Result<Circuit, TranspileError> {
    if mapping.width() != circuit.width() {
        return Err(TranspileError::BadMapping(format!(
            "mapping covers {} qubits, circuit has {}",
            mapping.width(),
            circuit.width()
        )));
    }
    QubitMapping::new(mapping.as_slice().to_vec(), graph.num_qubits())?;
    let mut out = Circuit::new(graph.num_qubits())?;
    for gate in circuit.gates() {
        match *gate {
            Gate::Cx(c, t) => {
                for (a, b) in route_cnot(mapping.physical(c), mapping.physical(t), graph, order)? {
                    out.push(Gate::Cx(a + 1, b + 1))?;
                }
            }
            g => {
                out.push(g.map_qubits(|q| mapping.physical(q) + 1))?;
            }
        }
    }
    Ok(out)
}

/// Rewrites into the device basis {X, SX, RZ, CX}: `H → RZ(π/2)·SX·RZ(π/2)`,
/// `Z → RZ(π)`. Both hold up to global phase.
pub fn rewrite_to_device(circuit: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(circuit.len());
    for gate in circuit.gates() {
        match *gate {
            Gate::H(q) => gates.extend([Gate::Rz(q, FRAC_PI_2), Gate::Sx(q), Gate::Rz(q, FRAC_PI_2)]),
            Gate::Z(q) => gates.push(Gate::Rz(q, PI)),
            g => gates.push(g),
        }
    }
    Circuit::from_gates(circuit.width(), gates).expect("same qubits as the input")
}

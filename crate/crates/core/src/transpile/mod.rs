//! Compilation onto a constrained device: map, route, rewrite, optimize.

mod coupling;
mod optimize;
mod resynth;
mod route;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateCounts, GateKind};
use crate::exec::Execution;

pub use coupling::{CouplingGraph, QubitMapping};
pub use optimize::{peephole, OptimizeStats, RewriteTally, MAX_SWEEPS};
pub use resynth::resynthesize;
pub use route::{map_and_route, rewrite_to_device, route_cnot, BridgeOrder};

/// Widest circuit for which every injective mapping is tried.
pub const AUTO_MAPPING_MAX_WIDTH: usize = 5;

#[derive(Debug, Error)]
pub enum TranspileError {
    #[error("invalid coupling graph: {0}")]
    BadGraph(String),
    #[error("invalid qubit mapping: {0}")]
    BadMapping(String),
    #[error("circuit needs {width} qubits but the device has {device}")]
    TooWide { width: usize, device: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Device gate set.
pub const DEVICE_GATES: [GateKind; 4] = [GateKind::Cx, GateKind::Rz, GateKind::Sx, GateKind::X];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PassDelta {
    pub pass: &'static str,
    pub before: GateCounts,
    pub after: GateCounts,
    /// `after.total() − before.total()`.
    pub delta_total: i64,
    pub delta_cx: i64,
}

impl PassDelta {
    fn new(pass: &'static str, before: &Circuit, after: &Circuit) -> Self {
        let (b, a) = (before.gate_counts(), after.gate_counts());
        PassDelta {
            pass,
            before: b,
            after: a,
            delta_total: a.total() as i64 - b.total() as i64,
            delta_cx: a.cx as i64 - b.cx as i64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PassReport {
    pub passes: Vec<PassDelta>,
    pub final_counts: GateCounts,
    pub final_depth: usize,
    /// Only CX, RZ, SX, X remain.
    pub device_gate_set: bool,
    /// Every CX sits on a coupling edge; `None` when no graph was involved.
    pub cx_on_edges: Option<bool>,
    pub mapping: Option<QubitMapping>,
    pub bridge_order: Option<BridgeOrder>,
    pub optimizer: Option<OptimizeStats>,
    /// Mappings evaluated by the search (1 for a fixed mapping).
    pub candidates_tried: usize,
}

impl PassReport {
    pub fn legal(&self) -> bool {
        self.device_gate_set && self.cx_on_edges.unwrap_or(true)
    }
}

pub fn uses_device_gates(circuit: &Circuit) -> bool {
    let c = circuit.gate_counts();
    c.h == 0 && c.z == 0
}

pub fn cx_on_edges(circuit: &Circuit, graph: &CouplingGraph) -> bool {
    circuit.gates().iter().all(|g| match g.qubit_pair() {
        (a, Some(b)) => graph.has_edge(a - 1, b - 1),
        _ => true,
    })
}

/// The optimizer as a standalone pass.
pub fn optimize(circuit: &Circuit) -> (Circuit, PassReport) {
    let (out, stats) = peephole(circuit);
    let report = PassReport {
        passes: vec![PassDelta::new("optimize", circuit, &out)],
        final_counts: out.gate_counts(),
        final_depth: out.depth(),
        device_gate_set: uses_device_gates(&out),
        cx_on_edges: None,
        mapping: None,
        bridge_order: None,
        optimizer: Some(stats),
        candidates_tried: 1,
    };
    (out, report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum MappingChoice {
    #[default]
    Auto,
    Fixed(QubitMapping),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranspileOptions {
    pub mapping: MappingChoice,
    /// Run the peephole optimizer (`--opt 1`).
    pub optimize: bool,
    /// Re-emit diagonal CX/RZ blocks with coupled CNOTs when that beats
    /// bridging.
    pub resynthesize: bool,
    pub exec: Execution,
}

impl Default for TranspileOptions {
    fn default() -> Self {
        TranspileOptions {
            mapping: MappingChoice::Auto,
            optimize: true,
            resynthesize: true,
            exec: Execution::default(),
        }
    }
}

fn run_pipeline(
    circuit: &Circuit,
    graph: &CouplingGraph,
    mapping: &QubitMapping,
    order: BridgeOrder,
    opts: &TranspileOptions,
) -> Result<(Circuit, PassReport), TranspileError> {
    let mut passes = Vec::new();
    let mut logical = circuit.clone();
    if opts.resynthesize {
        logical = resynthesize(circuit, graph, mapping)?.0;
        passes.push(PassDelta::new("resynthesize", circuit, &logical));
    }
    let mut placed = Circuit::new(graph.num_qubits())?;
    placed.append_mapped(&logical, &mapping.as_slice().iter().map(|p| p + 1).collect::<Vec<_>>())?;
    let routed = map_and_route(&logical, graph, mapping, order)?;
    let device = rewrite_to_device(&routed);
    passes.extend([
        PassDelta::new("map", &logical, &placed),
        PassDelta::new("route", &placed, &routed),
        PassDelta::new("rewrite", &routed, &device),
    ]);
    let (out, stats) = if opts.optimize {
        let (o, s) = peephole(&device);
        passes.push(PassDelta::new("optimize", &device, &o));
        (o, Some(s))
    } else {
        (device, None)
    };
    let report = PassReport {
        passes,
        final_counts: out.gate_counts(),
        final_depth: out.depth(),
        device_gate_set: uses_device_gates(&out),
        cx_on_edges: Some(cx_on_edges(&out, graph)),
        mapping: Some(mapping.clone()),
        bridge_order: Some(order),
        optimizer: stats,
        candidates_tried: 1,
    };
    Ok((out, report))
}

/// map → route → rewrite → optimize. With [`MappingChoice::Auto`] and width
/// ≤ [`AUTO_MAPPING_MAX_WIDTH`], every injective mapping and both bridge
/// orders are tried; the lowest CX count wins, then depth, then the
/// lexicographically smallest mapping. Wider circuits use the identity.
pub fn transpile(
    circuit: &Circuit,
    graph: &CouplingGraph,
    opts: &TranspileOptions,
) -> Result<(Circuit, PassReport), TranspileError> {
    let (width, device) = (circuit.width(), graph.num_qubits());
    if width > device {
        return Err(TranspileError::TooWide { width, device });
    }
    let mappings = match &opts.mapping {
        MappingChoice::Fixed(m) => vec![m.clone()],
        MappingChoice::Auto if width <= AUTO_MAPPING_MAX_WIDTH => QubitMapping::enumerate(width, device),
        MappingChoice::Auto => vec![QubitMapping::identity(width)],
    };
    let has_long_cx = |m: &QubitMapping| {
        circuit.gates().iter().any(|g| match g.qubit_pair() {
            (a, Some(b)) => !graph.has_edge(m.physical(a), m.physical(b)),
            _ => false,
        })
    };
    let candidates: Vec<(QubitMapping, BridgeOrder)> = mappings
        .into_iter()
        .flat_map(|m| {
            let orders: &[BridgeOrder] = if has_long_cx(&m) {
                &BridgeOrder::ALL
            } else {
                &BridgeOrder::ALL[..1]
            };
            orders.iter().map(move |&o| (m.clone(), o))
        })
        .collect();
    let tried = candidates.len();
    let results = opts
        .exec
        .map_slice(&candidates, |(m, o)| run_pipeline(circuit, graph, m, *o, opts));
    let mut best: Option<(Circuit, PassReport)> = None;
    for r in results {
        let (c, rep) = r?;
        let key = |rep: &PassReport| {
            (
                rep.final_counts.cx,
                rep.final_depth,
                rep.mapping.clone(),
                rep.bridge_order,
            )
        };
        if best.as_ref().is_none_or(|(_, b)| key(&rep) < key(b)) {
            best = Some((c, rep));
        }
    }
    let (c, mut rep) = best.expect("at least one candidate mapping");
    rep.candidates_tried = tried;
    Ok((c, rep))
}

//! Lowering to the native basis `{RZ, SX, X, CX}` and ASAP cost accounting.
//!
//! Lowering is a fixed set of rewrite rules applied recursively. Each
//! logical gate becomes a tree whose leaves are native gates; every interior
//! node's unitary equals the product of its children up to a global phase.
//! The noise model walks this tree to apply error-free subtrees as a single
//! kernel call.
//!
//! Multi-controlled X with `k >= 3` controls uses the borrowed-ancilla
//! V-chain (`4(k-2)` Toffolis over `k-2` idle wires of the circuit, which
//! are restored whatever their state). With fewer idle wires it splits the
//! controls around one borrowed wire; with none it fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Probe};
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind};
use crate::state::rccx_sequence;

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub gate: Gate,
    /// Native span `[start, end)` in the lowered stream.
    pub start: usize,
    pub end: usize,
    pub children: Vec<Node>,
}

/// A lowered circuit together with its rewrite tree.
#[derive(Clone, Debug)]
pub struct Lowering {
    native: Circuit,
    pub(crate) roots: Vec<Node>,
    source: Circuit,
}

impl Lowering {
    pub fn native(&self) -> &Circuit {
        &self.native
    }

    pub fn source(&self) -> &Circuit {
        &self.source
    }

    pub fn into_native(self) -> Circuit {
        self.native
    }
}

/// Rewrites `circuit` into native gates only. Probes move to the native
/// position of the logical gate they preceded.
pub fn lower(circuit: &Circuit) -> Result<Circuit> {
    Ok(lower_with_tree(circuit)?.native)
}

pub fn lower_with_tree(circuit: &Circuit) -> Result<Lowering> {
    let width = circuit.num_qubits();
    let mut natives = Vec::new();
    let mut roots = Vec::with_capacity(circuit.len());
    for (i, g) in circuit.gates().iter().enumerate() {
        let node = build(g.clone(), width, &mut natives).map_err(|e| match e {
            Error::Lowering { gate, reason } => Error::Lowering {
                gate: if gate == g.to_string() {
                    format!("gate #{i} {gate}")
                } else {
                    format!("gate #{i} {g} (via {gate})")
                },
                reason,
            },
            other => other,
        })?;
        roots.push(node);
    }

    let mut native = Circuit::new(width)?;
    native.set_layout(circuit.layout().cloned());
    native.extend(natives)?;
    for p in circuit.probes() {
        let position = roots.get(p.position).map_or(native.len(), |n| n.start);
        native.push_probe_raw(Probe {
            position,
            ..p.clone()
        });
    }
    for m in circuit.measurements() {
        native.push_measurement_raw(m.clone());
    }
    Ok(Lowering {
        native,
        roots,
        source: circuit.clone(),
    })
}

fn build(gate: Gate, width: usize, natives: &mut Vec<Gate>) -> Result<Node> {
    let start = natives.len();
    match expand(&gate, width)? {
        None => {
            natives.push(gate.clone());
            Ok(Node {
                gate,
                start,
                end: start + 1,
                children: Vec::new(),
            })
        }
        Some(parts) => {
            let children = parts
                .into_iter()
                .map(|g| build(g, width, natives))
                .collect::<Result<Vec<_>>>()?;
            Ok(Node {
                gate,
                start,
                end: natives.len(),
                children,
            })
        }
    }
}

/// One rewrite step, or `None` for native gates.
fn expand(gate: &Gate, width: usize) -> Result<Option<Vec<Gate>>> {
    let q = &gate.qubits;
    let rz = Gate::rz;
    let parts = match gate.kind {
        GateKind::Rz { .. } | GateKind::Sx | GateKind::X | GateKind::Cx => return Ok(None),
        GateKind::H => vec![rz(FRAC_PI_2, q[0]), Gate::sx(q[0]), rz(FRAC_PI_2, q[0])],
        GateKind::Y => vec![rz(PI, q[0]), Gate::x(q[0])],
        GateKind::Z => vec![rz(PI, q[0])],
        GateKind::S => vec![rz(FRAC_PI_2, q[0])],
        GateKind::Sdg => vec![rz(-FRAC_PI_2, q[0])],
        GateKind::T => vec![rz(FRAC_PI_4, q[0])],
        GateKind::Tdg => vec![rz(-FRAC_PI_4, q[0])],
        GateKind::Sxdg => vec![rz(PI, q[0]), Gate::sx(q[0]), rz(PI, q[0])],
        GateKind::Cz => vec![Gate::h(q[1]), Gate::cx(q[0], q[1]), Gate::h(q[1])],
        GateKind::Cphase { angle } => vec![
            rz(angle / 2.0, q[0]),
            Gate::cx(q[0], q[1]),
            rz(-angle / 2.0, q[1]),
            Gate::cx(q[0], q[1]),
            rz(angle / 2.0, q[1]),
        ],
        GateKind::Ccx => toffoli(q[0], q[1], q[2]),
        GateKind::Rccx => rccx_sequence(q[0], q[1], q[2]),
        GateKind::Cswap => vec![
            Gate::cx(q[2], q[1]),
            Gate::ccx(q[0], q[1], q[2]),
            Gate::cx(q[2], q[1]),
        ],
        GateKind::Mcx => {
            let (target, controls) = q.split_last().expect("validated arity");
            match controls.len() {
                0 => vec![Gate::x(*target)],
                1 => vec![Gate::cx(controls[0], *target)],
                2 => vec![Gate::ccx(controls[0], controls[1], *target)],
                _ => mcx_borrowed(gate, controls, *target, width)?,
            }
        }
        GateKind::Mcz => {
            let (target, controls) = q.split_last().expect("validated arity");
            match controls.len() {
                0 => vec![Gate::z(*target)],
                1 => vec![Gate::cz(controls[0], *target)],
                _ => vec![
                    Gate::h(*target),
                    Gate::mcx(controls, *target),
                    Gate::h(*target),
                ],
            }
        }
        GateKind::PhaseFlip { mask } => {
            let flips: Vec<Gate> = q
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 0)
                .map(|(_, &w)| Gate::x(w))
                .collect();
            let mut v = flips.clone();
            v.push(Gate::mcz(q));
            v.extend(flips);
            v
        }
    };
    Ok(Some(parts))
}

/// Standard six-CX Toffoli.
fn toffoli(c1: usize, c2: usize, t: usize) -> Vec<Gate> {
    vec![
        Gate::h(t),
        Gate::cx(c2, t),
        Gate::tdg(t),
        Gate::cx(c1, t),
        Gate::t(t),
        Gate::cx(c2, t),
        Gate::tdg(t),
        Gate::cx(c1, t),
        Gate::t(c2),
        Gate::t(t),
        Gate::h(t),
        Gate::cx(c1, c2),
        Gate::t(c1),
        Gate::tdg(c2),
        Gate::cx(c1, c2),
    ]
}

fn mcx_borrowed(gate: &Gate, controls: &[usize], target: usize, width: usize) -> Result<Vec<Gate>> {
    let k = controls.len();
    let idle: Vec<usize> = (0..width).filter(|w| !gate.qubits.contains(w)).collect();
    if idle.len() >= k - 2 {
        return Ok(v_chain(controls, target, &idle[..k - 2]));
    }
    let Some(&b) = idle.first() else {
        return Err(Error::Lowering {
            gate: gate.to_string(),
            reason: format!("{k} controls need at least one idle wire to borrow, circuit has none"),
        });
    };
    let (first, second) = controls.split_at(k.div_ceil(2));
    let mut second_b = second.to_vec();
    second_b.push(b);
    let to_b = Gate::mcx(first, b);
    let to_t = Gate::mcx(&second_b, target);
    Ok(vec![to_b.clone(), to_t.clone(), to_b, to_t])
}

/// Toffoli V-chain over borrowed wires `anc` (`anc.len() == controls.len() - 2`).
/// Borrowed wires return to their initial state.
fn v_chain(c: &[usize], t: usize, a: &[usize]) -> Vec<Gate> {
    let k = c.len();
    let mut half = vec![Gate::ccx(c[k - 1], a[k - 3], t)];
    for i in (1..k - 2).rev() {
        half.push(Gate::ccx(c[i + 1], a[i - 1], a[i]));
    }
    half.push(Gate::ccx(c[0], c[1], a[0]));
    for i in 1..k - 2 {
        half.push(Gate::ccx(c[i + 1], a[i - 1], a[i]));
    }
    let mut all = half.clone();
    all.extend(half);
    all
}

/// Layered cost of one iteration segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentCost {
    pub label: String,
    /// Increase of the running ASAP depth across the segment.
    pub depth: usize,
    pub twoq_count: usize,
    pub oneq_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub depth: usize,
    pub twoq_count: usize,
    pub oneq_count: usize,
    pub per_iteration: Vec<SegmentCost>,
}

/// Label prefix of the probes that mark iteration boundaries in built
/// circuits; `per_iteration` has one entry per gap between them.
pub const BOUNDARY_PREFIX: &str = "fB=1@end";

/// ASAP greedy layering: each gate takes the earliest layer after every one
/// of its qubits is free. Intended for lowered circuits; wider gates are
/// scheduled but counted in neither tally.
pub fn cost(circuit: &Circuit) -> CostReport {
    let mut free = vec![0usize; circuit.num_qubits()];
    let (mut depth, mut oneq, mut twoq) = (0, 0, 0);

    let mut boundaries: Vec<&Probe> = circuit
        .probes()
        .iter()
        .filter(|p| p.label.starts_with(BOUNDARY_PREFIX))
        .collect();
    boundaries.sort_by_key(|p| p.position);
    let mut pending = boundaries.into_iter().peekable();
    let mut snapshots: Vec<(&str, usize, usize, usize)> = Vec::new();

    for (i, g) in circuit.gates().iter().enumerate() {
        while let Some(p) = pending.next_if(|p| p.position == i) {
            snapshots.push((&p.label, depth, oneq, twoq));
        }
        let layer = g.qubits.iter().map(|&q| free[q]).max().unwrap_or(0);
        for &q in &g.qubits {
            free[q] = layer + 1;
        }
        depth = depth.max(layer + 1);
        match g.qubits.len() {
            1 => oneq += 1,
            2 => twoq += 1,
            _ => {}
        }
    }
    snapshots.extend(pending.map(|p| (p.label.as_str(), depth, oneq, twoq)));

    let per_iteration = snapshots
        .windows(2)
        .map(|w| SegmentCost {
            label: w[1].0.to_string(),
            depth: w[1].1 - w[0].1,
            oneq_count: w[1].2 - w[0].2,
            twoq_count: w[1].3 - w[0].3,
        })
        .collect();
    CostReport {
        depth,
        twoq_count: twoq,
        oneq_count: oneq,
        per_iteration,
    }
}

//! Expansion of a routed solution into a physical gate stream.
//!
//! A CNOT routed along `h0 .. hk` becomes forward SWAPs walking the control
//! state from `h0` to `h(k-1)`, the physical CNOT on `(h(k-1), hk)`, then the
//! same SWAPs in reverse so every qubit ends where it started. A SWAP of
//! `X, Y` is `CX X,Y; CX Y,X; CX X,Y` with `X` the walking qubit.

use alloc::vec::Vec;

use crate::circuit::{Circuit, GateKind};
use crate::machine::GridMachine;
use crate::mapping::{
    gate_reliability, MappingError, Placement, RouteAssignment, Solution, Strategy,
};
use crate::schedule::Schedule;
use crate::tables::DerivedTables;
use crate::Timeslot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SwapRole {
    /// The source gate itself (or the final CNOT of a route).
    Logical,
    ForwardSwap,
    ReturnSwap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhysicalGate {
    pub kind: GateKind,
    /// Hardware qubit ids (control first for CNOTs).
    pub operands: Vec<usize>,
    pub clbit: Option<usize>,
    pub start: Timeslot,
    pub duration: Timeslot,
    pub source_gate: usize,
    pub role: SwapRole,
}

impl PhysicalGate {
    pub fn finish(&self) -> Timeslot {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCircuit {
    pub source: Circuit,
    pub placement: Placement,
    pub strategy: Strategy,
    pub routes: RouteAssignment,
    pub schedule: Schedule,
    /// Ordered by start time, then first hardware operand.
    pub expanded: Vec<PhysicalGate>,
    pub makespan: Timeslot,
    /// SWAPs emitted, forward and return.
    pub swap_count: usize,
    /// Product of `per_gate_eps` over CNOTs and readouts.
    pub reliability: f64,
    /// ε by source gate id (1 for single-qubit gates).
    pub per_gate_eps: Vec<f64>,
    pub objective_value: f64,
    pub optimal: bool,
}

impl CompiledCircuit {
    pub fn physical_cnots(&self) -> usize {
        self.expanded
            .iter()
            .filter(|g| g.kind == GateKind::Cnot)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodegenError {
    #[error("gate {gate}: CNOT has no route")]
    MissingRoute { gate: usize },
    #[error("gate {gate}: scheduled for {scheduled} timeslots, expansion takes {expanded}")]
    DurationMismatch {
        gate: usize,
        scheduled: Timeslot,
        expanded: Timeslot,
    },
    #[error("hardware qubit {hw} is used by gates {first} and {second} at once")]
    Overlap {
        hw: usize,
        first: usize,
        second: usize,
    },
    #[error("route of gate {gate} has a step between non-adjacent cells")]
    NotAdjacent { gate: usize },
    #[error("expansion does not restore the initial placement")]
    NotRestored,
    #[error("tables disagree with the solution on counting return swaps")]
    TablesMismatch,
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

fn swap(
    out: &mut Vec<PhysicalGate>,
    walker: usize,
    other: usize,
    t: &mut Timeslot,
    d: Timeslot,
    src: usize,
    role: SwapRole,
) {
    for (a, b) in [(walker, other), (other, walker), (walker, other)] {
        out.push(PhysicalGate {
            kind: GateKind::Cnot,
            operands: alloc::vec![a, b],
            clbit: None,
            start: *t,
            duration: d,
            source_gate: src,
            role,
        });
        *t += d;
    }
}

/// Net hardware permutation of the SWAPs in `expanded`: entry `h` is the
/// cell whose initial state ends up on `h`.
pub fn net_permutation(expanded: &[PhysicalGate], num_cells: usize) -> Vec<usize> {
    let mut holder: Vec<usize> = (0..num_cells).collect();
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for g in expanded {
        if g.role == SwapRole::Logical {
            continue;
        }
        // count SWAP CNOTs per source gate; every third completes a SWAP
        let slot = match pending.iter().position(|&(s, _)| s == g.source_gate) {
            Some(i) => i,
            None => {
                pending.push((g.source_gate, 0));
                pending.len() - 1
            }
        };
        pending[slot].1 += 1;
        if pending[slot].1.is_multiple_of(3) {
            holder.swap(g.operands[0], g.operands[1]);
        }
    }
    holder
}

/// Physical gate stream of `sol`, with start times from its schedule.
pub fn expand(
    sol: &Solution,
    c: &Circuit,
    m: &GridMachine,
    t: &DerivedTables,
) -> Result<CompiledCircuit, CodegenError> {
    if t.count_return_swaps() != sol.strategy.count_return_swaps() {
        return Err(CodegenError::TablesMismatch);
    }
    let p = &sol.placement;
    let static_model = sol.strategy.uses_static_model();
    let mut out = Vec::new();
    let mut swap_count = 0;
    for g in c.gates() {
        let start = sol.schedule.start[g.id];
        let scheduled = sol.schedule.dur[g.id];
        let mut now = start;
        match g.kind {
            GateKind::Cnot => {
                let route = sol
                    .routes
                    .get(g.id)
                    .ok_or(CodegenError::MissingRoute { gate: g.id })?;
                let path = &route.path;
                let mut durs = Vec::with_capacity(path.len());
                for w in path.windows(2) {
                    let e = m
                        .edge_between(w[0], w[1])
                        .ok_or(CodegenError::NotAdjacent { gate: g.id })?;
                    durs.push(if static_model {
                        m.static_tau_cnot
                    } else {
                        e.cnot_duration
                    });
                }
                let k = path.len() - 1;
                for i in 0..k - 1 {
                    swap(
                        &mut out,
                        path[i],
                        path[i + 1],
                        &mut now,
                        durs[i],
                        g.id,
                        SwapRole::ForwardSwap,
                    );
                }
                out.push(PhysicalGate {
                    kind: GateKind::Cnot,
                    operands: alloc::vec![path[k - 1], path[k]],
                    clbit: None,
                    start: now,
                    duration: durs[k - 1],
                    source_gate: g.id,
                    role: SwapRole::Logical,
                });
                now += durs[k - 1];
                for i in (0..k - 1).rev() {
                    swap(
                        &mut out,
                        path[i + 1],
                        path[i],
                        &mut now,
                        durs[i],
                        g.id,
                        SwapRole::ReturnSwap,
                    );
                }
                swap_count += 2 * (k - 1);
            }
            kind => {
                let h = p.cell(m, g.qubits()[0]);
                let d = if kind == GateKind::Measure {
                    m.qubit(h).readout_duration
                } else {
                    m.single_qubit_duration
                };
                out.push(PhysicalGate {
                    kind,
                    operands: alloc::vec![h],
                    clbit: g.clbit,
                    start,
                    duration: d,
                    source_gate: g.id,
                    role: SwapRole::Logical,
                });
                now += d;
            }
        }
        if now - start != scheduled {
            return Err(CodegenError::DurationMismatch {
                gate: g.id,
                scheduled,
                expanded: now - start,
            });
        }
    }
    out.sort_by_key(|g| (g.start, g.operands[0]));

    let mut busy: Vec<Option<usize>> = alloc::vec![None; m.num_qubits()];
    let mut free_at: Vec<Timeslot> = alloc::vec![0; m.num_qubits()];
    for (i, g) in out.iter().enumerate() {
        for &h in &g.operands {
            if let Some(prev) = busy[h] {
                if free_at[h] > g.start {
                    return Err(CodegenError::Overlap {
                        hw: h,
                        first: prev,
                        second: i,
                    });
                }
            }
            busy[h] = Some(i);
            free_at[h] = g.finish();
        }
    }
    let perm = net_permutation(&out, m.num_qubits());
    if perm.iter().enumerate().any(|(h, &s)| h != s) {
        return Err(CodegenError::NotRestored);
    }

    let per_gate_eps = c
        .gates()
        .iter()
        .map(|g| gate_reliability(g, p, sol.routes.get(g.id), m, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut scored: Vec<f64> = c
        .gates()
        .iter()
        .filter(|g| g.is_cnot() || g.is_measure())
        .map(|g| per_gate_eps[g.id])
        .collect();
    scored.sort_by(f64::total_cmp);
    let reliability = scored.into_iter().product();
    let makespan = out.iter().map(PhysicalGate::finish).max().unwrap_or(0);

    Ok(CompiledCircuit {
        source: c.clone(),
        placement: p.clone(),
        strategy: sol.strategy,
        routes: sol.routes.clone(),
        schedule: sol.schedule.clone(),
        expanded: out,
        makespan,
        swap_count,
        reliability,
        per_gate_eps,
        objective_value: sol.objective_value,
        optimal: sol.optimal,
    })
}

//! Semantic comparison of a compiled gate stream with its source circuit.

use alloc::vec::Vec;

use crate::circuit::{Circuit, GateKind};
use crate::codegen::{net_permutation, CompiledCircuit};
use crate::machine::GridMachine;

use super::sim::{simulate, tv_distance, Distribution, SimError, Statevector, MAX_REGISTER_QUBITS};

/// Largest total variation distance accepted as equal.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Equivalence {
    pub pass: bool,
    pub tv_distance: f64,
}

/// Program qubits the source never measures, in id order.
fn unmeasured(c: &Circuit) -> Vec<usize> {
    let mut measured = alloc::vec![false; c.num_qubits()];
    for g in c.gates().iter().filter(|g| g.is_measure()) {
        measured[g.qubits()[0]] = true;
    }
    (0..c.num_qubits()).filter(|&q| !measured[q]).collect()
}

/// Outcome distribution of the source with every unmeasured qubit read
/// into an extra classical bit after the circuit.
pub fn source_distribution(c: &Circuit) -> Result<Distribution, SimError> {
    let extra = unmeasured(c);
    let mut ext = Circuit::new(c.num_qubits(), c.num_clbits() + extra.len());
    for g in c.gates() {
        ext.push(g.kind, g.qubits(), g.clbit)
            .expect("copy of a valid circuit");
    }
    for (j, &q) in extra.iter().enumerate() {
        ext.measure(q, c.num_clbits() + j).expect("fresh clbit");
    }
    simulate(&ext)
}

/// Outcome distribution of the physical stream, read the same way as
/// [`source_distribution`]. Every hardware qubit the stream touches is
/// simulated; a readout on a cell that is used again later is copied onto a
/// fresh qubit first.
pub fn compiled_distribution(
    cc: &CompiledCircuit,
    m: &GridMachine,
) -> Result<Distribution, SimError> {
    let c = &cc.source;
    let mut cells: Vec<usize> = cc.placement.cells(m);
    cells.extend(cc.expanded.iter().flat_map(|g| g.operands.iter().copied()));
    cells.sort_unstable();
    cells.dedup();
    let index = |h: usize| cells.binary_search(&h).expect("touched cell");

    let reused: Vec<bool> = cc
        .expanded
        .iter()
        .enumerate()
        .map(|(i, g)| {
            g.kind == GateKind::Measure
                && cc.expanded[i + 1..]
                    .iter()
                    .any(|later| later.operands.contains(&g.operands[0]))
        })
        .collect();
    let copies = reused.iter().filter(|&&r| r).count();
    let width = cells.len() + copies;
    if width > MAX_REGISTER_QUBITS {
        return Err(SimError::TooManyQubits {
            qubits: width,
            limit: MAX_REGISTER_QUBITS,
        });
    }
    let mut sv = Statevector::new(width)?;
    let mut readout = Vec::new();
    let mut next_copy = cells.len();
    for (i, g) in cc.expanded.iter().enumerate() {
        let ops: Vec<usize> = g.operands.iter().map(|&h| index(h)).collect();
        match g.kind {
            GateKind::Measure => {
                let bit = g.clbit.expect("measure clbit");
                if reused[i] {
                    sv.apply(GateKind::Cnot, &[ops[0], next_copy]);
                    readout.push((next_copy, bit));
                    next_copy += 1;
                } else {
                    readout.push((ops[0], bit));
                }
            }
            kind => sv.apply(kind, &ops),
        }
    }
    let holder = net_permutation(&cc.expanded, m.num_qubits());
    for (j, &q) in unmeasured(c).iter().enumerate() {
        let home = cc.placement.cell(m, q);
        let now = holder.iter().position(|&s| s == home).expect("permutation");
        readout.push((index(now), c.num_clbits() + j));
    }
    Ok(sv.measure(&readout))
}

/// Compares outcome distributions of `source` and the compiled stream.
pub fn equivalence_check(
    source: &Circuit,
    cc: &CompiledCircuit,
    m: &GridMachine,
) -> Result<Equivalence, SimError> {
    let a = source_distribution(source)?;
    let b = compiled_distribution(cc, m)?;
    let tv = tv_distance(&a, &b);
    Ok(Equivalence {
        pass: tv <= EQUIVALENCE_TOLERANCE,
        tv_distance: tv,
    })
}

#![allow(dead_code)]

use nisqc_core::synthetic::{synthetic_calibration, Jitter};
use nisqc_core::{
    Circuit, GateKind, GridMachine, MachineDefaults, ProblemConfig, Routing, Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn uniform(mx: usize, my: usize) -> GridMachine {
    GridMachine::uniform(mx, my, MachineDefaults::default()).unwrap()
}

pub fn jittered(mx: usize, my: usize, seed: u64) -> GridMachine {
    GridMachine::from_spec(&synthetic_calibration(mx, my, seed, &Jitter::default())).unwrap()
}

/// Every valid (variant, routing) pair: reliability only with one-bend.
pub fn all_configs() -> Vec<ProblemConfig> {
    let mut out = Vec::new();
    for v in [Variant::TSmt, Variant::TSmtStar, Variant::RSmtStar] {
        for r in [Routing::RectangleReservation, Routing::OneBend] {
            if let Ok(cfg) = ProblemConfig::new(v, r) {
                out.push(cfg);
            }
        }
    }
    out
}

/// Small random circuit ending with a measurement of every qubit that has
/// one left in the gate budget. Odd seeds reuse BV-style fan-in patterns.
pub fn small_circuit(rng: &mut ChaCha8Rng, max_qubits: usize, max_gates: usize) -> Circuit {
    let n = rng.random_range(2..=max_qubits);
    let mut c = Circuit::new(n, n);
    let body = rng.random_range(1..=max_gates - n.min(max_gates - 1));
    let fan_in = rng.random_bool(0.3);
    for _ in 0..body {
        if fan_in {
            let a = rng.random_range(0..n - 1);
            c.cx(a, n - 1).unwrap();
            continue;
        }
        match rng.random_range(0..4) {
            0 => {
                let kind = [GateKind::H, GateKind::X, GateKind::T][rng.random_range(0..3)];
                c.gate1(kind, rng.random_range(0..n)).unwrap();
            }
            _ => {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                c.cx(a, b).unwrap();
            }
        }
    }
    for q in 0..n {
        if c.len() < max_gates && rng.random_bool(0.8) {
            c.measure(q, q).unwrap();
        }
    }
    c
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Relabels program qubit `q` as `perm[q]`; clbits follow their qubits.
pub fn relabel(c: &Circuit, perm: &[usize]) -> Circuit {
    let mut out = Circuit::new(c.num_qubits(), c.num_clbits());
    for g in c.gates() {
        let qs: Vec<usize> = g.qubits().iter().map(|&q| perm[q]).collect();
        out.push(g.kind, &qs, g.clbit).unwrap();
    }
    out
}

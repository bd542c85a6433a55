//! Benchmark circuit generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitError, GateKind};

/// Bernstein-Vazirani on `n` qubits with hidden string `s` (`|s| = n - 1`).
///
/// Qubit `n - 1` is the ancilla. `s[i] == '1'` adds `CNOT q[i] -> q[n-1]`;
/// data qubit `i` is measured into classical bit `i`.
pub fn gen_bv(n: usize, s: &str) -> Result<Circuit, CircuitError> {
    if n < 2 {
        return Err(CircuitError::Generator(
            "bernstein-vazirani needs at least 2 qubits",
        ));
    }
    if s.len() != n - 1 {
        return Err(CircuitError::Generator(
            "hidden string length must be n - 1",
        ));
    }
    if !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(CircuitError::Generator("hidden string must be binary"));
    }
    let anc = n - 1;
    let mut c = Circuit::new(n, n - 1);
    c.gate1(GateKind::X, anc)?;
    for q in 0..n {
        c.gate1(GateKind::H, q)?;
    }
    for (i, bit) in s.bytes().enumerate() {
        if bit == b'1' {
            c.cx(i, anc)?;
        }
    }
    for q in 0..anc {
        c.gate1(GateKind::H, q)?;
    }
    for q in 0..anc {
        c.measure(q, q)?;
    }
    Ok(c)
}

/// Three-qubit Toffoli (controls 0 and 1, target 2) in the textbook
/// {H, T, T†, CNOT} decomposition, followed by measurement of all qubits.
pub fn gen_toffoli() -> Circuit {
    let mut c = Circuit::new(3, 3);
    toffoli_body(&mut c, 0, 1, 2).expect("fixed decomposition is valid");
    for q in 0..3 {
        c.measure(q, q).expect("fixed decomposition is valid");
    }
    c
}

/// Appends the 6-CNOT Toffoli decomposition on `(a, b) -> t`.
pub fn toffoli_body(c: &mut Circuit, a: usize, b: usize, t: usize) -> Result<(), CircuitError> {
    use GateKind::*;
    c.gate1(H, t)?;
    c.cx(b, t)?;
    c.gate1(Tdg, t)?;
    c.cx(a, t)?;
    c.gate1(T, t)?;
    c.cx(b, t)?;
    c.gate1(Tdg, t)?;
    c.cx(a, t)?;
    c.gate1(T, b)?;
    c.gate1(T, t)?;
    c.gate1(H, t)?;
    c.cx(a, b)?;
    c.gate1(T, a)?;
    c.gate1(Tdg, b)?;
    c.cx(a, b)?;
    Ok(())
}

/// Kinds sampled by [`gen_random`].
pub const RANDOM_KINDS: [GateKind; 7] = [
    GateKind::H,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::S,
    GateKind::T,
    GateKind::Cnot,
];

/// Uniformly random circuit over {H, X, Y, Z, S, T, CNOT}, no measurements.
pub fn gen_random(num_qubits: usize, num_gates: usize, seed: u64) -> Result<Circuit, CircuitError> {
    if num_qubits < 2 {
        return Err(CircuitError::Generator(
            "random circuits need at least 2 qubits",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(num_qubits, 0);
    for _ in 0..num_gates {
        let kind = RANDOM_KINDS[rng.random_range(0..RANDOM_KINDS.len())];
        if kind == GateKind::Cnot {
            let a = rng.random_range(0..num_qubits);
            let mut b = rng.random_range(0..num_qubits - 1);
            if b >= a {
                b += 1;
            }
            c.cx(a, b)?;
        } else {
            c.gate1(kind, rng.random_range(0..num_qubits))?;
        }
    }
    Ok(c)
}

//! Dense statevector simulation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{Circuit, GateKind};

/// Largest circuit [`simulate`] accepts.
pub const MAX_CIRCUIT_QUBITS: usize = 14;
/// Largest register the simulator allocates (physical simulations include
/// routing cells and readout copies).
pub const MAX_REGISTER_QUBITS: usize = 24;

/// Probability of each classical outcome; bit `k` of the key is clbit `k`.
pub type Distribution = BTreeMap<u64, f64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("{qubits} qubits exceed the simulator limit of {limit}")]
    TooManyQubits { qubits: usize, limit: usize },
    #[error("{0} classical bits do not fit an outcome word")]
    TooManyClbits(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amp: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `n` qubits; qubit `q` is bit `q` of the basis index.
    pub fn new(n: usize) -> Result<Self, SimError> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, SimError> {
        if n > MAX_REGISTER_QUBITS {
            return Err(SimError::TooManyQubits {
                qubits: n,
                limit: MAX_REGISTER_QUBITS,
            });
        }
        let mut amp = alloc::vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amp })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a unitary gate; MEASURE is not a unitary and panics here.
    pub fn apply(&mut self, kind: GateKind, qubits: &[usize]) {
        match kind {
            GateKind::Cnot => self.cnot(qubits[0], qubits[1]),
            GateKind::Measure => panic!("measurement is not a unitary"),
            _ => self.single(qubits[0], matrix(kind)),
        }
    }

    fn single(&mut self, q: usize, [[a, b], [c, d]]: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let (x, y) = (self.amp[i], self.amp[i | bit]);
                self.amp[i] = a * x + b * y;
                self.amp[i | bit] = c * x + d * y;
            }
        }
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let (cb, tb) = (1 << c, 1 << t);
        for i in 0..self.amp.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amp.swap(i, i | tb);
            }
        }
    }

    /// Outcome distribution of measuring `readout[k]` into bit `k`.
    pub fn measure(&self, readout: &[(usize, usize)]) -> Distribution {
        let mut dist = Distribution::new();
        for (i, a) in self.amp.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let key = readout
                .iter()
                .filter(|&&(q, _)| i >> q & 1 == 1)
                .fold(0u64, |k, &(_, bit)| k | 1 << bit);
            *dist.entry(key).or_insert(0.0) += p;
        }
        dist
    }
}

fn matrix(kind: GateKind) -> [[Complex64; 2]; 2] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    let h = FRAC_1_SQRT_2;
    match kind {
        GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        GateKind::X => [[o, l], [l, o]],
        GateKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        GateKind::Z => [[l, o], [o, c(-1.0, 0.0)]],
        GateKind::S => [[l, o], [o, c(0.0, 1.0)]],
        GateKind::Sdg => [[l, o], [o, c(0.0, -1.0)]],
        GateKind::T => [[l, o], [o, c(h, h)]],
        GateKind::Tdg => [[l, o], [o, c(h, -h)]],
        GateKind::Cnot | GateKind::Measure => unreachable!("not a single-qubit unitary"),
    }
}

/// Exact outcome distribution of `c`. Measurements are deferred to the end,
/// which is exact because nothing acts on a qubit after its readout.
/// Qubits that are never measured do not contribute to the outcome.
pub fn simulate(c: &Circuit) -> Result<Distribution, SimError> {
    if c.num_qubits() > MAX_CIRCUIT_QUBITS {
        return Err(SimError::TooManyQubits {
            qubits: c.num_qubits(),
            limit: MAX_CIRCUIT_QUBITS,
        });
    }
    if c.num_clbits() > 64 {
        return Err(SimError::TooManyClbits(c.num_clbits()));
    }
    let mut sv = Statevector::new(c.num_qubits())?;
    let mut readout = Vec::new();
    for g in c.gates() {
        match g.kind {
            GateKind::Measure => readout.push((g.qubits()[0], g.clbit.expect("measure clbit"))),
            kind => sv.apply(kind, g.qubits()),
        }
    }
    Ok(sv.measure(&readout))
}

/// Total variation distance between two outcome distributions.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> f64 {
    let mut keys: Vec<u64> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(&k).copied().unwrap_or(0.0) - b.get(&k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_bv;

    #[test]
    fn hadamard_then_measure_is_fair() {
        let mut c = Circuit::new(1, 1);
        c.gate1(GateKind::H, 0).unwrap();
        c.measure(0, 0).unwrap();
        let d = simulate(&c).unwrap();
        assert!((d[&0] - 0.5).abs() < 1e-15);
        assert!((d[&1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bv_recovers_hidden_string() {
        let d = simulate(&gen_bv(4, "111").unwrap()).unwrap();
        assert!((d[&0b111] - 1.0).abs() < 1e-9);
        // string bit i is clbit i
        let d = simulate(&gen_bv(5, "1011").unwrap()).unwrap();
        assert!((d[&0b1101] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn size_limit() {
        assert!(simulate(&Circuit::new(15, 0)).is_err());
    }

    #[test]
    fn s_and_t_compose() {
        let mut a = Statevector::new(1).unwrap();
        a.apply(GateKind::H, &[0]);
        let mut b = a.clone();
        a.apply(GateKind::T, &[0]);
        a.apply(GateKind::T, &[0]);
        b.apply(GateKind::S, &[0]);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm_sqr() < 1e-30);
        }
        b.apply(GateKind::Sdg, &[0]);
        b.apply(GateKind::H, &[0]);
        assert!((b.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-15);
    }
}

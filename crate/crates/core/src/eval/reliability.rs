//! Analytic program reliability and its Monte Carlo estimate.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::GateKind;
use crate::codegen::{CompiledCircuit, SwapRole};
use crate::machine::{GridMachine, MachineError};

use super::EvalError;
use crate::tables::path_reliability;

/// Granularity of Monte Carlo failure events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailureModel {
    /// One event per routed CNOT (with its SWAPs) and per readout.
    #[default]
    PerGate,
    /// One event per physical CNOT and per readout. Return SWAPs count only
    /// under `count_return_swaps`.
    PerPhysical,
}

/// Success probabilities of the independent failure events of `cc`.
pub fn failure_events(
    cc: &CompiledCircuit,
    m: &GridMachine,
    count_return_swaps: bool,
    model: FailureModel,
) -> Result<Vec<f64>, EvalError> {
    let mut events = Vec::new();
    match model {
        FailureModel::PerGate => {
            for g in cc.source.gates() {
                match g.kind {
                    GateKind::Measure => {
                        events.push(m.readout_reliability(cc.placement.cell(m, g.qubits()[0])))
                    }
                    GateKind::Cnot => {
                        let route = cc
                            .routes
                            .get(g.id)
                            .ok_or(EvalError::MissingRoute { gate: g.id })?;
                        events.push(path_reliability(&route.path, m, count_return_swaps)?);
                    }
                    _ => {}
                }
            }
        }
        FailureModel::PerPhysical => {
            for g in &cc.expanded {
                match (g.kind, g.role) {
                    (GateKind::Measure, _) => events.push(m.readout_reliability(g.operands[0])),
                    (GateKind::Cnot, SwapRole::ReturnSwap) if !count_return_swaps => {}
                    (GateKind::Cnot, _) => {
                        let e = m.edge_between(g.operands[0], g.operands[1]).ok_or(
                            MachineError::NotAdjacent(m.pos(g.operands[0]), m.pos(g.operands[1])),
                        )?;
                        events.push(1.0 - e.cnot_error);
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(events)
}

/// Product of ε over routed CNOTs and readouts.
pub fn reliability_score(
    cc: &CompiledCircuit,
    m: &GridMachine,
    count_return_swaps: bool,
) -> Result<f64, EvalError> {
    let mut events = failure_events(cc, m, count_return_swaps, FailureModel::PerGate)?;
    events.sort_by(f64::total_cmp);
    Ok(events.into_iter().product())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            estimate: p,
            stderr: libm::sqrt(p * (1.0 - p) / trials as f64),
            trials,
        }
    }
}

/// Seeded Bernoulli trials over a fixed list of event success probabilities.
/// Trial `i` draws from its own ChaCha stream, so any partition of the trial
/// range reproduces the same outcomes.
#[derive(Debug, Clone)]
pub struct TrialModel {
    events: Vec<f64>,
    base: ChaCha8Rng,
}

impl TrialModel {
    pub fn new(events: Vec<f64>, seed: u64) -> Self {
        Self {
            events,
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn trial(&self, i: u64) -> bool {
        let mut rng = self.base.clone();
        rng.set_stream(i);
        self.events.iter().all(|&eps| rng.random::<f64>() < eps)
    }

    pub fn run(&self, trials: core::ops::Range<u64>) -> u64 {
        trials.filter(|&i| self.trial(i)).count() as u64
    }
}

/// Fraction of `trials` seeded runs in which no failure event fires.
pub fn monte_carlo_success(
    cc: &CompiledCircuit,
    m: &GridMachine,
    trials: u64,
    seed: u64,
    count_return_swaps: bool,
    model: FailureModel,
) -> Result<McEstimate, EvalError> {
    let trials = trials.max(1);
    let tm = TrialModel::new(failure_events(cc, m, count_return_swaps, model)?, seed);
    Ok(McEstimate::from_counts(tm.run(0..trials), trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_events_always_succeed() {
        let tm = TrialModel::new(alloc::vec![1.0, 1.0], 3);
        assert_eq!(tm.run(0..1000), 1000);
        let none = TrialModel::new(Vec::new(), 3);
        assert_eq!(none.run(0..10), 10);
    }

    #[test]
    fn fair_coin_within_three_sigma() {
        let n = 1_000_000;
        let tm = TrialModel::new(alloc::vec![0.5], 99);
        let est = McEstimate::from_counts(tm.run(0..n), n);
        assert!((est.estimate - 0.5).abs() <= 0.0015);
        assert!((est.stderr - 0.0005).abs() < 1e-5);
    }

    #[test]
    fn trials_are_partition_independent() {
        let tm = TrialModel::new(alloc::vec![0.7, 0.9], 5);
        assert_eq!(tm.run(0..500), tm.run(0..200) + tm.run(200..500));
    }
}

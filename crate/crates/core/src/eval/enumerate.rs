//! Exhaustive enumeration of placements and junction choices.

use alloc::vec::Vec;

use crate::circuit::Circuit;
use crate::machine::GridMachine;
use crate::mapping::{Instance, MappingError, Placement, ProblemConfig, Solution, Strategy};
use crate::tables::build_tables;

use super::EvalError;

/// Default ceiling on `placements × 2^cnots` for [`brute_force_optimal`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 5_000_000;

/// Upper bound on the number of leaves an enumeration visits.
pub fn enumeration_size(num_program: usize, num_hardware: usize, num_cnots: usize) -> u64 {
    let mut placements: u64 = 1;
    for i in 0..num_program {
        placements = placements.saturating_mul((num_hardware - i) as u64);
    }
    placements.saturating_mul(1u64.checked_shl(num_cnots as u32).unwrap_or(u64::MAX))
}

/// Calls `visit` on every feasible (placement, junction choice) of `c` in
/// lexicographic order: qubit 0's cell varies slowest, junction index of the
/// first CNOT slowest. Coherence-infeasible leaves are skipped.
pub fn for_each_solution(
    c: &Circuit,
    m: &GridMachine,
    strategy: Strategy,
    cap: u64,
    mut visit: impl FnMut(&Solution),
) -> Result<u64, EvalError> {
    if c.num_qubits() > m.num_qubits() {
        return Err(EvalError::TooLarge);
    }
    if enumeration_size(c.num_qubits(), m.num_qubits(), c.cnot_count()) > cap {
        return Err(EvalError::TooLarge);
    }
    let t = build_tables(m, strategy.count_return_swaps())?;
    let inst = Instance::new(c, m, &t, strategy);
    let mut cells = Vec::with_capacity(c.num_qubits());
    let mut used = alloc::vec![false; m.num_qubits()];
    let mut feasible = 0;
    walk(&inst, &mut cells, &mut used, &mut |sol| {
        feasible += 1;
        visit(sol)
    })?;
    Ok(feasible)
}

fn walk(
    inst: &Instance<'_>,
    cells: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut dyn FnMut(&Solution),
) -> Result<(), EvalError> {
    if cells.len() == inst.circuit.num_qubits() {
        let p = Placement::from_cells(inst.machine, cells);
        let options: Vec<usize> = (0..inst.cnots.len())
            .map(|k| inst.junction_options(&p, k))
            .collect();
        let mut choice = alloc::vec![0; options.len()];
        loop {
            match inst.evaluate(&p, &choice) {
                Ok(sol) => visit(&sol),
                Err(MappingError::Coherence { .. }) => {}
                Err(e) => return Err(e.into()),
            }
            // odometer, last CNOT fastest
            let mut k = options.len();
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < options[k] {
                    break;
                }
                choice[k] = 0;
            }
        }
    }
    for h in 0..used.len() {
        if !used[h] {
            used[h] = true;
            cells.push(h);
            walk(inst, cells, used, visit)?;
            cells.pop();
            used[h] = false;
        }
    }
    Ok(())
}

/// Exact optimum and every solution attaining it.
#[derive(Debug, Clone)]
pub struct BruteForce {
    pub objective: f64,
    pub argmax: Vec<Solution>,
    pub feasible: u64,
}

/// Scores every injective placement and junction choice with the canonical
/// schedule and keeps the optimal ones. Values are compared exactly; leaf
/// objectives are summed in a canonical order so equal multisets tie.
pub fn brute_force_optimal(
    c: &Circuit,
    m: &GridMachine,
    cfg: &ProblemConfig,
    cap: u64,
) -> Result<BruteForce, EvalError> {
    cfg.validate()?;
    let strategy = Strategy::Exact(*cfg);
    let mut best: Option<f64> = None;
    let mut argmax: Vec<Solution> = Vec::new();
    let feasible = for_each_solution(c, m, strategy, cap, |sol| {
        let v = sol.objective_value;
        match best {
            Some(b) if v == b => argmax.push(sol.clone()),
            Some(b) if !strategy.better(v, b) => {}
            _ => {
                best = Some(v);
                argmax.clear();
                argmax.push(sol.clone());
            }
        }
    })?;
    let objective = best.ok_or(EvalError::Infeasible)?;
    for s in &mut argmax {
        s.optimal = true;
    }
    Ok(BruteForce {
        objective,
        argmax,
        feasible,
    })
}

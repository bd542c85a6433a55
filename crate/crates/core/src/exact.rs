//! Branch and bound over injective placements and one-bend junction choices.
//!
//! Program qubits are placed in descending program-graph degree (ties by id)
//! onto free cells in ascending hardware id. Complete placements enumerate
//! junctions per CNOT in circuit order, lower junction first. Every leaf is
//! scored with the canonical list schedule, so "optimal" is relative to that
//! scheduler. The incumbent is only replaced by a strictly better leaf, which
//! makes the returned solution the first optimum in search order.

use alloc::vec::Vec;

use crate::budget::Budget;
use crate::circuit::{build_program_graph, Circuit, GateKind};
use crate::machine::{manhattan, static_cnot_duration, GridMachine, MachineError};
use crate::mapping::{
    ConfigError, Instance, MappingError, Placement, ProblemConfig, RouteKind, Solution, Strategy,
    Variant,
};
use crate::tables::{build_tables, DerivedTables};
use crate::Timeslot;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{program} program qubits do not fit on {hardware} hardware qubits")]
    TooManyQubits { program: usize, hardware: usize },
    #[error("no placement satisfies the coherence bounds")]
    Infeasible,
    #[error("budget exhausted before any feasible solution was found")]
    Timeout,
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

/// Slack for comparing a reliability bound with the incumbent; bounds are
/// summed in a different order than leaf objectives.
fn bound_slack(inc: f64) -> f64 {
    1e-9 * (1.0 + inc.abs())
}

struct Search<'a, B: Budget> {
    inst: Instance<'a>,
    budget: B,
    order: Vec<usize>,
    cell_of: Vec<Option<usize>>,
    used: Vec<bool>,
    best: Option<Solution>,
    timed_out: bool,
    max_readout_ln: f64,
    max_cnot_ln: f64,
}

impl<B: Budget> Search<'_, B> {
    fn tables(&self) -> &DerivedTables {
        self.inst.tables
    }

    fn machine(&self) -> &GridMachine {
        self.inst.machine
    }

    fn stop(&mut self) -> bool {
        if !self.timed_out && self.budget.exhausted() {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn prune(&self) -> bool {
        let Some(best) = &self.best else { return false };
        if self.inst.strategy.maximizes_reliability() {
            let ub = self.reliability_upper_bound();
            ub < best.objective_value - bound_slack(best.objective_value)
        } else {
            self.makespan_lower_bound() as f64 >= best.objective_value
        }
    }

    fn reliability_upper_bound(&self) -> f64 {
        let omega = self.inst.strategy.omega();
        let t = self.tables();
        let (mut ro, mut cx) = (0.0, 0.0);
        for g in self.inst.circuit.gates() {
            match g.kind {
                GateKind::Measure => {
                    ro += match self.cell_of[g.qubits()[0]] {
                        Some(h) => libm::log(t.readout_rel(h)),
                        None => self.max_readout_ln,
                    }
                }
                GateKind::Cnot => {
                    let (c, tq) = g.cnot_pair().expect("cnot");
                    cx += match (self.cell_of[c], self.cell_of[tq]) {
                        (Some(hc), Some(ht)) => libm::log(
                            t.one_bend(hc, ht)
                                .iter()
                                .map(|r| r.reliability)
                                .fold(0.0, f64::max),
                        ),
                        _ => self.max_cnot_ln,
                    }
                }
                _ => {}
            }
        }
        omega * ro + (1.0 - omega) * cx
    }

    /// Longest dependency chain with every duration at its cheapest value
    /// given the partial placement.
    fn makespan_lower_bound(&self) -> Timeslot {
        let m = self.machine();
        let t = self.tables();
        let static_model = self.inst.strategy.uses_static_model();
        let circuit = self.inst.circuit;
        let mut finish: Vec<Timeslot> = alloc::vec![0; circuit.len()];
        for g in circuit.gates() {
            let dur = match g.kind {
                GateKind::Measure => match self.cell_of[g.qubits()[0]] {
                    Some(h) => m.qubit(h).readout_duration,
                    None => m.min_readout_duration(),
                },
                GateKind::Cnot => {
                    let (c, tq) = g.cnot_pair().expect("cnot");
                    match (self.cell_of[c], self.cell_of[tq]) {
                        (Some(hc), Some(ht)) if static_model => {
                            static_cnot_duration(manhattan(m.pos(hc), m.pos(ht)), m)
                                .unwrap_or(m.static_tau_cnot)
                        }
                        (Some(hc), Some(ht)) => t.delta(hc, ht),
                        _ if static_model => m.static_tau_cnot,
                        _ => m.min_cnot_duration(),
                    }
                }
                _ => m.single_qubit_duration,
            };
            let ready = self
                .inst
                .dag
                .preds(g.id)
                .iter()
                .map(|&p| finish[p])
                .max()
                .unwrap_or(0);
            finish[g.id] = ready + dur;
        }
        finish.into_iter().max().unwrap_or(0)
    }

    fn place(&mut self, depth: usize) -> Result<(), SolveError> {
        if depth == self.order.len() {
            return self.leaf();
        }
        let q = self.order[depth];
        for h in 0..self.machine().num_qubits() {
            if self.used[h] {
                continue;
            }
            if self.stop() {
                break;
            }
            self.used[h] = true;
            self.cell_of[q] = Some(h);
            if !self.prune() {
                self.place(depth + 1)?;
            }
            self.cell_of[q] = None;
            self.used[h] = false;
            if self.timed_out {
                break;
            }
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<(), SolveError> {
        let cells: Vec<usize> = self.cell_of.iter().map(|h| h.expect("complete")).collect();
        let p = Placement::from_cells(self.machine(), &cells);
        let options: Vec<usize> = (0..self.inst.cnots.len())
            .map(|k| self.inst.junction_options(&p, k))
            .collect();
        // per-CNOT log-reliability of each junction, for junction-level pruning
        let gains: Vec<Vec<f64>> = if self.inst.strategy.maximizes_reliability() {
            let omega = self.inst.strategy.omega();
            self.inst
                .cnots
                .iter()
                .map(|&gid| {
                    let (c, t) = self.inst.circuit.gates()[gid].cnot_pair().expect("cnot");
                    self.tables()
                        .one_bend(cells[c], cells[t])
                        .iter()
                        .map(|r| (1.0 - omega) * libm::log(r.reliability))
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        let mut choices = alloc::vec![0; options.len()];
        self.junctions(&p, &options, &gains, &mut choices, 0)
    }

    fn junctions(
        &mut self,
        p: &Placement,
        options: &[usize],
        gains: &[Vec<f64>],
        choices: &mut Vec<usize>,
        k: usize,
    ) -> Result<(), SolveError> {
        if self.stop() {
            return Ok(());
        }
        if let (Some(best), false) = (&self.best, gains.is_empty()) {
            let fixed: f64 = (0..k).map(|i| gains[i][choices[i]]).sum();
            let rest: f64 = gains[k..]
                .iter()
                .map(|g| g.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .sum();
            let omega = self.inst.strategy.omega();
            let ro: f64 = self
                .inst
                .circuit
                .gates()
                .iter()
                .filter(|g| g.is_measure())
                .map(|g| {
                    libm::log(
                        self.tables()
                            .readout_rel(p.cell(self.machine(), g.qubits()[0])),
                    )
                })
                .sum();
            if omega * ro + fixed + rest < best.objective_value - bound_slack(best.objective_value)
            {
                return Ok(());
            }
        }
        if k == options.len() {
            return match self.inst.evaluate(p, choices) {
                Ok(sol) => {
                    let better = match &self.best {
                        None => true,
                        Some(b) => self
                            .inst
                            .strategy
                            .better(sol.objective_value, b.objective_value),
                    };
                    if better {
                        self.best = Some(sol);
                    }
                    Ok(())
                }
                Err(MappingError::Coherence { .. }) => Ok(()),
                Err(e) => Err(e.into()),
            };
        }
        for j in 0..options[k] {
            choices[k] = j;
            self.junctions(p, options, gains, choices, k + 1)?;
            if self.timed_out {
                break;
            }
        }
        choices[k] = 0;
        Ok(())
    }
}

/// Exact optimum of `cfg`'s objective for `c` on `m`, relative to the
/// canonical schedule. Stops early when `budget` is exhausted; the best
/// solution found so far is then returned with `optimal == false`.
pub fn solve_exact<B: Budget>(
    c: &Circuit,
    m: &GridMachine,
    cfg: &ProblemConfig,
    budget: B,
) -> Result<Solution, SolveError> {
    cfg.validate()?;
    if c.num_qubits() > m.num_qubits() {
        return Err(SolveError::TooManyQubits {
            program: c.num_qubits(),
            hardware: m.num_qubits(),
        });
    }
    let t = build_tables(m, cfg.count_return_swaps)?;
    let strategy = Strategy::Exact(*cfg);
    debug_assert!(cfg.variant != Variant::RSmtStar || strategy.route_kind() == RouteKind::OneBend);
    let order = build_program_graph(c).by_degree();
    let mut search = Search {
        inst: Instance::new(c, m, &t, strategy),
        budget,
        order,
        cell_of: alloc::vec![None; c.num_qubits()],
        used: alloc::vec![false; m.num_qubits()],
        best: None,
        timed_out: false,
        max_readout_ln: libm::log(t.max_readout_rel()),
        max_cnot_ln: libm::log(t.max_cnot_rel()),
    };
    search.place(0)?;
    match (search.best, search.timed_out) {
        (Some(mut sol), timed_out) => {
            sol.optimal = !timed_out;
            Ok(sol)
        }
        (None, true) => Err(SolveError::Timeout),
        (None, false) => Err(SolveError::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::{NodeBudget, Unlimited};
    use crate::check::check_solution;
    use crate::generate::{gen_bv, gen_toffoli};
    use crate::machine::{MachineDefaults, Pos};
    use crate::mapping::Routing;

    fn uniform(mx: usize, my: usize) -> GridMachine {
        GridMachine::uniform(
            mx,
            my,
            MachineDefaults {
                cnot_error: 0.1,
                ..MachineDefaults::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn bv4_reliability_optimum_is_swap_free() {
        let m = uniform(3, 3);
        let c = gen_bv(4, "111").unwrap();
        let cfg = ProblemConfig::new(Variant::RSmtStar, Routing::OneBend).unwrap();
        let sol = solve_exact(&c, &m, &cfg, Unlimited).unwrap();
        assert!(sol.optimal);
        assert!(m.grid_degree(sol.placement.cell(&m, 3)) >= 3);
        for q in 0..3 {
            assert_eq!(manhattan(sol.placement.loc(q), sol.placement.loc(3)), 1);
        }
        let expected = 0.5 * 3.0 * 0.93f64.ln() + 0.5 * 3.0 * 0.9f64.ln();
        assert!((sol.objective_value - expected).abs() < 1e-12);
        assert!(check_solution(&sol, &c, &m).is_empty());
    }

    #[test]
    fn single_gate_makespan() {
        let m = uniform(2, 2);
        let mut c = Circuit::new(1, 0);
        c.gate1(GateKind::H, 0).unwrap();
        let cfg = ProblemConfig::new(Variant::TSmt, Routing::RectangleReservation).unwrap();
        let sol = solve_exact(&c, &m, &cfg, Unlimited).unwrap();
        assert_eq!(sol.objective_value, m.single_qubit_duration as f64);
        assert_eq!(sol.placement.loc(0), Pos::new(0, 0));
    }

    #[test]
    fn toffoli_needs_a_swap() {
        let m = uniform(2, 3);
        let c = gen_toffoli();
        for variant in [Variant::TSmtStar, Variant::RSmtStar] {
            let cfg = ProblemConfig::new(variant, Routing::OneBend).unwrap();
            let sol = solve_exact(&c, &m, &cfg, Unlimited).unwrap();
            assert!(sol.routes.routes.iter().flatten().any(|r| r.swaps() >= 1));
        }
    }

    #[test]
    fn budget_and_capacity_errors() {
        let m = uniform(2, 2);
        let c = gen_bv(5, "1111").unwrap();
        let cfg = ProblemConfig::new(Variant::TSmt, Routing::OneBend).unwrap();
        assert!(matches!(
            solve_exact(&c, &m, &cfg, Unlimited),
            Err(SolveError::TooManyQubits { .. })
        ));
        let c = gen_bv(4, "111").unwrap();
        let m = uniform(4, 4);
        let sol = solve_exact(&c, &m, &cfg, NodeBudget::new(30)).unwrap();
        assert!(!sol.optimal);
        assert_eq!(
            solve_exact(&c, &m, &cfg, NodeBudget::new(2)),
            Err(SolveError::Timeout)
        );
    }

    #[test]
    fn coherence_infeasible() {
        let m = GridMachine::uniform(
            2,
            2,
            MachineDefaults {
                t2: 3,
                ..MachineDefaults::default()
            },
        )
        .unwrap();
        let c = gen_bv(3, "11").unwrap();
        let cfg = ProblemConfig::new(Variant::TSmtStar, Routing::OneBend).unwrap();
        assert_eq!(
            solve_exact(&c, &m, &cfg, Unlimited),
            Err(SolveError::Infeasible)
        );
    }
}

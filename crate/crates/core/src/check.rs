//! Independent verification of a [`Solution`] against every model constraint.

use alloc::vec::Vec;

use crate::circuit::{build_dag, Circuit};
use crate::machine::{one_bend_junctions, GridMachine, MachineError};
use crate::mapping::{
    coherence_limit, footprint, gate_duration, gate_reliability, objective, RouteKind, Solution,
};
use crate::schedule::{time_overlap, Rect};
use crate::tables::{build_tables, one_bend_path};
use crate::Timeslot;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("placement covers {got} qubits, circuit has {expected}")]
    PlacementSize { expected: usize, got: usize },
    #[error("qubit {qubit} placed off the grid")]
    OffGrid { qubit: usize },
    #[error("qubits {a} and {b} share a cell")]
    SharedCell { a: usize, b: usize },
    #[error("schedule covers {got} gates, circuit has {expected}")]
    ScheduleSize { expected: usize, got: usize },
    #[error("gate {after} starts before its predecessor {before} finishes")]
    Dependency { before: usize, after: usize },
    #[error("gate {gate} finishes at {finish}, past coherence bound {bound}")]
    Coherence {
        gate: usize,
        finish: Timeslot,
        bound: Timeslot,
    },
    #[error("gate {gate} has duration {got}, model says {expected}")]
    Duration {
        gate: usize,
        expected: Timeslot,
        got: Timeslot,
    },
    #[error("gate {gate}: route missing or attached to a non-CNOT")]
    RoutePresence { gate: usize },
    #[error("gate {gate}: junction is not a one-bend corner of its operands")]
    IllegalJunction { gate: usize },
    #[error("gate {gate}: route path does not connect its operands along grid edges")]
    BadPath { gate: usize },
    #[error("gate {gate}: recorded bounding rectangle is wrong")]
    BadRect { gate: usize },
    #[error("gates {a} and {b} overlap in space and time")]
    RoutingOverlap { a: usize, b: usize },
    #[error("gate {gate}: CNOT operands share one cell")]
    SameCell { gate: usize },
    #[error("objective {got} disagrees with recomputed {expected}")]
    Objective { expected: f64, got: f64 },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Every constraint `sol` breaks; empty means valid.
pub fn check_solution(sol: &Solution, c: &Circuit, m: &GridMachine) -> Vec<Violation> {
    let mut out = Vec::new();
    let p = &sol.placement;
    let strategy = &sol.strategy;

    if p.len() != c.num_qubits() {
        out.push(Violation::PlacementSize {
            expected: c.num_qubits(),
            got: p.len(),
        });
        return out;
    }
    let mut grid_ok = true;
    for q in 0..p.len() {
        if !m.contains(p.loc(q)) {
            out.push(Violation::OffGrid { qubit: q });
            grid_ok = false;
        }
    }
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if p.loc(a) == p.loc(b) {
                out.push(Violation::SharedCell { a, b });
            }
        }
    }
    let n = c.len();
    if sol.schedule.start.len() != n || sol.schedule.dur.len() != n {
        out.push(Violation::ScheduleSize {
            expected: n,
            got: sol.schedule.start.len(),
        });
        return out;
    }
    if !grid_ok {
        return out;
    }
    let t = match build_tables(m, strategy.count_return_swaps()) {
        Ok(t) => t,
        Err(e) => {
            out.push(e.into());
            return out;
        }
    };

    let dag = build_dag(c);
    for (a, b) in dag.edges() {
        if sol.schedule.start[b] < sol.schedule.finish(a) {
            out.push(Violation::Dependency {
                before: a,
                after: b,
            });
        }
    }

    let mut routes_ok = true;
    for g in c.gates() {
        let route = sol.routes.get(g.id);
        if g.is_cnot() != route.is_some() {
            out.push(Violation::RoutePresence { gate: g.id });
            routes_ok = false;
            continue;
        }
        let Some(route) = route else { continue };
        let (qc, qt) = g.cnot_pair().expect("cnot");
        let (pc, pt) = (p.loc(qc), p.loc(qt));
        if pc == pt {
            out.push(Violation::SameCell { gate: g.id });
            routes_ok = false;
            continue;
        }
        if route.rect != Rect::bounding(pc, pt) {
            out.push(Violation::BadRect { gate: g.id });
        }
        let (hc, ht) = (m.cell(pc), m.cell(pt));
        match strategy.route_kind() {
            RouteKind::Rectangle | RouteKind::OneBend => {
                let legal = one_bend_junctions(pc, pt).expect("distinct cells");
                match route.junction {
                    Some(j) if legal.contains(j) => {
                        if route.path != one_bend_path(m, pc, pt, j) {
                            out.push(Violation::BadPath { gate: g.id });
                            routes_ok = false;
                        }
                    }
                    _ => {
                        out.push(Violation::IllegalJunction { gate: g.id });
                        routes_ok = false;
                    }
                }
            }
            RouteKind::BestPath => {
                let path = &route.path;
                let connected = path.first() == Some(&hc)
                    && path.last() == Some(&ht)
                    && path
                        .windows(2)
                        .all(|w| m.edge_between(w[0], w[1]).is_some());
                let mut seen = path.clone();
                seen.sort_unstable();
                seen.dedup();
                if !connected || seen.len() != path.len() || route.junction.is_some() {
                    out.push(Violation::BadPath { gate: g.id });
                    routes_ok = false;
                }
            }
        }
    }
    if !routes_ok {
        return out;
    }

    for g in c.gates() {
        let route = sol.routes.get(g.id);
        match gate_duration(g, p, route, strategy, m, &t) {
            Ok(d) if d != sol.schedule.dur[g.id] => out.push(Violation::Duration {
                gate: g.id,
                expected: d,
                got: sol.schedule.dur[g.id],
            }),
            Ok(_) => {}
            Err(_) => out.push(Violation::SameCell { gate: g.id }),
        }
        let finish = sol.schedule.finish(g.id);
        match coherence_limit(g, p, strategy, m) {
            None if finish >= m.static_coherence_bound => out.push(Violation::Coherence {
                gate: g.id,
                finish,
                bound: m.static_coherence_bound,
            }),
            Some(bound) if finish > bound => out.push(Violation::Coherence {
                gate: g.id,
                finish,
                bound,
            }),
            _ => {}
        }
    }

    let fps: Vec<_> = c
        .gates()
        .iter()
        .map(|g| footprint(g, p, sol.routes.get(g.id), strategy, m).expect("routes verified"))
        .collect();
    for a in 0..n {
        for b in a + 1..n {
            let (sa, da) = (sol.schedule.start[a], sol.schedule.dur[a]);
            let (sb, db) = (sol.schedule.start[b], sol.schedule.dur[b]);
            if time_overlap(sa, da, sb, db) && fps[a].conflicts(&fps[b], m.my()) {
                out.push(Violation::RoutingOverlap { a, b });
            }
        }
    }

    let eps: Result<Vec<f64>, _> = c
        .gates()
        .iter()
        .map(|g| gate_reliability(g, p, sol.routes.get(g.id), m, &t))
        .collect();
    match eps {
        Ok(eps) => {
            let expected = objective(c, &sol.schedule, &eps, strategy);
            let tol = 1e-12 * (1.0 + expected.abs());
            if !((expected - sol.objective_value).abs() <= tol) {
                out.push(Violation::Objective {
                    expected,
                    got: sol.objective_value,
                });
            }
        }
        Err(_) => out.push(Violation::IllegalJunction { gate: usize::MAX }),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{MachineDefaults, Pos};
    use crate::mapping::{Instance, Placement, ProblemConfig, Routing, Strategy, Variant};
    use crate::tables::build_tables;

    fn setup() -> (Circuit, GridMachine) {
        let mut c = Circuit::new(4, 0);
        c.cx(0, 1).unwrap();
        c.cx(2, 3).unwrap();
        (
            c,
            GridMachine::uniform(2, 2, MachineDefaults::default()).unwrap(),
        )
    }

    #[test]
    fn valid_solution_passes() {
        let (c, m) = setup();
        let t = build_tables(&m, false).unwrap();
        let s = Strategy::Exact(
            ProblemConfig::new(Variant::TSmtStar, Routing::RectangleReservation).unwrap(),
        );
        let inst = Instance::new(&c, &m, &t, s);
        let p = Placement::from_cells(&m, &[0, 3, 1, 2]);
        let sol = inst.evaluate(&p, &[]).unwrap();
        assert!(check_solution(&sol, &c, &m).is_empty());
        // the two diagonal rectangles coincide, so the CNOTs serialise
        assert_eq!(sol.schedule.start[1], sol.schedule.finish(0));
    }

    #[test]
    fn shared_cell_is_reported() {
        let (c, m) = setup();
        let t = build_tables(&m, false).unwrap();
        let s = Strategy::Exact(ProblemConfig::new(Variant::TSmt, Routing::OneBend).unwrap());
        let inst = Instance::new(&c, &m, &t, s);
        let mut sol = inst
            .evaluate(&Placement::from_cells(&m, &[0, 1, 2, 3]), &[])
            .unwrap();
        sol.placement = Placement::new(alloc::vec![
            Pos::new(0, 0),
            Pos::new(0, 1),
            Pos::new(0, 0),
            Pos::new(1, 1)
        ]);
        let v = check_solution(&sol, &c, &m);
        assert!(v.contains(&Violation::SharedCell { a: 0, b: 2 }));
    }

    #[test]
    fn overlapping_rectangles_name_both_gates() {
        let (c, m) = setup();
        let t = build_tables(&m, false).unwrap();
        let s = Strategy::Exact(
            ProblemConfig::new(Variant::TSmtStar, Routing::RectangleReservation).unwrap(),
        );
        let inst = Instance::new(&c, &m, &t, s);
        let mut sol = inst
            .evaluate(&Placement::from_cells(&m, &[0, 3, 1, 2]), &[])
            .unwrap();
        sol.schedule.start[1] = 0;
        sol.objective_value = sol.schedule.makespan() as f64;
        let v = check_solution(&sol, &c, &m);
        assert_eq!(v, alloc::vec![Violation::RoutingOverlap { a: 0, b: 1 }]);
    }
}

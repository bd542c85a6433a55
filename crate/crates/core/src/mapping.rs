//! Compiler configurations, solution types and the per-gate model shared by
//! the exact and heuristic mappers: durations, reliabilities, routing
//! footprints, the canonical schedule and the objectives.

use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{build_dag, Circuit, DependencyDag, Gate, GateKind};
use crate::machine::{manhattan, static_cnot_duration, GridMachine, MachineError, Pos};
use crate::schedule::{
    list_schedule, Footprint, GeometricResources, OccupancyResources, Rect, Schedule,
};
use crate::tables::DerivedTables;
use crate::Timeslot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Variant {
    /// Minimise duration with machine-wide constants.
    #[cfg_attr(feature = "serde", serde(rename = "t-smt"))]
    TSmt,
    /// Minimise duration with calibrated durations and coherence times.
    #[cfg_attr(feature = "serde", serde(rename = "t-smt-star"))]
    TSmtStar,
    /// Maximise weighted log reliability with calibrated data.
    #[cfg_attr(feature = "serde", serde(rename = "r-smt-star"))]
    RSmtStar,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::TSmt => "t-smt",
            Variant::TSmtStar => "t-smt-star",
            Variant::RSmtStar => "r-smt-star",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Routing {
    /// Rectangle reservation: a CNOT blocks the bounding box of its operands.
    #[cfg_attr(feature = "serde", serde(rename = "rr"))]
    RectangleReservation,
    /// One-bend paths: a CNOT blocks one of the two L-shaped routes.
    #[cfg_attr(feature = "serde", serde(rename = "1bp"))]
    OneBend,
}

impl Routing {
    pub fn label(self) -> &'static str {
        match self {
            Routing::RectangleReservation => "rr",
            Routing::OneBend => "1bp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("the reliability variant is only defined with one-bend routing")]
    ReliabilityNeedsOneBend,
    #[error("omega = {0} is outside [0, 1]")]
    Omega(f64),
    #[error("time limit must be positive")]
    TimeLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProblemConfig {
    pub variant: Variant,
    pub routing: Routing,
    /// Readout weight in the reliability objective.
    pub omega: f64,
    pub count_return_swaps: bool,
    /// Seconds; enforced by the caller-supplied budget.
    pub time_limit: Option<f64>,
}

impl ProblemConfig {
    pub fn new(variant: Variant, routing: Routing) -> Result<Self, ConfigError> {
        let cfg = Self {
            variant,
            routing,
            omega: 0.5,
            count_return_swaps: false,
            time_limit: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self, ConfigError> {
        self.omega = omega;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.variant == Variant::RSmtStar && self.routing != Routing::OneBend {
            return Err(ConfigError::ReliabilityNeedsOneBend);
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(ConfigError::Omega(self.omega));
        }
        if matches!(self.time_limit, Some(t) if !(t > 0.0)) {
            return Err(ConfigError::TimeLimit);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Policy {
    #[cfg_attr(feature = "serde", serde(rename = "greedy-v"))]
    GreedyV,
    #[cfg_attr(feature = "serde", serde(rename = "greedy-e"))]
    GreedyE,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeuristicConfig {
    pub policy: Policy,
    /// Readout weight used when reporting the reliability objective.
    pub omega: f64,
    /// Must match the tables the heuristic is run with.
    pub count_return_swaps: bool,
}

impl HeuristicConfig {
    pub fn new(policy: Policy) -> Self {
        Self {
            policy,
            omega: 0.5,
            count_return_swaps: false,
        }
    }
}

/// How a solution was produced; decides every model choice downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Strategy {
    Exact(ProblemConfig),
    Heuristic(HeuristicConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteKind {
    Rectangle,
    OneBend,
    BestPath,
}

impl Strategy {
    pub fn route_kind(&self) -> RouteKind {
        match self {
            Strategy::Exact(cfg) => match cfg.routing {
                Routing::RectangleReservation => RouteKind::Rectangle,
                Routing::OneBend => RouteKind::OneBend,
            },
            Strategy::Heuristic(_) => RouteKind::BestPath,
        }
    }

    /// Machine-wide constants for durations and coherence (`t-smt` only).
    pub fn uses_static_model(&self) -> bool {
        matches!(self, Strategy::Exact(cfg) if cfg.variant == Variant::TSmt)
    }

    pub fn maximizes_reliability(&self) -> bool {
        match self {
            Strategy::Exact(cfg) => cfg.variant == Variant::RSmtStar,
            Strategy::Heuristic(_) => true,
        }
    }

    pub fn omega(&self) -> f64 {
        match self {
            Strategy::Exact(cfg) => cfg.omega,
            Strategy::Heuristic(h) => h.omega,
        }
    }

    pub fn count_return_swaps(&self) -> bool {
        match self {
            Strategy::Exact(cfg) => cfg.count_return_swaps,
            Strategy::Heuristic(h) => h.count_return_swaps,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::Exact(cfg) => cfg.variant.label(),
            Strategy::Heuristic(h) => match h.policy {
                Policy::GreedyV => "greedy-v",
                Policy::GreedyE => "greedy-e",
            },
        }
    }

    /// Strict improvement of `a` over `b` in this strategy's objective sense.
    pub fn better(&self, a: f64, b: f64) -> bool {
        if self.maximizes_reliability() {
            a > b
        } else {
            a < b
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Exact(cfg) => write!(f, "{}/{}", cfg.variant.label(), cfg.routing.label()),
            Strategy::Heuristic(_) => write!(f, "{}/best-path", self.label()),
        }
    }
}

/// Program qubit → grid cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Placement {
    loc: Vec<Pos>,
}

impl Placement {
    pub fn new(loc: Vec<Pos>) -> Self {
        Self { loc }
    }

    pub fn from_cells(m: &GridMachine, cells: &[usize]) -> Self {
        Self {
            loc: cells.iter().map(|&h| m.pos(h)).collect(),
        }
    }

    pub fn loc(&self, q: usize) -> Pos {
        self.loc[q]
    }

    pub fn locs(&self) -> &[Pos] {
        &self.loc
    }

    pub fn len(&self) -> usize {
        self.loc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loc.is_empty()
    }

    pub fn cell(&self, m: &GridMachine, q: usize) -> usize {
        m.cell(self.loc[q])
    }

    pub fn cells(&self, m: &GridMachine) -> Vec<usize> {
        self.loc.iter().map(|&p| m.cell(p)).collect()
    }
}

/// Route of one CNOT.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Route {
    /// Hardware qubits from the control's cell to the target's cell.
    pub path: Vec<usize>,
    /// One-bend junction; `None` for best-path routes.
    pub junction: Option<Pos>,
    /// Bounding rectangle of the two operand cells.
    pub rect: Rect,
}

impl Route {
    pub fn swaps(&self) -> usize {
        self.path.len().saturating_sub(2)
    }
}

/// CNOT routes indexed by gate id (`None` for other gates).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RouteAssignment {
    pub routes: Vec<Option<Route>>,
}

impl RouteAssignment {
    pub fn get(&self, g: usize) -> Option<&Route> {
        self.routes.get(g).and_then(Option::as_ref)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Solution {
    pub strategy: Strategy,
    pub placement: Placement,
    pub routes: RouteAssignment,
    pub schedule: Schedule,
    /// Makespan for duration variants, weighted log reliability otherwise.
    pub objective_value: f64,
    /// Search exhausted (or soundly pruned) within its budget.
    pub optimal: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MappingError {
    #[error("gate {gate}: CNOT operands share one cell")]
    SameCell { gate: usize },
    #[error("gate {gate}: junction is not one of the pair's one-bend corners")]
    IllegalJunction { gate: usize },
    #[error("gate {gate}: CNOT has no route")]
    MissingRoute { gate: usize },
    #[error("gate {gate} finishes at {finish}, past the coherence bound {bound}")]
    Coherence {
        gate: usize,
        finish: Timeslot,
        bound: Timeslot,
    },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

fn cnot_cells(g: &Gate, p: &Placement, m: &GridMachine) -> Result<(usize, usize), MappingError> {
    let (c, t) = g.cnot_pair().expect("cnot");
    let (hc, ht) = (p.cell(m, c), p.cell(m, t));
    if hc == ht {
        return Err(MappingError::SameCell { gate: g.id });
    }
    Ok((hc, ht))
}

/// Route of a CNOT under `strategy`. `choice` picks the one-bend junction
/// (index into the sorted corner list) and is ignored by the other kinds.
pub fn build_route(
    g: &Gate,
    p: &Placement,
    strategy: &Strategy,
    m: &GridMachine,
    t: &DerivedTables,
    choice: usize,
) -> Result<Route, MappingError> {
    let (hc, ht) = cnot_cells(g, p, m)?;
    let rect = Rect::bounding(m.pos(hc), m.pos(ht));
    Ok(match strategy.route_kind() {
        RouteKind::Rectangle => {
            let r = t.delta_route(hc, ht);
            Route {
                path: r.path.clone(),
                junction: Some(r.junction),
                rect,
            }
        }
        RouteKind::OneBend => {
            let routes = t.one_bend(hc, ht);
            let r = routes
                .get(choice)
                .ok_or(MappingError::IllegalJunction { gate: g.id })?;
            Route {
                path: r.path.clone(),
                junction: Some(r.junction),
                rect,
            }
        }
        RouteKind::BestPath => Route {
            path: t.best_path(hc, ht).path.clone(),
            junction: None,
            rect,
        },
    })
}

/// Duration `g.δ` of a gate.
pub fn gate_duration(
    g: &Gate,
    p: &Placement,
    route: Option<&Route>,
    strategy: &Strategy,
    m: &GridMachine,
    t: &DerivedTables,
) -> Result<Timeslot, MappingError> {
    match g.kind {
        GateKind::Measure => Ok(m.qubit(p.cell(m, g.qubits()[0])).readout_duration),
        GateKind::Cnot => {
            let (hc, ht) = cnot_cells(g, p, m)?;
            if strategy.uses_static_model() {
                return Ok(static_cnot_duration(manhattan(m.pos(hc), m.pos(ht)), m)?);
            }
            match (strategy.route_kind(), route) {
                (RouteKind::OneBend, Some(r)) => {
                    let j = r
                        .junction
                        .ok_or(MappingError::IllegalJunction { gate: g.id })?;
                    t.one_bend(hc, ht)
                        .iter()
                        .find(|b| b.junction == j)
                        .map(|b| b.duration)
                        .ok_or(MappingError::IllegalJunction { gate: g.id })
                }
                (RouteKind::BestPath, _) => Ok(t.best_path(hc, ht).duration),
                _ => Ok(t.delta(hc, ht)),
            }
        }
        _ => Ok(m.single_qubit_duration),
    }
}

/// Reliability `g.ε`: E^R for readouts, E^C (or best-path reliability) for
/// CNOTs, 1 for single-qubit gates.
pub fn gate_reliability(
    g: &Gate,
    p: &Placement,
    route: Option<&Route>,
    m: &GridMachine,
    t: &DerivedTables,
) -> Result<f64, MappingError> {
    match g.kind {
        GateKind::Measure => Ok(t.readout_rel(p.cell(m, g.qubits()[0]))),
        GateKind::Cnot => {
            let (hc, ht) = cnot_cells(g, p, m)?;
            let route = route.ok_or(MappingError::MissingRoute { gate: g.id })?;
            match route.junction {
                Some(j) => t
                    .cnot_rel(hc, ht, j)
                    .ok_or(MappingError::IllegalJunction { gate: g.id }),
                None => Ok(t.best_path(hc, ht).reliability),
            }
        }
        _ => Ok(1.0),
    }
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    // summing in a canonical order makes equal multisets bitwise equal
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// `ω Σ_readout ln ε + (1 - ω) Σ_cnot ln ε` over per-gate reliabilities.
pub fn reliability_objective(c: &Circuit, eps: &[f64], omega: f64) -> f64 {
    let (mut ro, mut cx) = (Vec::new(), Vec::new());
    for g in c.gates() {
        match g.kind {
            GateKind::Measure => ro.push(libm::log(eps[g.id])),
            GateKind::Cnot => cx.push(libm::log(eps[g.id])),
            _ => {}
        }
    }
    omega * sorted_sum(ro) + (1.0 - omega) * sorted_sum(cx)
}

/// `Π_readout ε^ω · Π_cnot ε^(1-ω)`, the product form of the objective.
pub fn reliability_product(c: &Circuit, eps: &[f64], omega: f64) -> f64 {
    let mut factors: Vec<f64> = c
        .gates()
        .iter()
        .filter_map(|g| match g.kind {
            GateKind::Measure => Some(libm::pow(eps[g.id], omega)),
            GateKind::Cnot => Some(libm::pow(eps[g.id], 1.0 - omega)),
            _ => None,
        })
        .collect();
    factors.sort_by(f64::total_cmp);
    factors.into_iter().product()
}

/// Objective value of a scheduled, routed mapping.
pub fn objective(c: &Circuit, schedule: &Schedule, eps: &[f64], strategy: &Strategy) -> f64 {
    if strategy.maximizes_reliability() {
        reliability_objective(c, eps, strategy.omega())
    } else {
        schedule.makespan() as f64
    }
}

/// Cells or rectangles a gate reserves while it runs.
pub fn footprint(
    g: &Gate,
    p: &Placement,
    route: Option<&Route>,
    strategy: &Strategy,
    m: &GridMachine,
) -> Result<Footprint, MappingError> {
    let kind = strategy.route_kind();
    if !g.is_cnot() {
        let pos = p.loc(g.qubits()[0]);
        return Ok(match kind {
            RouteKind::BestPath => Footprint::Cells(alloc::vec![m.cell(pos)]),
            _ => Footprint::Rects(alloc::vec![Rect::point(pos)]),
        });
    }
    let route = route.ok_or(MappingError::MissingRoute { gate: g.id })?;
    Ok(match kind {
        RouteKind::Rectangle => Footprint::Rects(alloc::vec![route.rect]),
        RouteKind::OneBend => {
            let (c, t) = g.cnot_pair().expect("cnot");
            let (pc, pt) = (p.loc(c), p.loc(t));
            let j = route
                .junction
                .ok_or(MappingError::IllegalJunction { gate: g.id })?;
            Footprint::Rects(alloc::vec![Rect::bounding(pc, j), Rect::bounding(j, pt)])
        }
        RouteKind::BestPath => Footprint::Cells(route.path.clone()),
    })
}

/// Upper bound on a gate's finish time, or `None` when the machine-wide
/// bound applies (`finish < M_T`).
pub fn coherence_limit(
    g: &Gate,
    p: &Placement,
    strategy: &Strategy,
    m: &GridMachine,
) -> Option<Timeslot> {
    if strategy.uses_static_model() {
        return None;
    }
    g.qubits().iter().map(|&q| m.qubit(p.cell(m, q)).t2).min()
}

pub fn coherence_ok(
    g: &Gate,
    p: &Placement,
    strategy: &Strategy,
    m: &GridMachine,
    finish: Timeslot,
) -> Result<(), MappingError> {
    match coherence_limit(g, p, strategy, m) {
        None if finish >= m.static_coherence_bound => Err(MappingError::Coherence {
            gate: g.id,
            finish,
            bound: m.static_coherence_bound,
        }),
        Some(bound) if finish > bound => Err(MappingError::Coherence {
            gate: g.id,
            finish,
            bound,
        }),
        _ => Ok(()),
    }
}

/// Deterministic list schedule of a placed, routed circuit; fails when a
/// gate cannot finish within its coherence bound.
pub fn canonical_schedule(
    c: &Circuit,
    dag: &DependencyDag,
    p: &Placement,
    routes: &RouteAssignment,
    strategy: &Strategy,
    m: &GridMachine,
    t: &DerivedTables,
) -> Result<Schedule, MappingError> {
    let mut dur = Vec::with_capacity(c.len());
    for g in c.gates() {
        dur.push(gate_duration(g, p, routes.get(g.id), strategy, m, t)?);
    }
    let schedule = if strategy.route_kind() == RouteKind::BestPath {
        let cells: Vec<Vec<usize>> = c
            .gates()
            .iter()
            .map(|g| match routes.get(g.id) {
                Some(r) => r.path.clone(),
                None => g.qubits().iter().map(|&q| p.cell(m, q)).collect(),
            })
            .collect();
        let mut res = OccupancyResources::new(&cells, m.num_qubits());
        list_schedule(dag, &dur, &mut res)
    } else {
        let fps = c
            .gates()
            .iter()
            .map(|g| footprint(g, p, routes.get(g.id), strategy, m))
            .collect::<Result<Vec<_>, _>>()?;
        let mut res = GeometricResources::new(&fps, m.my());
        list_schedule(dag, &dur, &mut res)
    };
    for g in c.gates() {
        coherence_ok(g, p, strategy, m, schedule.finish(g.id))?;
    }
    Ok(schedule)
}

/// Everything needed to turn a placement (plus junction choices) into a
/// scored [`Solution`].
pub struct Instance<'a> {
    pub circuit: &'a Circuit,
    pub dag: DependencyDag,
    pub machine: &'a GridMachine,
    pub tables: &'a DerivedTables,
    pub strategy: Strategy,
    /// Gate ids of the CNOTs, in circuit order.
    pub cnots: Vec<usize>,
}

impl<'a> Instance<'a> {
    pub fn new(
        circuit: &'a Circuit,
        machine: &'a GridMachine,
        tables: &'a DerivedTables,
        strategy: Strategy,
    ) -> Self {
        Self {
            dag: build_dag(circuit),
            cnots: circuit
                .gates()
                .iter()
                .filter(|g| g.is_cnot())
                .map(|g| g.id)
                .collect(),
            circuit,
            machine,
            tables,
            strategy,
        }
    }

    /// Routes for every CNOT; `choices[k]` is the junction index of the
    /// `k`-th CNOT (ignored unless routing is one-bend).
    pub fn routes(
        &self,
        p: &Placement,
        choices: &[usize],
    ) -> Result<RouteAssignment, MappingError> {
        let mut routes = alloc::vec![None; self.circuit.len()];
        for (k, &gid) in self.cnots.iter().enumerate() {
            let g = &self.circuit.gates()[gid];
            let choice = choices.get(k).copied().unwrap_or(0);
            routes[gid] = Some(build_route(
                g,
                p,
                &self.strategy,
                self.machine,
                self.tables,
                choice,
            )?);
        }
        Ok(RouteAssignment { routes })
    }

    pub fn eps(&self, p: &Placement, routes: &RouteAssignment) -> Result<Vec<f64>, MappingError> {
        self.circuit
            .gates()
            .iter()
            .map(|g| gate_reliability(g, p, routes.get(g.id), self.machine, self.tables))
            .collect()
    }

    /// Scores one complete assignment. Coherence failures surface as
    /// [`MappingError::Coherence`].
    pub fn evaluate(&self, p: &Placement, choices: &[usize]) -> Result<Solution, MappingError> {
        let routes = self.routes(p, choices)?;
        let schedule = canonical_schedule(
            self.circuit,
            &self.dag,
            p,
            &routes,
            &self.strategy,
            self.machine,
            self.tables,
        )?;
        let eps = self.eps(p, &routes)?;
        let objective_value = objective(self.circuit, &schedule, &eps, &self.strategy);
        Ok(Solution {
            strategy: self.strategy,
            placement: p.clone(),
            routes,
            schedule,
            objective_value,
            optimal: false,
        })
    }

    /// Number of junction alternatives for the `k`-th CNOT under `p`.
    pub fn junction_options(&self, p: &Placement, k: usize) -> usize {
        if self.strategy.route_kind() != RouteKind::OneBend {
            return 1;
        }
        let g = &self.circuit.gates()[self.cnots[k]];
        let (c, t) = g.cnot_pair().expect("cnot");
        let (pc, pt) = (p.loc(c), p.loc(t));
        if pc == pt || pc.x == pt.x || pc.y == pt.y {
            1
        } else {
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::MachineDefaults;
    use crate::tables::build_tables;

    #[test]
    fn config_invariants() {
        assert_eq!(
            ProblemConfig::new(Variant::RSmtStar, Routing::RectangleReservation),
            Err(ConfigError::ReliabilityNeedsOneBend)
        );
        let cfg = ProblemConfig::new(Variant::RSmtStar, Routing::OneBend).unwrap();
        assert!(cfg.with_omega(1.5).is_err());
        assert!(cfg.with_omega(1.0).is_ok());
    }

    #[test]
    fn objective_arithmetic() {
        // three CNOTs at 0.9, four readouts at 0.93
        let mut c = Circuit::new(5, 4);
        c.cx(0, 4).unwrap();
        c.cx(1, 4).unwrap();
        c.cx(2, 4).unwrap();
        for q in 0..4 {
            c.measure(q, q).unwrap();
        }
        let eps = [0.9, 0.9, 0.9, 0.93, 0.93, 0.93, 0.93];
        let v = reliability_objective(&c, &eps, 0.5);
        let expected = 0.5 * 4.0 * 0.93f64.ln() + 0.5 * 3.0 * 0.9f64.ln();
        assert!((v - expected).abs() < 1e-12);
        assert!((v - (-0.3032)).abs() < 5e-5);
        // omega = 1 drops CNOT terms
        let w1 = reliability_objective(&c, &eps, 1.0);
        assert!((w1 - 4.0 * 0.93f64.ln()).abs() < 1e-12);
    }

    fn uniform(mx: usize, my: usize, e: f64) -> GridMachine {
        GridMachine::uniform(
            mx,
            my,
            MachineDefaults {
                cnot_error: e,
                ..MachineDefaults::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn durations_per_variant() {
        let m = uniform(1, 5, 0.1);
        let t = build_tables(&m, false).unwrap();
        let mut c = Circuit::new(2, 0);
        c.cx(0, 1).unwrap();
        let g = &c.gates()[0];
        let adjacent = Placement::new(alloc::vec![Pos::new(0, 0), Pos::new(0, 1)]);
        let far = Placement::new(alloc::vec![Pos::new(0, 0), Pos::new(0, 4)]);
        for v in [Variant::TSmt, Variant::TSmtStar] {
            let s = Strategy::Exact(ProblemConfig::new(v, Routing::RectangleReservation).unwrap());
            assert_eq!(gate_duration(g, &adjacent, None, &s, &m, &t).unwrap(), 2);
            // d = 4: 2·3·6 + 2
            assert_eq!(gate_duration(g, &far, None, &s, &m, &t).unwrap(), 38);
        }
        let same = Placement::new(alloc::vec![Pos::new(0, 0), Pos::new(0, 0)]);
        let s = Strategy::Exact(ProblemConfig::new(Variant::TSmt, Routing::OneBend).unwrap());
        assert!(matches!(
            gate_duration(g, &same, None, &s, &m, &t),
            Err(MappingError::SameCell { .. })
        ));
    }

    #[test]
    fn reliabilities_per_gate() {
        let m = GridMachine::from_spec(&crate::MachineSpec::uniform(
            3,
            3,
            MachineDefaults {
                cnot_error: 0.1,
                readout_error: 0.07,
                ..MachineDefaults::default()
            },
        ))
        .unwrap();
        let t = build_tables(&m, false).unwrap();
        let s = Strategy::Exact(ProblemConfig::new(Variant::RSmtStar, Routing::OneBend).unwrap());
        let mut c = Circuit::new(2, 1);
        c.cx(0, 1).unwrap();
        c.measure(0, 0).unwrap();
        let inst = Instance::new(&c, &m, &t, s);
        let adj = Placement::new(alloc::vec![Pos::new(0, 0), Pos::new(0, 1)]);
        let sol = inst.evaluate(&adj, &[]).unwrap();
        let eps = inst.eps(&adj, &sol.routes).unwrap();
        assert!((eps[0] - 0.9).abs() < 1e-15);
        assert!((eps[1] - 0.93).abs() < 1e-15);
        let diag = Placement::new(alloc::vec![Pos::new(0, 0), Pos::new(1, 1)]);
        for choice in 0..2 {
            let routes = inst.routes(&diag, &[choice]).unwrap();
            let e = inst.eps(&diag, &routes).unwrap();
            assert!((e[0] - 0.6561).abs() < 1e-12);
        }
        assert!(inst.routes(&diag, &[2]).is_err());
    }
}

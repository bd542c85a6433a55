//! Greedy placement (vertex- and edge-ordered) over best-path routes.

use alloc::vec::Vec;

use crate::circuit::{build_program_graph, Circuit, ProgramGraph};
use crate::machine::GridMachine;
use crate::mapping::{
    HeuristicConfig, Instance, MappingError, Placement, Policy, Solution, Strategy,
};
use crate::tables::DerivedTables;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeuristicError {
    #[error("{program} program qubits do not fit on {hardware} hardware qubits")]
    TooManyQubits { program: usize, hardware: usize },
    #[error("configuration and tables disagree on counting return swaps")]
    TablesMismatch,
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

/// Partial placement plus the per-qubit directed CNOT counts that drive the
/// placement score.
struct Greedy<'a> {
    m: &'a GridMachine,
    t: &'a DerivedTables,
    /// `(neighbour, cnots q→n, cnots n→q)` per program qubit.
    adj: Vec<Vec<(usize, usize, usize)>>,
    cell_of: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl<'a> Greedy<'a> {
    fn new(
        pg: &ProgramGraph,
        m: &'a GridMachine,
        t: &'a DerivedTables,
    ) -> Result<Self, HeuristicError> {
        let n = pg.num_qubits();
        if n > m.num_qubits() {
            return Err(HeuristicError::TooManyQubits {
                program: n,
                hardware: m.num_qubits(),
            });
        }
        let mut adj = alloc::vec![Vec::new(); n];
        for &(a, b) in pg.edges().keys() {
            let ab = pg.directed().get(&(a, b)).copied().unwrap_or(0);
            let ba = pg.directed().get(&(b, a)).copied().unwrap_or(0);
            adj[a].push((b, ab, ba));
            adj[b].push((a, ba, ab));
        }
        Ok(Self {
            m,
            t,
            adj,
            cell_of: alloc::vec![None; n],
            used: alloc::vec![false; m.num_qubits()],
        })
    }

    fn set(&mut self, q: usize, h: usize) {
        self.cell_of[q] = Some(h);
        self.used[h] = true;
    }

    fn free_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.m.num_qubits()).filter(|&h| !self.used[h])
    }

    fn has_placed_neighbour(&self, q: usize) -> bool {
        self.adj[q]
            .iter()
            .any(|&(r, _, _)| self.cell_of[r].is_some())
    }

    /// Σ over placed neighbours of count-weighted best-path log-reliability,
    /// in the direction the CNOTs actually run.
    fn score(&self, q: usize, h: usize) -> f64 {
        let mut s = 0.0;
        for &(r, out, inc) in &self.adj[q] {
            let Some(hr) = self.cell_of[r] else { continue };
            if out > 0 {
                s += out as f64 * libm::log(self.t.best_path(h, hr).reliability);
            }
            if inc > 0 {
                s += inc as f64 * libm::log(self.t.best_path(hr, h).reliability);
            }
        }
        s
    }

    /// Free cell maximising the score; ties by E^R, then lower cell.
    fn best_cell_for(&self, q: usize) -> usize {
        let mut best: Option<(f64, f64, usize)> = None;
        for h in self.free_cells() {
            let cand = (self.score(q, h), self.t.readout_rel(h), h);
            let better = match best {
                None => true,
                Some((s, r, _)) => cand.0 > s || (cand.0 == s && cand.1 > r),
            };
            if better {
                best = Some(cand);
            }
        }
        best.expect("a free cell exists").2
    }

    /// Free cell of maximal grid degree, ties by E^R, then lower cell.
    fn seed_cell(&self) -> usize {
        self.free_cells()
            .max_by(|&a, &b| {
                self.m
                    .grid_degree(a)
                    .cmp(&self.m.grid_degree(b))
                    .then(self.t.readout_rel(a).total_cmp(&self.t.readout_rel(b)))
                    .then(b.cmp(&a))
            })
            .expect("a free cell exists")
    }

    /// Remaining qubits onto the best-E^R free cells, in qubit order.
    fn place_rest(&mut self) {
        let mut cells: Vec<usize> = self.free_cells().collect();
        cells.sort_by(|&a, &b| {
            self.t
                .readout_rel(b)
                .total_cmp(&self.t.readout_rel(a))
                .then(a.cmp(&b))
        });
        let mut cells = cells.into_iter();
        for q in 0..self.cell_of.len() {
            if self.cell_of[q].is_none() {
                let h = cells.next().expect("enough free cells");
                self.set(q, h);
            }
        }
    }

    fn finish(self) -> Placement {
        let cells: Vec<usize> = self.cell_of.iter().map(|h| h.expect("placed")).collect();
        Placement::from_cells(self.m, &cells)
    }
}

/// Vertex-ordered greedy placement.
///
/// The highest-degree qubit seeds on a maximal-grid-degree cell with the best
/// readout. The highest-degree qubit adjacent to the placed set goes next, on
/// the free cell with the best summed log-reliability to its placed
/// neighbours. Disconnected components re-seed; CNOT-free qubits go last.
pub fn greedy_vertex_map(
    pg: &ProgramGraph,
    m: &GridMachine,
    t: &DerivedTables,
) -> Result<Placement, HeuristicError> {
    let mut g = Greedy::new(pg, m, t)?;
    let order = pg.by_degree();
    loop {
        let frontier = order
            .iter()
            .copied()
            .find(|&q| g.cell_of[q].is_none() && g.has_placed_neighbour(q));
        if let Some(q) = frontier {
            let h = g.best_cell_for(q);
            g.set(q, h);
            continue;
        }
        match order
            .iter()
            .copied()
            .find(|&q| g.cell_of[q].is_none() && pg.degree(q) > 0)
        {
            Some(q) => {
                let h = g.seed_cell();
                g.set(q, h);
            }
            None => break,
        }
    }
    g.place_rest();
    Ok(g.finish())
}

/// Edge-ordered greedy placement.
///
/// The heaviest program edge lands on the free hardware edge maximising
/// `(1 - cnot_error) · E^R(a) · E^R(b)`, lower program qubit on the lower
/// cell. Program edges are then taken by descending weight: any edge with one
/// placed endpoint places the other like [`greedy_vertex_map`] does.
pub fn greedy_edge_map(
    pg: &ProgramGraph,
    m: &GridMachine,
    t: &DerivedTables,
) -> Result<Placement, HeuristicError> {
    let mut g = Greedy::new(pg, m, t)?;
    let mut edges: Vec<((usize, usize), usize)> =
        pg.edges().iter().map(|(&k, &w)| (k, w)).collect();
    edges.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    loop {
        let grow = edges
            .iter()
            .find(|((a, b), _)| g.cell_of[*a].is_some() != g.cell_of[*b].is_some());
        if let Some(&((a, b), _)) = grow {
            let q = if g.cell_of[a].is_none() { a } else { b };
            let h = g.best_cell_for(q);
            g.set(q, h);
            continue;
        }
        let Some(&((a, b), _)) = edges
            .iter()
            .find(|((a, b), _)| g.cell_of[*a].is_none() && g.cell_of[*b].is_none())
        else {
            break;
        };
        let seed = m
            .edges()
            .iter()
            .filter(|e| !g.used[e.a] && !g.used[e.b])
            .map(|e| {
                (
                    e,
                    (1.0 - e.cnot_error) * t.readout_rel(e.a) * t.readout_rel(e.b),
                )
            })
            .fold(None, |best: Option<(&_, f64)>, (e, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((e, v)),
            });
        match seed {
            Some((e, _)) => {
                let (lo, hi) = (e.a.min(e.b), e.a.max(e.b));
                g.set(a, lo);
                g.set(b, hi);
            }
            None => {
                let h = g.seed_cell();
                g.set(a, h);
            }
        }
    }
    g.place_rest();
    Ok(g.finish())
}

/// Routes every CNOT along its best path and list-schedules with cell
/// occupancy under `placement`.
pub fn compile_with_placement(
    c: &Circuit,
    m: &GridMachine,
    t: &DerivedTables,
    cfg: &HeuristicConfig,
    placement: &Placement,
) -> Result<Solution, HeuristicError> {
    if cfg.count_return_swaps != t.count_return_swaps() {
        return Err(HeuristicError::TablesMismatch);
    }
    let inst = Instance::new(c, m, t, Strategy::Heuristic(*cfg));
    Ok(inst.evaluate(placement, &[])?)
}

pub fn heuristic_compile(
    c: &Circuit,
    m: &GridMachine,
    t: &DerivedTables,
    cfg: &HeuristicConfig,
) -> Result<Solution, HeuristicError> {
    let pg = build_program_graph(c);
    let placement = match cfg.policy {
        Policy::GreedyV => greedy_vertex_map(&pg, m, t)?,
        Policy::GreedyE => greedy_edge_map(&pg, m, t)?,
    };
    compile_with_placement(c, m, t, cfg, &placement)
}

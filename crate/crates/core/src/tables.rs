//! Tables derived from a calibrated machine: CNOT durations (Δ), readout
//! reliabilities (E^R), one-bend route reliabilities (E^C) and the most
//! reliable route between every ordered pair of hardware qubits.
//!
//! A route `h0 .. hk` moves the control-side state along the first `k - 1`
//! edges with SWAPs, runs the CNOT on the last edge, and swaps back.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::machine::{one_bend_junctions, GridMachine, Junctions, MachineError, Pos};
use crate::Timeslot;

fn edge_checked(m: &GridMachine, a: usize, b: usize) -> Result<&crate::HardwareEdge, MachineError> {
    m.edge_between(a, b)
        .ok_or_else(|| MachineError::NotAdjacent(m.pos(a), m.pos(b)))
}

/// Success probability of a routed CNOT.
///
/// Each forward SWAP edge contributes `(1 - e)^3` and the CNOT edge
/// `(1 - e)`. With `count_return_swaps` the forward SWAP factor is applied a
/// second time for the trip back.
pub fn path_reliability(
    path: &[usize],
    m: &GridMachine,
    count_return_swaps: bool,
) -> Result<f64, MachineError> {
    if path.len() < 2 {
        return Err(MachineError::ShortPath);
    }
    let k = path.len() - 1;
    let mut rel = 1.0;
    for w in path[..k].windows(2) {
        let r = 1.0 - edge_checked(m, w[0], w[1])?.cnot_error;
        let swap = r * r * r;
        rel *= swap;
        if count_return_swaps {
            rel *= swap;
        }
    }
    rel *= 1.0 - edge_checked(m, path[k - 1], path[k])?.cnot_error;
    Ok(rel)
}

/// Calibrated duration of a routed CNOT: each forward SWAP edge costs three
/// CNOT durations, once out and once back, plus the CNOT edge.
pub fn path_duration(path: &[usize], m: &GridMachine) -> Result<Timeslot, MachineError> {
    if path.len() < 2 {
        return Err(MachineError::ShortPath);
    }
    let k = path.len() - 1;
    let mut total = 0;
    for w in path[..k].windows(2) {
        total += 2 * 3 * edge_checked(m, w[0], w[1])?.cnot_duration;
    }
    Ok(total + edge_checked(m, path[k - 1], path[k])?.cnot_duration)
}

fn straight(m: &GridMachine, from: Pos, to: Pos, out: &mut Vec<usize>) {
    let (mut x, mut y) = (from.x, from.y);
    loop {
        out.push(m.cell(Pos::new(x, y)));
        if (x, y) == (to.x, to.y) {
            break;
        }
        if x != to.x {
            x = if to.x > x { x + 1 } else { x - 1 };
        } else {
            y = if to.y > y { y + 1 } else { y - 1 };
        }
    }
}

/// Vertex sequence of the one-bend route `c -> junction -> t`.
pub fn one_bend_path(m: &GridMachine, c: Pos, t: Pos, junction: Pos) -> Vec<usize> {
    let mut out = Vec::new();
    straight(m, c, junction, &mut out);
    out.pop();
    straight(m, junction, t, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneBendRoute {
    pub junction: Pos,
    pub path: Vec<usize>,
    pub reliability: f64,
    pub duration: Timeslot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestPath {
    pub path: Vec<usize>,
    pub reliability: f64,
    pub duration: Timeslot,
}

#[derive(Debug, Clone)]
pub struct DerivedTables {
    n: usize,
    count_return_swaps: bool,
    /// Δ, row-major `n × n`; zero on the diagonal.
    delta: Vec<Timeslot>,
    /// Index into the pair's one-bend list of the route Δ uses.
    delta_route: Vec<u8>,
    readout_rel: Vec<f64>,
    one_bend: Vec<Vec<OneBendRoute>>,
    best: Vec<BestPath>,
    max_readout_rel: f64,
    max_cnot_rel: f64,
}

impl DerivedTables {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn count_return_swaps(&self) -> bool {
        self.count_return_swaps
    }

    /// Δ: calibrated duration of a CNOT from `h1` to `h2`.
    pub fn delta(&self, h1: usize, h2: usize) -> Timeslot {
        self.delta[h1 * self.n + h2]
    }

    /// The one-bend route Δ is measured along.
    pub fn delta_route(&self, h1: usize, h2: usize) -> &OneBendRoute {
        let i = h1 * self.n + h2;
        &self.one_bend[i][self.delta_route[i] as usize]
    }

    /// E^R.
    pub fn readout_rel(&self, h: usize) -> f64 {
        self.readout_rel[h]
    }

    /// One-bend routes for an ordered pair, in junction order.
    pub fn one_bend(&self, h1: usize, h2: usize) -> &[OneBendRoute] {
        &self.one_bend[h1 * self.n + h2]
    }

    /// E^C for the route through `junction`, if it is legal for the pair.
    pub fn cnot_rel(&self, h1: usize, h2: usize, junction: Pos) -> Option<f64> {
        self.one_bend(h1, h2)
            .iter()
            .find(|r| r.junction == junction)
            .map(|r| r.reliability)
    }

    pub fn best_path(&self, h1: usize, h2: usize) -> &BestPath {
        &self.best[h1 * self.n + h2]
    }

    pub fn max_readout_rel(&self) -> f64 {
        self.max_readout_rel
    }

    /// Largest E^C entry over all pairs and junctions.
    pub fn max_cnot_rel(&self) -> f64 {
        self.max_cnot_rel
    }
}

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source Dijkstra on `-ln(1 - cnot_error)` edge weights.
fn dijkstra(m: &GridMachine, weight: &[f64], source: usize) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = m.num_qubits();
    let mut dist = alloc::vec![f64::INFINITY; n];
    let mut pred = alloc::vec![None; n];
    let mut done = alloc::vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        node: source,
    });
    while let Some(Entry { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        for nb in m.neighbors(node) {
            let w = weight[m.edge_index(node, nb).expect("neighbor edge")];
            let c = cost + w;
            if c < dist[nb] {
                dist[nb] = c;
                pred[nb] = Some(node);
                heap.push(Entry { cost: c, node: nb });
            }
        }
    }
    (dist, pred)
}

fn tree_path(pred: &[Option<usize>], source: usize, to: usize) -> Vec<usize> {
    let mut path = alloc::vec![to];
    let mut cur = to;
    while cur != source {
        cur = pred[cur].expect("grid is connected");
        path.push(cur);
    }
    path.reverse();
    path
}

/// Most reliable route from every source, per [`path_reliability`].
///
/// Forward edges count three times (a SWAP) and the final edge once, so the
/// route is the Dijkstra shortest path to some neighbor `u` of the target
/// followed by the hop `u -> t`, minimising `3·dist(u) + w(u, t)` (`6·dist`
/// when return swaps are counted).
fn best_paths_from(
    m: &GridMachine,
    weight: &[f64],
    source: usize,
    count_return_swaps: bool,
) -> Result<Vec<BestPath>, MachineError> {
    let (dist, pred) = dijkstra(m, weight, source);
    let factor = if count_return_swaps { 6.0 } else { 3.0 };
    let mut out = Vec::with_capacity(m.num_qubits());
    for t in 0..m.num_qubits() {
        if t == source {
            out.push(BestPath {
                path: alloc::vec![source],
                reliability: 1.0,
                duration: 0,
            });
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for u in m.neighbors(t) {
            // a tree path through t is never better than stopping at t
            if u != source && tree_path(&pred, source, u).contains(&t) {
                continue;
            }
            let cost = factor * dist[u] + weight[m.edge_index(u, t).expect("neighbor edge")];
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, u));
            }
        }
        let (_, u) = best.expect("grid is connected");
        let mut path = tree_path(&pred, source, u);
        path.push(t);
        out.push(BestPath {
            reliability: path_reliability(&path, m, count_return_swaps)?,
            duration: path_duration(&path, m)?,
            path,
        });
    }
    Ok(out)
}

/// Builds all derived tables. `count_return_swaps` selects the reliability
/// model for E^C and best paths; durations always include the return trip.
pub fn build_tables(
    m: &GridMachine,
    count_return_swaps: bool,
) -> Result<DerivedTables, MachineError> {
    let n = m.num_qubits();
    let mut delta = alloc::vec![0; n * n];
    let mut delta_route = alloc::vec![0u8; n * n];
    let mut one_bend = Vec::with_capacity(n * n);
    let mut max_cnot_rel: f64 = 0.0;
    for h1 in 0..n {
        for h2 in 0..n {
            if h1 == h2 {
                one_bend.push(Vec::new());
                continue;
            }
            let (c, t) = (m.pos(h1), m.pos(h2));
            let routes = match one_bend_junctions(c, t)? {
                Junctions::Straight(j) => alloc::vec![j],
                Junctions::Bent(a, b) => alloc::vec![a, b],
            }
            .into_iter()
            .map(|junction| {
                let path = one_bend_path(m, c, t, junction);
                Ok(OneBendRoute {
                    junction,
                    reliability: path_reliability(&path, m, count_return_swaps)?,
                    duration: path_duration(&path, m)?,
                    path,
                })
            })
            .collect::<Result<Vec<_>, MachineError>>()?;
            // minimum duration, first (lexicographically smaller) junction on ties
            let (idx, route) = routes
                .iter()
                .enumerate()
                .min_by_key(|(i, r)| (r.duration, *i))
                .expect("at least one route");
            delta[h1 * n + h2] = route.duration;
            delta_route[h1 * n + h2] = idx as u8;
            for r in &routes {
                max_cnot_rel = max_cnot_rel.max(r.reliability);
            }
            one_bend.push(routes);
        }
    }

    let weight: Vec<f64> = m
        .edges()
        .iter()
        .map(|e| -libm::log(1.0 - e.cnot_error))
        .collect();
    let mut best = Vec::with_capacity(n * n);
    for s in 0..n {
        best.extend(best_paths_from(m, &weight, s, count_return_swaps)?);
    }

    let readout_rel: Vec<f64> = (0..n).map(|h| m.readout_reliability(h)).collect();
    let max_readout_rel = readout_rel.iter().copied().fold(0.0, f64::max);
    Ok(DerivedTables {
        n,
        count_return_swaps,
        delta,
        delta_route,
        readout_rel,
        one_bend,
        best,
        max_readout_rel,
        max_cnot_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{static_cnot_duration, MachineDefaults, MachineSpec};
    use crate::manhattan;

    fn uniform(mx: usize, my: usize, e: f64, dur: Timeslot) -> GridMachine {
        GridMachine::uniform(
            mx,
            my,
            MachineDefaults {
                cnot_error: e,
                cnot_duration: dur,
                static_tau_cnot: dur,
                ..MachineDefaults::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn footnote_arithmetic() {
        let m = uniform(3, 3, 0.1, 2);
        let path = [0, 1, 2];
        let rel = path_reliability(&path, &m, false).unwrap();
        assert!((rel - 0.6561).abs() < 1e-12);
        let strict = path_reliability(&path, &m, true).unwrap();
        assert!((strict - 0.6561 * 0.729).abs() < 1e-12);
        assert!((path_reliability(&[0, 1], &m, false).unwrap() - 0.9).abs() < 1e-15);
        assert!(path_reliability(&[0, 2], &m, false).is_err());
    }

    #[test]
    fn uniform_delta_matches_static_formula() {
        let m = uniform(3, 4, 0.05, 2);
        let t = build_tables(&m, false).unwrap();
        for h1 in 0..m.num_qubits() {
            for h2 in 0..m.num_qubits() {
                if h1 == h2 {
                    continue;
                }
                let d = manhattan(m.pos(h1), m.pos(h2));
                assert_eq!(t.delta(h1, h2), static_cnot_duration(d, &m).unwrap());
                assert_eq!(t.delta(h1, h2), t.delta(h2, h1));
            }
        }
    }

    #[test]
    fn adjacent_pair_has_single_route() {
        let m = uniform(2, 2, 0.1, 2);
        let t = build_tables(&m, false).unwrap();
        let routes = t.one_bend(0, 1);
        assert_eq!(routes.len(), 1);
        assert!((routes[0].reliability - 0.9).abs() < 1e-15);
        assert_eq!(t.best_path(0, 1).path, alloc::vec![0, 1]);
    }

    #[test]
    fn one_bend_paths_follow_the_rectangle() {
        let m = uniform(3, 3, 0.1, 2);
        let p = one_bend_path(&m, Pos::new(0, 0), Pos::new(1, 2), Pos::new(0, 2));
        assert_eq!(p, alloc::vec![0, 1, 2, 5]);
        let p = one_bend_path(&m, Pos::new(0, 0), Pos::new(1, 2), Pos::new(1, 0));
        assert_eq!(p, alloc::vec![0, 3, 4, 5]);
        let p = one_bend_path(&m, Pos::new(2, 1), Pos::new(0, 1), Pos::new(2, 1));
        assert_eq!(p, alloc::vec![7, 4, 1]);
    }

    #[test]
    fn best_path_avoids_bad_edge() {
        // route via (0,1)-(0,2) carries a 0.5 edge; the other L is clean
        let spec = MachineSpec::uniform(
            3,
            3,
            MachineDefaults {
                cnot_error: 0.02,
                ..MachineDefaults::default()
            },
        )
        .edge(Pos::new(0, 1), Pos::new(0, 2), 0.5);
        let m = GridMachine::from_spec(&spec).unwrap();
        let t = build_tables(&m, false).unwrap();
        let (c, tg) = (m.cell(Pos::new(0, 0)), m.cell(Pos::new(1, 2)));
        let bad = t.cnot_rel(c, tg, Pos::new(0, 2)).unwrap();
        let best = t.best_path(c, tg);
        assert!(best.reliability > bad);
        let bad_edge = (m.cell(Pos::new(0, 1)), m.cell(Pos::new(0, 2)));
        assert!(!best
            .path
            .windows(2)
            .any(|w| (w[0], w[1]) == bad_edge || (w[1], w[0]) == bad_edge));
    }

    #[test]
    fn last_hop_weighting_is_respected() {
        // both two-hop routes from (0,0) to (1,1) have one edge at 0.3;
        // the better one puts it on the final CNOT edge, not under a SWAP
        let spec = MachineSpec::uniform(
            2,
            2,
            MachineDefaults {
                cnot_error: 0.01,
                ..MachineDefaults::default()
            },
        )
        .edge(Pos::new(0, 1), Pos::new(1, 1), 0.3)
        .edge(Pos::new(0, 0), Pos::new(1, 0), 0.3);
        let m = GridMachine::from_spec(&spec).unwrap();
        let t = build_tables(&m, false).unwrap();
        let best = t.best_path(0, 3);
        assert_eq!(best.path, alloc::vec![0, 1, 3]);
        let expected = 0.99f64.powi(3) * 0.7;
        assert!((best.reliability - expected).abs() < 1e-12);
    }
}

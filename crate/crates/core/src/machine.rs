//! Grid hardware model built from a calibration snapshot.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::Timeslot;

/// Grid coordinates. Ordering is lexicographic `(x, y)`, which is also the
/// order of hardware qubit ids (`id = x * my + y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pos {
    pub x: usize,
    pub y: usize,
}

impl Pos {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// L1 distance between grid positions.
pub fn manhattan(a: Pos, b: Pos) -> usize {
    a.x.abs_diff(b.x) + a.y.abs_diff(b.y)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MachineError {
    #[error("grid dimensions must be positive, got {mx}x{my}")]
    EmptyGrid { mx: usize, my: usize },
    #[error("{what} = {value} is not a probability in [0, 1)")]
    Probability { what: &'static str, value: f64 },
    #[error("{what} must be positive")]
    NonPositive { what: &'static str },
    #[error("cell {0} is outside the grid")]
    OutOfGrid(Pos),
    #[error("cell {0} listed twice")]
    DuplicateCell(Pos),
    #[error("edge {0}-{1} listed twice")]
    DuplicateEdge(Pos, Pos),
    #[error("cells {0} and {1} are not grid-adjacent")]
    NotAdjacent(Pos, Pos),
    #[error("CNOT operands mapped to the same cell (distance 0)")]
    ZeroDistance,
    #[error("path needs at least two vertices")]
    ShortPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardwareQubit {
    pub id: usize,
    pub pos: Pos,
    /// Coherence time in timeslots.
    pub t2: Timeslot,
    pub readout_error: f64,
    pub readout_duration: Timeslot,
}

/// Undirected grid edge with `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareEdge {
    pub a: usize,
    pub b: usize,
    pub cnot_error: f64,
    pub cnot_duration: Timeslot,
}

/// Calibration values applied wherever a document gives no override.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MachineDefaults {
    pub t2: Timeslot,
    pub readout_error: f64,
    pub readout_duration: Timeslot,
    pub cnot_error: f64,
    pub cnot_duration: Timeslot,
    pub single_qubit_duration: Timeslot,
    pub single_qubit_error: f64,
    pub static_tau_cnot: Timeslot,
    pub static_coherence_bound: Timeslot,
}

impl Default for MachineDefaults {
    fn default() -> Self {
        Self {
            t2: 1000,
            readout_error: 0.07,
            readout_duration: 12,
            cnot_error: 0.04,
            cnot_duration: 2,
            single_qubit_duration: 1,
            single_qubit_error: 0.001,
            static_tau_cnot: 2,
            static_coherence_bound: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GridDims {
    pub mx: usize,
    pub my: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct QubitOverride {
    pub x: usize,
    pub y: usize,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub t2: Option<Timeslot>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub readout_error: Option<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub readout_duration: Option<Timeslot>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct EdgeOverride {
    pub a: [usize; 2],
    pub b: [usize; 2],
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub cnot_error: Option<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub cnot_duration: Option<Timeslot>,
}

/// Unvalidated calibration document: grid size, defaults and overrides.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct MachineSpec {
    pub grid: GridDims,
    #[cfg_attr(feature = "serde", serde(default))]
    pub defaults: MachineDefaults,
    #[cfg_attr(feature = "serde", serde(default))]
    pub qubits: Vec<QubitOverride>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub edges: Vec<EdgeOverride>,
}

impl MachineSpec {
    pub fn uniform(mx: usize, my: usize, defaults: MachineDefaults) -> Self {
        Self {
            grid: GridDims { mx, my },
            defaults,
            qubits: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn edge(mut self, a: Pos, b: Pos, cnot_error: f64) -> Self {
        self.edges.push(EdgeOverride {
            a: [a.x, a.y],
            b: [b.x, b.y],
            cnot_error: Some(cnot_error),
            cnot_duration: None,
        });
        self
    }

    pub fn readout(mut self, at: Pos, readout_error: f64) -> Self {
        self.qubits.push(QubitOverride {
            x: at.x,
            y: at.y,
            t2: None,
            readout_error: Some(readout_error),
            readout_duration: None,
        });
        self
    }
}

fn probability(what: &'static str, value: f64) -> Result<f64, MachineError> {
    if (0.0..1.0).contains(&value) {
        Ok(value)
    } else {
        Err(MachineError::Probability { what, value })
    }
}

fn positive(what: &'static str, value: Timeslot) -> Result<Timeslot, MachineError> {
    if value == 0 {
        Err(MachineError::NonPositive { what })
    } else {
        Ok(value)
    }
}

/// Validated `mx × my` grid machine.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMachine {
    mx: usize,
    my: usize,
    qubits: Vec<HardwareQubit>,
    edges: Vec<HardwareEdge>,
    /// `adjacency[h]` holds `(neighbor, edge index)` sorted by neighbor.
    adjacency: Vec<Vec<(usize, usize)>>,
    pub single_qubit_duration: Timeslot,
    pub single_qubit_error: f64,
    pub static_tau_cnot: Timeslot,
    pub static_coherence_bound: Timeslot,
}

impl GridMachine {
    pub fn uniform(mx: usize, my: usize, defaults: MachineDefaults) -> Result<Self, MachineError> {
        Self::from_spec(&MachineSpec::uniform(mx, my, defaults))
    }

    pub fn from_spec(spec: &MachineSpec) -> Result<Self, MachineError> {
        let GridDims { mx, my } = spec.grid;
        if mx == 0 || my == 0 {
            return Err(MachineError::EmptyGrid { mx, my });
        }
        let d = &spec.defaults;
        probability("defaults.readout_error", d.readout_error)?;
        probability("defaults.cnot_error", d.cnot_error)?;
        probability("defaults.single_qubit_error", d.single_qubit_error)?;
        positive("defaults.t2", d.t2)?;
        positive("defaults.readout_duration", d.readout_duration)?;
        positive("defaults.cnot_duration", d.cnot_duration)?;
        positive("defaults.single_qubit_duration", d.single_qubit_duration)?;
        positive("defaults.static_tau_cnot", d.static_tau_cnot)?;
        positive("defaults.static_coherence_bound", d.static_coherence_bound)?;

        let in_grid = |x: usize, y: usize| -> Result<Pos, MachineError> {
            let p = Pos::new(x, y);
            if x < mx && y < my {
                Ok(p)
            } else {
                Err(MachineError::OutOfGrid(p))
            }
        };

        let mut qubits: Vec<HardwareQubit> = (0..mx * my)
            .map(|id| HardwareQubit {
                id,
                pos: Pos::new(id / my, id % my),
                t2: d.t2,
                readout_error: d.readout_error,
                readout_duration: d.readout_duration,
            })
            .collect();
        let mut seen = BTreeSet::new();
        for o in &spec.qubits {
            let p = in_grid(o.x, o.y)?;
            if !seen.insert(p) {
                return Err(MachineError::DuplicateCell(p));
            }
            let q = &mut qubits[p.x * my + p.y];
            if let Some(t2) = o.t2 {
                q.t2 = positive("qubit t2", t2)?;
            }
            if let Some(e) = o.readout_error {
                q.readout_error = probability("qubit readout_error", e)?;
            }
            if let Some(r) = o.readout_duration {
                q.readout_duration = positive("qubit readout_duration", r)?;
            }
        }

        let mut edges = Vec::with_capacity(mx * (my - 1) + my * (mx - 1));
        for id in 0..mx * my {
            let p = qubits[id].pos;
            // right (y+1) then down (x+1) keeps edges sorted by (a, b)
            if p.y + 1 < my {
                edges.push((id, id + 1));
            }
            if p.x + 1 < mx {
                edges.push((id, id + my));
            }
        }
        edges.sort_unstable();
        let mut edges: Vec<HardwareEdge> = edges
            .into_iter()
            .map(|(a, b)| HardwareEdge {
                a,
                b,
                cnot_error: d.cnot_error,
                cnot_duration: d.cnot_duration,
            })
            .collect();
        let mut adjacency = alloc::vec![Vec::new(); mx * my];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, i));
            adjacency[e.b].push((e.a, i));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }

        let mut seen_edges = BTreeSet::new();
        for o in &spec.edges {
            let pa = in_grid(o.a[0], o.a[1])?;
            let pb = in_grid(o.b[0], o.b[1])?;
            if manhattan(pa, pb) != 1 {
                return Err(MachineError::NotAdjacent(pa, pb));
            }
            let key = (pa.min(pb), pa.max(pb));
            if !seen_edges.insert(key) {
                return Err(MachineError::DuplicateEdge(key.0, key.1));
            }
            let (a, b) = (pa.x * my + pa.y, pb.x * my + pb.y);
            let idx = adjacency[a]
                .iter()
                .find(|&&(n, _)| n == b)
                .map(|&(_, i)| i)
                .expect("adjacent cells share an edge");
            let e = &mut edges[idx];
            if let Some(err) = o.cnot_error {
                e.cnot_error = probability("edge cnot_error", err)?;
            }
            if let Some(dur) = o.cnot_duration {
                e.cnot_duration = positive("edge cnot_duration", dur)?;
            }
        }

        Ok(Self {
            mx,
            my,
            qubits,
            edges,
            adjacency,
            single_qubit_duration: d.single_qubit_duration,
            single_qubit_error: d.single_qubit_error,
            static_tau_cnot: d.static_tau_cnot,
            static_coherence_bound: d.static_coherence_bound,
        })
    }

    pub fn mx(&self) -> usize {
        self.mx
    }

    pub fn my(&self) -> usize {
        self.my
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[HardwareQubit] {
        &self.qubits
    }

    pub fn qubit(&self, h: usize) -> &HardwareQubit {
        &self.qubits[h]
    }

    pub fn edges(&self) -> &[HardwareEdge] {
        &self.edges
    }

    pub fn cell(&self, p: Pos) -> usize {
        debug_assert!(p.x < self.mx && p.y < self.my);
        p.x * self.my + p.y
    }

    pub fn pos(&self, h: usize) -> Pos {
        self.qubits[h].pos
    }

    pub fn contains(&self, p: Pos) -> bool {
        p.x < self.mx && p.y < self.my
    }

    pub fn neighbors(&self, h: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[h].iter().map(|&(n, _)| n)
    }

    pub fn grid_degree(&self, h: usize) -> usize {
        self.adjacency[h].len()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&HardwareEdge> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, i)| &self.edges[i])
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, i)| i)
    }

    /// `E^R`: probability a readout on `h` succeeds.
    pub fn readout_reliability(&self, h: usize) -> f64 {
        1.0 - self.qubits[h].readout_error
    }

    pub fn static_tau_swap(&self) -> Timeslot {
        3 * self.static_tau_cnot
    }

    /// Shortest CNOT duration on any edge.
    pub fn min_cnot_duration(&self) -> Timeslot {
        self.edges
            .iter()
            .map(|e| e.cnot_duration)
            .min()
            .unwrap_or(self.static_tau_cnot)
    }

    pub fn min_readout_duration(&self) -> Timeslot {
        self.qubits
            .iter()
            .map(|q| q.readout_duration)
            .min()
            .unwrap_or(1)
    }

    /// Snapshot of the machine as an override-complete calibration document.
    pub fn to_spec(&self) -> MachineSpec {
        let defaults = MachineDefaults {
            single_qubit_duration: self.single_qubit_duration,
            single_qubit_error: self.single_qubit_error,
            static_tau_cnot: self.static_tau_cnot,
            static_coherence_bound: self.static_coherence_bound,
            ..MachineDefaults::default()
        };
        MachineSpec {
            grid: GridDims {
                mx: self.mx,
                my: self.my,
            },
            qubits: self
                .qubits
                .iter()
                .map(|q| QubitOverride {
                    x: q.pos.x,
                    y: q.pos.y,
                    t2: Some(q.t2),
                    readout_error: Some(q.readout_error),
                    readout_duration: Some(q.readout_duration),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    let (pa, pb) = (self.pos(e.a), self.pos(e.b));
                    EdgeOverride {
                        a: [pa.x, pa.y],
                        b: [pb.x, pb.y],
                        cnot_error: Some(e.cnot_error),
                        cnot_duration: Some(e.cnot_duration),
                    }
                })
                .collect(),
            defaults,
        }
    }
}

/// CNOT duration from grid distance with machine-wide constants: the SWAP
/// chain toward the target and back, plus the CNOT itself.
pub fn static_cnot_duration(distance: usize, m: &GridMachine) -> Result<Timeslot, MachineError> {
    if distance == 0 {
        return Err(MachineError::ZeroDistance);
    }
    Ok(2 * (distance as Timeslot - 1) * m.static_tau_swap() + m.static_tau_cnot)
}

/// Corner cells of the two L-shaped routes from `c` to `t`, sorted.
///
/// When `c` and `t` share a row or column the route is straight and the
/// single junction is `c` itself.
pub fn one_bend_junctions(c: Pos, t: Pos) -> Result<Junctions, MachineError> {
    if c == t {
        return Err(MachineError::ZeroDistance);
    }
    if c.x == t.x || c.y == t.y {
        return Ok(Junctions::Straight(c));
    }
    let a = Pos::new(c.x, t.y);
    let b = Pos::new(t.x, c.y);
    Ok(Junctions::Bent(a.min(b), a.max(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Junctions {
    Straight(Pos),
    Bent(Pos, Pos),
}

impl Junctions {
    pub fn as_vec(&self) -> Vec<Pos> {
        match *self {
            Junctions::Straight(p) => alloc::vec![p],
            Junctions::Bent(a, b) => alloc::vec![a, b],
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Junctions::Straight(_) => 1,
            Junctions::Bent(..) => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> Option<Pos> {
        match (*self, i) {
            (Junctions::Straight(p), 0) => Some(p),
            (Junctions::Bent(a, _), 0) => Some(a),
            (Junctions::Bent(_, b), 1) => Some(b),
            _ => None,
        }
    }

    pub fn contains(&self, p: Pos) -> bool {
        match *self {
            Junctions::Straight(j) => j == p,
            Junctions::Bent(a, b) => a == p || b == p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manhattan_examples() {
        assert_eq!(manhattan(Pos::new(0, 0), Pos::new(0, 1)), 1);
        assert_eq!(manhattan(Pos::new(0, 0), Pos::new(2, 3)), 5);
        assert_eq!(manhattan(Pos::new(4, 2), Pos::new(4, 2)), 0);
    }

    #[test]
    fn edge_count_2x8() {
        let m = GridMachine::uniform(2, 8, MachineDefaults::default()).unwrap();
        assert_eq!(m.num_qubits(), 16);
        assert_eq!(m.edges().len(), 22);
        for e in m.edges() {
            assert_eq!(manhattan(m.pos(e.a), m.pos(e.b)), 1);
            assert!(e.a < e.b);
        }
    }

    #[test]
    fn rejects_bad_probabilities_and_layout() {
        let bad = MachineSpec::uniform(2, 2, MachineDefaults::default()).edge(
            Pos::new(0, 0),
            Pos::new(0, 1),
            1.2,
        );
        assert!(matches!(
            GridMachine::from_spec(&bad),
            Err(MachineError::Probability { .. })
        ));
        let far = MachineSpec::uniform(3, 3, MachineDefaults::default()).edge(
            Pos::new(0, 0),
            Pos::new(1, 1),
            0.1,
        );
        assert!(matches!(
            GridMachine::from_spec(&far),
            Err(MachineError::NotAdjacent(..))
        ));
        let dup = MachineSpec::uniform(2, 2, MachineDefaults::default())
            .readout(Pos::new(1, 1), 0.1)
            .readout(Pos::new(1, 1), 0.2);
        assert!(matches!(
            GridMachine::from_spec(&dup),
            Err(MachineError::DuplicateCell(_))
        ));
        let outside =
            MachineSpec::uniform(2, 2, MachineDefaults::default()).readout(Pos::new(2, 0), 0.1);
        assert!(matches!(
            GridMachine::from_spec(&outside),
            Err(MachineError::OutOfGrid(_))
        ));
    }

    #[test]
    fn default_average_errors() {
        let m = GridMachine::uniform(2, 8, MachineDefaults::default()).unwrap();
        let n = m.edges().len() as f64;
        let mean_cx = m.edges().iter().map(|e| e.cnot_error).sum::<f64>() / n;
        let mean_ro = m.qubits().iter().map(|q| q.readout_error).sum::<f64>() / 16.0;
        assert!((mean_cx - 0.04).abs() < 1e-12);
        assert!((mean_ro - 0.07).abs() < 1e-12);
    }

    #[test]
    fn static_duration_formula() {
        let m = GridMachine::uniform(2, 2, MachineDefaults::default()).unwrap();
        assert_eq!(m.static_tau_swap(), 6);
        assert_eq!(static_cnot_duration(1, &m).unwrap(), 2);
        assert_eq!(static_cnot_duration(2, &m).unwrap(), 14);
        assert_eq!(static_cnot_duration(3, &m).unwrap(), 26);
        assert_eq!(static_cnot_duration(0, &m), Err(MachineError::ZeroDistance));
    }

    #[test]
    fn junction_examples() {
        let j = one_bend_junctions(Pos::new(0, 0), Pos::new(1, 2)).unwrap();
        assert_eq!(j.as_vec(), alloc::vec![Pos::new(0, 2), Pos::new(1, 0)]);
        let j = one_bend_junctions(Pos::new(0, 0), Pos::new(0, 3)).unwrap();
        assert_eq!(j, Junctions::Straight(Pos::new(0, 0)));
        let j = one_bend_junctions(Pos::new(0, 0), Pos::new(0, 1)).unwrap();
        assert_eq!(j.as_vec(), alloc::vec![Pos::new(0, 0)]);
        assert!(one_bend_junctions(Pos::new(1, 1), Pos::new(1, 1)).is_err());
    }
}

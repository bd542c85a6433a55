//! Routing geometry and the list scheduler shared by every compiler variant.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::circuit::DependencyDag;
use crate::machine::Pos;
use crate::Timeslot;

/// Inclusive axis-aligned rectangle of grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub lx: usize,
    pub ly: usize,
    pub rx: usize,
    pub ry: usize,
}

impl Rect {
    /// Component-wise min/max corners of two cells.
    pub fn bounding(a: Pos, b: Pos) -> Self {
        Self {
            lx: a.x.min(b.x),
            ly: a.y.min(b.y),
            rx: a.x.max(b.x),
            ry: a.y.max(b.y),
        }
    }

    pub fn point(p: Pos) -> Self {
        Self::bounding(p, p)
    }

    /// Space overlap test `S`.
    pub fn overlaps(&self, o: &Rect) -> bool {
        !(self.lx > o.rx || self.rx < o.lx || self.ly > o.ry || self.ry < o.ly)
    }

    pub fn contains(&self, p: Pos) -> bool {
        self.overlaps(&Rect::point(p))
    }
}

/// Time overlap test `T` on half-open intervals `[start, start + dur)`.
pub fn time_overlap(s1: Timeslot, d1: Timeslot, s2: Timeslot, d2: Timeslot) -> bool {
    s1 < s2 + d2 && s2 < s1 + d1
}

/// Reserved area of a scheduled gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Footprint {
    /// Union of rectangles (RR: one bounding box; 1BP: the two segments;
    /// single-qubit gates and readouts: the one cell).
    Rects(Vec<Rect>),
    /// Explicit set of occupied cells (best-path routes).
    Cells(Vec<usize>),
}

impl Footprint {
    pub fn conflicts(&self, other: &Footprint, my: usize) -> bool {
        match (self, other) {
            (Footprint::Rects(a), Footprint::Rects(b)) => {
                a.iter().any(|r| b.iter().any(|s| r.overlaps(s)))
            }
            (Footprint::Cells(a), Footprint::Cells(b)) => a.iter().any(|c| b.contains(c)),
            (Footprint::Rects(rs), Footprint::Cells(cs))
            | (Footprint::Cells(cs), Footprint::Rects(rs)) => cs
                .iter()
                .any(|&c| rs.iter().any(|r| r.contains(Pos::new(c / my, c % my)))),
        }
    }
}

/// Conflict model consulted by [`list_schedule`].
pub trait Resources {
    /// Smallest start `>= ready` at which `gate` can hold its resources for
    /// `dur` timeslots given everything committed so far.
    fn earliest(&self, gate: usize, ready: Timeslot, dur: Timeslot) -> Timeslot;
    fn commit(&mut self, gate: usize, start: Timeslot, dur: Timeslot);
}

/// Pairwise footprint exclusion (RR / 1BP and single-cell gates).
pub struct GeometricResources<'a> {
    footprints: &'a [Footprint],
    my: usize,
    committed: Vec<(usize, Timeslot, Timeslot)>,
}

impl<'a> GeometricResources<'a> {
    pub fn new(footprints: &'a [Footprint], my: usize) -> Self {
        Self {
            footprints,
            my,
            committed: Vec::new(),
        }
    }
}

impl Resources for GeometricResources<'_> {
    fn earliest(&self, gate: usize, ready: Timeslot, dur: Timeslot) -> Timeslot {
        let mut busy: Vec<(Timeslot, Timeslot)> = self
            .committed
            .iter()
            .filter(|&&(g, _, _)| self.footprints[g].conflicts(&self.footprints[gate], self.my))
            .map(|&(_, s, d)| (s, s + d))
            .collect();
        busy.sort_unstable();
        let mut t = ready;
        loop {
            let mut moved = false;
            for &(s, f) in &busy {
                if time_overlap(t, dur, s, f - s) {
                    t = f;
                    moved = true;
                }
            }
            if !moved {
                return t;
            }
        }
    }

    fn commit(&mut self, gate: usize, start: Timeslot, dur: Timeslot) {
        self.committed.push((gate, start, dur));
    }
}

/// Cell occupancy: a gate waits until every cell it touches is free.
pub struct OccupancyResources<'a> {
    cells: &'a [Vec<usize>],
    free_at: Vec<Timeslot>,
}

impl<'a> OccupancyResources<'a> {
    pub fn new(cells: &'a [Vec<usize>], num_cells: usize) -> Self {
        Self {
            cells,
            free_at: alloc::vec![0; num_cells],
        }
    }
}

impl Resources for OccupancyResources<'_> {
    // Starts come out non-decreasing from `list_schedule`, so waiting for the
    // latest release of each cell is the same as searching for a gap.
    fn earliest(&self, gate: usize, ready: Timeslot, _dur: Timeslot) -> Timeslot {
        self.cells[gate]
            .iter()
            .map(|&c| self.free_at[c])
            .fold(ready, Timeslot::max)
    }

    fn commit(&mut self, gate: usize, start: Timeslot, dur: Timeslot) {
        for &c in &self.cells[gate] {
            self.free_at[c] = self.free_at[c].max(start + dur);
        }
    }
}

/// Start time and duration per gate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Schedule {
    pub start: Vec<Timeslot>,
    pub dur: Vec<Timeslot>,
}

impl Schedule {
    pub fn finish(&self, g: usize) -> Timeslot {
        self.start[g] + self.dur[g]
    }

    /// Finish time of the last gate.
    pub fn makespan(&self) -> Timeslot {
        (0..self.start.len())
            .map(|g| self.finish(g))
            .max()
            .unwrap_or(0)
    }
}

/// Earliest-ready-gate list scheduling.
///
/// Repeatedly picks, among gates whose predecessors are all scheduled, the
/// one with the smallest feasible start (ties to the lower gate id).
pub fn list_schedule<R: Resources>(dag: &DependencyDag, dur: &[Timeslot], res: &mut R) -> Schedule {
    let n = dag.num_gates();
    let mut start = alloc::vec![0; n];
    let mut ready_at = alloc::vec![0; n];
    let mut missing: Vec<usize> = (0..n).map(|g| dag.preds(g).len()).collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|&g| missing[g] == 0).collect();
    while !ready.is_empty() {
        let (est, g) = ready
            .iter()
            .map(|&g| (res.earliest(g, ready_at[g], dur[g]), g))
            .min()
            .expect("non-empty");
        ready.remove(&g);
        start[g] = est;
        res.commit(g, est, dur[g]);
        for &s in dag.succs(g) {
            ready_at[s] = ready_at[s].max(est + dur[g]);
            missing[s] -= 1;
            if missing[s] == 0 {
                ready.insert(s);
            }
        }
    }
    Schedule {
        start,
        dur: dur.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dag, Circuit, GateKind};

    #[test]
    fn rect_overlap() {
        let a = Rect::bounding(Pos::new(0, 0), Pos::new(1, 2));
        let b = Rect::bounding(Pos::new(1, 2), Pos::new(2, 3));
        let c = Rect::bounding(Pos::new(2, 0), Pos::new(2, 1));
        assert!(a.overlaps(&b));
        assert!(!a.overlaps(&c));
        assert!(!b.overlaps(&c));
    }

    #[test]
    fn half_open_time() {
        assert!(!time_overlap(0, 5, 5, 5));
        assert!(time_overlap(0, 5, 4, 5));
        assert!(time_overlap(3, 1, 0, 5));
    }

    #[test]
    fn dependent_chain() {
        let mut c = Circuit::new(1, 0);
        c.gate1(GateKind::H, 0).unwrap();
        c.gate1(GateKind::X, 0).unwrap();
        let dag = build_dag(&c);
        let fps = alloc::vec![
            Footprint::Rects(alloc::vec![Rect::point(Pos::new(0, 0))]);
            2
        ];
        let mut res = GeometricResources::new(&fps, 1);
        let s = list_schedule(&dag, &[2, 3], &mut res);
        assert_eq!(s.start, alloc::vec![0, 2]);
        assert_eq!(s.makespan(), 5);
    }

    #[test]
    fn overlapping_rectangles_serialise() {
        let mut c = Circuit::new(4, 0);
        c.cx(0, 1).unwrap();
        c.cx(2, 3).unwrap();
        let dag = build_dag(&c);
        let overlapping = alloc::vec![
            Footprint::Rects(alloc::vec![Rect::bounding(Pos::new(0, 0), Pos::new(1, 1))]),
            Footprint::Rects(alloc::vec![Rect::bounding(Pos::new(1, 0), Pos::new(0, 1))]),
        ];
        let mut res = GeometricResources::new(&overlapping, 2);
        let s = list_schedule(&dag, &[5, 5], &mut res);
        assert_eq!(s.start, alloc::vec![0, 5]);
        assert!(!time_overlap(s.start[0], 5, s.start[1], 5));

        let disjoint = alloc::vec![
            Footprint::Rects(alloc::vec![Rect::bounding(Pos::new(0, 0), Pos::new(0, 1))]),
            Footprint::Rects(alloc::vec![Rect::bounding(Pos::new(1, 0), Pos::new(1, 1))]),
        ];
        let mut res = GeometricResources::new(&disjoint, 2);
        assert_eq!(
            list_schedule(&dag, &[5, 5], &mut res).start,
            alloc::vec![0, 0]
        );
    }

    #[test]
    fn occupancy_waits_for_cells() {
        let mut c = Circuit::new(4, 0);
        c.cx(0, 1).unwrap();
        c.cx(2, 3).unwrap();
        let dag = build_dag(&c);
        let cells = alloc::vec![alloc::vec![0, 1, 2], alloc::vec![2, 3]];
        let mut res = OccupancyResources::new(&cells, 4);
        let s = list_schedule(&dag, &[14, 2], &mut res);
        assert_eq!(s.start, alloc::vec![0, 14]);
    }
}

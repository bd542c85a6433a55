//! Machine-independent circuit IR: gate list, dependency DAG and the CNOT
//! interaction graph over program qubits.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GateKind {
    #[cfg_attr(feature = "serde", serde(rename = "h"))]
    H,
    #[cfg_attr(feature = "serde", serde(rename = "x"))]
    X,
    #[cfg_attr(feature = "serde", serde(rename = "y"))]
    Y,
    #[cfg_attr(feature = "serde", serde(rename = "z"))]
    Z,
    #[cfg_attr(feature = "serde", serde(rename = "s"))]
    S,
    #[cfg_attr(feature = "serde", serde(rename = "sdg"))]
    Sdg,
    #[cfg_attr(feature = "serde", serde(rename = "t"))]
    T,
    #[cfg_attr(feature = "serde", serde(rename = "tdg"))]
    Tdg,
    #[cfg_attr(feature = "serde", serde(rename = "cx"))]
    Cnot,
    #[cfg_attr(feature = "serde", serde(rename = "measure"))]
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Cnot,
        GateKind::Measure,
    ];

    /// Lower-case QASM mnemonic.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Cnot => "cx",
            GateKind::Measure => "measure",
        }
    }

    pub fn from_mnemonic(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.mnemonic() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_single_qubit_unitary(self) -> bool {
        !matches!(self, GateKind::Cnot | GateKind::Measure)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// Qubit operands of a gate. For CNOT the pair is `[control, target]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operands {
    One(usize),
    Two([usize; 2]),
}

impl Operands {
    pub fn as_slice(&self) -> &[usize] {
        match self {
            Operands::One(q) => core::slice::from_ref(q),
            Operands::Two(pair) => &pair[..],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    /// Position in circuit order.
    pub id: usize,
    pub kind: GateKind,
    pub operands: Operands,
    /// Classical bit written by a MEASURE.
    pub clbit: Option<usize>,
}

impl Gate {
    pub fn qubits(&self) -> &[usize] {
        self.operands.as_slice()
    }

    pub fn is_cnot(&self) -> bool {
        self.kind == GateKind::Cnot
    }

    pub fn is_measure(&self) -> bool {
        self.kind == GateKind::Measure
    }

    /// `(control, target)` of a CNOT.
    pub fn cnot_pair(&self) -> Option<(usize, usize)> {
        match (self.kind, self.operands) {
            (GateKind::Cnot, Operands::Two([c, t])) => Some((c, t)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("gate {gate}: qubit {qubit} out of range (circuit has {num_qubits})")]
    OperandOutOfRange {
        gate: usize,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("gate {gate}: classical bit {clbit} out of range (circuit has {num_clbits})")]
    ClbitOutOfRange {
        gate: usize,
        clbit: usize,
        num_clbits: usize,
    },
    #[error("gate {gate}: CNOT operands distinct")]
    CnotOperandsEqual { gate: usize },
    #[error("gate {gate}: `{kind}` takes {expected} operand(s), got {got}")]
    Arity {
        gate: usize,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("gate {gate}: `{kind}` needs no classical bit unless it is a measure")]
    UnexpectedClbit { gate: usize, kind: GateKind },
    #[error("gate {gate}: measure without a classical bit")]
    MissingClbit { gate: usize },
    #[error("gate {gate}: classical bit {clbit} already written")]
    ClbitReused { gate: usize, clbit: usize },
    #[error("gate {gate}: qubit {qubit} used after it was measured")]
    GateAfterMeasure { gate: usize, qubit: usize },
    #[error("{0}")]
    Generator(&'static str),
}

/// A validated gate list over `num_qubits` program qubits.
///
/// Gates are only added through [`Circuit::push`], which enforces operand
/// ranges, distinct CNOT operands, a single writer per classical bit and
/// measurement as the last operation on its qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    gates: Vec<Gate>,
    measured: Vec<bool>,
    written: Vec<bool>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Self {
            num_qubits,
            num_clbits,
            gates: Vec::new(),
            measured: alloc::vec![false; num_qubits],
            written: alloc::vec![false; num_clbits],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    pub fn measure_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_measure()).count()
    }

    /// Appends a gate and returns its id.
    pub fn push(
        &mut self,
        kind: GateKind,
        qubits: &[usize],
        clbit: Option<usize>,
    ) -> Result<usize, CircuitError> {
        let id = self.gates.len();
        if qubits.len() != kind.arity() {
            return Err(CircuitError::Arity {
                gate: id,
                kind,
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(CircuitError::OperandOutOfRange {
                    gate: id,
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        let operands = match *qubits {
            [q] => Operands::One(q),
            [c, t] => {
                if c == t {
                    return Err(CircuitError::CnotOperandsEqual { gate: id });
                }
                Operands::Two([c, t])
            }
            _ => unreachable!("arity checked above"),
        };
        match (kind, clbit) {
            (GateKind::Measure, None) => return Err(CircuitError::MissingClbit { gate: id }),
            (GateKind::Measure, Some(c)) => {
                if c >= self.num_clbits {
                    return Err(CircuitError::ClbitOutOfRange {
                        gate: id,
                        clbit: c,
                        num_clbits: self.num_clbits,
                    });
                }
                if self.written[c] {
                    return Err(CircuitError::ClbitReused { gate: id, clbit: c });
                }
            }
            (_, Some(_)) => return Err(CircuitError::UnexpectedClbit { gate: id, kind }),
            (_, None) => {
                if let Some(&q) = qubits.iter().find(|&&q| self.measured[q]) {
                    return Err(CircuitError::GateAfterMeasure { gate: id, qubit: q });
                }
            }
        }
        if let (GateKind::Measure, Some(c)) = (kind, clbit) {
            self.written[c] = true;
            self.measured[qubits[0]] = true;
        }
        self.gates.push(Gate {
            id,
            kind,
            operands,
            clbit,
        });
        Ok(id)
    }

    pub fn gate1(&mut self, kind: GateKind, q: usize) -> Result<usize, CircuitError> {
        self.push(kind, &[q], None)
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<usize, CircuitError> {
        self.push(GateKind::Cnot, &[control, target], None)
    }

    pub fn measure(&mut self, q: usize, clbit: usize) -> Result<usize, CircuitError> {
        self.push(GateKind::Measure, &[q], Some(clbit))
    }

    /// Rebuilds a circuit from raw gates, re-running all validation.
    pub fn from_gates<I>(
        num_qubits: usize,
        num_clbits: usize,
        gates: I,
    ) -> Result<Self, CircuitError>
    where
        I: IntoIterator<Item = (GateKind, Vec<usize>, Option<usize>)>,
    {
        let mut c = Circuit::new(num_qubits, num_clbits);
        for (kind, qubits, clbit) in gates {
            c.push(kind, &qubits, clbit)?;
        }
        Ok(c)
    }
}

/// Gate dependency relation from per-qubit last-writer chaining.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyDag {
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl DependencyDag {
    pub fn num_gates(&self) -> usize {
        self.preds.len()
    }

    pub fn preds(&self, g: usize) -> &[usize] {
        &self.preds[g]
    }

    pub fn succs(&self, g: usize) -> &[usize] {
        &self.succs[g]
    }

    /// All `(g1, g2)` pairs with `g2` depending on `g1`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .preds
            .iter()
            .enumerate()
            .flat_map(|(g, ps)| ps.iter().map(move |&p| (p, g)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Kahn's algorithm; `None` when a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.num_gates();
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&g| indeg[g] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(g) = ready.pop_first() {
            order.push(g);
            for &s in &self.succs[g] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}

/// Each gate depends on the most recent earlier gate on each of its operands.
pub fn build_dag(c: &Circuit) -> DependencyDag {
    let n = c.len();
    let mut preds = alloc::vec![Vec::new(); n];
    let mut succs = alloc::vec![Vec::new(); n];
    let mut last: Vec<Option<usize>> = alloc::vec![None; c.num_qubits()];
    for g in c.gates() {
        for &q in g.qubits() {
            if let Some(p) = last[q] {
                if !preds[g.id].contains(&p) {
                    preds[g.id].push(p);
                    succs[p].push(g.id);
                }
            }
            last[q] = Some(g.id);
        }
    }
    DependencyDag { preds, succs }
}

/// CNOT interaction graph over program qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramGraph {
    num_qubits: usize,
    /// Unordered pair `(min, max)` → number of CNOTs between them.
    edges: BTreeMap<(usize, usize), usize>,
    /// Ordered `(control, target)` → count.
    directed: BTreeMap<(usize, usize), usize>,
    degree: Vec<usize>,
}

impl ProgramGraph {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.edges
    }

    pub fn directed(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.directed
    }

    pub fn degree(&self, q: usize) -> usize {
        self.degree[q]
    }

    pub fn weight(&self, a: usize, b: usize) -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn neighbors(&self, q: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().filter_map(move |(&(a, b), &w)| {
            if a == q {
                Some((b, w))
            } else if b == q {
                Some((a, w))
            } else {
                None
            }
        })
    }

    /// Program qubits ordered by descending degree, ties by id.
    pub fn by_degree(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.num_qubits).collect();
        order.sort_by(|&a, &b| self.degree[b].cmp(&self.degree[a]).then(a.cmp(&b)));
        order
    }
}

pub fn build_program_graph(c: &Circuit) -> ProgramGraph {
    let mut edges = BTreeMap::new();
    let mut directed = BTreeMap::new();
    let mut degree = alloc::vec![0; c.num_qubits()];
    for (ctl, tgt) in c.gates().iter().filter_map(Gate::cnot_pair) {
        *edges.entry((ctl.min(tgt), ctl.max(tgt))).or_insert(0) += 1;
        *directed.entry((ctl, tgt)).or_insert(0) += 1;
        degree[ctl] += 1;
        degree[tgt] += 1;
    }
    ProgramGraph {
        num_qubits: c.num_qubits(),
        edges,
        directed,
        degree,
    }
}

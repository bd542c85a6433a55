//! Compilation record: everything needed to re-check and re-evaluate a
//! compiled circuit without compiling it again.

use nisqc_core::check::check_solution;
use nisqc_core::codegen::SwapRole;
use nisqc_core::{
    build_tables, expand, CompiledCircuit, GateKind, GridMachine, RouteAssignment, Schedule,
    Solution, Strategy,
};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::formats::CircuitJson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedQubit {
    pub qubit: usize,
    pub hw: usize,
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordGate {
    pub kind: GateKind,
    pub hw_operands: Vec<usize>,
    pub start: u64,
    pub duration: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbit: Option<usize>,
    pub source_gate: usize,
    pub role: SwapRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompilationRecord {
    pub benchmark: String,
    pub variant: String,
    pub placement: Vec<PlacedQubit>,
    pub objective: f64,
    pub optimal: bool,
    pub makespan: u64,
    pub swap_count: usize,
    pub reliability: f64,
    pub compile_time_s: f64,
    pub gates: Vec<RecordGate>,
    pub strategy: Strategy,
    pub source: CircuitJson,
    pub routes: RouteAssignment,
    pub schedule: Schedule,
}

impl CompilationRecord {
    pub fn new(
        cc: &CompiledCircuit,
        m: &GridMachine,
        benchmark: &str,
        compile_time_s: f64,
    ) -> Self {
        Self {
            benchmark: benchmark.to_string(),
            variant: cc.strategy.label().to_string(),
            placement: (0..cc.placement.len())
                .map(|q| {
                    let p = cc.placement.loc(q);
                    PlacedQubit {
                        qubit: q,
                        hw: cc.placement.cell(m, q),
                        x: p.x,
                        y: p.y,
                    }
                })
                .collect(),
            objective: cc.objective_value,
            optimal: cc.optimal,
            makespan: cc.makespan,
            swap_count: cc.swap_count,
            reliability: cc.reliability,
            compile_time_s,
            gates: cc
                .expanded
                .iter()
                .map(|g| RecordGate {
                    kind: g.kind,
                    hw_operands: g.operands.clone(),
                    start: g.start,
                    duration: g.duration,
                    clbit: g.clbit,
                    source_gate: g.source_gate,
                    role: g.role,
                })
                .collect(),
            strategy: cc.strategy,
            source: CircuitJson::from(&cc.source),
            routes: cc.routes.clone(),
            schedule: cc.schedule.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("finite values");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }

    /// Re-validates the recorded solution against `m` and re-expands it. The
    /// expansion must reproduce the recorded gate stream.
    pub fn rebuild(&self, m: &GridMachine) -> Result<CompiledCircuit, Error> {
        let c = self.source.to_circuit()?;
        let cells: Vec<usize> = self.placement.iter().map(|p| p.hw).collect();
        let sol = Solution {
            strategy: self.strategy,
            placement: nisqc_core::Placement::from_cells(m, &cells),
            routes: self.routes.clone(),
            schedule: self.schedule.clone(),
            objective_value: self.objective,
            optimal: self.optimal,
        };
        if let Some(v) = check_solution(&sol, &c, m).first() {
            return Err(Error::Record(v.to_string()));
        }
        let t = build_tables(m, self.strategy.count_return_swaps())?;
        let cc = expand(&sol, &c, m, &t)?;
        let same = cc.expanded.len() == self.gates.len()
            && cc.expanded.iter().zip(&self.gates).all(|(a, b)| {
                a.kind == b.kind
                    && a.operands == b.hw_operands
                    && a.start == b.start
                    && a.duration == b.duration
                    && a.clbit == b.clbit
            });
        if !same {
            return Err(Error::Record(
                "gate stream differs from its re-expansion".into(),
            ));
        }
        Ok(cc)
    }
}

//! JSON circuit format, calibration documents and format dispatch.

use std::path::Path;

use nisqc_core::{Circuit, GateKind, GridMachine, MachineSpec};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::qasm::{emit_qasm, parse_qasm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitFormat {
    Qasm,
    Json,
}

impl CircuitFormat {
    /// `.json` files are JSON; everything else is QASM.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => CircuitFormat::Json,
            _ => CircuitFormat::Qasm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateJson {
    pub kind: GateKind,
    pub operands: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub num_qubits: usize,
    #[serde(default)]
    pub num_clbits: usize,
    pub gates: Vec<GateJson>,
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        Self {
            num_qubits: c.num_qubits(),
            num_clbits: c.num_clbits(),
            gates: c
                .gates()
                .iter()
                .map(|g| GateJson {
                    kind: g.kind,
                    operands: g.qubits().to_vec(),
                    clbit: g.clbit,
                })
                .collect(),
        }
    }
}

impl CircuitJson {
    pub fn to_circuit(&self) -> Result<Circuit, Error> {
        let mut c = Circuit::new(self.num_qubits, self.num_clbits);
        for g in &self.gates {
            c.push(g.kind, &g.operands, g.clbit)?;
        }
        Ok(c)
    }
}

pub fn parse_circuit(text: &str, format: CircuitFormat) -> Result<Circuit, Error> {
    match format {
        CircuitFormat::Qasm => Ok(parse_qasm(text)?),
        CircuitFormat::Json => serde_json::from_str::<CircuitJson>(text)?.to_circuit(),
    }
}

pub fn emit_circuit(c: &Circuit, format: CircuitFormat) -> String {
    match format {
        CircuitFormat::Qasm => emit_qasm(c),
        CircuitFormat::Json => {
            let mut s = serde_json::to_string_pretty(&CircuitJson::from(c)).expect("plain data");
            s.push('\n');
            s
        }
    }
}

pub fn load_circuit(path: &Path) -> Result<Circuit, Error> {
    let text = crate::fsio::read(path)?;
    parse_circuit(&text, CircuitFormat::from_path(path)).map_err(|e| e.in_file(path))
}

/// Parses and validates a calibration document.
pub fn parse_calibration(text: &str) -> Result<GridMachine, Error> {
    let spec: MachineSpec = serde_json::from_str(text)?;
    Ok(GridMachine::from_spec(&spec)?)
}

pub fn load_calibration(path: &Path) -> Result<GridMachine, Error> {
    let text = crate::fsio::read(path)?;
    parse_calibration(&text).map_err(|e| e.in_file(path))
}

pub fn emit_calibration(spec: &MachineSpec) -> String {
    let mut s = serde_json::to_string_pretty(spec).expect("plain data");
    s.push('\n');
    s
}

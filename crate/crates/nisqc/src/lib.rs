//! File formats, wall-clock budgets and the command-line pipeline around
//! `nisqc-core`.

pub mod budget;
pub mod cli;
pub mod error;
pub mod formats;
pub mod fsio;
pub mod pipeline;
pub mod qasm;
pub mod record;
pub mod report;

pub use budget::Deadline;
pub use error::Error;
pub use formats::{load_calibration, load_circuit, parse_circuit, CircuitFormat};
pub use pipeline::{compile, evaluate, CompileOptions, Compiled, EvalOptions, VariantChoice};
pub use qasm::{emit_compiled_qasm, emit_qasm, parse_qasm, QasmError};
pub use record::CompilationRecord;
pub use report::write_report;

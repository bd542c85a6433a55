use std::path::{Path, PathBuf};

use nisqc_core::eval::sim::SimError;
use nisqc_core::eval::EvalError;
use nisqc_core::{
    CircuitError, CodegenError, ConfigError, HeuristicError, MachineError, SolveError,
};
use serde::Serialize;

use crate::qasm::QasmError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    InFile { path: PathBuf, source: Box<Error> },
    #[error(transparent)]
    Qasm(#[from] QasmError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Usage(String),
    #[error("record does not reproduce: {0}")]
    Record(String),
}

/// Machine-readable error, printed as one JSON line on stderr.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Attaches the file a parse error came from.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            e @ (Error::Io { .. } | Error::InFile { .. }) => e,
            e => Error::InFile {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
        }
    }

    fn root(&self) -> &Error {
        match self {
            Error::InFile { source, .. } => source.root(),
            e => e,
        }
    }

    /// Stable error category.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::Io { .. } => "io",
            Error::InFile { .. } => unreachable!("unwrapped by root"),
            Error::Qasm(_) => "syntax",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
            Error::Circuit(_) => "circuit",
            Error::Machine(_) => "calibration",
            Error::Config(_) | Error::Usage(_) => "usage",
            Error::Solve(SolveError::Infeasible) => "infeasible",
            Error::Solve(SolveError::Timeout) => "timeout",
            Error::Solve(SolveError::TooManyQubits { .. })
            | Error::Heuristic(HeuristicError::TooManyQubits { .. }) => "too-many-qubits",
            Error::Solve(SolveError::Config(_)) => "usage",
            Error::Solve(_) | Error::Heuristic(_) => "mapping",
            Error::Codegen(_) => "codegen",
            Error::Eval(_) | Error::Sim(_) => "eval",
            Error::Record(_) => "record",
        }
    }

    /// Process exit status: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.kind() == "usage" {
            2
        } else {
            1
        }
    }

    pub fn report(&self) -> ErrorReport {
        let file = match self {
            Error::InFile { path, .. } | Error::Io { path, .. } => Some(path.display().to_string()),
            _ => None,
        };
        let (line, column) = match self.root() {
            Error::Qasm(q) => (Some(q.line), Some(q.col)),
            Error::Json(j) if j.line() > 0 => (Some(j.line()), Some(j.column())),
            _ => (None, None),
        };
        ErrorReport {
            error: self.kind(),
            message: self.root().to_string(),
            file,
            line,
            column,
        }
    }
}

//! Noise-adaptive compilation for grid-topology NISQ machines.
//!
//! The crate maps program qubits onto an `mx × my` grid of hardware qubits,
//! schedules gates against data dependencies and routing exclusion, and
//! routes non-adjacent CNOTs with SWAP chains. Placement is either searched
//! exactly (branch and bound over placements and one-bend junctions) or
//! built greedily from calibration-derived reliability tables.
//!
//! Everything here is `no_std` + `alloc`: file formats, wall-clock budgets
//! and the command-line driver live in the `nisqc` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod budget;
pub mod check;
pub mod circuit;
pub mod codegen;
pub mod eval;
pub mod exact;
pub mod generate;
pub mod heuristic;
pub mod machine;
pub mod mapping;
pub mod schedule;
pub mod smtlib;
pub mod synthetic;
pub mod tables;

/// Scheduling time unit (one timeslot is 80 ns on the reference hardware).
pub type Timeslot = u64;

pub use budget::{Budget, NodeBudget, Unlimited};
pub use check::{check_solution, Violation};
pub use circuit::{
    build_dag, build_program_graph, Circuit, CircuitError, DependencyDag, Gate, GateKind, Operands,
    ProgramGraph,
};
pub use codegen::{expand, CodegenError, CompiledCircuit, PhysicalGate, SwapRole};
pub use exact::{solve_exact, SolveError};
pub use generate::{gen_bv, gen_random, gen_toffoli};
pub use heuristic::{
    compile_with_placement, greedy_edge_map, greedy_vertex_map, heuristic_compile, HeuristicError,
};
pub use machine::{
    manhattan, one_bend_junctions, static_cnot_duration, GridMachine, HardwareEdge, HardwareQubit,
    MachineDefaults, MachineError, MachineSpec, Pos,
};
pub use mapping::{
    canonical_schedule, gate_duration, gate_reliability, objective, ConfigError, HeuristicConfig,
    Instance, MappingError, Placement, Policy, ProblemConfig, Route, RouteAssignment, Routing,
    Solution, Strategy, Variant,
};
pub use schedule::Schedule;
pub use smtlib::emit_smtlib;
pub use tables::{build_tables, path_duration, path_reliability, DerivedTables};

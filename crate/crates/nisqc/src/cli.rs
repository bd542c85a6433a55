//! Command-line interface.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nisqc_core::eval::reliability::FailureModel;
use nisqc_core::synthetic::{synthetic_calibration, Jitter};
use nisqc_core::{
    build_tables, emit_smtlib, gen_bv, gen_random, gen_toffoli, Circuit, GridMachine,
    MachineDefaults, Routing, SolveError, Strategy,
};
use serde::Serialize;

use crate::error::Error;
use crate::formats::{
    emit_calibration, emit_circuit, load_calibration, load_circuit, CircuitFormat,
};
use crate::fsio::{write_all_atomic, write_atomic};
use crate::pipeline::{
    compile, evaluate, parallel_map, thread_count, CompileOptions, EvalOptions, VariantChoice,
};
use crate::qasm::emit_compiled_qasm;
use crate::record::CompilationRecord;
use crate::report::write_report;

#[derive(Debug, Parser)]
#[command(
    name = "nisqc",
    version,
    about = "Noise-adaptive qubit mapping for grid machines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a circuit for a calibrated machine.
    Compile(CompileArgs),
    /// Re-check a compilation record and score it.
    Evaluate(EvaluateArgs),
    /// Compile one circuit under several variants and report each.
    Compare(CompareArgs),
    /// Compile-time sweep over random circuits.
    Bench(BenchArgs),
    /// Write a benchmark circuit.
    GenCircuit(GenCircuitArgs),
    /// Write a seeded synthetic calibration snapshot.
    GenCalibration(GenCalibrationArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    TSmt,
    TSmtStar,
    RSmtStar,
    GreedyV,
    GreedyE,
}

impl From<VariantArg> for VariantChoice {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::TSmt => VariantChoice::TSmt,
            VariantArg::TSmtStar => VariantChoice::TSmtStar,
            VariantArg::RSmtStar => VariantChoice::RSmtStar,
            VariantArg::GreedyV => VariantChoice::GreedyV,
            VariantArg::GreedyE => VariantChoice::GreedyE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoutingArg {
    Rr,
    #[value(name = "1bp")]
    OneBend,
}

impl From<RoutingArg> for Routing {
    fn from(r: RoutingArg) -> Self {
        match r {
            RoutingArg::Rr => Routing::RectangleReservation,
            RoutingArg::OneBend => Routing::OneBend,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FailureArg {
    PerGate,
    PerPhysical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Qasm,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Bv,
    Toffoli,
    Random,
}

/// Flags shared by every command that compiles.
#[derive(Debug, Clone, Args)]
pub struct MappingFlags {
    /// Routing policy for exact variants (default 1bp).
    #[arg(long, value_enum)]
    pub routing: Option<RoutingArg>,
    /// Readout weight of the reliability objective (default 0.5).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Charge return SWAPs in reliability as well as duration.
    #[arg(long)]
    pub count_return_swaps: bool,
    /// Seconds per exact search (default 60); heuristics ignore it.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

impl MappingFlags {
    fn options(&self, variant: VariantChoice) -> CompileOptions {
        CompileOptions {
            variant,
            routing: self.routing.map(Into::into),
            omega: self.omega,
            count_return_swaps: self.count_return_swaps,
            time_limit: self.time_limit,
        }
    }

    /// Options for one variant of a multi-variant run: routing and ω apply
    /// only where they mean something.
    fn options_lenient(&self, variant: VariantChoice) -> CompileOptions {
        let mut o = self.options(variant);
        if !variant.is_exact() {
            o.routing = None;
        }
        if !variant.maximizes_reliability() {
            o.omega = None;
        }
        o
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalFlags {
    /// Monte Carlo trials.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo failure events: one per routed gate or one per physical gate.
    #[arg(long, value_enum, default_value = "per-gate")]
    pub failure_model: FailureArg,
}

impl EvalFlags {
    fn options(&self) -> EvalOptions {
        EvalOptions {
            trials: self.trials,
            seed: self.seed,
            model: match self.failure_model {
                FailureArg::PerGate => FailureModel::PerGate,
                FailureArg::PerPhysical => FailureModel::PerPhysical,
            },
            threads: thread_count(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompileArgs {
    /// Circuit file (.qasm, or .json).
    pub circuit: PathBuf,
    /// Calibration JSON.
    pub calibration: PathBuf,
    #[arg(long, value_enum, default_value = "greedy-e")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub mapping: MappingFlags,
    /// Also write the SMT-LIB encoding of the exact problem here.
    #[arg(long)]
    pub emit_smtlib: Option<PathBuf>,
    /// Compiled QASM; the record goes next to it with a .json extension.
    #[arg(long, default_value = "compiled.qasm")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Compilation record written by `compile`.
    pub record: PathBuf,
    /// Calibration the record was compiled against.
    pub calibration: PathBuf,
    #[command(flatten)]
    pub eval: EvalFlags,
    /// Report CSV; a .json twin is written alongside.
    #[arg(long, default_value = "report.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    pub circuit: PathBuf,
    pub calibration: PathBuf,
    /// Comma-separated variants, in output order.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["t-smt-star", "r-smt-star", "greedy-e"])]
    pub variants: Vec<VariantArg>,
    #[command(flatten)]
    pub mapping: MappingFlags,
    #[command(flatten)]
    pub eval: EvalFlags,
    #[arg(long, default_value = "compare.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated `QUBITSxGATES` sizes.
    #[arg(long, value_delimiter = ',', default_values = ["4x128", "16x512", "64x1024", "128x2048"])]
    pub sizes: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["greedy-v", "greedy-e"])]
    pub variants: Vec<VariantArg>,
    #[command(flatten)]
    pub mapping: MappingFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Machine for every size; by default each size gets the smallest square
    /// synthetic grid that fits it, with coherence long enough not to bind.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenCircuitArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 4)]
    pub qubits: usize,
    /// Gate count for random circuits.
    #[arg(long, default_value_t = 128)]
    pub gates: usize,
    /// Hidden string for BV (default all ones).
    #[arg(long)]
    pub string: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output format (default from the --out extension).
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenCalibrationArgs {
    #[arg(long)]
    pub mx: usize,
    #[arg(long)]
    pub my: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative spread of error rates.
    #[arg(long, default_value_t = 0.5)]
    pub error_spread: f64,
    /// Relative spread of coherence times.
    #[arg(long, default_value_t = 0.2)]
    pub t2_spread: f64,
    /// Absolute spread of CNOT durations, in timeslots.
    #[arg(long, default_value_t = 1)]
    pub duration_spread: u64,
    /// Base coherence time in timeslots; also used as the static bound.
    #[arg(long)]
    pub t2: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct CompileSummary<'a> {
    variant: &'a str,
    objective: f64,
    optimal: bool,
    makespan: u64,
    swap_count: usize,
    reliability: f64,
    compile_time_s: f64,
    qasm: String,
    record: String,
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(
        || "circuit".to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

pub fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Compile(a) => cmd_compile(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::GenCircuit(a) => cmd_gen_circuit(&a),
        Command::GenCalibration(a) => cmd_gen_calibration(&a),
    }
}

pub fn cmd_compile(a: &CompileArgs) -> Result<(), Error> {
    let opts = a.mapping.options(a.variant.into());
    let strategy = opts.strategy()?;
    if a.emit_smtlib.is_some() && !matches!(strategy, Strategy::Exact(_)) {
        return Err(Error::Usage("--emit-smtlib needs an exact variant".into()));
    }
    let c = load_circuit(&a.circuit)?;
    let m = load_calibration(&a.calibration)?;
    let smt = match (&a.emit_smtlib, strategy) {
        (Some(path), Strategy::Exact(cfg)) => {
            let t = build_tables(&m, cfg.count_return_swaps)?;
            Some((path, emit_smtlib(&c, &m, &t, &cfg)))
        }
        _ => None,
    };
    let compiled = compile(&c, &m, &opts)?;
    let cc = &compiled.circuit;
    let record = CompilationRecord::new(cc, &m, &stem(&a.circuit), compiled.compile_time_s);
    let qasm = emit_compiled_qasm(cc, &m);
    let record_path = a.out.with_extension("json");
    let json = record.to_json();
    let mut files: Vec<(&Path, &[u8])> =
        vec![(&a.out, qasm.as_bytes()), (&record_path, json.as_bytes())];
    if let Some((path, text)) = &smt {
        files.push((path.as_path(), text.as_bytes()));
    }
    write_all_atomic(&files)?;
    let summary = CompileSummary {
        variant: cc.strategy.label(),
        objective: cc.objective_value,
        optimal: cc.optimal,
        makespan: cc.makespan,
        swap_count: cc.swap_count,
        reliability: cc.reliability,
        compile_time_s: compiled.compile_time_s,
        qasm: a.out.display().to_string(),
        record: record_path.display().to_string(),
    };
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> Result<(), Error> {
    let text = crate::fsio::read(&a.record)?;
    let record = CompilationRecord::from_json(&text).map_err(|e| e.in_file(&a.record))?;
    let m = load_calibration(&a.calibration)?;
    let cc = record.rebuild(&m)?;
    let report = evaluate(
        &record.benchmark,
        &cc,
        &m,
        record.compile_time_s,
        &a.eval.options(),
    )?;
    write_report(std::slice::from_ref(&report), &a.out)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

pub fn cmd_compare(a: &CompareArgs) -> Result<(), Error> {
    let variants: Vec<VariantChoice> = a.variants.iter().map(|&v| v.into()).collect();
    if a.mapping.omega.is_some() && !variants.iter().any(|v| v.maximizes_reliability()) {
        return Err(Error::Usage(
            "--omega given but no reliability variant selected".into(),
        ));
    }
    let opts: Vec<CompileOptions> = variants
        .iter()
        .map(|&v| a.mapping.options_lenient(v))
        .collect();
    for o in &opts {
        o.strategy()?;
    }
    let c = load_circuit(&a.circuit)?;
    let m = load_calibration(&a.calibration)?;
    let benchmark = stem(&a.circuit);
    let mut eval = a.eval.options();
    // variants already run side by side
    eval.threads = 1;
    let reports = parallel_map(&opts, thread_count(), |o| {
        let compiled = compile(&c, &m, o)?;
        evaluate(
            &benchmark,
            &compiled.circuit,
            &m,
            compiled.compile_time_s,
            &eval,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>, Error>>()?;
    write_report(&reports, &a.out)
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct BenchRow {
    pub benchmark: String,
    pub variant: String,
    pub num_qubits: usize,
    pub num_gates: usize,
    /// `ok`, `timeout`, `infeasible` or `error`.
    pub status: String,
    pub optimal: bool,
    pub compile_time_s: f64,
    pub objective: Option<f64>,
    pub makespan: Option<u64>,
    pub swaps: Option<usize>,
}

fn parse_size(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Usage(format!("size '{s}' is not QUBITSxGATES"));
    let (q, g) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let q: usize = q.trim().parse().map_err(|_| bad())?;
    let g: usize = g.trim().parse().map_err(|_| bad())?;
    if q < 2 {
        return Err(Error::Usage(format!(
            "size '{s}': random circuits need 2 or more qubits"
        )));
    }
    Ok((q, g))
}

/// Square synthetic grid for `qubits` whose coherence never binds.
pub fn bench_machine(qubits: usize, seed: u64) -> Result<GridMachine, Error> {
    let side = (1..).find(|s| s * s >= qubits).expect("finite");
    let jitter = Jitter {
        base: MachineDefaults {
            t2: 1 << 40,
            static_coherence_bound: 1 << 40,
            ..MachineDefaults::default()
        },
        ..Jitter::default()
    };
    Ok(GridMachine::from_spec(&synthetic_calibration(
        side.max(2),
        side,
        seed,
        &jitter,
    ))?)
}

pub fn cmd_bench(a: &BenchArgs) -> Result<(), Error> {
    let sizes = a
        .sizes
        .iter()
        .map(|s| parse_size(s))
        .collect::<Result<Vec<_>, _>>()?;
    let variants: Vec<VariantChoice> = a.variants.iter().map(|&v| v.into()).collect();
    for &v in &variants {
        a.mapping.options_lenient(v).strategy()?;
    }
    let fixed = a.calibration.as_deref().map(load_calibration).transpose()?;
    let mut jobs = Vec::new();
    for &(q, g) in &sizes {
        for &v in &variants {
            jobs.push((q, g, v));
        }
    }
    let rows = parallel_map(
        &jobs,
        thread_count(),
        |&(q, g, v)| -> Result<BenchRow, Error> {
            let c = gen_random(q, g, a.seed)?;
            let m = match &fixed {
                Some(m) => m.clone(),
                None => bench_machine(q, a.seed)?,
            };
            let started = std::time::Instant::now();
            let result = compile(&c, &m, &a.mapping.options_lenient(v));
            let elapsed = started.elapsed().as_secs_f64();
            let mut row = BenchRow {
                benchmark: format!("random-{q}x{g}"),
                variant: v.label().to_string(),
                num_qubits: q,
                num_gates: g,
                status: "ok".into(),
                optimal: false,
                compile_time_s: elapsed,
                objective: None,
                makespan: None,
                swaps: None,
            };
            match result {
                Ok(compiled) => {
                    let cc = compiled.circuit;
                    row.optimal = cc.optimal;
                    row.compile_time_s = compiled.compile_time_s;
                    row.objective = Some(cc.objective_value);
                    row.makespan = Some(cc.makespan);
                    row.swaps = Some(cc.swap_count);
                }
                Err(Error::Solve(SolveError::Timeout)) => row.status = "timeout".into(),
                Err(Error::Solve(SolveError::Infeasible)) => row.status = "infeasible".into(),
                Err(e @ Error::Usage(_)) => return Err(e),
                Err(_) => row.status = "error".into(),
            }
            Ok(row)
        },
    )
    .into_iter()
    .collect::<Result<Vec<_>, Error>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
    write_atomic(&a.out, &bytes)
}

pub fn cmd_gen_circuit(a: &GenCircuitArgs) -> Result<(), Error> {
    let c: Circuit = match a.kind {
        KindArg::Bv => {
            let s = a
                .string
                .clone()
                .unwrap_or_else(|| "1".repeat(a.qubits.saturating_sub(1)));
            gen_bv(a.qubits, &s)?
        }
        KindArg::Toffoli => gen_toffoli(),
        KindArg::Random => gen_random(a.qubits, a.gates, a.seed)?,
    };
    let format = match (a.format, &a.out) {
        (Some(FormatArg::Qasm), _) => CircuitFormat::Qasm,
        (Some(FormatArg::Json), _) => CircuitFormat::Json,
        (None, Some(p)) => CircuitFormat::from_path(p),
        (None, None) => CircuitFormat::Qasm,
    };
    let text = emit_circuit(&c, format);
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_gen_calibration(a: &GenCalibrationArgs) -> Result<(), Error> {
    if a.mx == 0 || a.my == 0 {
        return Err(Error::Usage("grid dimensions must be positive".into()));
    }
    for (name, v) in [
        ("--error-spread", a.error_spread),
        ("--t2-spread", a.t2_spread),
    ] {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::Usage(format!("{name} must be in [0, 1)")));
        }
    }
    let mut base = MachineDefaults::default();
    if let Some(t2) = a.t2 {
        base.t2 = t2;
        base.static_coherence_bound = t2;
    }
    let jitter = Jitter {
        base,
        error_spread: a.error_spread,
        t2_spread: a.t2_spread,
        duration_spread: a.duration_spread,
    };
    let spec = synthetic_calibration(a.mx, a.my, a.seed, &jitter);
    GridMachine::from_spec(&spec)?;
    let text = emit_calibration(&spec);
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

//! Compile and evaluate: the steps every subcommand shares.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use nisqc_core::eval::equivalence::equivalence_check;
use nisqc_core::eval::reliability::{
    failure_events, reliability_score, FailureModel, McEstimate, TrialModel,
};
use nisqc_core::eval::sim::SimError;
use nisqc_core::eval::EvalReport;
use nisqc_core::{
    build_tables, expand, heuristic_compile, solve_exact, Circuit, CompiledCircuit, GridMachine,
    HeuristicConfig, Policy, ProblemConfig, Routing, Solution, Strategy, Unlimited, Variant,
};

use crate::budget::Deadline;
use crate::error::Error;

/// Default time limit for exact variants, in seconds.
pub const DEFAULT_EXACT_TIME_LIMIT: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantChoice {
    TSmt,
    TSmtStar,
    RSmtStar,
    GreedyV,
    GreedyE,
}

impl VariantChoice {
    pub const ALL: [VariantChoice; 5] = [
        VariantChoice::TSmt,
        VariantChoice::TSmtStar,
        VariantChoice::RSmtStar,
        VariantChoice::GreedyV,
        VariantChoice::GreedyE,
    ];

    pub fn label(self) -> &'static str {
        match self {
            VariantChoice::TSmt => "t-smt",
            VariantChoice::TSmtStar => "t-smt-star",
            VariantChoice::RSmtStar => "r-smt-star",
            VariantChoice::GreedyV => "greedy-v",
            VariantChoice::GreedyE => "greedy-e",
        }
    }

    pub fn is_exact(self) -> bool {
        self.exact_variant().is_some()
    }

    fn exact_variant(self) -> Option<Variant> {
        match self {
            VariantChoice::TSmt => Some(Variant::TSmt),
            VariantChoice::TSmtStar => Some(Variant::TSmtStar),
            VariantChoice::RSmtStar => Some(Variant::RSmtStar),
            VariantChoice::GreedyV | VariantChoice::GreedyE => None,
        }
    }

    pub fn maximizes_reliability(self) -> bool {
        !matches!(self, VariantChoice::TSmt | VariantChoice::TSmtStar)
    }
}

impl fmt::Display for VariantChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for VariantChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|v| v.label() == s)
            .ok_or_else(|| Error::Usage(format!("unknown variant '{s}'")))
    }
}

/// Variant selection plus the flags that refine it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    pub variant: VariantChoice,
    /// Exact variants only; defaults to one-bend.
    pub routing: Option<Routing>,
    /// Reliability variants only; defaults to 0.5.
    pub omega: Option<f64>,
    pub count_return_swaps: bool,
    /// Seconds; exact variants default to [`DEFAULT_EXACT_TIME_LIMIT`],
    /// heuristics run unlimited.
    pub time_limit: Option<f64>,
}

impl CompileOptions {
    pub fn new(variant: VariantChoice) -> Self {
        Self {
            variant,
            routing: None,
            omega: None,
            count_return_swaps: false,
            time_limit: None,
        }
    }

    /// Checks flag combinations and resolves defaults.
    pub fn strategy(&self) -> Result<Strategy, Error> {
        if self.omega.is_some() && !self.variant.maximizes_reliability() {
            return Err(Error::Usage(format!(
                "--omega only applies to reliability variants, not {}",
                self.variant
            )));
        }
        match self.variant.exact_variant() {
            Some(v) => {
                let mut cfg = ProblemConfig::new(v, self.routing.unwrap_or(Routing::OneBend))?;
                if let Some(w) = self.omega {
                    cfg = cfg.with_omega(w)?;
                }
                cfg.count_return_swaps = self.count_return_swaps;
                cfg.time_limit = Some(self.time_limit.unwrap_or(DEFAULT_EXACT_TIME_LIMIT));
                cfg.validate()?;
                Ok(Strategy::Exact(cfg))
            }
            None => {
                if self.routing.is_some() {
                    return Err(Error::Usage(format!(
                        "--routing only applies to exact variants; {} routes along best paths",
                        self.variant
                    )));
                }
                if matches!(self.time_limit, Some(t) if !(t > 0.0)) {
                    return Err(Error::Usage("--time-limit must be positive".into()));
                }
                let policy = match self.variant {
                    VariantChoice::GreedyV => Policy::GreedyV,
                    _ => Policy::GreedyE,
                };
                let mut h = HeuristicConfig::new(policy);
                if let Some(w) = self.omega {
                    if !(0.0..=1.0).contains(&w) {
                        return Err(Error::Usage(format!("--omega {w} outside [0, 1]")));
                    }
                    h.omega = w;
                }
                h.count_return_swaps = self.count_return_swaps;
                Ok(Strategy::Heuristic(h))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub circuit: CompiledCircuit,
    pub compile_time_s: f64,
}

/// Maps, schedules and expands `c`. Exact variants stop at their time limit
/// and return the best solution found with `optimal == false`.
pub fn compile(c: &Circuit, m: &GridMachine, opts: &CompileOptions) -> Result<Compiled, Error> {
    let strategy = opts.strategy()?;
    let started = Instant::now();
    let t = build_tables(m, strategy.count_return_swaps())?;
    let sol: Solution = match strategy {
        Strategy::Exact(cfg) => {
            let limit = cfg.time_limit.unwrap_or(DEFAULT_EXACT_TIME_LIMIT);
            match Deadline::after_secs(limit) {
                Some(d) => solve_exact(c, m, &cfg, d)?,
                None => solve_exact(c, m, &cfg, Unlimited)?,
            }
        }
        Strategy::Heuristic(h) => heuristic_compile(c, m, &t, &h)?,
    };
    let circuit = expand(&sol, c, m, &t)?;
    Ok(Compiled {
        circuit,
        compile_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Worker count: `NISQC_THREADS` when set to a positive integer, otherwise
/// the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("NISQC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// `f` over `items` on up to `threads` workers; results keep item order.
pub fn parallel_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = threads.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= items.len() {
                            break done;
                        }
                        done.push((i, f(&items[i])));
                    }
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots
        .into_iter()
        .map(|r| r.expect("every index visited"))
        .collect()
}

/// Monte Carlo success estimate split across `threads`; trial `i` always
/// draws from substream `i`, so the result does not depend on `threads`.
pub fn monte_carlo(
    cc: &CompiledCircuit,
    m: &GridMachine,
    trials: u64,
    seed: u64,
    model: FailureModel,
    threads: usize,
) -> Result<McEstimate, Error> {
    let trials = trials.max(1);
    let tm = TrialModel::new(
        failure_events(cc, m, cc.strategy.count_return_swaps(), model)?,
        seed,
    );
    let chunks = (threads as u64).clamp(1, trials);
    let ranges: Vec<std::ops::Range<u64>> = (0..chunks)
        .map(|k| trials * k / chunks..trials * (k + 1) / chunks)
        .collect();
    let hits: u64 = parallel_map(&ranges, threads, |r| tm.run(r.clone()))
        .into_iter()
        .sum();
    Ok(McEstimate::from_counts(hits, trials))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub trials: u64,
    pub seed: u64,
    pub model: FailureModel,
    pub threads: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 0,
            model: FailureModel::PerGate,
            threads: 1,
        }
    }
}

/// Analytic reliability, Monte Carlo estimate and, when small enough to
/// simulate, the equivalence verdict.
pub fn evaluate(
    benchmark: &str,
    cc: &CompiledCircuit,
    m: &GridMachine,
    compile_time_s: f64,
    opts: &EvalOptions,
) -> Result<EvalReport, Error> {
    let reliability = reliability_score(cc, m, cc.strategy.count_return_swaps())?;
    let mc = monte_carlo(cc, m, opts.trials, opts.seed, opts.model, opts.threads)?;
    let equivalence = match equivalence_check(&cc.source, cc, m) {
        Ok(e) => Some(e.pass),
        Err(SimError::TooManyQubits { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(EvalReport {
        benchmark: benchmark.to_string(),
        variant: cc.strategy.label().to_string(),
        reliability,
        mc_success: mc.estimate,
        stderr: mc.stderr,
        trials: mc.trials,
        makespan: cc.makespan,
        swaps: cc.swap_count,
        compile_time_s,
        equivalence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nisqc_core::MachineDefaults;

    #[test]
    fn flag_validation() {
        let mut o = CompileOptions::new(VariantChoice::RSmtStar);
        o.routing = Some(Routing::RectangleReservation);
        assert_eq!(o.strategy().unwrap_err().kind(), "usage");
        let mut o = CompileOptions::new(VariantChoice::TSmtStar);
        o.omega = Some(0.3);
        assert_eq!(o.strategy().unwrap_err().kind(), "usage");
        let mut o = CompileOptions::new(VariantChoice::GreedyE);
        o.routing = Some(Routing::OneBend);
        assert_eq!(o.strategy().unwrap_err().kind(), "usage");
        let mut o = CompileOptions::new(VariantChoice::RSmtStar);
        o.omega = Some(1.5);
        assert!(o.strategy().is_err());
        let Strategy::Exact(cfg) = CompileOptions::new(VariantChoice::TSmt).strategy().unwrap()
        else {
            panic!("exact")
        };
        assert_eq!(cfg.time_limit, Some(DEFAULT_EXACT_TIME_LIMIT));
        assert_eq!(cfg.routing, Routing::OneBend);
    }

    #[test]
    fn variant_labels_parse() {
        for v in VariantChoice::ALL {
            assert_eq!(v.label().parse::<VariantChoice>().unwrap(), v);
        }
        assert!("qiskit".parse::<VariantChoice>().is_err());
    }

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<u64> = (0..50).collect();
        assert_eq!(
            parallel_map(&items, 7, |x| x * x),
            items.iter().map(|x| x * x).collect::<Vec<_>>()
        );
        assert!(parallel_map(&[] as &[u64], 4, |x| *x).is_empty());
    }

    #[test]
    fn monte_carlo_ignores_thread_count() {
        let m = GridMachine::uniform(2, 3, MachineDefaults::default()).unwrap();
        let c = nisqc_core::gen_bv(4, "111").unwrap();
        let cc = compile(&c, &m, &CompileOptions::new(VariantChoice::GreedyE))
            .unwrap()
            .circuit;
        let a = monte_carlo(&cc, &m, 20_000, 9, FailureModel::PerGate, 1).unwrap();
        let b = monte_carlo(&cc, &m, 20_000, 9, FailureModel::PerGate, 5).unwrap();
        assert_eq!(a, b);
    }
}

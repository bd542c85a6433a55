//! SMT-LIB2 encoding of the joint placement, scheduling and routing problem.
//!
//! Unlike [`crate::exact`], start times are free variables here, so an
//! optimising solver searches schedules as well. Reliability terms are the
//! natural logs of the per-gate reliabilities.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::machine::{GridMachine, Pos};
use crate::mapping::{ProblemConfig, Routing, Variant};
use crate::tables::DerivedTables;

fn real(v: f64) -> String {
    let mut s = alloc::format!("{}", v.abs());
    if !s.contains('.') {
        s.push_str(".0");
    }
    if v < 0.0 {
        alloc::format!("(- {s})")
    } else {
        s
    }
}

fn at(q: usize, p: Pos) -> String {
    alloc::format!("(= x{q} {}) (= y{q} {})", p.x, p.y)
}

struct Emitter<'a> {
    out: String,
    c: &'a Circuit,
    m: &'a GridMachine,
    t: &'a DerivedTables,
    cfg: &'a ProblemConfig,
}

impl Emitter<'_> {
    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn cells(&self) -> impl Iterator<Item = Pos> + '_ {
        self.m.qubits().iter().map(|h| h.pos)
    }

    fn header(&mut self) {
        let cfg = self.cfg;
        let _ = writeln!(
            self.out,
            "; variant {} routing {} omega {} count-return-swaps {}",
            cfg.variant.label(),
            cfg.routing.label(),
            cfg.omega,
            cfg.count_return_swaps
        );
        let _ = writeln!(
            self.out,
            "; grid {}x{}, {} program qubits, {} gates",
            self.m.mx(),
            self.m.my(),
            self.c.num_qubits(),
            self.c.len()
        );
        self.line("; decoding: qubit q sits at (xq, yq); gate g starts at tau_g and lasts dur_g");
        self.line(
            "; j_g true: CNOT g bends at (x_control, y_target), false: at (x_target, y_control)",
        );
        self.line("; eps_g is the natural log of gate g's reliability");
        self.line("; logic: linear integer/real arithmetic with optimisation extensions");
        self.line("(set-option :produce-models true)");
        self.line("(define-fun absdiff ((a Int) (b Int)) Int (ite (>= a b) (- a b) (- b a)))");
        self.line("(define-fun lo ((a Int) (b Int)) Int (ite (<= a b) a b))");
        self.line("(define-fun hi ((a Int) (b Int)) Int (ite (<= a b) b a))");
        self.line(
            "(define-fun ov ((alx Int) (aly Int) (arx Int) (ary Int) (blx Int) (bly Int) (brx Int) (bry Int)) Bool \
             (not (or (> alx brx) (< arx blx) (> aly bry) (< ary bly))))",
        );
    }

    fn placement(&mut self) {
        let (mx, my) = (self.m.mx(), self.m.my());
        for q in 0..self.c.num_qubits() {
            let _ = writeln!(
                self.out,
                "(declare-const x{q} Int)\n(declare-const y{q} Int)"
            );
            let _ = writeln!(
                self.out,
                "(assert (and (<= 0 x{q}) (< x{q} {mx}) (<= 0 y{q}) (< y{q} {my})))"
            );
        }
        for a in 0..self.c.num_qubits() {
            for b in a + 1..self.c.num_qubits() {
                let _ = writeln!(
                    self.out,
                    "(assert (or (distinct x{a} x{b}) (distinct y{a} y{b})))"
                );
            }
        }
    }

    /// Implications over every (control cell, target cell) pair.
    fn pair_cases(&mut self, g: &Gate, mut body: impl FnMut(&Self, Pos, Pos) -> Vec<String>) {
        let (qc, qt) = g.cnot_pair().expect("cnot");
        let cells: Vec<Pos> = self.cells().collect();
        for &pc in &cells {
            for &pt in &cells {
                if pc == pt {
                    continue;
                }
                for clause in body(self, pc, pt) {
                    let s = alloc::format!(
                        "(assert (=> (and {} {}) {clause}))",
                        at(qc, pc),
                        at(qt, pt)
                    );
                    self.line(&s);
                }
            }
        }
    }

    fn junction_index(&self, pc: Pos, pt: Pos, first: bool) -> usize {
        let j = if first {
            Pos::new(pc.x, pt.y)
        } else {
            Pos::new(pt.x, pc.y)
        };
        let routes = self.t.one_bend(self.m.cell(pc), self.m.cell(pt));
        routes.iter().position(|r| r.junction == j).unwrap_or(0)
    }

    fn durations(&mut self) {
        let static_model = self.cfg.variant == Variant::TSmt;
        for g in self.c.gates() {
            let id = g.id;
            let _ = writeln!(
                self.out,
                "(declare-const tau{id} Int)\n(declare-const dur{id} Int)\n(assert (>= tau{id} 0))"
            );
            match g.kind {
                GateKind::Cnot => {
                    let (qc, qt) = g.cnot_pair().expect("cnot");
                    if self.cfg.routing == Routing::OneBend {
                        let _ = writeln!(self.out, "(declare-const j{id} Bool)");
                    }
                    if static_model {
                        let _ = writeln!(
                            self.out,
                            "(assert (= dur{id} (+ (* {} (- (+ (absdiff x{qc} x{qt}) (absdiff y{qc} y{qt})) 1)) {})))",
                            2 * self.m.static_tau_swap(),
                            self.m.static_tau_cnot
                        );
                    } else if self.cfg.routing == Routing::RectangleReservation {
                        self.pair_cases(g, |e, pc, pt| {
                            alloc::vec![alloc::format!(
                                "(= dur{id} {})",
                                e.t.delta(e.m.cell(pc), e.m.cell(pt))
                            )]
                        });
                    } else {
                        self.pair_cases(g, |e, pc, pt| {
                            let routes = e.t.one_bend(e.m.cell(pc), e.m.cell(pt));
                            [true, false]
                                .iter()
                                .map(|&first| {
                                    let r = &routes[e.junction_index(pc, pt, first)];
                                    let sel = if first { "" } else { "(not " };
                                    let close = if first { "" } else { ")" };
                                    alloc::format!(
                                        "(=> {sel}j{id}{close} (= dur{id} {}))",
                                        r.duration
                                    )
                                })
                                .collect()
                        });
                    }
                }
                GateKind::Measure => {
                    let q = g.qubits()[0];
                    let cases: Vec<(Pos, u64)> = self
                        .m
                        .qubits()
                        .iter()
                        .map(|h| (h.pos, h.readout_duration))
                        .collect();
                    for (p, d) in cases {
                        let _ =
                            writeln!(self.out, "(assert (=> (and {}) (= dur{id} {d})))", at(q, p));
                    }
                }
                _ => {
                    let _ = writeln!(
                        self.out,
                        "(assert (= dur{id} {}))",
                        self.m.single_qubit_duration
                    );
                }
            }
        }
    }

    fn dependencies_and_coherence(&mut self) {
        let dag = crate::circuit::build_dag(self.c);
        for (a, b) in dag.edges() {
            let _ = writeln!(self.out, "(assert (>= tau{b} (+ tau{a} dur{a})))");
        }
        for g in self.c.gates() {
            let id = g.id;
            if self.cfg.variant == Variant::TSmt {
                let _ = writeln!(
                    self.out,
                    "(assert (< (+ tau{id} dur{id}) {}))",
                    self.m.static_coherence_bound
                );
                continue;
            }
            for &q in g.qubits() {
                let cases: Vec<(Pos, u64)> =
                    self.m.qubits().iter().map(|h| (h.pos, h.t2)).collect();
                for (p, t2) in cases {
                    let _ = writeln!(
                        self.out,
                        "(assert (=> (and {}) (<= (+ tau{id} dur{id}) {t2})))",
                        at(q, p)
                    );
                }
            }
        }
    }

    /// Rectangles reserved by gate `g`, as SMT terms `(lx ly rx ry)`.
    fn rects(&self, g: &Gate) -> Vec<[String; 4]> {
        let id = g.id;
        match g.cnot_pair() {
            None => {
                let q = g.qubits()[0];
                let (x, y) = (alloc::format!("x{q}"), alloc::format!("y{q}"));
                alloc::vec![[x.clone(), y.clone(), x, y]]
            }
            Some((c, t)) => {
                let span = |ax: &str, ay: &str, bx: &str, by: &str| {
                    [
                        alloc::format!("(lo {ax} {bx})"),
                        alloc::format!("(lo {ay} {by})"),
                        alloc::format!("(hi {ax} {bx})"),
                        alloc::format!("(hi {ay} {by})"),
                    ]
                };
                let (xc, yc, xt, yt) = (
                    alloc::format!("x{c}"),
                    alloc::format!("y{c}"),
                    alloc::format!("x{t}"),
                    alloc::format!("y{t}"),
                );
                match self.cfg.routing {
                    Routing::RectangleReservation => alloc::vec![span(&xc, &yc, &xt, &yt)],
                    Routing::OneBend => {
                        let jx = alloc::format!("(ite j{id} {xc} {xt})");
                        let jy = alloc::format!("(ite j{id} {yt} {yc})");
                        alloc::vec![span(&xc, &yc, &jx, &jy), span(&jx, &jy, &xt, &yt)]
                    }
                }
            }
        }
    }

    fn exclusion(&mut self) {
        let gates = self.c.gates();
        for a in 0..gates.len() {
            for b in a + 1..gates.len() {
                let (ga, gb) = (&gates[a], &gates[b]);
                if !ga.is_cnot() && !gb.is_cnot() {
                    // distinct cells never meet; shared qubits are ordered
                    continue;
                }
                let mut space = Vec::new();
                for ra in self.rects(ga) {
                    for rb in self.rects(gb) {
                        space.push(alloc::format!("(ov {} {})", ra.join(" "), rb.join(" ")));
                    }
                }
                let _ = writeln!(
                    self.out,
                    "(assert (=> (or {}) (not (and (< tau{a} (+ tau{b} dur{b})) (< tau{b} (+ tau{a} dur{a}))))))",
                    space.join(" ")
                );
            }
        }
    }

    fn objective(&mut self) {
        let gates = self.c.gates();
        if self.cfg.variant != Variant::RSmtStar {
            self.line("(declare-const makespan Int)\n(assert (>= makespan 0))");
            for g in gates {
                let _ = writeln!(self.out, "(assert (>= makespan (+ tau{0} dur{0})))", g.id);
            }
            self.line("(minimize makespan)");
            return;
        }
        let (mut ro, mut cx) = (Vec::new(), Vec::new());
        for g in gates {
            let id = g.id;
            match g.kind {
                GateKind::Measure => {
                    let _ = writeln!(self.out, "(declare-const eps{id} Real)");
                    let q = g.qubits()[0];
                    let cases: Vec<(Pos, f64)> = self
                        .m
                        .qubits()
                        .iter()
                        .map(|h| (h.pos, libm::log(self.t.readout_rel(h.id))))
                        .collect();
                    for (p, v) in cases {
                        let _ = writeln!(
                            self.out,
                            "(assert (=> (and {}) (= eps{id} {})))",
                            at(q, p),
                            real(v)
                        );
                    }
                    ro.push(alloc::format!("eps{id}"));
                }
                GateKind::Cnot => {
                    let _ = writeln!(self.out, "(declare-const eps{id} Real)");
                    self.pair_cases(g, |e, pc, pt| {
                        let routes = e.t.one_bend(e.m.cell(pc), e.m.cell(pt));
                        [true, false]
                            .iter()
                            .map(|&first| {
                                let r = &routes[e.junction_index(pc, pt, first)];
                                let sel = if first { "" } else { "(not " };
                                let close = if first { "" } else { ")" };
                                alloc::format!(
                                    "(=> {sel}j{id}{close} (= eps{id} {}))",
                                    real(libm::log(r.reliability))
                                )
                            })
                            .collect()
                    });
                    cx.push(alloc::format!("eps{id}"));
                }
                _ => {}
            }
        }
        let sum = |v: &[String]| match v.len() {
            0 => String::from("0.0"),
            1 => v[0].clone(),
            _ => alloc::format!("(+ {})", v.join(" ")),
        };
        let _ = writeln!(
            self.out,
            "(maximize (+ (* {} {}) (* {} {})))",
            real(self.cfg.omega),
            sum(&ro),
            real(1.0 - self.cfg.omega),
            sum(&cx)
        );
    }
}

/// SMT-LIB2 script for `c` on `m` under `cfg`. `t` must be built with the
/// same `count_return_swaps` setting as `cfg`.
pub fn emit_smtlib(c: &Circuit, m: &GridMachine, t: &DerivedTables, cfg: &ProblemConfig) -> String {
    let mut e = Emitter {
        out: String::new(),
        c,
        m,
        t,
        cfg,
    };
    e.header();
    e.placement();
    e.durations();
    e.dependencies_and_coherence();
    e.exclusion();
    e.objective();
    e.line("(check-sat)\n(get-objectives)\n(get-model)");
    e.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_bv;
    use crate::machine::MachineDefaults;
    use crate::tables::build_tables;

    #[test]
    fn bv4_declares_eight_locations_and_one_start_per_gate() {
        let m = GridMachine::uniform(3, 3, MachineDefaults::default()).unwrap();
        let t = build_tables(&m, false).unwrap();
        let c = gen_bv(4, "111").unwrap();
        for (v, r) in [
            (Variant::TSmt, Routing::RectangleReservation),
            (Variant::TSmtStar, Routing::OneBend),
            (Variant::RSmtStar, Routing::OneBend),
        ] {
            let s = emit_smtlib(&c, &m, &t, &ProblemConfig::new(v, r).unwrap());
            let locs = s
                .lines()
                .filter(|l| l.starts_with("(declare-const x") || l.starts_with("(declare-const y"))
                .count();
            assert_eq!(locs, 8);
            let taus = s
                .lines()
                .filter(|l| l.starts_with("(declare-const tau"))
                .count();
            assert_eq!(taus, c.len());
            assert_eq!(s.matches('(').count(), s.matches(')').count());
        }
    }

    #[test]
    fn empty_circuit_objective_is_zero() {
        let m = GridMachine::uniform(2, 2, MachineDefaults::default()).unwrap();
        let t = build_tables(&m, false).unwrap();
        let s = emit_smtlib(
            &Circuit::new(0, 0),
            &m,
            &t,
            &ProblemConfig::new(Variant::RSmtStar, Routing::OneBend).unwrap(),
        );
        assert!(s.contains("(maximize (+ (* 0.5 0.0) (* 0.5 0.0)))"));
    }

    #[test]
    fn reals_are_decimal() {
        assert_eq!(real(1.0), "1.0");
        assert_eq!(real(-0.25), "(- 0.25)");
        assert!(!real(1e-7).contains('e'));
    }
}

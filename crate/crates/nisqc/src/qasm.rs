//! Line-oriented OpenQASM 2.0 subset.
//!
//! Accepted statements, one or more per line and each `;`-terminated:
//! `OPENQASM 2.0`, `include "..."`, `qreg r[N]`, `creg r[N]`, the
//! single-qubit gates `h x y z s sdg t tdg`, `cx a[i],a[j]` and
//! `measure a[i] -> c[k]`. `//` starts a comment.

use std::fmt::Write as _;

use nisqc_core::machine::GridMachine;
use nisqc_core::{Circuit, CircuitError, CompiledCircuit, GateKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct QasmError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// One gate statement as written, before circuit validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateStatement {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub clbit: Option<usize>,
    pub line: usize,
    pub col: usize,
}

/// Register sizes and gate statements of a QASM text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QasmProgram {
    pub qreg: Option<(String, usize)>,
    pub creg: Option<(String, usize)>,
    pub gates: Vec<GateStatement>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Real,
    Str,
    LBracket,
    RBracket,
    Comma,
    Arrow,
}

struct Lexer<'a> {
    line: usize,
    src: &'a str,
    /// Byte offset of `src` within the line.
    base: usize,
}

impl Lexer<'_> {
    fn err(&self, col: usize, message: impl Into<String>) -> QasmError {
        QasmError {
            line: self.line,
            col,
            message: message.into(),
        }
    }

    /// Tokens with their 1-based columns.
    fn tokens(&self) -> Result<Vec<(Tok, usize)>, QasmError> {
        let bytes = self.src.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let col = self.base + i + 1;
            let b = bytes[i];
            match b {
                b' ' | b'\t' | b'\r' => i += 1,
                b'[' => {
                    out.push((Tok::LBracket, col));
                    i += 1;
                }
                b']' => {
                    out.push((Tok::RBracket, col));
                    i += 1;
                }
                b',' => {
                    out.push((Tok::Comma, col));
                    i += 1;
                }
                b'-' if bytes.get(i + 1) == Some(&b'>') => {
                    out.push((Tok::Arrow, col));
                    i += 2;
                }
                b'"' => {
                    let end = self.src[i + 1..]
                        .find('"')
                        .ok_or_else(|| self.err(col, "unterminated string"))?;
                    out.push((Tok::Str, col));
                    i += end + 2;
                }
                b'0'..=b'9' => {
                    let len = bytes[i..]
                        .iter()
                        .take_while(|c| c.is_ascii_digit() || **c == b'.')
                        .count();
                    let text = &self.src[i..i + len];
                    let tok = if text.contains('.') {
                        Tok::Real
                    } else {
                        Tok::Int(
                            text.parse()
                                .map_err(|_| self.err(col, "integer too large"))?,
                        )
                    };
                    out.push((tok, col));
                    i += len;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let len = bytes[i..]
                        .iter()
                        .take_while(|c| c.is_ascii_alphanumeric() || **c == b'_')
                        .count();
                    out.push((Tok::Ident(self.src[i..i + len].to_string()), col));
                    i += len;
                }
                _ => {
                    let ch = self.src[i..].chars().next().unwrap_or('?');
                    return Err(self.err(col, format!("unexpected character '{ch}'")));
                }
            }
        }
        Ok(out)
    }
}

struct Statement<'a> {
    lexer: Lexer<'a>,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    /// Column just past the statement, for errors at its end.
    end_col: usize,
}

impl Statement<'_> {
    fn err(&self, message: impl Into<String>) -> QasmError {
        let col = self.toks.get(self.pos).map_or(self.end_col, |t| t.1);
        self.lexer.err(col, message)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), QasmError> {
        match self.toks.get(self.pos) {
            Some((t, _)) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, QasmError> {
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), _)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn int(&mut self) -> Result<usize, QasmError> {
        match self.toks.get(self.pos) {
            Some((Tok::Int(n), _)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    /// `name[index]`
    fn indexed(&mut self) -> Result<(String, usize, usize), QasmError> {
        let col = self.toks.get(self.pos).map_or(self.end_col, |t| t.1);
        let name = self.ident("a register reference")?;
        self.expect(Tok::LBracket, "'['")?;
        let i = self.int()?;
        self.expect(Tok::RBracket, "']'")?;
        Ok((name, i, col))
    }

    fn done(&self) -> Result<(), QasmError> {
        if self.pos < self.toks.len() {
            return Err(self.err("unexpected trailing tokens"));
        }
        Ok(())
    }
}

fn check_reg(
    reg: &Option<(String, usize)>,
    kind: &str,
    name: &str,
    index: usize,
    st: &Statement<'_>,
    col: usize,
) -> Result<usize, QasmError> {
    match reg {
        None => Err(st
            .lexer
            .err(col, format!("{kind} used before its declaration"))),
        Some((decl, _)) if decl != name => {
            Err(st.lexer.err(col, format!("unknown {kind} '{name}'")))
        }
        Some((_, size)) if index >= *size => Err(st.lexer.err(
            col,
            format!("index {index} out of range for {name}[{size}]"),
        )),
        Some(_) => Ok(index),
    }
}

/// Splits `text` into statements and validates register references. Gate
/// ordering rules of [`Circuit`] are not applied here.
pub fn parse_program(text: &str) -> Result<QasmProgram, QasmError> {
    let mut prog = QasmProgram::default();
    let mut pending: Option<(usize, usize)> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let code = raw.split("//").next().unwrap_or("");
        let mut offset = 0;
        let mut rest = code;
        loop {
            let Some(semi) = rest.find(';') else {
                if !rest.trim().is_empty() {
                    let col = offset + rest.len() - rest.trim_start().len() + 1;
                    pending.get_or_insert((line, col));
                }
                break;
            };
            if let Some((l, c)) = pending {
                return Err(QasmError {
                    line: l,
                    col: c,
                    message: "statement must end with ';' on its own line".into(),
                });
            }
            let src = &rest[..semi];
            let lexer = Lexer {
                line,
                src,
                base: offset,
            };
            let toks = lexer.tokens()?;
            if !toks.is_empty() {
                let mut st = Statement {
                    lexer,
                    toks,
                    pos: 0,
                    end_col: offset + semi + 1,
                };
                statement(&mut st, &mut prog)?;
            }
            offset += semi + 1;
            rest = &rest[semi + 1..];
        }
    }
    if let Some((line, col)) = pending {
        return Err(QasmError {
            line,
            col,
            message: "missing ';'".into(),
        });
    }
    Ok(prog)
}

fn statement(st: &mut Statement<'_>, prog: &mut QasmProgram) -> Result<(), QasmError> {
    let head_col = st.toks[0].1;
    let head = st.ident("a statement")?;
    match head.as_str() {
        "OPENQASM" => {
            match st.next() {
                Some(Tok::Real) => {}
                _ => return Err(st.lexer.err(head_col, "expected a version after OPENQASM")),
            }
            st.done()
        }
        "include" => {
            st.expect(Tok::Str, "a quoted file name")?;
            st.done()
        }
        "qreg" | "creg" => {
            let name = st.ident("a register name")?;
            st.expect(Tok::LBracket, "'['")?;
            let size = st.int()?;
            st.expect(Tok::RBracket, "']'")?;
            st.done()?;
            let slot = if head == "qreg" {
                &mut prog.qreg
            } else {
                &mut prog.creg
            };
            if slot.is_some() {
                return Err(st
                    .lexer
                    .err(head_col, format!("only one {head} is supported")));
            }
            *slot = Some((name, size));
            Ok(())
        }
        "measure" => {
            let (q, i, qc) = st.indexed()?;
            st.expect(Tok::Arrow, "'->'")?;
            let (c, k, cc) = st.indexed()?;
            st.done()?;
            let qubit = check_reg(&prog.qreg, "qreg", &q, i, st, qc)?;
            let clbit = check_reg(&prog.creg, "creg", &c, k, st, cc)?;
            prog.gates.push(GateStatement {
                kind: GateKind::Measure,
                qubits: vec![qubit],
                clbit: Some(clbit),
                line: st.lexer.line,
                col: head_col,
            });
            Ok(())
        }
        name => {
            let kind = GateKind::from_mnemonic(name)
                .filter(|k| *k != GateKind::Measure)
                .ok_or_else(|| st.lexer.err(head_col, format!("unknown gate '{name}'")))?;
            let mut qubits = Vec::new();
            for n in 0..kind.arity() {
                if n > 0 {
                    st.expect(Tok::Comma, "','")?;
                }
                let (r, i, col) = st.indexed()?;
                qubits.push(check_reg(&prog.qreg, "qreg", &r, i, st, col)?);
            }
            st.done()?;
            prog.gates.push(GateStatement {
                kind,
                qubits,
                clbit: None,
                line: st.lexer.line,
                col: head_col,
            });
            Ok(())
        }
    }
}

/// Parses a QASM-subset circuit.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let prog = parse_program(text)?;
    let nq = prog.qreg.as_ref().map_or(0, |r| r.1);
    let nc = prog.creg.as_ref().map_or(0, |r| r.1);
    let mut c = Circuit::new(nq, nc);
    for g in &prog.gates {
        c.push(g.kind, &g.qubits, g.clbit).map_err(|e| QasmError {
            line: g.line,
            col: g.col,
            message: strip_gate_prefix(&e),
        })?;
    }
    Ok(c)
}

fn strip_gate_prefix(e: &CircuitError) -> String {
    let s = e.to_string();
    match s.split_once(": ") {
        Some((head, tail)) if head.starts_with("gate ") => tail.to_string(),
        _ => s,
    }
}

fn gate_line(out: &mut String, reg: &str, kind: GateKind, qubits: &[usize], clbit: Option<usize>) {
    match kind {
        GateKind::Measure => {
            let _ = writeln!(
                out,
                "measure {reg}[{}] -> c[{}];",
                qubits[0],
                clbit.unwrap_or(0)
            );
        }
        GateKind::Cnot => {
            let _ = writeln!(out, "cx {reg}[{}],{reg}[{}];", qubits[0], qubits[1]);
        }
        k => {
            let _ = writeln!(out, "{} {reg}[{}];", k.mnemonic(), qubits[0]);
        }
    }
}

fn header(out: &mut String, reg: &str, nq: usize, nc: usize) {
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg {reg}[{nq}];");
    if nc > 0 {
        let _ = writeln!(out, "creg c[{nc}];");
    }
}

/// Emits `c` on register `q`; [`parse_qasm`] reads it back unchanged.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut out = String::new();
    header(&mut out, "q", c.num_qubits(), c.num_clbits());
    for g in c.gates() {
        gate_line(&mut out, "q", g.kind, g.qubits(), g.clbit);
    }
    out
}

/// Emits the physical gate stream on hardware register `qh`, in start-time
/// order, with the variant, objective and placement as header comments.
pub fn emit_compiled_qasm(cc: &CompiledCircuit, m: &GridMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "// variant: {}", cc.strategy);
    let _ = writeln!(out, "// objective: {}", cc.objective_value);
    let _ = writeln!(out, "// optimal: {}", cc.optimal);
    let _ = writeln!(out, "// makespan: {} timeslots", cc.makespan);
    let _ = writeln!(out, "// reliability: {}", cc.reliability);
    let placement: Vec<String> = (0..cc.placement.len())
        .map(|q| {
            let p = cc.placement.loc(q);
            format!("q{q}->qh{}({},{})", cc.placement.cell(m, q), p.x, p.y)
        })
        .collect();
    let _ = writeln!(out, "// placement: {}", placement.join(" "));
    header(&mut out, "qh", m.num_qubits(), cc.source.num_clbits());
    for g in &cc.expanded {
        gate_line(&mut out, "qh", g.kind, &g.operands, g.clbit);
    }
    out
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nisqc::qasm::parse_program;
use nisqc::CompilationRecord;
use serde_json::Value;

fn nisqc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nisqc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn nisqc")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = nisqc(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().unwrap_or(""))
        .unwrap_or_else(|_| panic!("not JSON: {text}"))
}

/// Scratch dir with a flat 3x3 calibration and the BV4 benchmark.
fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen-calibration",
            "--mx",
            "3",
            "--my",
            "3",
            "--error-spread",
            "0",
            "--t2-spread",
            "0",
            "--duration-spread",
            "0",
            "--out",
            "cal.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "gen-circuit",
            "--kind",
            "bv",
            "--qubits",
            "4",
            "--out",
            "bv4.qasm",
        ],
    );
    dir
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

fn header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(String::from).collect()
}

fn column(path: &Path, name: &str) -> usize {
    header(path).iter().position(|h| h == name).unwrap()
}

#[test]
fn compile_reliability_variant_is_optimal_on_bv4() {
    let ws = workspace();
    let d = ws.path();
    let line = ok(
        d,
        &[
            "compile",
            "bv4.qasm",
            "cal.json",
            "--variant",
            "r-smt-star",
            "--omega",
            "0.5",
            "--out",
            "out.qasm",
        ],
    );
    let summary: Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(summary["optimal"], true);
    assert_eq!(summary["swap_count"], 0);
    let record =
        CompilationRecord::from_json(&fs::read_to_string(d.join("out.json")).unwrap()).unwrap();
    assert!(record.optimal);
    assert_eq!(record.placement.len(), 4);
    assert_eq!(record.variant, "r-smt-star");
}

#[test]
fn reliability_variant_rejects_rectangle_routing() {
    let ws = workspace();
    let d = ws.path();
    let out = nisqc(
        d,
        &[
            "compile",
            "bv4.qasm",
            "cal.json",
            "--variant",
            "r-smt-star",
            "--routing",
            "rr",
            "--out",
            "x.qasm",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "usage");
    assert!(!d.join("x.qasm").exists());
    assert!(!d.join("x.json").exists());
}

#[test]
fn greedy_compiles_large_random_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen-calibration",
            "--mx",
            "12",
            "--my",
            "11",
            "--t2",
            "1000000000000",
            "--out",
            "big.json",
        ],
    );
    ok(
        d,
        &[
            "gen-circuit",
            "--kind",
            "random",
            "--qubits",
            "128",
            "--gates",
            "2048",
            "--seed",
            "5",
            "--out",
            "circ.json",
        ],
    );
    ok(
        d,
        &[
            "compile",
            "circ.json",
            "big.json",
            "--variant",
            "greedy-e",
            "--out",
            "r.qasm",
        ],
    );
    let record =
        CompilationRecord::from_json(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(record.placement.len(), 128);
    assert!(record.gates.len() >= 2048);
}

#[test]
fn evaluate_writes_report_with_equivalence() {
    let ws = workspace();
    let d = ws.path();
    ok(
        d,
        &[
            "compile",
            "bv4.qasm",
            "cal.json",
            "--variant",
            "greedy-v",
            "--out",
            "g.qasm",
        ],
    );
    let line = ok(
        d,
        &[
            "evaluate", "g.json", "cal.json", "--trials", "2000", "--seed", "3", "--out", "rep.csv",
        ],
    );
    let v: Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["equivalence"], true);
    let rows = csv_rows(&d.join("rep.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][1], "greedy-v");
    assert!(d.join("rep.json").exists());
}

#[test]
fn evaluate_rejects_tampered_record() {
    let ws = workspace();
    let d = ws.path();
    ok(
        d,
        &[
            "compile",
            "bv4.qasm",
            "cal.json",
            "--variant",
            "greedy-e",
            "--out",
            "g.qasm",
        ],
    );
    let mut rec: Value =
        serde_json::from_str(&fs::read_to_string(d.join("g.json")).unwrap()).unwrap();
    rec["gates"][0]["start"] = Value::from(99);
    fs::write(d.join("g.json"), rec.to_string()).unwrap();
    let out = nisqc(
        d,
        &[
            "evaluate", "g.json", "cal.json", "--trials", "100", "--out", "rep.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(!d.join("rep.csv").exists());
}

#[test]
fn compare_rows_and_determinism() {
    let ws = workspace();
    let d = ws.path();
    let args = |out: &'static str| {
        [
            "compare",
            "bv4.qasm",
            "cal.json",
            "--variants",
            "t-smt-star,r-smt-star",
            "--trials",
            "5000",
            "--seed",
            "9",
            "--out",
            out,
        ]
    };
    ok(d, &args("a.csv"));
    ok(d, &args("b.csv"));
    let (a, b) = (csv_rows(&d.join("a.csv")), csv_rows(&d.join("b.csv")));
    assert_eq!(a.len(), 2);
    let time = column(&d.join("a.csv"), "compile_time_s");
    let strip = |rows: &[csv::StringRecord]| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != time)
                    .map(|(_, s)| s.to_string())
                    .collect()
            })
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
    let rel = column(&d.join("a.csv"), "reliability");
    let t: f64 = a[0][rel].parse().unwrap();
    let r: f64 = a[1][rel].parse().unwrap();
    assert_eq!(&a[0][1], "t-smt-star");
    assert!(r >= t, "{r} < {t}");
}

#[test]
fn bench_row_count_and_timeouts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "bench",
            "--sizes",
            "4x32,16x256",
            "--variants",
            "greedy-e,t-smt-star",
            "--time-limit",
            "0.5",
            "--out",
            "b.csv",
        ],
    );
    let p = d.join("b.csv");
    let rows = csv_rows(&p);
    assert_eq!(rows.len(), 4);
    let (var, q, opt, status) = (
        column(&p, "variant"),
        column(&p, "num_qubits"),
        column(&p, "optimal"),
        column(&p, "status"),
    );
    for r in &rows {
        assert!(matches!(&r[status], "ok" | "timeout"), "{r:?}");
        if &r[var] == "t-smt-star" && &r[q] == "16" {
            assert_ne!(&r[opt], "true");
        }
        if &r[var] == "greedy-e" {
            assert_eq!(&r[status], "ok");
        }
    }
}

#[test]
fn syntax_error_reports_position_and_writes_nothing() {
    let ws = workspace();
    let d = ws.path();
    fs::write(
        d.join("bad.qasm"),
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncx q[0], q[0];\n",
    )
    .unwrap();
    let out = nisqc(
        d,
        &["compile", "bad.qasm", "cal.json", "--out", "bad_out.qasm"],
    );
    assert_eq!(out.status.code(), Some(1));
    let e = error_json(&out);
    assert_eq!(e["error"], "syntax");
    assert_eq!(e["line"], 4);
    assert!(e["column"].as_u64().is_some());
    assert!(!d.join("bad_out.qasm").exists());
    assert!(!d.join("bad_out.json").exists());
}

#[test]
fn too_many_qubits_is_reported() {
    let ws = workspace();
    let d = ws.path();
    ok(
        d,
        &[
            "gen-circuit",
            "--kind",
            "random",
            "--qubits",
            "10",
            "--gates",
            "20",
            "--out",
            "ten.qasm",
        ],
    );
    let out = nisqc(d, &["compile", "ten.qasm", "cal.json", "--out", "t.qasm"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "too-many-qubits");
    assert!(!d.join("t.qasm").exists());
}

#[test]
fn generators_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = |out: &str| -> String {
        ok(
            d,
            &[
                "gen-circuit",
                "--kind",
                "random",
                "--qubits",
                "6",
                "--gates",
                "40",
                "--seed",
                "4",
                "--out",
                out,
            ],
        );
        fs::read_to_string(d.join(out)).unwrap()
    };
    assert_eq!(gen("a.qasm"), gen("b.qasm"));
    let cal = |out: &str| -> String {
        ok(
            d,
            &[
                "gen-calibration",
                "--mx",
                "4",
                "--my",
                "3",
                "--seed",
                "8",
                "--out",
                out,
            ],
        );
        fs::read_to_string(d.join(out)).unwrap()
    };
    assert_eq!(cal("a.json"), cal("b.json"));
    assert_eq!(gen_stdout(d), gen_stdout(d));
}

fn gen_stdout(d: &Path) -> String {
    ok(d, &["gen-circuit", "--kind", "toffoli"])
}

#[test]
fn compiled_qasm_reparses_to_the_physical_stream() {
    let ws = workspace();
    let d = ws.path();
    ok(
        d,
        &["gen-circuit", "--kind", "toffoli", "--out", "tof.qasm"],
    );
    for variant in ["greedy-e", "t-smt"] {
        ok(
            d,
            &[
                "compile",
                "tof.qasm",
                "cal.json",
                "--variant",
                variant,
                "--out",
                "tof_out.qasm",
            ],
        );
        let text = fs::read_to_string(d.join("tof_out.qasm")).unwrap();
        let prog = parse_program(&text).unwrap();
        let rec =
            CompilationRecord::from_json(&fs::read_to_string(d.join("tof_out.json")).unwrap())
                .unwrap();
        assert_eq!(prog.gates.len(), rec.gates.len());
        assert_eq!(prog.qreg, Some(("qh".to_string(), 9)));
        assert!(rec.swap_count >= 2);
    }
}

#[test]
fn empty_circuit_emits_header_only() {
    let ws = workspace();
    let d = ws.path();
    fs::write(
        d.join("e.qasm"),
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n",
    )
    .unwrap();
    ok(d, &["compile", "e.qasm", "cal.json", "--out", "e_out.qasm"]);
    let prog = parse_program(&fs::read_to_string(d.join("e_out.qasm")).unwrap()).unwrap();
    assert!(prog.gates.is_empty());
}

#[test]
fn smtlib_dump_for_exact_variants() {
    let ws = workspace();
    let d = ws.path();
    let smt: PathBuf = d.join("p.smt2");
    ok(
        d,
        &[
            "compile",
            "bv4.qasm",
            "cal.json",
            "--variant",
            "t-smt",
            "--emit-smtlib",
            "p.smt2",
            "--out",
            "p.qasm",
        ],
    );
    let text = fs::read_to_string(&smt).unwrap();
    assert!(text.contains("(check-sat)"));
    let out = nisqc(
        d,
        &[
            "compile",
            "bv4.qasm",
            "cal.json",
            "--variant",
            "greedy-e",
            "--emit-smtlib",
            "q.smt2",
            "--out",
            "q.qasm",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

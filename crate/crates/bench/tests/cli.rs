use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn proms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proms")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn report_renders_golden_table() {
    let out = proms(&["report", &format!("{FIXTURES}/records.jsonl")]);
    assert!(out.status.success());
    let expected = fs::read_to_string(Path::new(FIXTURES).join("expected_table.txt")).unwrap();
    assert_eq!(stdout(&out), expected);
}

#[test]
fn gen_then_solve_prints_a_model() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    let out = proms(&["gen", "--vars", "20", "--clauses", "60", "--seed", "5", "--out", cnf.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&cnf).unwrap();
    assert!(text.contains("p cnf 20 60"));

    let out = proms(&["solve", cnf.to_str().unwrap(), "--max-steps", "200000", "--cutoff", "0"]);
    assert!(out.status.success());
    let s = stdout(&out);
    let o: usize = s.lines().find_map(|l| l.strip_prefix("o ")).unwrap().parse().unwrap();
    let v = s.lines().find_map(|l| l.strip_prefix("v ")).unwrap();
    let lits: Vec<i64> = v.split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(lits.len(), 21);
    assert_eq!(*lits.last().unwrap(), 0);

    let f = proms::cnf::parse_dimacs_str(&text).unwrap();
    let a = proms::Assignment::new(lits[..20].iter().map(|&l| l > 0).collect());
    assert_eq!(proms::count_unsat(&f, &a), o);
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = proms(&["gen", "--vars", "30", "--clauses", "100", "--seed", "7"]);
    let b = proms(&["gen", "--vars", "30", "--clauses", "100", "--seed", "7"]);
    let c = proms(&["gen", "--vars", "30", "--clauses", "100", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bench_writes_jsonl_records() {
    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("cls");
    let out = proms(&["gen", "-n", "12", "-m", "50", "--count", "2", "--out", class.to_str().unwrap()]);
    assert!(out.status.success());
    let records = dir.path().join("r.jsonl");
    let out = proms(&[
        "bench",
        class.to_str().unwrap(),
        "--solver",
        "proms,walksat",
        "--runs",
        "2",
        "--max-steps",
        "5000",
        "--workers",
        "1",
        "--format",
        "jsonl",
        "--records",
        records.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), fs::read_to_string(&records).unwrap());
    assert_eq!(stdout(&out).lines().count(), 8);

    let table = proms(&["report", records.to_str().unwrap()]);
    assert!(stdout(&table).starts_with("instance |"));
}

#[test]
fn theory_prints_threshold_and_curve() {
    let out = proms(&["theory", "--ratios", "21.5"]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert!(s.contains("5.1909"), "{s}");
    assert!(s.contains("0.979"), "{s}");
}

#[test]
fn probe_lists_each_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    proms(&["gen", "-n", "40", "-m", "400", "--out", cnf.to_str().unwrap()]);
    let out = proms(&["probe", cnf.to_str().unwrap(), "--steps", "2000"]);
    assert!(out.status.success());
    for scheme in ["mcbc", "mcbn", "mnbc", "mnbn"] {
        assert!(stdout(&out).contains(scheme));
    }
}

#[test]
fn exit_codes_distinguish_parse_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cnf");
    fs::write(&bad, "p cnf 2 1\n1 3 0\n").unwrap();
    assert_eq!(proms(&["solve", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(proms(&["solve", "/does/not/exist.cnf"]).status.code(), Some(1));

    let good = dir.path().join("good.cnf");
    fs::write(&good, "p cnf 2 1\n1 2 0\n").unwrap();
    assert_eq!(proms(&["solve", good.to_str().unwrap(), "--mmax-factor", "0.5"]).status.code(), Some(2));
    assert_eq!(proms(&["bench", good.to_str().unwrap(), "--runs", "0"]).status.code(), Some(2));
    assert_eq!(proms(&["solve", good.to_str().unwrap(), "--solver", "proms,probsat"]).status.code(), Some(2));
}

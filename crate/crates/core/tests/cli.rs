use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lcsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsat")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = lcsat(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_encode_and_refute() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("chain.json");
    let cnf = dir.path().join("chain.cnf");
    assert_eq!(ok(&["generate", "--w", "2", "--d", "2", "--out", p(&json)]).trim(), "n=8 constraints=3 arity=4");
    assert_eq!(
        ok(&["encode", "--instance", p(&json), "--encoding", "direct", "--out", p(&cnf)]).trim(),
        "vars=16 clauses=49"
    );
    let text = fs::read_to_string(&cnf).unwrap();
    assert!(text.lines().any(|l| l == "c map 1 g0_0 0"));
    assert!(text.lines().any(|l| l == "p cnf 16 49"));

    assert_eq!(ok(&["closure", "--instance", p(&json), "--k", "2"]).trim(), "NONEMPTY");
    let trace = dir.path().join("closure.txt");
    assert_eq!(ok(&["closure", "--instance", p(&json), "--k", "3", "--trace", p(&trace)]).trim(), "EMPTY");
    assert!(fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .all(|l| l.starts_with("REMOVE ") && l.contains(" BLOCKED-ON ")));

    assert!(ok(&["nhr", "--cnf", p(&cnf), "--width", "2"]).starts_with("SATURATED"));
    let steps = dir.path().join("steps.txt");
    let out = ok(&["nhr", "--cnf", p(&cnf), "--width", "3", "--trace", p(&steps)]);
    assert!(out.starts_with("REFUTED width=3"));
    let trace = fs::read_to_string(&steps).unwrap();
    assert!(trace.lines().next().unwrap().starts_with("STEP 1: nucleus="));
    assert!(trace.lines().last().unwrap().ends_with("resolvent="));

    let stats = dir.path().join("stats.json");
    let out = ok(&["solve", "--cnf", p(&cnf), "--scheme", "decision", "--seed", "3", "--stats-json", p(&stats)]);
    assert_eq!(out.lines().next(), Some("UNSAT"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(v["result"], "UNSAT");
    assert!(v["restarts"].as_u64().unwrap() > 0);
}

#[test]
fn solve_prints_a_model_for_satisfiable_input() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("sat.cnf");
    fs::write(&cnf, "p cnf 3 3\n1 2 0\n-1 3 0\n-3 -2 0\n").unwrap();
    for scheme in ["1uip", "decision", "minisat"] {
        let out = ok(&["solve", "--cnf", p(&cnf), "--scheme", scheme, "--restart", "never"]);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("SAT"));
        let model: Vec<i64> = lines.next().unwrap().split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect();
        assert_eq!(model.last(), Some(&0));
        let truth = |v: i64| model.contains(&v);
        assert!((truth(1) || truth(2)) && (truth(-1) || truth(3)) && (truth(-3) || truth(-2)));
    }
}

#[test]
fn absorb_reports_both_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("db.cnf");
    fs::write(&cnf, "p cnf 6 9\n1 2 0\n3 4 0\n5 6 0\n-1 -2 0\n-3 -4 0\n-5 -6 0\n-1 -3 0\n-2 -5 0\n-2 -4 -6 0\n")
        .unwrap();
    assert!(ok(&["absorb", "--cnf", p(&cnf), "--clause", "-3 -5"]).trim_end().ends_with("ABSORBED (operational)"));
    assert!(ok(&["absorb", "--cnf", p(&cnf), "--clause", "-2 -4"]).trim_end().ends_with("NOT ABSORBED (operational)"));
}

#[test]
fn bounds_prints_each_formula() {
    let out = ok(&["bounds", "--n", "8", "--d", "2", "--k", "3", "--m", "1"]);
    assert!(out.lines().any(|l| l == "thm4=322560"), "{out}");
    assert!(out.starts_with("n=8 d=2 k=3 m=1"));
}

#[test]
fn bench_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let plot = dir.path().join("plot.dat");
    let args = |csv: &Path| {
        vec!["bench", "--w", "2", "--d", "2,3", "--scheme", "decision", "--seeds", "4", "--csv"]
            .into_iter()
            .map(String::from)
            .chain([p(csv).to_string()])
            .collect::<Vec<_>>()
    };
    let run = |csv: &Path, extra: &[&str]| {
        let mut v = args(csv);
        v.extend(extra.iter().map(|s| s.to_string()));
        ok(&v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let out = run(&a, &["--plotdata", p(&plot)]);
    run(&b, &[]);
    assert!(out.contains("w=2 d=2 n=8 scheme=decision runs=4"));
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert_eq!(text.lines().next(), Some("w,d,n,clause_count,scheme,seed,verdict,restarts,conflicts,decisions"));
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().skip(1).all(|l| l.contains(",UNSAT,")));
    assert!(fs::read_to_string(&plot).unwrap().starts_with("# w=2 scheme=decision"));
}

#[test]
fn errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cnf");
    fs::write(&bad, "p cnf 2 1\n1 3 0\n").unwrap();
    let out = lcsat(&["solve", "--cnf", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));

    let json = dir.path().join("chain.json");
    ok(&["generate", "--w", "2", "--d", "2", "--out", p(&json)]);
    let out =
        lcsat(&["encode", "--instance", p(&json), "--encoding", "support", "--out", p(&dir.path().join("x.cnf"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("binary"));

    let out = lcsat(&["generate", "--w", "0", "--d", "2", "--out", p(&json)]);
    assert_eq!(out.status.code(), Some(1));
    let out = lcsat(&["solve", "--cnf", p(&dir.path().join("missing.cnf"))]);
    assert_eq!(out.status.code(), Some(1));
}

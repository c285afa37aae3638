use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn momst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momst")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn triangle() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/triangle.momst").display().to_string()
}

fn generated(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = momst(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn solve_triangle_with_both_algorithms() {
    for algo in ["igmda", "bn"] {
        for extra in [&[][..], &["--no-preprocess"][..], &["--no-preprocess", "--verify"][..]] {
            let mut args = vec!["solve", "--algo", algo];
            args.extend_from_slice(extra);
            let t = triangle();
            args.push(&t);
            let o = momst(&args);
            assert_eq!(o.status.code(), Some(0));
            assert_eq!(stdout(&o), "3 2 : 1-3 2-3\n", "{algo} {extra:?}");
            assert!(String::from_utf8_lossy(&o.stderr).contains("status=solved solutions=1"));
        }
    }
}

#[test]
fn solve_writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.txt");
    let o = momst(&["solve", &triangle(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), "3 2 : 1-3 2-3\n");
}

#[test]
fn oracle_prints_the_front() {
    let o = momst(&["oracle", &triangle()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "{(3,2)}\n");
}

#[test]
fn inspect_counts_the_explicit_transition_graph() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = generated(dir.path(), "k5.momst", &["--family", "complete", "--n", "5", "--d", "3", "--seed", "7"]);
    let o = momst(&["inspect", "--explicit", k5.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "nodes=16 arcs=80\n");
    let o = momst(&["inspect", "--explicit", "--prune", k5.to_str().unwrap()]);
    let pruned: usize = stdout(&o).trim().rsplit('=').next().unwrap().parse().unwrap();
    assert!(pruned <= 80);
}

#[test]
fn generate_is_deterministic() {
    let a = momst(&["generate", "--family", "complete", "--n", "5", "--d", "3", "--seed", "7"]);
    let b = momst(&["generate", "--family", "complete", "--n", "5", "--d", "3", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("p momst 5 10 3 1\n# generator: splitmix64 "));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(momst(&["solve"]).status.code(), Some(64));
    assert_eq!(momst(&["solve", &triangle(), "--algo", "dijkstra"]).status.code(), Some(64));
    assert_eq!(momst(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(momst(&["generate", "--family", "grid", "--rows", "3"]).status.code(), Some(64));
    assert_eq!(momst(&["bench"]).status.code(), Some(64));
    assert_eq!(momst(&["--help"]).status.code(), Some(0));
}

#[test]
fn unreadable_or_malformed_instance_exits_1() {
    assert_eq!(momst(&["solve", "/nonexistent/x.momst"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.momst");
    std::fs::write(&bad, "p momst 3 3 2 1\ne 1 2 3 3\n").unwrap();
    let o = momst(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("header declares 3 edges, found 1"));
}

#[test]
fn limits_set_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let hard = generated(
        dir.path(),
        "hard.momst",
        &["--family", "complete", "--n", "16", "--d", "4", "--correlation", "anticorrelated", "--seed", "3"],
    );
    let o = momst(&["solve", hard.to_str().unwrap(), "--time-limit", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("status=timeout"));
    let o = momst(&["solve", hard.to_str().unwrap(), "--mem-limit", "0", "--algo", "bn"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("status=memout"));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn bench_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    generated(dir.path(), "a.momst", &["--n", "5", "--seed", "1"]);
    generated(dir.path(), "b.momst", &["--n", "6", "--seed", "2"]);
    let csv = dir.path().join("out.csv");
    let run = || {
        let o = Command::new(env!("CARGO_BIN_EXE_momst"))
            .args(["bench", dir.path().to_str().unwrap(), "--out", csv.to_str().unwrap()])
            .env("MOMST_THREADS", "2")
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        csv_rows(&std::fs::read_to_string(&csv).unwrap())
    };
    let rows = run();
    assert_eq!(rows.len(), 5);
    assert_eq!(
        rows[0].join(","),
        "instance,algorithm,n,m,d,status,solutions,iterations,transition_nodes,time_preprocess_s,time_solve_s,\
         red_count,blue_count,max_frontier,reduced_n,reduced_m,error"
    );
    let keys: Vec<(String, String)> = rows[1..].iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    let expected: Vec<(String, String)> = [("a", "igmda"), ("a", "bn"), ("b", "igmda"), ("b", "bn")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    assert_eq!(keys, expected);
    assert!(rows[1..].iter().all(|r| r[5] == "solved"));

    let strip = |rows: Vec<Vec<String>>| -> Vec<Vec<String>> {
        rows.into_iter().map(|r| r.into_iter().enumerate().filter(|(i, _)| *i != 9 && *i != 10).map(|(_, v)| v).collect()).collect()
    };
    assert_eq!(strip(rows), strip(run()));
}

#[test]
fn bench_accepts_specs_and_records_failures() {
    let dir = tempfile::tempdir().unwrap();
    let specs = dir.path().join("suite.txt");
    std::fs::write(&specs, "# two small instances\nfamily=grid rows=2 cols=3 d=2 seed=4\nn=5 d=3 correlation=correlated\n").unwrap();
    let o = momst(&[
        "bench",
        "/nonexistent.momst",
        "--spec-file",
        specs.to_str().unwrap(),
        "--algos",
        "bn",
        "--no-preprocess",
    ]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1][5], "error");
    assert_eq!(rows[2][0], "grid-2x3-d2-uncorrelated-s4");
    assert_eq!(rows[2][5], "solved");
    assert_eq!(rows[3][1], "bn");
    assert_eq!(momst(&["bench", "--spec", "family=hexagon n=3"]).status.code(), Some(64));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_intersective");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_out(args: &[&str], out: &Path) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    run(&full)
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).expect("stderr is one JSON object")
}

fn listing(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    v.sort();
    v
}

const DETERMINISTIC: &[&[&str]] = &[
    &["check-mod", "-p", "n^2+1", "-k", "25"],
    &["joint", "-p", "2*n^2+3*n+1", "-p", "4*n^2+4*n+1", "-B", "200"],
    &["prove", "-p", "(n^2-13)*(n^2-17)*(n^2-221)"],
    &["lattice-refine", "-p", "x^2+y^2-2", "-p", "x-y", "--vars", "x,y", "-k", "6"],
    &["torus-closure", "-p", "n", "-p", "n^2", "--vec", "(alpha, 1/2)", "--vec", "(beta, 0)", "--label", "alpha=sqrt2", "--label", "beta=sqrt3", "--seed", "7"],
    &["scan", "-p", "n^2-1", "--set", r#"{"kind":"residues","window":[0,3000],"modulus":3,"residues":[1]}"#, "--box", "20"],
    &["toterg", "-p", "n^2+n", "--box", "5000"],
    &["empty-triple", "--interval", "0,0.01", "--box", "2000"],
    &["multidim", "-p", "(x^2+1, y)", "--vars", "x,y", "-B", "4"],
];

#[test]
fn artifacts_are_byte_identical_across_runs() {
    for args in DETERMINISTIC {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        let (ra, rb) = (run_out(args, a.path()), run_out(args, b.path()));
        assert_eq!(ra.status.code(), rb.status.code(), "{args:?}");
        assert_eq!(ra.stdout, rb.stdout, "{args:?}");
        let names = listing(a.path());
        assert_eq!(names, listing(b.path()), "{args:?}");
        for name in names.iter().filter(|n| *n != "meta.json") {
            assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{args:?} {name}");
        }
    }
}

#[test]
fn no_temporary_files_remain() {
    for args in DETERMINISTIC {
        let dir = TempDir::new().unwrap();
        run_out(args, dir.path());
        assert!(listing(dir.path()).iter().all(|n| !n.ends_with(".tmp")), "{args:?}");
    }
}

#[test]
fn meta_lists_artifacts_and_exit_code() {
    let dir = TempDir::new().unwrap();
    let o = run_out(&["prove", "-p", "n^2+1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let meta = json_file(&dir.path().join("meta.json"));
    assert_eq!(meta["command"], "prove");
    assert_eq!(meta["exit_code"], 1);
    assert_eq!(meta["artifacts"], serde_json::json!(["certificate.json"]));
    assert!(meta["timestamp_unix"].as_u64().unwrap() > 0);
    // the timestamp lives only in meta.json
    let cert = fs::read_to_string(dir.path().join("certificate.json")).unwrap();
    assert!(!cert.contains("timestamp"));
}

#[test]
fn scan_writes_json_and_csv() {
    let dir = TempDir::new().unwrap();
    let o = run_out(DETERMINISTIC[5], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(listing(dir.path()), ["meta.json", "report.csv", "report.json"]);
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    // header plus one row per shift in [-20, 20]
    assert_eq!(csv.lines().count(), 42);
}

#[test]
fn exit_codes_follow_the_outcome() {
    assert_eq!(run(&["check-mod", "-p", "n^2-1", "-k", "24"]).status.code(), Some(0));
    assert_eq!(run(&["check-mod", "-p", "2*n+1", "-k", "2"]).status.code(), Some(1));
    assert_eq!(run(&["joint", "-p", "n", "-p", "n-1", "-B", "100"]).status.code(), Some(1));
    assert_eq!(run(&["multidim", "-p", "(x^2+1, y)", "--vars", "x,y", "-B", "4"]).status.code(), Some(1));
    assert_eq!(run(&["empty-triple", "--interval", "0,0.9", "--box", "100"]).status.code(), Some(1));
    assert_eq!(run(&["check-mod", "-p", "n", "-k", "0"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_three() {
    let o = run(&["check-mod", "-p", "x^2+y^2+z^2+1", "--vars", "x,y,z", "-k", "1000003", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"]["kind"], "budget_exceeded");
}

#[test]
fn errors_are_json_on_stderr() {
    let o = run(&["check-mod", "-p", "2*n+", "-k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "parse");
    assert_eq!(e["error"]["exit_code"], 2);
    assert!(o.stdout.is_empty());

    let o = run(&["check-mod", "-p", "n/2", "-k", "3"]);
    assert_eq!(stderr_json(&o)["error"]["kind"], "not_integral");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command": "check-mod", "poly": ["2*n+1"], "k": 2}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(run(&["check-mod", "--config", cfg]).status.code(), Some(1));
    // -k on the command line overrides the file
    assert_eq!(run(&["check-mod", "--config", cfg, "-k", "3"]).status.code(), Some(0));
    // written for another subcommand
    let o = run(&["joint", "--config", cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "usage");

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"poly": ["n"], "colour": "blue"}"#).unwrap();
    let o = run(&["check-mod", "--config", bad.to_str().unwrap(), "-k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "usage");
}

#[test]
fn prove_then_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    for (poly, code) in [("n^3-8", 0), ("(n^2-13)*(n^2-17)*(n^2-221)", 0), ("n^2+1", 1)] {
        let sub = dir.path().join(poly.replace(['^', '*', '(', ')', '+', '-'], "_"));
        assert_eq!(run_out(&["prove", "-p", poly], &sub).status.code(), Some(code), "{poly}");
        let cert = sub.join("certificate.json");
        let o = run(&["verify-cert", "--cert", cert.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{poly}");

        let mut v = json_file(&cert);
        v["family"] = serde_json::json!(["n^2 - 2"]);
        fs::write(&cert, v.to_string()).unwrap();
        let o = run(&["verify-cert", "--cert", cert.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{poly}");
    }
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_temporal-lab"));
    c.env_remove("TEMPORAL_LAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.code().is_some(), "terminated by signal");
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn probe_presets() {
    let v = json(&run(&["probe", "--preset", "tsirelson-qubit"]));
    assert!((num(&v["chsh_value"]) - 2.8284271).abs() < 1e-6);
    let v = json(&run(&["probe", "--preset", "signal-protocol"]));
    assert!((num(&v["s_plus"][0]) - 0.5).abs() < 1e-9);
    assert!(v["chsh_value"].is_null());
    // qutrit: Bob's first setting, marginals of s = -1 given Alice's setting
    let v = json(&run(&["probe", "--preset", "qutrit-witness"]));
    let vals = &v["table"]["values"];
    let bob_minus = |k: usize| num(&vals[0][0][k][0]) + num(&vals[1][0][k][0]);
    assert!((bob_minus(0) - 1.0).abs() < 1e-9);
    assert!((bob_minus(1) - 0.5).abs() < 1e-9);
}

#[test]
fn presets_feed_back_into_probe() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["preset", "hardy-protocol"]);
    assert!(out.status.success());
    let path = write(
        dir.path(),
        "hardy.json",
        &String::from_utf8(out.stdout).unwrap(),
    );
    let v = json(&run(&["probe", "--scenario", &path]));
    assert_eq!(v["dim"], 2);
    let list = String::from_utf8(run(&["preset", "--list"]).stdout).unwrap();
    assert_eq!(list.lines().count(), 5);
}

#[test]
fn hardy_commands() {
    let v = json(&run(&["hardy", "--preset", "hardy-protocol"]));
    assert!(v["report"]["constraint_residuals"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| num(r) < 1e-12));
    assert!((num(&v["value"]) - 0.25).abs() < 1e-12);

    let v = json(&run(&[
        "hardy",
        "--mode",
        "temporal",
        "--dim",
        "2",
        "--restarts",
        "4",
        "--seed",
        "1",
    ]));
    assert!((num(&v["value"]) - 0.25).abs() < 1e-4);
    assert_eq!(v["report"]["hv_infeasible"], true);

    let v = json(&run(&[
        "hardy",
        "--mode",
        "spatial",
        "--restarts",
        "8",
        "--seed",
        "1",
    ]));
    assert!((num(&v["value"]) - 0.090).abs() < 1e-3);

    assert_eq!(
        run(&["hardy", "--dim", "1", "--seed", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["hardy", "--mode", "sideways", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn stochastic_commands_need_a_seed() {
    let out = run(&["hardy", "--mode", "temporal"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn seed_variable_overrides_flag_and_output_is_reproducible() {
    let args = ["signal", "--region", "300", "--dim", "3"];
    let a = bin().args(args).args(["--seed", "5"]).output().unwrap();
    let b = bin()
        .args(args)
        .args(["--seed", "6"])
        .env("TEMPORAL_LAB_SEED", "5")
        .output()
        .unwrap();
    let c = bin().args(args).args(["--seed", "5"]).output().unwrap();
    let d = bin().args(args).args(["--seed", "6"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_ne!(a.stdout, d.stdout);
    let bad = bin()
        .args(args)
        .env("TEMPORAL_LAB_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn membership_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let pr = write(dir.path(), "pr.json", "[[-1,-1],[-1,1]]");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ts = write(dir.path(), "ts.json", &format!("[[{h},{h}],[{h},{}]]", -h));
    let zero = write(dir.path(), "zero.json", "[[0,0],[0,0]]");
    let code = |f: &str, t: &str| {
        run(&["membership", "--correlators", f, "--test", t])
            .status
            .code()
    };
    assert_eq!(code(&pr, "quantum"), Some(1));
    assert_eq!(code(&ts, "quantum"), Some(0));
    assert_eq!(code(&ts, "classical"), Some(1));
    assert_eq!(code(&zero, "quantum"), Some(0));
    assert_eq!(code(&zero, "classical"), Some(0));
    let v = json(&run(&[
        "membership",
        "--correlators",
        &ts,
        "--test",
        "quantum",
    ]));
    assert_eq!(v["verdict"]["certificate"]["kind"], "gram");
    let table = run(&[
        "membership",
        "--preset",
        "pr-box-table",
        "--test",
        "classical",
    ]);
    assert_eq!(table.status.code(), Some(1));
    let bad = write(dir.path(), "bad.json", "[[1.5,0],[0,0]]");
    assert_eq!(code(&bad, "quantum"), Some(2));
}

#[test]
fn capacity_of_the_protocol_channel() {
    let v = json(&run(&["signal", "--capacity"]));
    assert!((num(&v["capacity_bits"]) - 0.321928).abs() < 1e-6);
    assert!((num(&v["input_distribution"][0]) - 0.6).abs() < 1e-4);
    assert!((num(&v["input_distribution"][1]) - 0.4).abs() < 1e-4);
}

#[test]
fn region_csv() {
    let out = run(&["signal", "--region", "4000", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("E1,E2"));
    let pts: Vec<[f64; 2]> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            [a.parse().unwrap(), b.parse().unwrap()]
        })
        .collect();
    assert_eq!(pts.len(), 4000);
    for v in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
        let near = pts.iter().any(|p| (p[0] - v[0]).hypot(p[1] - v[1]) < 1e-3);
        assert!(near, "no sample near {v:?}");
    }
    assert!(pts.iter().all(|p| (p[0] - p[1]).abs() <= 1.0 + 1e-8));
}

#[test]
fn kraus_round_trips() {
    let v = json(&run(&["kraus", "--preset", "pr-box-table"]));
    assert!(num(&v["round_trip_residual"]) < 1e-10);
    assert_eq!(v["instrument"]["dim"], 5);

    let dir = tempfile::tempdir().unwrap();
    // P_A = (0.3, 0.7), P_B = (0.8, 0.2) for every setting
    let cell = |r: usize, s: usize| [0.3, 0.7][r] * [0.8, 0.2][s];
    let values: Vec<Vec<Vec<Vec<f64>>>> = (0..2)
        .map(|r| (0..2).map(|s| vec![vec![cell(r, s); 2]; 2]).collect())
        .collect();
    let product = write(
        dir.path(),
        "product.json",
        &serde_json::json!({"m": 2, "n": 2, "values": values}).to_string(),
    );
    let v = json(&run(&["kraus", "--table", &product]));
    assert!(num(&v["round_trip_residual"]) < 1e-12);

    // Alice's marginal for setting 0 depends on Bob's setting
    let mut signaling = values.clone();
    signaling[0][0][0][0] += 0.1;
    signaling[1][0][0][0] -= 0.1;
    let bad = write(
        dir.path(),
        "bad.json",
        &serde_json::json!({"m": 2, "n": 2, "values": signaling}).to_string(),
    );
    let out = run(&["kraus", "--table", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("signaling"));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(run(&["probe", "--preset", "nope"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.json",
        "{\n  \"dim\": 2,\n  \"psi\": [[1, 0], [0, 0]],\n  \"alice\": oops\n}",
    );
    let out = run(&["probe", "--scenario", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
    assert_eq!(
        run(&["probe", "--scenario", "/no/such/file"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&[
        "probe",
        "--preset",
        "tsirelson-qubit",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(v["chsh_value"].is_number());
}

#[test]
fn threads_flag_is_accepted() {
    let a = run(&[
        "signal",
        "--search",
        "--dim",
        "2",
        "--restarts",
        "3",
        "--seed",
        "2",
        "--threads",
        "2",
    ]);
    let b = run(&[
        "signal",
        "--search",
        "--dim",
        "2",
        "--restarts",
        "3",
        "--seed",
        "2",
        "--threads",
        "1",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!((num(&json(&a)["s_plus"]) - 0.5).abs() < 1e-4);
}

use std::process::{Command, Output};

fn betapoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betapoly"))
        .args(args)
        .env_remove("BETAPOLY_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SIM: [&str; 12] = [
    "simulate", "fvector", "--family", "beta", "--d", "2", "--n", "6", "--beta", "1", "--reps",
    "2000",
];

#[test]
fn csv_reports_are_reproducible() {
    let mut args = SIM.to_vec();
    args.extend(["--format", "csv", "--seed", "5"]);
    let a = betapoly(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    assert_eq!(
        text.lines().next(),
        Some("name,value,sigma,n,reference_label")
    );
    assert_eq!(text.lines().count(), 3);
    args.extend(["--threads", "3"]);
    assert_eq!(betapoly(&args).stdout, a.stdout);
}

#[test]
fn seed_comes_from_flag_then_environment_then_default() {
    let json = |o: &Output| serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap();
    assert_eq!(json(&betapoly(&SIM))["seed"], 20181017);
    let env = Command::new(env!("CARGO_BIN_EXE_betapoly"))
        .args(SIM)
        .env("BETAPOLY_SEED", "31")
        .output()
        .unwrap();
    assert_eq!(json(&env)["seed"], 31);
    let mut args = SIM.to_vec();
    args.extend(["--seed", "32"]);
    let both = Command::new(env!("CARGO_BIN_EXE_betapoly"))
        .args(&args)
        .env("BETAPOLY_SEED", "31")
        .output()
        .unwrap();
    assert_eq!(json(&both)["seed"], 32);
    let bad = Command::new(env!("CARGO_BIN_EXE_betapoly"))
        .args(SIM)
        .env("BETAPOLY_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reports_echo_their_inputs() {
    let o = betapoly(&SIM);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "simulate");
    assert_eq!(v["params"]["n"], 6);
    assert!(v["version"].is_string());
}

#[test]
fn exit_codes() {
    assert_eq!(
        betapoly(&["eval", "I", "--n", "5", "--k", "2", "--alpha", "1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(betapoly(&["eval", "I", "--n", "5"]).status.code(), Some(2));
    assert_eq!(betapoly(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        betapoly(&["eval", "I-tilde", "--n", "5", "--k", "2", "--alpha", "0"])
            .status
            .code(),
        Some(2)
    );
    // a tolerance of zero cannot be met by a noisy comparison
    let fail = betapoly(&[
        "compare",
        "external-angle",
        "--family",
        "beta",
        "--d",
        "2",
        "--n",
        "4",
        "--k",
        "1",
        "--beta",
        "0",
        "--reps",
        "200",
        "--inner",
        "50",
        "--tolerance",
        "0",
    ]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn corrupt_cache_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("j.json");
    std::fs::write(&cache, "[1, 2").unwrap();
    let o = betapoly(&[
        "eval",
        "fvector",
        "--family",
        "beta",
        "--d",
        "2",
        "--n",
        "5",
        "--k",
        "0",
        "--beta",
        "0",
        "--j-cache",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = betapoly(&[
        "eval",
        "zerocell",
        "--d",
        "2",
        "--alpha",
        "2",
        "--k",
        "0",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let value: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 6.0).abs() < 1e-10);
}

#[test]
fn comparison_suites_pass() {
    let o = betapoly(&[
        "compare",
        "monotonicity",
        "--family",
        "beta",
        "--d",
        "3",
        "--beta",
        "0",
        "--n",
        "15",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = betapoly(&[
        "compare", "civ", "--family", "beta", "--d", "2", "--n", "4", "--k", "1", "--beta", "0",
        "--reps", "4000", "--inner", "200",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn help_exits_cleanly() {
    let o = betapoly(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("simulate"));
}

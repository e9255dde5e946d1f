use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", rel].iter().collect();
    p.to_string_lossy().into_owned()
}

fn np(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_np")).args(args).env_remove("NP_BUDGET").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_kind(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn bound_prints_the_number() {
    let o = np(&["bound", "--q", "7", "--g", "2", "--r", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "8194\n");
    assert_eq!(stdout(&np(&["bound", "--q", "13", "--g", "1", "--r", "5"])), "5\n");
}

#[test]
fn zeta_of_the_line() {
    let o = np(&["zeta", "--curve", &data("curves/p1.toml")]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("P(t) = 1\n"), "{out}");
    assert!(out.contains("e = 0\n"), "{out}");
}

#[test]
fn zeta_json_of_an_elliptic_curve() {
    // y^2 = x^3 + x + 1 over F_7: 5 points, so a_1 = 7 + 1 - 5 = 3
    let o = np(&["zeta", "--curve", &data("curves/ec_ord_f7.toml"), "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["numerator"], serde_json::json!([1, -3, 7]));
    assert_eq!(v["p_rank"], 1);
}

#[test]
fn legendre_jumps_json() {
    let o = np(&["jumps", "--family", &data("families/legendre.toml"), "--p", "7", "--max-degree", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reduced_degree"], 3);
    assert_eq!(v["jumps"].as_array().unwrap().len(), 3);
}

#[test]
fn legendre_jumps_csv() {
    let o = np(&["jumps", "--family", &data("families/legendre.toml"), "--p", "11", "--format", "csv"]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("orbit_id,degree,slopes"));
    assert!(lines.all(|l| l.ends_with(",\"{1/2,1/2}\"")), "{out}");
}

#[test]
fn output_is_deterministic() {
    let args = ["lfun", "--family", &data("families/legendre_7.toml"), "--order", "4", "--precision", "3", "--congruence"];
    let a = np(&args);
    let b = np(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["jumps", "--family", &data("families/legendre_13.toml")];
    assert_eq!(np(&args).stdout, np(&args).stdout);
}

#[test]
fn lfun_csv_columns() {
    let o = np(&["lfun", "--family", &data("families/legendre_7.toml"), "--order", "3", "--precision", "3", "--format", "csv"]);
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("k,coefficient,mod_p"));
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn eval_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("np.svg");
    let o = np(&["eval", "--fspace", &data("fspaces/ss_f7.json"), "--format", "text", "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "slopes: {1/2,1/2}\n");
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn unitroot_of_a_conjugated_module() {
    let o = np(&["unitroot", "--module", &data("modules/conjugated_diag_1_5.json"), "--filtration"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["filtration"].as_array().unwrap().len(), 2);
    assert_eq!(v["unit_root"]["pivots"].as_array().unwrap().len(), 1);
}

#[test]
fn jumping_module_is_refused() {
    let o = np(&["unitroot", "--module", &data("modules/jumping_7.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "non-constant-polygon");
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_input_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "provider = \"legendre\"\nq = 6\n").unwrap();
    let o = np(&["jumps", "--family", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "config-invalid");

    let o = np(&["jumps", "--family", &data("families/planted_z.toml"), "--p", "7"]);
    assert_eq!(o.status.code(), Some(2));

    let o = np(&["zeta", "--curve", "/nonexistent.toml"]);
    assert_eq!(o.status.code(), Some(2));

    let o = np(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "config-invalid");
}

#[test]
fn budget_exceeded_exit_code() {
    let o = Command::new(env!("CARGO_BIN_EXE_np"))
        .args(["jumps", "--family", &data("families/legendre_7.toml")])
        .env("NP_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_kind(&o), "budget-exceeded");
    assert!(o.stdout.is_empty());

    let o = np(&["--budget", "10", "jumps", "--family", &data("families/legendre_7.toml")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn precision_too_small_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let low = dir.path().join("low.json");
    std::fs::write(&low, r#"{"p":7,"M":2,"phi":[[1,0],[0,49]]}"#).unwrap();
    let o = np(&["eval", "--fspace", low.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_kind(&o), "precision-insufficient");
}

#[test]
fn selftest_single_criterion() {
    let o = np(&["selftest", "--only", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS"));
    assert_eq!(np(&["selftest", "--only", "11"]).status.code(), Some(2));
}

#[test]
fn help_is_not_an_error() {
    let o = np(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("jumps"));
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn hlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlab"))
        .args(args)
        .env_remove("HLAB_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn eval_with_certificate() {
    let o = hlab(&["eval", "--ring", "zp", "--p", "7", "--prec", "8", "--depth", "1", "--formula", "exists x. x*x = 2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true (certified: witness 3 mod 7, Hensel)");
}

#[test]
fn eval_json_and_bindings() {
    let o = hlab(&["eval", "--p", "5", "--prec", "6", "--formula", "mres(x) = %a", "--let", "x=10", "--let", "%a=1:2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["value"], "true");
    assert_eq!(v["ring"]["kind"], "padic");
    let o = hlab(&["eval", "--formula", "0 = 1"]);
    assert_eq!(stdout(&o).trim(), "false");
    let o = hlab(&["eval", "--formula", "x = 1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = hlab(&["eval", "--formula", "x == 1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mres_normal_form() {
    let o = hlab(&["mres", "--ring", "zp", "--p", "5", "--prec", "6", "--int", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), r#"{"val":1,"unit":2}"#);
    let o = hlab(&["mres", "--ring", "fpt", "--p", "5", "--int", "-3"]);
    assert_eq!(stdout(&o).trim(), r#"{"val":0,"unit":2}"#);
}

#[test]
fn help_and_usage_errors() {
    let o = hlab(&["eval", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Usage"));
    assert_eq!(hlab(&["eval", "--nonsense"]).status.code(), Some(2));
    assert_eq!(hlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hlab(&["mres", "--p", "8", "--int", "3"]).status.code(), Some(2));
    assert_eq!(hlab(&["eval", "--ring", "qp", "--formula", "0 = 0"]).status.code(), Some(2));
}

#[test]
fn config_precedence() {
    let cfg = scratch("p13.toml", "p = 13\nprec = 4\n");
    let cfg = cfg.to_str().unwrap();
    let o = hlab(&["mres", "--config", cfg, "--int", "26"]);
    assert_eq!(stdout(&o).trim(), r#"{"val":1,"unit":2}"#);
    let o = hlab(&["mres", "--config", cfg, "--p", "17", "--int", "34"]);
    assert_eq!(stdout(&o).trim(), r#"{"val":1,"unit":2}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_hlab"))
        .args(["mres", "--int", "26"])
        .env("HLAB_CONFIG", cfg)
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), r#"{"val":1,"unit":2}"#);
    let bad = scratch("bad.toml", "p = 13\nflavour = 1\n");
    let o = hlab(&["mres", "--config", bad.to_str().unwrap(), "--int", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn lift_square_root_of_seven() {
    let o = hlab(&["lift", "--p", "3", "--prec", "10", "--eq", "x^2 - 7", "--at", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let digits: Vec<u64> = serde_json::from_value(v["root"][0]["digits"].clone()).unwrap();
    let x: u128 = digits.iter().rev().fold(0, |acc, &d| acc * 3 + d as u128);
    assert_eq!((x * x) % 59049, 7);
    let o = hlab(&["lift", "--p", "3", "--eq", "x^2 - 7", "--at", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn loghensel_from_file() {
    let ok = scratch("lp.json", r#"{"chart":{"n":1,"m":1,"exponents":[[2]]},"a0":[[0,1]],"b":[[0,0,1,1]]}"#);
    let o = hlab(&["loghensel", "--p", "5", "--prec", "6", "--file", ok.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["effective_precision"], 4);
    let bad = scratch("lp_bad.json", r#"{"chart":{"n":1,"m":1,"exponents":[[2]]},"a0":[[0,1]],"b":[[0,0,3]]}"#);
    let o = hlab(&["loghensel", "--p", "5", "--prec", "6", "--file", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("residue mismatch"));
    let singular = scratch("lp_sing.json", r#"{"chart":{"n":1,"m":1,"exponents":[[5]]},"a0":[[2]],"b":[[2]]}"#);
    let o = hlab(&["loghensel", "--p", "5", "--file", singular.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("log-smooth"));
}

#[test]
fn rewrite_outputs() {
    let o = hlab(&["rewrite", "--formula", "x = 0"]);
    assert_eq!(stdout(&o).trim(), "%x +mod 0 = 0");
    let chart = scratch("prod.json", r#"{"n":2,"m":1,"exponents":[[1,1]]}"#);
    let o = hlab(&["rewrite", "--chart", chart.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("exists %c1. exists %c2. exists %w1."));
    assert_eq!(hlab(&["rewrite", "--formula", "mres(x) = 0"]).status.code(), Some(1));
}

#[test]
fn axkochen_reports() {
    let o = hlab(&["axkochen", "--p", "7", "--vars", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["schema"], "hlab-report-1");
    assert_eq!(v["witness"]["residue_point"], serde_json::json!([1, 2, 3, 0, 0]));
    assert_eq!(v["verification"]["zero_at_precision"], true);
    let o = hlab(&["axkochen", "--p", "7", "--form", "x^2 + y^2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = hlab(&["axkochen", "--p", "5", "--form", "x^2 + y^2"]);
    assert!(stdout(&o).starts_with("warning:"));
}

#[test]
fn json_output_is_reproducible() {
    let args = ["axkochen", "--p", "101", "--vars", "5", "--seed", "9", "--json"];
    assert_eq!(hlab(&args).stdout, hlab(&args).stdout);
    let chart = scratch("sq.json", r#"{"n":1,"m":1,"exponents":[[2]]}"#);
    let args = ["probe", "--chart", chart.to_str().unwrap(), "--p", "5", "--samples", "30", "--seed", "4", "--json"];
    let a = hlab(&args);
    assert_eq!(a.stdout, hlab(&args).stdout);
    let last = stdout(&a).lines().last().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&last).unwrap();
    assert_eq!(v["summary"]["mismatches"], 0);
}

#[test]
fn transfer_table() {
    let o = hlab(&["transfer", "--formula", "exists x. x*x*x = 2", "--primes", "3,5,7,11,13", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 6);
    let summary: serde_json::Value = serde_json::from_str(lines[5]).unwrap();
    assert_eq!(summary["summary"]["disagree"], 0);
    assert_eq!(hlab(&["transfer", "--primes", "4"]).status.code(), Some(2));
    let o = hlab(&["transfer", "--primes", "5"]);
    assert!(stdout(&o).contains("total:"));
}

use std::process::{Command, Output};

use serde_json::Value;

fn spsdense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spsdense"))
        .args(args)
        .env_remove("SPSDENSE_PRECISION_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn find_block_reports_the_first_witness() {
    let v = json(&spsdense(&[
        "find-block", "--c", "3/2", "--modulus", "3", "--block-len", "2", "--residue", "2", "--limit", "100",
    ]));
    assert_eq!(v["m"], 6);
    assert_eq!(v["verified"], true);
    assert_eq!(v["config"]["command"], "find-block");
    assert_eq!(v["config"]["limit"], 100);
}

#[test]
fn phi_sums_csv_ends_at_n_max() {
    let out = spsdense(&["phi-sums", "--c", "3/2", "--n-max", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "3");
    assert_eq!(last[1], "5");
    assert_eq!(last[2], "4");
    assert!((last[5].parse::<f64>().unwrap() - 0.3).abs() < 1e-12);
    let header = text.lines().next().unwrap();
    assert_eq!(header, "n,floor,phi,frac_lo,frac_hi,frac");
}

#[test]
fn crt_pairs() {
    let v = json(&spsdense(&["crt", "--pairs", "22:23,27:29"]));
    assert_eq!(v["r"], "114");
    assert_eq!(v["modulus"], "667");
    let out = spsdense(&["crt", "--pairs", "1:6,1:10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[E_NOT_COPRIME]"));
}

#[test]
fn exit_codes_separate_usage_domain_and_budget() {
    let out = spsdense(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[E_USAGE]"));

    let out = spsdense(&["floor-pow", "--m", "2", "--unknown-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[E_USAGE]"));

    let out = spsdense(&["floor-pow", "--c", "4/2", "--m", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[E_EXPONENT]"));

    let out = spsdense(&["find-block", "--modulus", "3", "--block-len", "1", "--residue", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[E_DOMAIN]"));

    let out = spsdense(&["discrepancy", "--random", "100", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[E_EXACT_BUDGET]"));

    let out = spsdense(&["build-window", "--block-len", "21", "--prime-limit", "100000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[E_PRIME_BUDGET]"));

    assert_eq!(spsdense(&["--help"]).status.code(), Some(0));
    assert_eq!(spsdense(&["--version"]).status.code(), Some(0));
}

#[test]
fn not_found_is_success() {
    let v = json(&spsdense(&[
        "find-block", "--modulus", "7", "--block-len", "3", "--residue", "0", "--limit", "4",
    ]));
    assert_eq!(v["found"], false);
    assert!(v["m"].is_null());
}

#[test]
fn output_is_identical_across_thread_counts() {
    let run = |threads: &str| {
        let out = spsdense(&["exp-sum", "--n", "5000", "--modulus", "3", "--k", "1,-2", "--threads", threads]);
        let mut v = json(&out);
        v["config"]["threads"] = Value::Null;
        v
    };
    assert_eq!(run("1"), run("4"));
    let a = spsdense(&["discrepancy", "--random", "200", "--dim", "3", "--estimate-samples", "500", "--seed", "9"]);
    let b = spsdense(&["discrepancy", "--random", "200", "--dim", "3", "--estimate-samples", "500", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn precision_cap_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_spsdense"))
        .args(["floor-pow", "--m", "2"])
        .env("SPSDENSE_PRECISION_CAP", "512")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["precision_cap"], 512);
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &["floor-pow", "--m", "4"],
        &["residues", "--modulus", "3", "--to", "10"],
        &["find-block", "--modulus", "2", "--block-len", "1", "--residue", "0", "--limit", "50"],
        &["fracgame", "--m", "6", "--modulus", "3", "--block-len", "2", "--residue", "1"],
        &["fracgame", "--scan", "--moduli", "2..5", "--block-lens", "1..2", "--m-max", "100"],
        &["missing-blocks", "--modulus", "3", "--block-len", "2", "--n-to", "10"],
        &["exp-sum", "--n", "2", "--modulus", "2", "--k", "1,1"],
        &["discrepancy", "--points", "0.5"],
        &["etks", "--points", "0;0.5", "--k-max", "1"],
        &["vdc-bound", "--c", "7/2", "--n", "1000", "--modulus", "3", "--k", "1,0,0,0"],
        &["phi", "--n", "12"],
        &["phi-sums", "--n-max", "10"],
        &["density-probe", "--n-max", "50"],
        &["mertens", "--n", "30", "--alpha", "1", "--c-const", "0.5"],
        &["build-window", "--block-len", "4", "--allow-small-h"],
        &["crt", "--pairs", "5:7"],
        &["verify-window", "--block-len", "4", "--allow-small-h", "--m", "10"],
    ];
    for args in cases {
        let v = json(&spsdense(args));
        assert_eq!(v["config"]["command"], args[0]);
    }
    let v = json(&spsdense(&["residues", "--modulus", "3", "--to", "10"]));
    assert_eq!(v["residues"], serde_json::json!([1, 2, 2, 2, 2, 2, 0, 1, 0, 1]));
    let v = json(&spsdense(&["etks", "--points", "0;0.5", "--k-max", "1"]));
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    let v = json(&spsdense(&["mertens", "--n", "30", "--alpha", "1", "--c-const", "0.5"]));
    assert_eq!(v["value"], "4/5");
    let v = json(&spsdense(&["floor-pow", "--m", "4"]));
    assert_eq!(v["floor_value"], "8");
    assert_eq!(v["exact_integer"], true);
}

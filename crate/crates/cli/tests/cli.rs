use std::process::{Command, Output};

use serde_json::Value;

fn cellzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellzeta")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn decompose_symmetric_one() {
    let out = cellzeta(&["decompose", "1", "1", "1", "1", "1", "1", "1", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["Q"], "21");
    assert_eq!(v["Phat"], "101/4");
    assert_eq!(v["P"], "87/4");
    assert_eq!(v["prec"], 40);
}

#[test]
fn decompose_zero() {
    let v = json(&cellzeta(&["decompose", "0", "0", "0", "0", "0", "0", "0", "0", "--prec", "30"]));
    assert_eq!((v["Q"].as_str(), v["Phat"].as_str(), v["P"].as_str()), (Some("1"), Some("0"), Some("0")));
}

#[test]
fn inadmissible_exit_code() {
    let out = cellzeta(&["decompose", "1", "0", "5", "0", "0", "0", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a1+a5-a3"));
    let out = cellzeta(&["worthiness", "1", "0", "5", "0", "0", "0", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn worthiness_reports() {
    for (a, g) in [
        (["8", "16", "10", "15", "12", "16", "18", "13"], 0.86597135),
        (["15", "20", "16", "14", "18", "17", "16", "20"], 0.85163139),
        (["2"; 8], 0.77795976),
    ] {
        let mut args = vec!["worthiness", "--prec", "30"];
        args.extend(a);
        let v = json(&cellzeta(&args));
        let got: f64 = v["gamma"].as_str().unwrap().parse().unwrap();
        assert!((got - g).abs() < 1e-7, "{a:?}: {got}");
    }
}

#[test]
fn refined_split_is_accepted() {
    let out = cellzeta(&["worthiness", "8", "16", "10", "15", "12", "16", "18", "13", "--refined-m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["m"].as_array().unwrap().len(), 5);
}

#[test]
fn search_single_orbit() {
    let ex = ["8", "16", "10", "15", "12", "16", "18", "13"];
    let mut args = vec!["search", "--prec", "20", "--min"];
    args.extend(ex);
    args.push("--max");
    args.extend(ex);
    let v = json(&cellzeta(&args));
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["gamma"].as_str().unwrap().starts_with("8.6597"));
}

#[test]
fn search_is_deterministic_and_ranked() {
    let args = ["search", "--prec", "20", "--min", "1", "1", "1", "1", "1", "1", "1", "1", "--max", "2", "2", "2", "2", "2", "2", "2", "2"];
    let a = cellzeta(&args);
    let b = cellzeta(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let gammas: Vec<f64> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["sane"] == true)
        .map(|r| r["gamma"].as_str().unwrap().parse().unwrap())
        .collect();
    assert!(gammas.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn search_empty_box() {
    let out = cellzeta(&["search", "--min", "1", "0", "5", "0", "0", "0", "0", "0", "--max", "1", "0", "5", "0", "0", "0", "0", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"].as_array().unwrap().len(), 0);
}

#[test]
fn search_budget_warning() {
    let out = cellzeta(&["search", "--prec", "20", "--budget", "3", "--min", "1", "1", "1", "1", "1", "1", "1", "1", "--max", "2", "2", "2", "2", "2", "2", "2", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    let v = json(&out);
    assert_eq!(v["partial"], true);
    assert_eq!(v["results"].as_array().unwrap().len() + v["skipped"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_graph_and_group_pass() {
    for suite in ["graph", "group"] {
        let out = cellzeta(&["verify", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        assert_eq!(json(&out)["passed"], true);
    }
}

#[test]
fn verify_sequences_reports_inclusion_failure() {
    let out = cellzeta(&["verify", "--suite", "sequences"]);
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    let get = |name: &str| checks.iter().find(|c| c["check"] == name).unwrap()["pass"].clone();
    assert_eq!(get("recursion = sum, n <= 30"), true);
    assert_eq!(get("Q_n integral, n <= 10"), true);
    // the scaled Phat_n, P_n keep small denominators (2, 4, 12)
    assert_eq!(get("d_n inclusions, n <= 10"), false);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d_n inclusions"));
}

#[test]
fn json_file_output() {
    let dir = std::env::temp_dir().join(format!("cellzeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("orbit.json");
    let out = cellzeta(&["orbit", "8", "16", "10", "15", "12", "16", "18", "13", "--n", "100", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["orbit_size"], 5040);
    assert_eq!(v["m"], serde_json::json!([18, 17, 17, 16, 16]));
    std::fs::remove_dir_all(&dir).ok();
}

use std::process::{Command, Output};

use serde_json::Value;

fn cue_dpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cue-dpp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid JSON summary")
}

fn columns(line: &str) -> Vec<String> {
    // the window column is quoted JSON and contains commas
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

#[test]
fn distance_default_window() {
    let o = cue_dpp(&["distance", "--n", "100", "--m", "2", "--theta", "0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,m,A,tv,w1,coupling,cs,hs,closed_form");
    let row = columns(lines[1]);
    let w1: f64 = row[4].parse().unwrap();
    let closed: f64 = row[8].parse().unwrap();
    let expected = 200f64.sqrt() * 0.4 * 0.4 / (6.0 * std::f64::consts::PI);
    assert!((closed - expected).abs() < 1e-10);
    assert!((closed - 0.12004).abs() < 1e-5);
    assert!(w1 <= closed);
}

#[test]
fn distance_m1_is_zero() {
    let o = cue_dpp(&["distance", "--n", "100", "--m", "1", "--theta", "0.2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for key in ["tv", "w1", "coupling", "cs", "hs"] {
        assert_eq!(v[key].as_f64().unwrap(), 0.0, "{key}");
    }
    assert_eq!(v["command"], "distance");
    assert_eq!(v["config"]["n"], 100);
    assert!(v["version"].is_string());
}

#[test]
fn distance_multi_interval_window() {
    let o = cue_dpp(&[
        "distance",
        "--n",
        "100",
        "--m",
        "2",
        "--set",
        "[[-0.3,-0.1],[0.1,0.3]]",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["chain_holds"], true);
    assert_eq!(v["config"]["A"].as_array().unwrap().len(), 2);
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(cue_dpp(&["distance", "--theta", "4.0"]).status.code(), Some(2));
    assert_eq!(cue_dpp(&["distance", "--set", "[[0.3,0.1]]"]).status.code(), Some(2));
    assert_eq!(cue_dpp(&["distance", "--set", "not json"]).status.code(), Some(2));
    assert_eq!(cue_dpp(&["distance", "--n", "abc"]).status.code(), Some(2));
    assert_eq!(cue_dpp(&["variance", "--theta", "2.0"]).status.code(), Some(2));
    assert_eq!(cue_dpp(&["intensity", "--k", "9"]).status.code(), Some(2));
    assert_eq!(
        cue_dpp(&["sample", "--n", "5", "--m", "2", "--theta", "0.3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cue_dpp(&["clt", "--quad-order", "0"]).status.code(), Some(2));
}

#[test]
fn variance_single_eigenvalue_and_m1_gap() {
    let o = cue_dpp(&["variance", "--n", "1", "--theta", "0.3", "--m", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,theta,var_formula,var_pmf,lower,upper,m,var_formula_m,var_gap,gap_bound"
    );
    let row = columns(lines.next().unwrap());
    let pi = std::f64::consts::PI;
    let exact = 0.3 / pi - 0.09 / (pi * pi);
    assert!((row[2].parse::<f64>().unwrap() - exact).abs() < 1e-10);
    assert!((row[3].parse::<f64>().unwrap() - exact).abs() < 1e-10);
    // no lower bound below 3π/(2n)
    assert_eq!(row[4], "");
    assert_eq!(row[8].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn variance_grid_with_gap() {
    let o = cue_dpp(&["variance", "--n", "20,100", "--theta", "0.2", "--m", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let gap = r["var_gap"].as_f64().unwrap();
        assert!(gap >= 0.0 && gap <= r["gap_bound"].as_f64().unwrap());
        let f = r["var_formula"].as_f64().unwrap();
        assert!((f - r["var_pmf"].as_f64().unwrap()).abs() < 1e-6);
    }
}

#[test]
fn clt_rows_and_flags() {
    let o = cue_dpp(&["clt", "--n", "50,100", "--theta", "0.25,0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<Vec<String>> = text.lines().skip(1).map(columns).collect();
    assert_eq!(rows.len(), 4);
    // n = 50, θ = 0.1 is outside the hypothesis θ ≥ 3π/n and is only flagged
    let flagged = rows.iter().find(|r| r[0] == "50" && r[1] == "0.1").unwrap();
    assert_eq!(flagged[7], "false");
    let inside = rows.iter().find(|r| r[0] == "100" && r[1] == "0.25").unwrap();
    assert_eq!(inside[7], "true");
}

#[test]
fn figure1_smoke_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &std::path::Path| {
        vec![
            "figure1".to_string(),
            "--n".into(),
            "20".into(),
            "--theta".into(),
            "0.3".into(),
            "--trials".into(),
            "50".into(),
            "--seed".into(),
            "11".into(),
            "--json".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    let run = |p: &std::path::Path| {
        let args = args(p);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        cue_dpp(&refs)
    };
    let oa = run(&a);
    let ob = run(&b);
    assert_eq!(oa.status.code(), Some(0), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(stdout(&oa), stdout(&ob));
    let csv_a = std::fs::read_to_string(&a).unwrap();
    assert_eq!(csv_a, std::fs::read_to_string(&b).unwrap());
    assert!(csv_a.starts_with("t,F_N,F_Nm,Phi\n"));
    let v = json(&oa);
    assert_eq!(v["config"]["trials"], 50);
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
}

#[test]
fn intensity_audit_and_single_query() {
    let o = cue_dpp(&["intensity", "--queries", "200", "--seed", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["min_margin"].as_f64().unwrap() >= -1e-10);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);

    let o = cue_dpp(&["intensity", "--n", "20", "--m", "3", "--points", "[0.4]"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = columns(text.lines().nth(1).unwrap());
    let rho: f64 = row[4].parse().unwrap();
    assert!((rho - 20.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);

    let o = cue_dpp(&["intensity", "--n", "10", "--m", "2", "--points", "[0.3,0.3]"]);
    let text = stdout(&o);
    let row = columns(text.lines().nth(1).unwrap());
    assert_eq!(row[4].parse::<f64>().unwrap(), 0.0);
    assert_eq!(row[5].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn sine_sweep() {
    let o = cue_dpp(&["sine", "--n", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let row = columns(text.lines().nth(1).unwrap());
    assert_eq!(row[0], "200");
    let bound: f64 = row[2].parse().unwrap();
    assert!((bound - 5.0 * 2.0 * 2.0 / 200f64.powf(1.5)).abs() < 1e-15);
    assert!(row[3].parse::<f64>().unwrap() <= 1.0);

    let o = cue_dpp(&["sine", "--n", "100", "--set", "[]"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(columns(text.lines().nth(1).unwrap())[1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn sample_angles_and_counts() {
    let o = cue_dpp(&["sample", "--n", "4", "--trials", "3", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 12);
    assert_eq!(
        text,
        stdout(&cue_dpp(&["sample", "--n", "4", "--trials", "3", "--seed", "5"]))
    );

    let o = cue_dpp(&[
        "sample", "--n", "4", "--trials", "3", "--seed", "5", "--theta", "3.14159",
    ]);
    let text = stdout(&o);
    assert!(text.starts_with("trial,count\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",4")));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fchain")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fchain(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn simulate(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let path = dir.path().join(name);
    let path = path.to_str().unwrap().to_string();
    let mut full = vec!["simulate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    ok(&full);
    path
}

fn assert_keys(v: &Value, keys: &[&str]) {
    let obj = v.as_object().unwrap();
    let mut got: Vec<&str> = obj.keys().map(String::as_str).collect();
    got.sort_unstable();
    let mut want = keys.to_vec();
    want.sort_unstable();
    assert_eq!(got, want);
}

const ESTIMATE_KEYS: [&str; 8] = ["alpha", "boundary", "ci", "method", "n", "point", "regime", "stderr"];

#[test]
fn simulate_writes_n_plus_one_rows() {
    let dir = TempDir::new().unwrap();
    let path = simulate(&dir, "p.csv", &["--a", "0.5", "--p", "0.3", "--n", "999", "--seed", "42"]);
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1001);
    assert_eq!(lines[0], "t,x");
    assert!(lines[1..].iter().enumerate().all(|(t, l)| l == &format!("{t},0") || l == &format!("{t},1")));
    // same seed, same bytes
    let again = simulate(&dir, "q.csv", &["--a", "0.5", "--p", "0.3", "--n", "999", "--seed", "42"]);
    assert_eq!(text, fs::read_to_string(again).unwrap());
}

#[test]
fn round_trip_through_csv_matches_the_library() {
    use frechet_chain::chain::{make_params, simulate_bernoulli_chain, transition_counts};
    use frechet_chain::estimation::mle;

    let dir = TempDir::new().unwrap();
    let path = simulate(&dir, "p.csv", &["--a", "0.7", "--p", "0.3", "--n", "4999", "--seed", "9"]);
    let fit = mle(&transition_counts(
        &simulate_bernoulli_chain(&make_params(0.7, 0.3).unwrap(), 4999, 9).unwrap(),
    ))
    .unwrap();

    let v = json(&["estimate", "--input", &path, "--method", "mle", "--alpha", "0.05"]);
    let pair = v.as_array().unwrap();
    assert_eq!(pair.len(), 2);
    let mut keys = ESTIMATE_KEYS.to_vec();
    keys.push("parameter");
    for e in pair {
        assert_keys(e, &keys);
        assert_eq!(e["boundary"], false);
        assert_eq!(e["n"], 4999);
        assert_eq!(e["regime"], "less_half");
        let ci = e["ci"].as_array().unwrap();
        let point = e["point"].as_f64().unwrap();
        assert!(ci[0].as_f64().unwrap() < point && point < ci[1].as_f64().unwrap());
    }
    assert_eq!(pair[0]["parameter"], "a");
    assert_eq!(pair[1]["parameter"], "p");
    assert_eq!(pair[0]["point"].as_f64().unwrap(), fit.params.a());
    assert_eq!(pair[1]["point"].as_f64().unwrap(), fit.params.p());
}

#[test]
fn single_estimates_share_one_schema() {
    let dir = TempDir::new().unwrap();
    let path = simulate(&dir, "p.csv", &["--a", "0.8", "--p", "0.5", "--n", "1999", "--seed", "3"]);
    for method in ["mean", "robust", "mle-half", "indicator"] {
        let v = json(&["estimate", "--input", &path, "--method", method, "--seed", "5"]);
        assert_keys(&v, &ESTIMATE_KEYS);
        assert_eq!(v["method"], method);
    }
    let half = json(&["estimate", "--input", &path, "--method", "mle-half"]);
    assert_eq!(half["regime"], "half");
    assert!((half["point"].as_f64().unwrap() - 0.8).abs() < 0.05);

    let uni = simulate(&dir, "u.csv", &["--a", "0.3", "--n", "9999", "--seed", "4", "--marginal", "uniform"]);
    let v = json(&["estimate", "--input", &uni, "--method", "indicator"]);
    assert!((v["point"].as_f64().unwrap() - 0.3).abs() < 0.03);
    assert_eq!(v["regime"], Value::Null);
}

#[test]
fn degenerate_paths_report_a_boundary_estimate() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("zeros.csv");
    let body: String = (0..20).map(|t| format!("{t},0\n")).collect();
    fs::write(&path, format!("t,x\n{body}")).unwrap();
    let v = json(&["estimate", "--input", path.to_str().unwrap(), "--method", "mle"]);
    for e in v.as_array().unwrap() {
        assert_eq!(e["boundary"], true);
        assert_eq!(e["ci"], Value::Null);
    }
    assert_eq!(v[0]["point"].as_f64().unwrap(), 1.0);
    assert_eq!(v[1]["point"].as_f64().unwrap(), 0.0);
}

#[test]
fn lrt_schema_and_decision() {
    let dir = TempDir::new().unwrap();
    let dep = simulate(&dir, "dep.csv", &["--a", "0.9", "--p", "0.4", "--n", "9999", "--seed", "1"]);
    let v = json(&["lrt", "--input", &dep, "--alpha", "0.05"]);
    assert_keys(&v, &["alpha", "clamped", "decision", "df", "p_value", "regime", "statistic"]);
    assert_eq!(v["df"], 1);
    assert_eq!(v["decision"], "reject");
    assert!(v["statistic"].as_f64().unwrap() > 1000.0);

    let null = simulate(&dir, "null.csv", &["--a", "0.3", "--p", "0.3", "--n", "9999", "--seed", "2"]);
    let v = json(&["lrt", "--input", &null]);
    let s = v["statistic"].as_f64().unwrap();
    assert!(s >= 0.0);
    assert_eq!(v["decision"], if s > 3.841458820694124 { "reject" } else { "fail_to_reject" });
}

#[test]
fn transition_and_mixing_outputs() {
    let v = json(&["transition", "--a", "0.3", "--p", "0.7", "--n", "3"]);
    assert_keys(&v, &["a", "matrix", "n", "n_step", "p", "regime"]);
    assert_eq!(v["regime"], "geq_half");
    let row = &v["matrix"][1];
    assert!((row[0].as_f64().unwrap() - 0.3).abs() < 1e-12 && (row[1].as_f64().unwrap() - 0.7).abs() < 1e-12);

    let csv = ok(&["mixing", "--a", "0.2", "--p", "0.1", "--max-lag", "30"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,psi,phi");
    assert_eq!(lines.len(), 31);
    let psi: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(psi.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn exit_codes() {
    let usage = fchain(&["simulate", "--a", "0.5"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(!usage.stderr.is_empty());
    assert_eq!(fchain(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fchain(&["mixing", "--a", "0.2", "--p", "0.1", "--format", "bogus"]).status.code(), Some(2));

    let domain = fchain(&["transition", "--a", "0", "--p", "0.3"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).starts_with("error: DomainError:"));

    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "t,x\n").unwrap();
    let out = fchain(&["estimate", "--input", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("EmptyData"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "t,x\n0,zero\n").unwrap();
    let out = fchain(&["lrt", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ParseError"));
}

fn count_points(svg: &str) -> Vec<usize> {
    svg.lines()
        .filter(|l| l.starts_with("<polyline"))
        .map(|l| l.split("points=\"").nth(1).unwrap().split('"').next().unwrap().split(' ').count())
        .collect()
}

#[test]
fn svg_plots_are_deterministic() {
    let args = ["plot", "--kind", "symmetry", "--a", "0.5", "--n", "999", "--reps", "40", "--seed", "11"];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    assert_eq!(count_points(&first), vec![9, 9]);

    let mixing = ok(&["plot", "--kind", "mixing", "--a", "0.2", "--p", "0.1", "--max-lag", "30"]);
    assert_eq!(count_points(&mixing), vec![30, 30]);
    // the ψ polyline falls from left to right, so its screen y increases
    let psi_line = mixing.lines().find(|l| l.contains("data-series=\"psi\"")).unwrap();
    let ys: Vec<f64> = psi_line
        .split("points=\"")
        .nth(1)
        .unwrap()
        .trim_end_matches("\"/>")
        .split(' ')
        .map(|xy| xy.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(ys.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(fchain(&["plot", "--kind", "mixing", "--a", "0.2"]).status.code(), Some(2));
}

#[test]
fn mc_report_and_replication_csv() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let reps = dir.path().join("reps.csv");
    let args = [
        "mc", "--a", "0.1", "--p", "0.3", "--n", "4999", "--reps", "400", "--alpha", "0.05", "--seed", "7",
        "--out", report.to_str().unwrap(), "--reps-csv", reps.to_str().unwrap(),
    ];
    ok(&args);
    let text = fs::read_to_string(&report).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let cp_a = rows.iter().find(|r| r["parameter"] == "a").unwrap()["coverage"].as_f64().unwrap();
    assert!((0.9275..=0.9875).contains(&cp_a), "{cp_a}");

    let csv = fs::read_to_string(&reps).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "rep,estimator,parameter,point,ci_lo,ci_hi,covered,length,degenerate");
    assert_eq!(lines.count(), 800);

    // reruns are byte-identical
    ok(&args);
    assert_eq!(text, fs::read_to_string(&report).unwrap());
}

#[test]
fn compare_and_tables_have_the_documented_columns() {
    let csv = ok(&["compare", "--a", "0.5", "--p", "0.3", "--n", "999", "--reps", "20", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 4);

    let table = ok(&["table", "--which", "mle-less", "--reps", "10", "--n", "499"]);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "n,a,p,ciml_a,ciml_p,cp_a,cp_p");
    assert_eq!(lines.len(), 1 + 12);

    let table = ok(&["table", "--which", "compare-greater", "--reps", "10", "--n", "99"]);
    assert_eq!(table.lines().next().unwrap(), "n,a,p,ciml_mle,cp_mle,ciml_mean,cp_mean,ciml_robust,cp_robust");
    assert_eq!(table.lines().count(), 1 + 4);

    let table = ok(&["table", "--which", "lrt-less", "--n", "999"]);
    assert_eq!(table.lines().count(), 1 + 36);
    assert!(table.lines().all(|l| l.split(',').count() == 8));

    let grid = json(&["lrt-grid", "--a-values", "0.9,0.4", "--p-values", "0.4,0.6", "--n", "9999", "--seed", "3"]);
    assert_eq!(grid.as_array().unwrap().len(), 4);
    assert_eq!(grid[0]["result"]["decision"], "reject");
}

#[test]
fn writes_to_the_out_file_not_stdout() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let stdout = ok(&["mixing", "--a", "0.5", "--p", "0.3", "--max-lag", "5", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(Path::new(&out)).unwrap()).unwrap();
    assert_eq!(v["psi"].as_array().unwrap().len(), 5);
}

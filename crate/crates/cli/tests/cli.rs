use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymspec")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Rows of a CSV document as `(header, cells)`.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("asymspec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn toeplitz_distribution_is_one_half_at_the_centre() {
    let o = run(&["dos", "--model", "toeplitz", "--a", "0", "--b", "1", "--lambda-points", "401"]);
    assert!(o.status.success());
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(h, ["lambda", "d0", "d1", "rho0", "rho1_cont"]);
    assert_eq!(rows.len(), 401);
    let (l, d0) = (column(&h, "lambda"), column(&h, "d0"));
    let centre = rows.iter().find(|r| r[l].parse::<f64>().unwrap() == 0.0).unwrap();
    assert!((centre[d0].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn laguerre_generic_columns_match_closed_forms_and_atoms_go_to_a_sidecar() {
    let out = scratch("laguerre.csv");
    let o = run(&[
        "dos", "--model", "laguerre", "--alpha0", "1", "--alpha1", "5", "--order", "1", "--lambda-points", "60",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv(&std::fs::read_to_string(&out).unwrap());
    let pairs = [("d0", "d0_closed"), ("d1", "d1_closed"), ("rho0", "rho0_closed"), ("rho1_cont", "rho1_closed")];
    for row in &rows[1..rows.len() - 1] {
        for (a, b) in pairs {
            let (x, y): (f64, f64) = (row[column(&h, a)].parse().unwrap(), row[column(&h, b)].parse().unwrap());
            assert!((x - y).abs() < 1e-6 * (1.0 + y.abs()), "{a} {x} vs {y}");
        }
    }
    let atoms: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_file_name("laguerre.atoms.json")).unwrap()).unwrap();
    let atoms = atoms["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 2);
    for a in atoms {
        assert!((a["weight"].as_f64().unwrap() + 0.125).abs() < 1e-6);
    }
}

#[test]
fn custom_expressions_run_and_bad_ones_are_usage_errors() {
    let o = run(&["dos", "--model", "custom", "--A0", "2*x-1", "--B0", "x*(1-x)", "--lambda-points", "5"]);
    assert!(o.status.success());
    assert_eq!(csv(&stdout(&o)).1.len(), 5);
    let o = run(&["dos", "--model", "custom", "--A0", "2*x-", "--B0", "x"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["dos", "--model", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["dos", "--model", "toeplitz", "--gamma", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["dos"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn laguerre_roots_verify() {
    let o = run(&["roots", "--model", "laguerre", "--alpha0", "1", "--alpha1", "5", "--j", "250", "--verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(rows.len(), 501);
    let col = |name| -> Vec<f64> { rows.iter().map(|r| r[column(&h, name)].parse().unwrap()).collect() };
    let (e0, e1) = (col("err0_pct"), col("err1_pct"));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(e1.iter().copied().fold(0.0, f64::max) <= 0.4);
    assert!(mean(&e1) <= 0.02);
    assert!(mean(&e0) > 30.0 * mean(&e1));
    let strict = run(&[
        "roots", "--model", "laguerre", "--alpha0", "1", "--alpha1", "5", "--j", "250", "--verify", "--max-error-pct",
        "0.01",
    ]);
    assert_eq!(strict.status.code(), Some(3));
    assert_eq!(run(&["roots", "--model", "toeplitz"]).status.code(), Some(1));
}

#[test]
fn symmetric_jacobi_median_root_is_near_zero() {
    let o = run(&["roots", "--model", "jacobi", "--alpha0", "1", "--alpha1", "0.5", "--beta0", "1", "--beta1", "0.5", "--j", "50"]);
    assert!(o.status.success());
    let (h, rows) = csv(&stdout(&o));
    let median = &rows[50];
    assert_eq!(median[column(&h, "n")], "51");
    assert!(median[column(&h, "lambda1")].parse::<f64>().unwrap().abs() < 1e-3);
}

#[test]
fn toeplitz_fourth_power_trace() {
    let o = run(&["trace", "--model", "toeplitz", "--f", "x^4", "--verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let value = |q: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{q},"))).unwrap();
        line.rsplit(',').next().unwrap().parse().unwrap()
    };
    assert!((value("t1") + 5.0).abs() < 1e-8);
    assert!((value("richardson_t1") + 5.0).abs() < 0.05);
}

#[test]
fn alternating_expectations_have_two_branches() {
    let o = run(&[
        "expect", "--model", "alternating", "--Q-A0", "x", "--branches", "--lambda-min", "-1.4", "--lambda-max", "-0.1",
        "--lambda-points", "5",
    ]);
    assert!(o.status.success());
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(h, ["lambda", "expectation", "branch0", "branch1"]);
    for r in rows {
        let v: Vec<f64> = r[1..].iter().map(|c| c.parse().unwrap()).collect();
        assert!(v[1] < v[0] && v[0] < v[2], "{v:?}");
    }
}

#[test]
fn symbol_residuals_shrink_like_inverse_square() {
    let o = run(&["symbol", "--model", "lipkin-even", "--gamma", "2.5", "--j", "64,128", "--x-points", "1", "--theta-points", "1"]);
    assert!(o.status.success());
    let (h, rows) = csv(&stdout(&o));
    let s: Vec<f64> = rows.iter().map(|r| r[column(&h, "scaled_residual")].parse().unwrap()).collect();
    assert_eq!(s.len(), 2);
    assert!(s[1] <= 2.0 * s[0] && s[1] >= 0.5 * s[0], "{s:?}");
}

#[test]
fn lipkin_verify_passes() {
    let o = run(&["verify", "--model", "lipkin-even", "--gamma", "2.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = csv(&stdout(&o));
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"));
}

#[test]
fn json_output_carries_metadata_and_is_deterministic() {
    let args = ["dos", "--model", "lipkin-odd", "--gamma", "2.5", "--lambda-points", "25", "--format", "json"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["metadata"]["model"], "lipkin-odd");
    assert_eq!(doc["metadata"]["parameters"]["gamma"], 2.5);
    assert!(doc["metadata"]["version"].is_string());
    assert!(doc["metadata"]["tolerances"]["quadrature"].is_number());
    assert_eq!(doc["rows"].as_array().unwrap().len(), 25);
    assert!(doc["atoms"]["atoms"].is_array());
    let seq = run(&["dos", "--model", "lipkin-odd", "--gamma", "2.5", "--lambda-points", "25", "--format", "json", "--sequential"]);
    assert_eq!(seq.stdout, a.stdout);
}

#[test]
fn collective_model_sweeps_the_band_distribution() {
    let o = run(&["dos", "--model", "collective", "--hx", "0", "--hz", "1", "--lambda-points", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(h, ["lambda", "d0", "d1"]);
    let d0: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    for (k, v) in d0.iter().enumerate() {
        assert!((v - k as f64 / 4.0).abs() < 1e-8, "{d0:?}");
    }
}

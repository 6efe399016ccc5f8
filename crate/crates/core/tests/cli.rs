use std::process::{Command, Output};

use pqlambert::pqbinom::{log_pq_binomial, PqParams};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqlambert"))
        .args(args)
        .env_remove("PQLAMBERT_SELFCHECK_FAULT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses a CSV body into its header and rows.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn eval_omega_figure_value() {
    let o = run(&["eval", "omega", "--a", "1/2", "--z", "-5"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    let v: f64 = rows[0][column(&h, "value")].parse().unwrap();
    assert!((v + 0.0891004).abs() < 5e-7);
    assert_eq!(rows[0][column(&h, "method")], "closed_form");
}

#[test]
fn eval_psi0_rational_closed_form() {
    let o = run(&["eval", "psi0", "--a", "1/3", "--x", "1", "--format", "json"]);
    assert!(o.status.success());
    let j: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let v = j["value"].as_f64().unwrap();
    assert!((v - 1.5 * 2f64.ln()).abs() < 1e-15);
}

#[test]
fn domain_errors_exit_two() {
    let o = run(&["eval", "omega", "--a", "0.5", "--z", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("negative"));
    let o = run(&["eval", "psi0", "--a", "1.5", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eval", "psi0", "--a", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn integrate_reports_divergence() {
    let o = run(&["integrate", "--a", "1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverge"));
}

#[test]
fn integrate_one_third() {
    let o = run(&["integrate", "--a", "1/3", "--target", "omega", "--rel-tol", "1e-6"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    let closed: f64 = rows[0][column(&h, "closed_form")].parse().unwrap();
    let quad: f64 = rows[0][column(&h, "quadrature")].parse().unwrap();
    let exact = -3.0 * std::f64::consts::PI.powi(2) / 8.0;
    assert!((closed - exact).abs() < 1e-14);
    assert!((quad - exact).abs() < 1e-6 * exact.abs());
}

#[test]
fn sweep_round_trips_through_csv() {
    let o = run(&[
        "sweep", "psi1", "--a", "0.3", "--lo", "-0.1", "--hi", "-1e-3", "--count", "50",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let (h, rows) = table(&text);
    assert_eq!(rows.len(), 50);
    let a = pqlambert::AsymmetryParam::new(0.3).unwrap();
    for row in rows {
        let x: f64 = row[column(&h, "x")].parse().unwrap();
        let v: f64 = row[column(&h, "value")].parse().unwrap();
        let direct = pqlambert::branches::psi(pqlambert::branches::PsiQuery::new(
            a,
            pqlambert::BranchId::Lower,
            x,
        ))
        .unwrap();
        // The printed digits reproduce the library value bit for bit.
        assert_eq!(v.to_bits(), direct.to_bits());
    }
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let args = ["sweep", "omega", "--a", "0.4", "--lo", "-20", "--hi", "-1e-4", "--count", "2000"];
    let one = Command::new(env!("CARGO_BIN_EXE_pqlambert"))
        .args(args)
        .env("PQLAMBERT_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_pqlambert"))
        .args(args)
        .env("PQLAMBERT_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn pqdist_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("half.csv");
    let o = run(&[
        "pqdist", "--n", "1024", "--a", "1/2", "--z", "-5", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = table(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(h, ["k", "k_over_n", "mass", "log_coeff"]);
    assert_eq!(rows.len(), 1025);
    let total: f64 = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path.with_extension("json")).unwrap())
            .unwrap();
    let peaks: Vec<u64> = side["peaks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_u64().unwrap())
        .collect();
    assert_eq!(peaks.len(), 2);
    assert!((peaks[0] as f64 / 1024.0 - 0.25).abs() < 0.05);
    assert!((peaks[1] as f64 / 1024.0 - 0.75).abs() < 0.05);
    assert!((side["y"].as_f64().unwrap() + 0.0891004).abs() < 5e-7);
    assert!(side["omega_bar"].as_f64().is_some());
}

#[test]
fn pqdist_direct_parameters_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eight.csv");
    let o = run(&[
        "pqdist", "--n", "8", "--p", "1.2", "--q", "0.7", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (_, rows) = table(&std::fs::read_to_string(&path).unwrap());
    let pq = PqParams::new(8, 1.2, 0.7).unwrap();
    for (k, row) in rows.iter().enumerate() {
        let lc: f64 = row[3].parse().unwrap();
        assert!((lc - log_pq_binomial(&pq, k as u64).unwrap()).abs() < 1e-14);
    }
}

#[test]
fn pqdist_unwritable_path_names_it() {
    let o = run(&[
        "pqdist", "--n", "8", "--p", "1.2", "--q", "0.7", "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn selfcheck_fast_passes() {
    let o = run(&["selfcheck"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.contains(" PASS ")).count() >= 8);
}

#[test]
fn selfcheck_fault_injection_fails() {
    let o = Command::new(env!("CARGO_BIN_EXE_pqlambert"))
        .args(["selfcheck", "--level", "fast"])
        .env("PQLAMBERT_SELFCHECK_FAULT", "closed_forms")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn series_verb_lists_coefficients() {
    let o = run(&["series", "--a", "1/2", "--kind", "branch-point", "--terms", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 5);
    let c = column(&h, "coefficient");
    let first: f64 = rows[0][c].parse().unwrap();
    assert!((first - 2f64.sqrt()).abs() < 1e-12);
}

use std::process::{Command, Output};

use hessian_radial_cli::run_from;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hessian-radial"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("hessian-radial").chain(args.iter().copied());
    let code = run_from(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn column(csv: &str, name: &str) -> Vec<Option<f64>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().ok()).collect()
}

#[test]
fn solve_constant_source_matches_closed_form() {
    let out = bin(&[
        "solve", "--n", "2", "--k", "1", "--mu", "0", "--f", "const:1", "--a", "0", "--r-end", "4", "--h", "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("r,phi,dphi,volterra,defect\n"));
    let r = column(&csv, "r");
    let phi = column(&csv, "phi");
    assert_eq!(r.len(), 4001);
    for (r, phi) in r.iter().zip(&phi) {
        let (r, phi) = (r.unwrap(), phi.unwrap());
        assert!((phi - r * r / 4.0).abs() <= 1e-5);
    }
    let defect = column(&csv, "defect");
    assert!(defect[0].is_none());
    assert!(defect[1..].iter().all(Option::is_some));
}

#[test]
fn solve_rejects_inadmissible_regime() {
    let out = bin(&[
        "solve", "--n", "3", "--k", "2", "--mu", "-0.1", "--f", "const:1", "--r-end", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn solve_reports_blowup_bracket() {
    let out = bin(&["solve", "--n", "2", "--k", "1", "--f", "exp:1", "--r-end", "100"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("blow-up") && err.contains("bracket"), "{err}");
}

#[test]
fn solve_output_is_deterministic_and_json_is_versioned() {
    let args = [
        "solve", "--n", "3", "--k", "2", "--mu", "0.3", "--f", "exp:0.5", "--a", "0.1", "--r-end", "1", "--h", "1e-2",
    ];
    let first = bin(&args).stdout;
    let second = bin(&args).stdout;
    assert!(!first.is_empty());
    assert_eq!(first, second);

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json", "--method", "euler"]);
    let out = bin(&json_args);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "hessian-radial/1");
    assert_eq!(v["r"].as_array().unwrap().len(), 101);
}

#[test]
fn solve_writes_to_file_and_reports_io_failures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let p = path.to_str().unwrap();
    let (code, stdout, _) = in_process(&[
        "solve", "--n", "2", "--k", "1", "--f", "const:1", "--r-end", "1", "--h", "0.1", "--out", p,
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 12);

    let bad = dir.path().join("missing").join("profile.csv");
    let (code, _, err) = in_process(&[
        "solve",
        "--n",
        "2",
        "--k",
        "1",
        "--f",
        "const:1",
        "--r-end",
        "1",
        "--h",
        "0.1",
        "--out",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, 10);
    assert!(err.contains("cannot create"));
}

#[test]
fn ko_examples() {
    let (code, out, _) = in_process(&["ko", "--k", "2", "--f", "pow:0.5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["classification"], "diverges");

    let (code, out, _) = in_process(&["ko", "--k", "1", "--f", "exp:1", "--n", "2", "--mu", "0.2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["classification"], "converges");
    assert_eq!(v["existence"]["verdict"], "NOT_EXISTS");
    assert_eq!(v["existence"]["sharp"], true);

    let (code, out, _) = in_process(&["ko", "--k", "1", "--f", "const:1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["classification"], "diverges");
    assert_eq!(v["existence"]["verdict"], "EXISTS");
}

#[test]
fn ko_numeric_boundary_is_inconclusive() {
    let (code, out, _) = in_process(&["ko", "--k", "2", "--f", "pow:1", "--numeric"]);
    assert_eq!(code, 4);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["classification"], "inconclusive");
    assert_eq!(v["existence"]["verdict"], "INCONCLUSIVE");
}

#[test]
fn verify_and_mu0() {
    let (code, out, _) = in_process(&[
        "verify", "--n", "3", "--k", "2", "--mu", "0.1", "--A", "0.2887", "--alpha", "1",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["data"]["all_pass"], true);
    assert_eq!(v["data"]["points"].as_array().unwrap().len(), 512);

    let (code, out, _) = in_process(&["verify", "--n", "3", "--k", "2", "--A", "0.2", "--format", "csv"]);
    assert_eq!(code, 0);
    let second = out.lines().nth(1).unwrap();
    assert!(second.starts_with("0.0000000000000000e0,false,"), "{second}");

    let (code, out, _) = in_process(&["mu0", "--n", "2", "--k", "1"]);
    assert_eq!(code, 0);
    assert!((out.trim().parse::<f64>().unwrap() - 0.353553).abs() < 1e-6);
}

#[test]
fn sweep_rows_are_sorted_and_radii_decrease_in_a() {
    let out = bin(&[
        "sweep", "--n", "2", "--k", "1", "--f", "exp:1", "--a", "0:2:5", "--mu", "0:0.3:4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 21);
    assert_eq!(csv.lines().next().unwrap(), "n,k,mu,f,a,status,r_estimate,r_lo,r_hi");
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r[5] == "finite_blowup"));
    for block in rows.chunks(5) {
        let mu: Vec<&str> = block.iter().map(|r| r[2]).collect();
        assert!(mu.iter().all(|m| *m == mu[0]));
        let a: Vec<f64> = block.iter().map(|r| r[4].parse().unwrap()).collect();
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        let radius: Vec<f64> = block.iter().map(|r| r[6].parse().unwrap()).collect();
        assert!(radius.windows(2).all(|w| w[1] <= w[0]), "{radius:?}");
    }
    let again = bin(&[
        "sweep", "--n", "2", "--k", "1", "--f", "exp:1", "--a", "0:2:5", "--mu", "0:0.3:4",
    ]);
    assert_eq!(csv.as_bytes(), again.stdout.as_slice());
}

#[test]
fn blowup_command_reports_status() {
    let (code, out, _) = in_process(&["blowup", "--n", "2", "--k", "1", "--f", "const:1", "--r-max", "5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["status"], "global");

    let (code, out, _) = in_process(&["blowup", "--n", "3", "--k", "2", "--mu", "-0.25", "--f", "exp:1"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["r_fail"], 4.0);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["solve", "--n", "2", "--k", "1", "--f", "sin:1", "--r-end", "1"],
        vec!["solve", "--n", "2", "--k", "3", "--f", "const:1", "--r-end", "1"],
        vec![
            "solve", "--n", "2", "--k", "1", "--f", "const:1", "--r-end", "1", "--h", "-1",
        ],
        vec!["sweep", "--n", "2", "--k", "1", "--f", "exp:1", "--a", "0:1"],
        vec!["mu0", "--n", "2"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = in_process(&args);
        assert_eq!(code, 64, "{args:?}");
        assert!(!err.is_empty());
    }
    let (code, out, _) = in_process(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("sweep"));
}

use std::process::Command;

use sardquad::cli::{run, OutputRecord, EXIT_DEGENERATE, EXIT_OK, EXIT_USAGE, EXIT_VERIFY};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sardquad").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn weights_closed_m1_json() {
    let (code, out, _) = call(&["weights", "--m", "1", "--N", "10", "--method", "closed", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let r: OutputRecord = serde_json::from_str(&out).unwrap();
    assert_eq!((r.m, r.n), (1, 10));
    assert_eq!(r.method, "closed-form-m1");
    assert_eq!(r.nodes.len(), 11);
    assert_eq!(r.weights.len(), 11);
    assert_eq!(r.constraint_residuals.len(), 1);
    assert!(r.weights[1..10].iter().all(|w| *w == r.weights[1]));
    assert!(r.timings_ms.is_none());
}

#[test]
fn weights_sobolev_verified() {
    let (code, out, _) = call(&["weights", "--m", "3", "--N", "10", "--method", "sobolev", "--verify"]);
    assert_eq!(code, EXIT_OK);
    let r: OutputRecord = serde_json::from_str(&out).unwrap();
    assert_eq!(r.constraint_residuals.len(), 3);
    assert!(r.constraint_residuals.iter().all(|x| x.abs() <= 1e-9));
}

#[test]
fn even_order_is_a_usage_error() {
    let (code, out, err) = call(&["weights", "--m", "2", "--N", "10"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("m must be odd"), "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["weights", "--m", "5", "--N", "10", "--method", "closed"]).0, EXIT_USAGE);
    assert_eq!(call(&["weights", "--m", "3"]).0, EXIT_USAGE);
    assert_eq!(call(&["weights", "--m", "3", "--N", "x"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["weights", "--m", "5", "--N", "3"]).0, EXIT_USAGE);
    assert_eq!(call(&["converge", "--m", "1", "--functions", "tan", "--N", "4"]).0, EXIT_USAGE);
}

#[test]
fn help_and_version_succeed() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("weights"));
    assert_eq!(call(&["--version"]).0, EXIT_OK);
}

#[test]
fn degenerate_step_exit_code() {
    let (code, _, err) = call(&["verify", "--m", "3", "--N", "1"]);
    assert!(code == EXIT_USAGE || code == EXIT_DEGENERATE, "{code}: {err}");
    assert_eq!(EXIT_DEGENERATE, 3);
}

#[test]
fn verify_suites() {
    let (code, out, _) = call(&["verify", "--m", "1", "--N", "5,10"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["tolerance"].is_number() && c["observed"].is_number() && c["name"].is_string());
    }

    let (code, out, _) = call(&["verify", "--m", "3", "--N", "3"]);
    assert_eq!(code, EXIT_OK, "{out}");

    let (code, _, err) = call(&["verify", "--m", "3", "--N", "2"]);
    assert_eq!(code, EXIT_USAGE, "{err}");

    let (code, out, _) = call(&["verify", "--m", "3", "--N", "6", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("m,N,check,tolerance,observed,pass\n"));
    assert_ne!(EXIT_VERIFY, EXIT_OK);
}

#[test]
fn converge_tables() {
    let (code, out, _) = call(&["converge", "--m", "1", "--N", "2,4,8,16"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("N,h,norm_sq,trapezoid_norm_sq"));
    assert!(lines[0].ends_with(",slope"));
    let norms: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(norms.windows(2).all(|w| w[1] < w[0]));

    let (code, out, _) = call(&["converge", "--m", "3", "--N", "4,8,16", "--functions", "exp,runge"]);
    assert_eq!(code, EXIT_OK);
    let header: Vec<&str> = out.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "err_runge").unwrap();
    let errs: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse::<f64>().unwrap().abs()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");

    let (code, _, _) = call(&["converge", "--m", "1", "--N"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn norm_and_probe_commands() {
    let (code, out, _) = call(&["norm", "--m", "3", "--N", "5", "--method", "dense"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let norm = v["norm_sq"].as_f64().unwrap();
    assert!((norm - 1.3369964951509049e-8).abs() <= 1e-20);

    let (code, out, _) = call(&["probe", "--m", "1", "--N", "10", "--trials", "20"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["min_increase"].as_f64().unwrap() > 0.0);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        &["weights", "--m", "5", "--N", "12", "--norm"][..],
        &["probe", "--m", "3", "--N", "10", "--trials", "10", "--seed", "5"],
        &["converge", "--m", "1", "--N", "3,6"],
    ] {
        let a = call(args);
        let b = call(args);
        assert_eq!(a.0, EXIT_OK);
        assert_eq!(a.1, b.1);
    }
}

#[test]
fn json_round_trips() {
    for args in [
        &["weights", "--m", "3", "--N", "7", "--norm", "--method", "dense"][..],
        &["weights", "--m", "1", "--N", "4", "--method", "closed"],
        &["weights", "--m", "7", "--N", "9"],
    ] {
        let (_, out, _) = call(args);
        let r: OutputRecord = serde_json::from_str(&out).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap() + "\n", out);
    }
}

#[test]
fn timings_are_opt_in() {
    let (code, out, _) = call(&["weights", "--m", "3", "--N", "20", "--timings"]);
    assert_eq!(code, EXIT_OK);
    let r: OutputRecord = serde_json::from_str(&out).unwrap();
    assert!(r.timings_ms.unwrap() >= 0.0);
}

#[test]
fn csv_matches_json() {
    let (_, json, _) = call(&["weights", "--m", "3", "--N", "6", "--method", "dense"]);
    let (_, csv, _) = call(&["weights", "--m", "3", "--N", "6", "--method", "dense", "--format", "csv"]);
    let r: OutputRecord = serde_json::from_str(&json).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("weight"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    let body = rows.join("\n");
    for w in &r.weights {
        assert!(body.contains(&serde_json::to_string(w).unwrap()));
    }
}

#[test]
fn config_file_mirrors_flags() {
    let dir = std::env::temp_dir().join(format!("sardquad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "# weights for m=3\nm = 3\nN = 8\nmethod = dense\nnorm = true\nverify = false\n").unwrap();
    let p = path.to_str().unwrap();
    let (code, from_file, _) = call(&["weights", "--config", p]);
    let (_, from_flags, _) = call(&["weights", "--m", "3", "--N", "8", "--method", "dense", "--norm"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(from_file, from_flags);

    let (_, overridden, _) = call(&["--config", p, "weights", "--N", "9"]);
    let r: OutputRecord = serde_json::from_str(&overridden).unwrap();
    assert_eq!(r.n, 9);

    std::fs::write(&path, "m 3\n").unwrap();
    assert_eq!(call(&["weights", "--config", p]).0, EXIT_USAGE);
    assert_eq!(call(&["weights", "--config", "/nonexistent/run.conf"]).0, EXIT_USAGE);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sardquad");
    let ok = Command::new(bin).args(["weights", "--m", "1", "--N", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(serde_json::from_slice::<OutputRecord>(&ok.stdout).is_ok());
    let bad = Command::new(bin).args(["weights", "--m", "2", "--N", "10"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("m must be odd"));
}

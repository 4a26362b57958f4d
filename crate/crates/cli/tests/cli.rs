use std::process::{Command, Output};

use serde_json::Value;

fn grassmann(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grassmann"))
        .args(args.split_whitespace())
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn constants_report() {
    let out = grassmann("constants --n 3 --i 1 --l 1");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["c"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["alpha"].as_f64(), Some(0.0));
    assert_eq!(v["beta"].as_f64(), Some(-0.5));
    assert_eq!(v["m"].as_u64(), Some(1));
    assert_eq!(v["version"].as_str(), Some(env!("CARGO_PKG_VERSION")));
}

#[test]
fn theorem1_passes() {
    let out = grassmann("verify theorem1 --n 4 --l 2 --f0 poly:0,1 --samples 100000");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["lhs"].as_f64().unwrap() - 0.5).abs() < 0.005);
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["elapsed_ms"], Value::Null);
}

#[test]
fn verify_keys_are_stable() {
    let out = grassmann("verify theorem2 --n 5 --i 2 --l 2 --f0 sum --seed 1 --samples 2000");
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = [
        "\"command\"",
        "\"version\"",
        "\"params\"",
        "\"seed\"",
        "\"samples\"",
        "\"quad_order\"",
        "\"convention\"",
        "\"lhs\"",
        "\"rhs\"",
        "\"stderr\"",
        "\"z\"",
        "\"pass\"",
        "\"redraws\"",
        "\"elapsed_ms\"",
    ];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).expect(k)).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["convention"].as_str(), Some("complement-swapped"));
    assert_eq!(v["params"]["f"].as_str(), Some("sum"));
}

#[test]
fn reports_are_byte_reproducible() {
    let args = "verify theorem2 --n 5 --i 2 --l 2 --f0 sum --seed 7 --samples 3000 --threads 3";
    assert_eq!(grassmann(args).stdout, grassmann(args).stdout);
    let other =
        grassmann("verify theorem2 --n 5 --i 2 --l 2 --f0 sum --seed 8 --samples 3000 --threads 3");
    assert_ne!(grassmann(args).stdout, other.stdout);
}

#[test]
fn timing_is_opt_in() {
    let v = json(&grassmann("verify zhang --m 1 --a 2 --b 3 --timing"));
    assert!(v["elapsed_ms"].as_f64().is_some());
    assert!((v["lhs"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn hypothesis_violation_is_usage_error() {
    let out = grassmann("verify theorem2 --n 3 --i 2 --l 2");
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["exit_code"].as_u64(), Some(2));
    assert!(v["error"].as_str().unwrap().contains("i + l <= n"));
}

#[test]
fn bad_flags_are_usage_errors() {
    for args in [
        "constants --n 3 --i 1 --l 1 --bogus 2",
        "constants --n 0 --i 1 --l 1",
        "verify bistiefel --n 5 --m 3 --k 2",
        "verify zhang --m 2 --a 0.2 --b 3",
        "density --n 4 --i 1 --l 2 --threads 0",
    ] {
        let out = grassmann(args);
        assert_eq!(out.status.code(), Some(2), "{args}");
        assert_eq!(json(&out)["exit_code"].as_u64(), Some(2), "{args}");
    }
}

#[test]
fn failing_check_exits_one() {
    // (Pr_xi)_11 is not K_l-invariant
    let out = grassmann("verify invariance --n 5 --i 2 --l 2 --fn e1 --samples 50");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], Value::Bool(false));
    let out = grassmann("verify invariance --n 5 --i 2 --l 2 --fn lift:sum --samples 50");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn density_csv() {
    let out = grassmann("density --n 4 --i 1 --l 2 --bins 50 --samples 100000 --format csv");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 51);
    assert!(lines[0].starts_with("bin,lo,hi,count_1"));
    let total: u64 = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(3).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 100_000);
}

#[test]
fn angles_and_samples() {
    let out = grassmann("angles --n 5 --i 2 --l 3 --samples 4 --format csv");
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("sample,lambda_1,lambda_2,omega_1,omega_2")
    );
    assert_eq!(text.lines().count(), 5);

    let v = json(&grassmann(
        "sample stiefel --n 4 --m 2 --samples 3 --seed 2",
    ));
    let draws = v["draws"].as_array().unwrap();
    assert_eq!(draws.len(), 3);
    let frame: Vec<Vec<f64>> = serde_json::from_value(draws[0].clone()).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            let dot: f64 = frame.iter().map(|row| row[a] * row[b]).sum();
            assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
    let v = json(&grassmann("sample grassmann --n 4 --i 2 --samples 1"));
    let p: Vec<Vec<f64>> = serde_json::from_value(v["draws"][0].clone()).unwrap();
    let trace: f64 = (0..4).map(|k| p[k][k]).sum();
    assert!((trace - 2.0).abs() < 1e-12);
}

#[test]
fn volume_matches_sphere() {
    let v = json(&grassmann("volume --n 3 --m 1"));
    assert!((v["volume"].as_f64().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("grassmann-cli-test-{}.json", std::process::id()));
    let out = grassmann(&format!(
        "constants --n 4 --i 2 --l 2 --output {}",
        path.display()
    ));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert!((v["c"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn bistiefel_named_functions() {
    let v = json(&grassmann(
        "verify bistiefel --n 5 --m 2 --k 2 --fn top-trace --samples 20000 --seed 3",
    ));
    assert_eq!(v["params"]["f"].as_str(), Some("top-trace"));
    assert!((v["lhs"].as_f64().unwrap() - 1.2).abs() < 0.02);
    assert_eq!(v["pass"], Value::Bool(true));
}

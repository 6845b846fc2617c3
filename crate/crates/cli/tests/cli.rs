use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeroset")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn condition_on_circle() {
    let out = run(&["condition", "--field", "x1^2+x2^2-0.25", "--disk", "0,0,1", "--kind", "hypersurface", "--ell", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["delta"].as_f64().unwrap() - 0.25).abs() < 1e-4);
    // oracle: max over the disk of sqrt(f^2 + |grad f|^2) is at r = 1
    let norm = (0.75f64.powi(2) + 4.0).sqrt();
    assert!((v["kappa"].as_f64().unwrap() - norm / 0.25).abs() < 1e-3);
    assert!(v["provenance"]["resolutions"]["grid"].is_number());
}

#[test]
fn constant_field_has_unit_kappa() {
    let v = json(&run(&["condition", "--field", "1", "--disk", "0,0,1"]));
    assert_eq!(v["kappa"].as_f64(), Some(1.0));
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["condition", "--field", "x1", "--disk", "0,0,1", "--kind", "critical", "--ell", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(&["condition", "--field", "x1 +", "--disk", "0,0,1"]).status.code(), Some(1));
    assert_eq!(run(&["condition", "--field", "x1", "--disk", "0,0"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
}

#[test]
fn degenerate_field_exits_two() {
    assert_eq!(run(&["approximate", "--field", "x1^2", "--disk", "0,1"]).status.code(), Some(2));
    let out = run(&["condition", "--field", "x1^2+x2^2", "--disk", "0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["kappa"].is_null());
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = run(&["approximate", "--field", "sin(20*x1)+0.5", "--disk", "0,1", "--dmax", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn approximate_writes_svg_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("z.svg");
    let js = dir.path().join("z.json");
    let out = run(&[
        "approximate", "--field", "x1^2+x2^2-0.25", "--disk", "0,0,1",
        "--svg", svg.to_str().unwrap(), "--json", js.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["certificate"]["degree_used"], 2);
    assert_eq!(v["signatures_equal"], true);
    assert_eq!(std::fs::read(&js).unwrap(), out.stdout);
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<path").count(), 2);
}

#[test]
fn reach_eq_circle_bound() {
    let out = run(&["reach-eq", "--surface", "circle:0,0,1", "--disk", "0,0,3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["kappa1"].as_f64().unwrap() <= 4.0);
}

#[test]
fn family_scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = run(&["family-scan", "--m", "2,4,8", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let slope = json(&out)["slope"].as_f64().unwrap();
    assert!((1.7..=2.5).contains(&slope), "{slope}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("m,count,kappa1,betti\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn globalize_circle_pipeline() {
    let out = run(&["globalize", "--field", "x1^2+x2^2-0.25", "--disk", "0,0,2", "--dmax", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pipeline"]["outside_nonpositive"], 0);
    assert_eq!(v["pipeline"]["signature_equal"], true);
}

#[test]
fn stability_output_is_deterministic() {
    let args = [
        "stability-test", "--field", "x1^2+x2^2-0.25", "--disk", "0,0,1",
        "--trials", "10", "--seed", "5", "--resolution", "0.03125",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["provenance"]["seeds"]["bumps"], 5);
}

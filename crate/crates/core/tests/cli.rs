use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qswitch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qswitch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn close(v: &Value, x: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - x).abs() <= tol
}

#[test]
fn point_at_pole() {
    let o = qswitch(&["point", "--theta", "0", "--phi", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(close(&v["analytic"]["f_p1pa1"], 1.0, 0.0));
    assert!(close(&v["analytic"]["d1"], 0.0, 0.0));
    assert!(close(&v["analytic"]["c_z"], 0.0, 0.0));
}

#[test]
fn point_on_equator() {
    let v = json(&qswitch(&["point", "--theta", "1.5707963", "--phi", "0"]));
    assert!(close(&v["analytic"]["f_p1pa2_on"], 2.0 / 3.0, 1e-6));
    assert!(close(&v["analytic"]["p_on_p1"], 0.375, 1e-6));
}

#[test]
fn point_verify_agrees() {
    let o = qswitch(&["point", "--theta", "1.5707963", "--phi", "3.1415927", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let d = json(&o)["max_abs_discrepancy"].as_f64().unwrap();
    assert!(d <= 1e-10, "{d}");
}

#[test]
fn point_in_degrees_with_input() {
    let o = qswitch(&[
        "point", "--degrees", "--theta", "90", "--phi", "180", "--theta-prime", "30",
        "--phi-prime", "10", "--verify",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(close(&v["theta"], 90.0, 1e-9));
    assert!(close(&v["input"]["theta_prime"], 30.0, 1e-9));
    assert!(close(&v["analytic"]["f_p1pa2_on"], 0.8, 1e-12));
    let n = &v["input"]["numeric"];
    let a = &v["input"]["analytic"];
    assert!(close(&n["f_p2pa2_on"], a["f_p2pa2_on"].as_f64().unwrap(), 1e-10));
}

#[test]
fn point_with_fault_fails_verification() {
    let o = qswitch(&["point", "--theta", "1", "--phi", "1", "--verify", "--perturb", "1e-6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(qswitch(&["point", "--theta", "1"]).status.code(), Some(1));
    assert_eq!(qswitch(&["point", "--theta", "4", "--phi", "0"]).status.code(), Some(1));
    assert_eq!(qswitch(&["point", "--theta", "-0.1", "--phi", "0"]).status.code(), Some(1));
    assert_eq!(qswitch(&["sweep", "--grid", "3"]).status.code(), Some(1));
    assert_eq!(qswitch(&["sweep", "--protocol", "3"]).status.code(), Some(1));
    assert_eq!(qswitch(&["--help"]).status.code(), Some(0));
}

#[test]
fn corner_grid() {
    let o = qswitch(&["sweep", "--grid", "2x2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(
        lines[0],
        "theta,phi,f_p1pa1,f_p1pa2_on,f_p1pa2_off,p_on_p1,d1,d1max,f_p2pa1,f_p2pa2_on,f_p2pa2_off,d2,d2max,c_z,c_x"
    );
    let corners: Vec<(&str, &str)> = lines[1..]
        .iter()
        .map(|l| {
            let mut it = l.split(',');
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(
        corners,
        [
            ("0", "0"),
            ("0", "6.28318530717959"),
            ("3.14159265358979", "0"),
            ("3.14159265358979", "6.28318530717959")
        ]
    );
}

#[test]
fn sweep_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, jobs) in [(&a, "1"), (&b, "3")] {
        let o = qswitch(&["sweep", "--grid", "13x17", "--verify", "--jobs", jobs, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r'));
    let header = String::from_utf8(a).unwrap().lines().next().unwrap().to_string();
    assert!(header.ends_with("c_x_num,c_x_err"));
}

#[test]
fn json_sweep_round_trips() {
    let o = qswitch(&["sweep", "--grid", "4x5", "--format", "json"]);
    let v = json(&o);
    let csv = stdout(&qswitch(&["sweep", "--grid", "4x5"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20);
    for (row, line) in rows.iter().zip(csv.lines().skip(1)) {
        for (x, cell) in row.as_array().unwrap().iter().zip(line.split(',')) {
            assert_eq!(x.as_f64().unwrap(), cell.parse::<f64>().unwrap());
        }
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small run\ngrid = 3x3\nprotocol = 1\noutputs = f_p1pa1, d1, c_z\ndegrees = true\n",
    )
    .unwrap();
    let o = qswitch(&["sweep", "--config", cfg.to_str().unwrap(), "--grid", "2x4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "theta,phi,f_p1pa1,d1,c_z");
    assert_eq!(lines.count(), 8);
    assert!(text.contains("\n180,360,"));

    std::fs::write(&cfg, "grid = 3x3\nunknown_key = 1\n").unwrap();
    assert_eq!(qswitch(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.path().join("missing.cfg");
    assert_eq!(qswitch(&["sweep", "--config", missing.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn outcome_filter() {
    let text = stdout(&qswitch(&["sweep", "--grid", "2x2", "--outcome", "off"]));
    let header = text.lines().next().unwrap();
    assert!(header.contains("f_p1pa2_off") && !header.contains("f_p1pa2_on"));
}

#[test]
fn verify_passes_on_small_grid() {
    let o = qswitch(&["verify", "--grid", "19x37"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["passed"], Value::Bool(true));
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["status"], "pass", "{c}");
        assert!(c["max_abs"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn verify_detects_injected_fault() {
    let o = qswitch(&["verify", "--grid", "7x7", "--perturb", "1e-6"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["passed"], Value::Bool(false));
}

#[test]
fn verify_protocol_filter_skips() {
    let o = qswitch(&["verify", "--grid", "5x5", "--protocol", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let checks = v["checks"].as_array().unwrap();
    for c in checks {
        let name = c["name"].as_str().unwrap();
        let p2 = name.contains("p2") || name.contains("d2");
        assert_eq!(c["status"] == "skipped", p2, "{name}");
    }
}

#[test]
fn figures_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("figs");
    let o = qswitch(&["figures", "--grid", "37x73", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["fig1", "fig2a", "fig2b", "fig3", "fig4", "fig5a", "fig5b"] {
        assert!(Path::new(&out.join(format!("{name}.csv"))).exists(), "{name}");
    }
    let col = |file: &str| -> Vec<f64> {
        std::fs::read_to_string(out.join(file))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect()
    };
    assert!(col("fig5a.csv").iter().all(|&v| v >= -1e-12));
    assert!(col("fig5b.csv").iter().all(|&v| v >= -1e-12));
    let f2b = col("fig2b.csv");
    assert!(f2b.iter().any(|&v| v > 0.0) && f2b.iter().any(|&v| v < 0.0));
    let summary = json(&o);
    let fig4 = summary["signs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["figure"] == "fig4")
        .unwrap();
    let frac = fig4["negative_fraction"].as_f64().unwrap();
    assert!(frac > 0.0 && frac < 0.05, "{frac}");
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("no/such/dir/out.csv");
    assert_eq!(
        qswitch(&["sweep", "--grid", "2x2", "--out", bad.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

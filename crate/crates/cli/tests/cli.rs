use std::path::Path;
use std::process::{Command, Output};

use g2flow_cli::Summary;
use serde_json::Value;

fn g2flow(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2flow"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> (String, Summary) {
    let text = std::fs::read_to_string(dir.join("summary.json")).unwrap();
    let s = serde_json::from_str(&text).unwrap();
    (text, s)
}

#[test]
fn reduce_prints_the_raw_parameter_system() {
    let tmp = tempfile::tempdir().unwrap();
    let out = g2flow(&["reduce"], tmp.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["d(f)"], "3/2 * f^3 * h^-4");
    assert_eq!(v["d(h)"], "-5/2 * f^2 * h^-3");

    std::fs::write(
        tmp.path().join("h.json"),
        r#"{"frame": "heisenberg7", "flow": "rl2", "family": {"heisenberg": {"f0": 1, "a0": 1, "b0": 1, "c0": 1}}}"#,
    )
    .unwrap();
    let out = g2flow(&["reduce", "h.json"], tmp.path());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["d(f)", "d(a)", "d(b)", "d(c)"]);
}

#[test]
fn rhf_run_detects_a_type_one_singularity() {
    let tmp = tempfile::tempdir().unwrap();
    let out = g2flow(&["run", "--out", "rhf"], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("rhf");
    let (text, s) = summary(&dir);
    assert_eq!(s.singularity_type.as_deref(), Some("I"));
    assert!((s.tau_est.unwrap() - 1.0 / 13.0).abs() < 1e-6);
    assert!(s.closed_form.unwrap().max_rel_error.unwrap() < 1e-7);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["singularity_type"], "I");

    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,f,h,volfactor,normT2,trT,lambda,eh_density"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), s.accepted_steps + 1);
    for r in rows {
        let vals: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(vals.len(), 8);
    }
}

#[test]
fn rl1_type_depends_on_the_transversal_bound() {
    let tmp = tempfile::tempdir().unwrap();
    for (k, want) in [("0", "III"), ("1", "IIb")] {
        let dir = format!("rl1_{k}");
        let out = g2flow(
            &["run", "--flow", "rl1", "--K", k, "--out", &dir],
            tmp.path(),
        );
        assert!(out.status.success());
        let (_, s) = summary(&tmp.path().join(&dir));
        assert_eq!(s.singularity_type.as_deref(), Some(want), "K = {k}");
        assert!(s.tau_est.is_none());
    }
}

#[test]
fn summary_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    for flow in ["rhf", "ngf"] {
        g2flow(&["run", "--flow", flow, "--out", flow], tmp.path());
        let (text, s) = summary(&tmp.path().join(flow));
        let again = serde_json::to_string_pretty(&s).unwrap() + "\n";
        assert_eq!(text, again);
        let reparsed: Summary = serde_json::from_str(&again).unwrap();
        assert_eq!(reparsed, s);
    }
}

#[test]
fn config_file_and_overrides_combine() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("c.json"),
        r#"{"flow": "rl1", "t_span": [0, 50], "output_dir": "fromfile"}"#,
    )
    .unwrap();
    let out = g2flow(
        &[
            "run", "c.json", "--a", "2", "--t1", "-0.001", "--rtol", "1e-9",
        ],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, s) = summary(&tmp.path().join("fromfile"));
    assert_eq!(s.config.t_span, (0.0, -0.001));
    assert_eq!(s.config.rtol, 1e-9);
    assert_eq!(s.final_state.len(), 2);
    assert!((s.final_time + 0.001).abs() < 1e-15);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    std::fs::write(p.join("bad.json"), r#"{"flwo": "rhf"}"#).unwrap();
    std::fs::write(p.join("file"), "").unwrap();
    assert_eq!(g2flow(&["run", "bad.json"], p).status.code(), Some(2));
    assert_eq!(g2flow(&["run", "--a", "-1"], p).status.code(), Some(2));
    assert_eq!(g2flow(&["reduce", "--K", "-3"], p).status.code(), Some(2));
    assert_eq!(g2flow(&["run", "missing.json"], p).status.code(), Some(3));
    assert_eq!(
        g2flow(&["run", "--out", "file/sub"], p).status.code(),
        Some(3)
    );
    assert_eq!(
        g2flow(&["verify", "--frame", "abelian7"], p).status.code(),
        Some(0)
    );
}

#[test]
fn verify_lists_discrepancies_but_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = g2flow(&["verify"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ccy.rhf.velocity"));
    assert!(text
        .lines()
        .any(|l| l.contains("heisenberg.rl1.ode") && l.contains("DISCREPANCY")));
    assert!(text.contains("0 FAIL"));
}

#[test]
fn report_writes_the_ledger() {
    let tmp = tempfile::tempdir().unwrap();
    let out = g2flow(&["report", "--out", "r"], tmp.path());
    assert!(out.status.success());
    let md = std::fs::read_to_string(tmp.path().join("r/report.md")).unwrap();
    for id in [
        "69/4",
        "heisenberg.rl1.ode",
        "heisenberg.ngf.ode",
        "ccy.ngf.velocity",
    ] {
        assert!(md.contains(id), "{id}");
    }
}

#[test]
fn sweep_runs_each_point_into_its_own_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = g2flow(&["sweep", "--points", "0.5;1;2", "--out", "sw"], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for (i, a) in [0.5f64, 1.0, 2.0].iter().enumerate() {
        let (_, s) = summary(&tmp.path().join(format!("sw/point_{i:03}")));
        assert!((s.tau_est.unwrap() - 1.0 / (13.0 * a * a)).abs() < 1e-6);
    }
    let index = std::fs::read_to_string(tmp.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(index.lines().count(), 4);

    let bad = g2flow(&["sweep", "--points", "1,2", "--out", "sw2"], tmp.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let c = g2flow_cli::ExperimentConfig::load(&path).unwrap();
        c.validate().unwrap();
        n += 1;
    }
    assert!(n >= 3);
}

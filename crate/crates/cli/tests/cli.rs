use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hsflow(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hsflow"));
    cmd.args(args).env_remove("OUTPUT_DIR");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn weak_config(out: &Path) -> String {
    format!(
        r#"{{"solver": "weak", "initial": {{"kind": "empty"}}, "h": 0.015625, "box": 1.0,
            "times": [0.1, 0.2, 0.3, 0.4, 0.5], "output_dir": "{}"}}"#,
        out.display()
    )
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn weak_run_from_empty_start() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &weak_config(&out));
    let o = hsflow(&["run", &cfg], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let frames: Vec<_> = fs::read_dir(out.join("frames")).unwrap().collect();
    assert_eq!(frames.len(), 5);
    let csv = fs::read_to_string(out.join("moments.csv")).unwrap();
    assert!(csv.starts_with("t,k,re,im\n"));
    assert_eq!(csv.lines().count(), 1 + 5 * 5);
    let last = read_json(&out.join("frames/frame_0004.json"));
    assert_eq!(last["t"], 0.5);
    assert_eq!(last["markers"].as_array().unwrap().len(), 256);
    let report = read_json(&out.join("drift.json"));
    let area = report["frames"][4]["area"].as_f64().unwrap();
    assert!((area - 0.5).abs() < 0.01);
    assert!(fs::read_to_string(out.join("boundaries.svg")).unwrap().contains("<svg"));
    assert!(fs::read_to_string(out.join("grid.csv")).unwrap().starts_with("x,y,u,theta\n"));
}

#[test]
fn classical_run_of_a_disc() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        &format!(
            r#"{{"solver": "classical", "initial": {{"kind": "disc", "radius": 0.5}}, "markers": 256,
                "dt": 0.001, "times": [0, 0.1, 0.3], "output_dir": "{}"}}"#,
            out.display()
        ),
    );
    let o = hsflow(&["run", &cfg], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = read_json(&out.join("drift.json"));
    let r = report["frames"][2]["mean_radius"].as_f64().unwrap();
    let exact = (0.25f64 + 0.3 / std::f64::consts::PI).sqrt();
    assert!((r - exact).abs() <= 0.01 * exact, "{r}");
    assert!((exact - 0.5879).abs() < 2e-4);
    assert!(report["max_flux_error"].as_f64().unwrap() < 1e-3);
    assert!(stdout(&o).contains("final t = 0.3"));
}

#[test]
fn malformed_config_exits_2_naming_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"solver": "weak", "initial": {"kind": "empty"}, "times": [0.1], "kappa": "fast"}"#,
    );
    let o = hsflow(&["run", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`kappa`"), "{}", stderr(&o));

    let cfg = write_config(
        tmp.path(),
        r#"{"solver": "weak", "initial": {"kind": "curve", "path": "missing.json"}, "times": [0.1]}"#,
    );
    let o = hsflow(&["run", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`initial.path`"), "{}", stderr(&o));
}

#[test]
fn solver_errors_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!(
            r#"{{"solver": "weak", "initial": {{"kind": "empty"}}, "h": 0.015625, "box": 0.5,
                "times": [0.5], "output_dir": "{}"}}"#,
            tmp.path().join("out").display()
        ),
    );
    let o = hsflow(&["run", &cfg], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("box too small"), "{}", stderr(&o));
}

#[test]
fn output_dir_environment_override() {
    let tmp = tempfile::tempdir().unwrap();
    let configured = tmp.path().join("configured");
    let overridden = tmp.path().join("overridden");
    let cfg = write_config(tmp.path(), &weak_config(&configured));
    let o = hsflow(&["run", &cfg], &[("OUTPUT_DIR", &overridden)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(overridden.join("moments.csv").is_file());
    assert!(!configured.exists());
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(files(&p));
        } else {
            out.push((p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &weak_config(Path::new("unused")));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(hsflow(&["run", &cfg], &[("OUTPUT_DIR", &a)]).status.success());
    assert!(hsflow(&["run", &cfg], &[("OUTPUT_DIR", &b)]).status.success());
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa.len(), 9);
    assert_eq!(fa, fb);
}

#[test]
fn verify_reports_per_criterion() {
    let o = hsflow(&["verify", "quadrature"], &[]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("criterion 5 [PASS]"));
    let o = hsflow(&["verify", "momentflow", "--seed", "7"], &[]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let o = hsflow(&["verify", "everything"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("everything"));
}

#[test]
fn schwarz_of_unit_circle() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("circle.json");
    let markers: Vec<[f64; 2]> = (0..128)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 128.0;
            [t.cos(), t.sin()]
        })
        .collect();
    fs::write(&path, serde_json::json!({ "markers": markers }).to_string()).unwrap();
    let o = hsflow(&["schwarz", path.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["a"][0].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert_eq!(v["curve"].as_array().unwrap().len(), 128);
    assert_eq!(v["g"].as_array().unwrap().len(), 128);
    let data: hsflow::emit::SchwarzJson = serde_json::from_value(v).unwrap();
    let sd = data.to_data().unwrap();
    let z = hsflow_core::Complex::new(0.3, 0.1);
    assert!((sd.eval(z).unwrap() - z.inv()).norm() < 1e-10);
}

#[test]
fn quadcheck_on_polynomial_map_and_files() {
    let o = hsflow(&["quadcheck", "--poly-map", "1", "0.3"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let last = stdout(&o).lines().last().unwrap().to_string();
    let residual: f64 = last.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(residual < 1e-6, "{last}");

    let tmp = tempfile::tempdir().unwrap();
    let curve = tmp.path().join("disc.json");
    let markers: Vec<[f64; 2]> = (0..256)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
            [0.5 * t.cos(), 0.5 * t.sin()]
        })
        .collect();
    fs::write(&curve, serde_json::json!({ "markers": markers }).to_string()).unwrap();
    let quad = tmp.path().join("quad.json");
    let c = 0.25 * std::f64::consts::PI;
    fs::write(&quad, format!(r#"{{"nodes": [[0, 0]], "mult": [1], "coeffs": [[[{c}, 0]]]}}"#)).unwrap();
    let o = hsflow(&["quadcheck", "--curve", curve.to_str().unwrap(), "--quad", quad.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("max residual"));

    let o = hsflow(&["quadcheck", "--poly-map", "1", "0.6"], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn momentflow_of_cosine_field() {
    let o = hsflow(&["momentflow", "--field", "cos:1", "--kmax", "3"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["direct"][1][0].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-9);
    assert!(v["max_difference"].as_f64().unwrap() < 1e-9);
    let o = hsflow(&["momentflow", "--field", "tan:1"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn regmax_values_and_gluing() {
    let o = hsflow(&["regmax", "--alpha", "1", "--beta", "0", "--a", "0.1"], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1");
    let o = hsflow(&["regmax", "--glue", "--eps", "0.1"], &[]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_pass"], true);
}

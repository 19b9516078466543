use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CANONICAL: &str = r#"
tag = "canonical"
alpha = 0.75
L = 20.0
N = 1024

[nonlinearity]
kind = "power"
p = 3.0
p0 = 3.5

[potential]
expr = "1"
V0 = 1.0
Vinf = 1.0
flags = { radial_increasing = true }
"#;

fn lwnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lwnls")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    lwnls(&args)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn canonical_ground_state_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", CANONICAL);
    let out = dir.path().join("out");
    let o = run("ground-state", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let report = json(&out.join("canonical_0.75_1024.json"));
    assert_eq!(report["converged"], true);
    assert!(report["residual"].as_f64().unwrap() <= 1e-6);
    let c = report["c"].as_f64().unwrap();
    assert!((c - 1.3525376853).abs() < 1e-8, "{c}");
    assert_eq!(report["c"], report["c_infinity"]);
    assert!(report["refinement_drift"].is_null());

    let text = fs::read_to_string(out.join("canonical_0.75_1024.json")).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('"').and_then(|l| l.split('"').next()))
        .collect();
    assert_eq!(&keys[..6], ["tag", "alpha", "L", "N", "seed", "c"]);

    let profile = fs::read_to_string(out.join("canonical_0.75_1024.csv")).unwrap();
    let mut lines = profile.lines();
    assert_eq!(lines.next(), Some("x,u,u_star"));
    assert_eq!(lines.count(), 1024);

    let manifest = json(&out.join("canonical_0.75_1024.manifest.json"));
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["seed"], 0);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn ground_state_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &CANONICAL.replace("N = 1024", "N = 256"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("ground-state", &cfg, &a, &["--seed", "7"]).status.code(), Some(0));
    assert_eq!(run("ground-state", &cfg, &b, &["--seed", "7"]).status.code(), Some(0));
    for f in ["canonical_0.75_256.json", "canonical_0.75_256.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let m = json(&a.join("canonical_0.75_256.manifest.json"));
    assert_eq!(m["seed"], 7);
}

#[test]
fn invalid_nonlinearity_exits_one_naming_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &CANONICAL.replace("p = 3.0", "p = 1.0"));
    let o = run("ground-state", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(f1)"));
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "alpha = ");
    assert_eq!(
        run("ground-state", &cfg, &dir.path().join("out"), &[]).status.code(),
        Some(1)
    );
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        run("ground-state", &missing, &dir.path().join("out"), &[])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn forced_non_convergence_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{CANONICAL}\n[solver]\nmax_iters = 1\n");
    let cfg = write_config(dir.path(), "one.toml", &text);
    let out = dir.path().join("out");
    let o = run("ground-state", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let report = json(&out.join("canonical_0.75_1024.json"));
    assert_eq!(report["converged"], false);
    assert_eq!(report["iterations"], 1);
}

#[test]
fn refine_reports_drifts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &CANONICAL.replace("N = 1024", "N = 512"));
    let out = dir.path().join("out");
    assert_eq!(run("ground-state", &cfg, &out, &["--refine"]).status.code(), Some(0));
    let r = json(&out.join("canonical_0.75_512.json"));
    let dn = r["drift_2n"].as_f64().unwrap();
    let dl = r["drift_2l"].as_f64().unwrap();
    assert!(dn < 1e-8, "{dn}");
    // the algebraic tail makes the box size the dominant error
    assert!(dl > dn);
    assert_eq!(r["refinement_drift"].as_f64().unwrap(), dl);
}

fn sweep_config(parameter: &str, values: &str) -> String {
    format!("{CANONICAL}\n[sweep]\nparameter = \"{parameter}\"\nvalues = {values}\n")
}

fn sweep_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn epsilon_sweep_is_monotone_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", &sweep_config("epsilon", "[0.4, 0.2, 0.1, 0.05]"));
    let out = dir.path().join("out");
    let o = run("sweep", &cfg, &out, &["--jobs", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("canonical_0.75_1024_sweep_epsilon.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "value,c,c_inf,residual,symmetry_defect,truncation_err,refinement_drift,status"
    );
    let rows = sweep_rows(&csv);
    let values: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(values, [0.4, 0.2, 0.1, 0.05]);
    let c: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(c.windows(2).all(|w| w[0] > w[1]), "{c:?}");
    assert!(rows.iter().all(|r| r[6] == "nan" && r[7] == "converged"));
}

#[test]
fn single_value_sweep_matches_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", &sweep_config("alpha", "[0.75]"));
    let out = dir.path().join("out");
    assert_eq!(run("sweep", &cfg, &out, &[]).status.code(), Some(0));
    assert_eq!(run("ground-state", &cfg, &out, &[]).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("canonical_0.75_1024_sweep_alpha.csv")).unwrap();
    let c_sweep: f64 = sweep_rows(&csv)[0][1].parse().unwrap();
    let c_gs = json(&out.join("canonical_0.75_1024.json"))["c"].as_f64().unwrap();
    assert_eq!(c_sweep, c_gs);
}

#[test]
fn sweep_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(dir.path(), "e.toml", &sweep_config("alpha", "[]"));
    assert_eq!(run("sweep", &empty, &dir.path().join("o"), &[]).status.code(), Some(1));
    let none = write_config(dir.path(), "n.toml", CANONICAL);
    assert_eq!(run("sweep", &none, &dir.path().join("o"), &[]).status.code(), Some(1));

    // an invalid point is marked in its row while the others still run
    let bad = write_config(dir.path(), "b.toml", &sweep_config("alpha", "[0.75, 0.3]"));
    let out = dir.path().join("bad");
    assert_eq!(run("sweep", &bad, &out, &[]).status.code(), Some(1));
    let rows = sweep_rows(&fs::read_to_string(out.join("canonical_0.75_1024_sweep_alpha.csv")).unwrap());
    assert_eq!(rows[0][7], "converged");
    assert!(rows[1][7].starts_with("error"));
}

#[test]
fn verify_suites() {
    for suite in ["spectral", "spaces", "nehari", "rearrange"] {
        let o = lwnls(&["verify", suite]);
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert_eq!(o.status.code(), Some(0), "{suite}: {stdout}");
        assert!(!stdout.contains("FAIL"));
    }
    assert_eq!(lwnls(&["verify", "foo"]).status.code(), Some(1));
}

#[test]
fn verify_theorems() {
    let o = lwnls(&["verify", "theorems"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn rearrange_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let n = 64;
    let l = 4.0;
    let dx = 2.0 * l / n as f64;
    let mut csv = String::from("x,u\n");
    for j in 0..n {
        let x = -l + j as f64 * dx;
        let u = if (1.0..3.0).contains(&x) { 1.0 } else { 0.0 };
        csv.push_str(&format!("{x},{u}\n"));
    }
    let input = write_config(dir.path(), "step.csv", &csv);
    let out = dir.path().join("out");
    let o = lwnls(&[
        "rearrange",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("step.rearranged.csv")).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let expected = if (-1.0..1.0).contains(&cols[0]) { 1.0 } else { 0.0 };
        assert_eq!(cols[2], expected, "x = {}", cols[0]);
    }

    let skewed = write_config(dir.path(), "skew.csv", "x,u\n0,1\n0.5,1\n2,1\n3,1\n");
    let o = lwnls(&[
        "rearrange",
        "--input",
        skewed.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

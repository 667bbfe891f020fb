use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cavcool"));
    c.env_remove("CAVCOOL_THREADS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn keys(v: &Value, out: &mut Vec<String>) {
    if let Value::Object(m) = v {
        for (k, x) in m {
            out.push(k.clone());
            keys(x, out);
        }
    }
}

const SHORT_DYNAMICS: &str = r#"
schema_version = 1
[dynamics]
n_particles = 20
omega_p_over_threshold = 2.0
duration_s = 1.0e-6
sample_interval_s = 5.0e-8
seed = 11
"#;

#[test]
fn dynamics_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "d.toml", SHORT_DYNAMICS);
    let a = stdout(&run(&["dynamics", "--config", &cfg]));
    let b = stdout(&run(&["dynamics", "--config", &cfg]));
    assert_eq!(a, b);
    assert!(a.starts_with("t_s,order_param,checkerboard,alpha_sq,output_per_s,mean_ke_j,ke_z_j,shelved_fraction\n"));
    assert!(!a.contains('\r'));
    assert!(a.lines().count() > 10);

    let out = dir.path().join("scan.csv");
    let args = [
        "dynamics",
        "--config",
        &cfg,
        "--scan",
        "omega_p_over_threshold=0.5:2:2",
        "--seeds",
        "2",
        "--out",
        out.to_str().unwrap(),
    ];
    let threaded = bin().args(args).env("CAVCOOL_THREADS", "2").output().unwrap();
    assert!(threaded.status.success());
    let first = std::fs::read(&out).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, std::fs::read(&out).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("omega_p_hz,p_localize,mean_output_per_s,n_seeds\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn report_json_is_stable_and_in_hz() {
    let cfg = configs().join("oh_confocal_2cm.toml");
    let cfg = cfg.to_str().unwrap();
    let a = stdout(&run(&["report", "--cavity", cfg, "--json"]));
    assert_eq!(a, stdout(&run(&["report", "--cavity", cfg, "--json"])));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v["units"].is_object() && v["provenance"].is_object());
    let d = &v["data"];
    let kappa = d["cavity"]["kappa_hz"].as_f64().unwrap();
    assert!((kappa / 7.5e5 - 1.0).abs() < 0.01);
    for section in ["confocal", "photon_budget", "rates", "steady_state", "temperatures"] {
        assert!(d[section].is_object(), "missing {section}");
    }
    let mut all = Vec::new();
    keys(d, &mut all);
    for bare in ["kappa", "g0", "gamma", "omega_rec", "capture_range"] {
        assert!(!all.iter().any(|k| k == bare), "unsuffixed frequency key {bare}");
    }
    assert!(all.iter().filter(|k| k.ends_with("_hz")).count() >= 8);

    let text = stdout(&run(&["report", "--cavity", cfg]));
    assert!(text.contains("cavity.kappa_hz = "));
}

#[test]
fn unknown_key_is_a_config_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "bad.toml",
        "schema_version = 1\n[cavity]\nkind = \"confocal\"\nlength_m = 0.02\nfinesse = 5000.0\nmirror_tilt = 1.0\n",
    );
    let o = run(&["report", "--cavity", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mirror_tilt"));
    assert!(o.stdout.is_empty());
}

#[test]
fn wrong_schema_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "v2.toml", "schema_version = 2\n");
    let o = run(&["threshold", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema_version"));
}

#[test]
fn missing_section_and_bad_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "empty.toml", "schema_version = 1\n");
    let o = run(&["threshold", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[threshold]"));

    let cfg = write_config(
        &dir,
        "neg.toml",
        "schema_version = 1\n[cavity]\nkind = \"confocal\"\nlength_m = -0.02\nfinesse = 5000.0\n",
    );
    assert_eq!(run(&["report", "--cavity", &cfg]).status.code(), Some(2));

    let o = bin().args(["oh"]).env("CAVCOOL_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "cut.toml",
        "schema_version = 1\n[drive]\nkappa_hz = 1e6\ng_hz = 2e6\ngamma_perp_hz = 1e6\n\
         delta_pa_hz = -2e7\nomega_p_hz = 6e7\ndelta_pc_hz = 0.0\n[oracle]\nfock_cutoff = 2\n",
    );
    let o = run(&["oracle", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cutoff"));
}

#[test]
fn oracle_table_agrees_at_weak_drive() {
    let cfg = configs().join("oracle_dispersive.toml");
    let out = stdout(&run(&["oracle", "--config", cfg.to_str().unwrap()]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("quantity,semiclassical,oracle,relative_difference"));
    let rows: Vec<(String, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 7);
    for (name, diff) in rows {
        assert!(diff < 0.05, "{name}: {diff}");
    }
}

#[test]
fn tabular_commands() {
    let sweep = stdout(&run(&["sweep", "--f-grid", "1000:5000:3", "--r-grid", "0.02:0.1:2"]));
    assert!(sweep.starts_with("F,R_m,kappa_hz,g0_hz,"));
    assert_eq!(sweep.lines().count(), 7);

    let cm = configs().join("oh_single_mode_2cm.toml");
    let map = stdout(&run(&["coolmap", "--config", cm.to_str().unwrap()]));
    assert!(map.starts_with("delta_pa_hz,cooperativity,ratio\n"));
    assert_eq!(map.lines().count(), 1 + 40 * 60);

    let th = configs().join("oh_confocal_2cm.toml");
    let v: Value = serde_json::from_str(&stdout(&run(&["threshold", "--config", th.to_str().unwrap()]))).unwrap();
    let n2 = v["data"]["n0_x2"].as_f64().unwrap();
    assert!((n2 / 8.5e3 - 1.0).abs() < 0.1);

    let oh = stdout(&run(&["oh"]));
    assert_eq!(oh.lines().count(), 4);
    assert!(oh.contains("P1(1),308.256"));
    let v: Value = serde_json::from_str(&stdout(&run(&["oh", "--json"]))).unwrap();
    assert_eq!(v["data"]["electronic"].as_array().unwrap().len(), 3);

    let tr = stdout(&run(&["transit", "--v-grid", "10:400:5"]));
    let second = tr.lines().nth(1).unwrap();
    assert!(second.starts_with("1e1,"));
    let t_axial: f64 = second.split(',').nth(3).unwrap().parse().unwrap();
    assert!((t_axial - 6.6e-3).abs() < 1e-12);

    let z: Value = serde_json::from_str(&stdout(&run(&["zones"]))).unwrap();
    assert_eq!(z["data"]["zones"].as_array().unwrap().len(), 4);
    assert!(z["data"]["warning"].as_str().unwrap().contains("illustrative"));
}

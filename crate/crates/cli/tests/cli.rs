use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_unsflow");

fn unsflow(args: &[&str], out: &Path) -> Output {
    Command::new(BIN).args(args).arg("--out").arg(out).env_remove("UNSFLOW_OUT").output().unwrap()
}

fn config(dir: &Path, body: &str) -> String {
    let path = dir.join("cfg.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = "[grid]\nnx = 12\nny = 12\n\n[physics]\nnu = 0.1\n\n[time]\ndt = 0.02\nt_end = 0.2\n";

#[test]
fn run_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let oa = unsflow(&["run", "--config", &cfg, "--seed", "4"], &a);
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stderr));
    let ob = unsflow(&["run", "--config", &cfg, "--seed", "4"], &b);
    assert!(ob.status.success());
    for f in ["diagnostics.csv", "velocity.csv", "pressure.csv", "fields.csv", "fields.vtk", "aggregates.csv", "metadata.toml"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let diag = std::fs::read_to_string(a.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().count(), 12);
    let meta = std::fs::read_to_string(a.join("metadata.toml")).unwrap();
    for key in ["version", "topology = \"channel\"", "corners = \"none\"", "solver_tol", "seed = 4"] {
        assert!(meta.contains(key), "{key}");
    }
    assert!(String::from_utf8_lossy(&oa.stdout).contains("status = \"completed\""));
}

#[test]
fn box_runs_flag_the_corners() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let o = unsflow(&["run", "--config", &cfg, "--set", "grid.topology=box"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = std::fs::read_to_string(out.join("metadata.toml")).unwrap();
    assert!(meta.contains("corners = \"smooth boundary assumption violated\""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let bad = unsflow(&["run", "--config", &cfg, "--set", "time.dt=-1"], &out);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("dt must be positive"));
    assert_eq!(unsflow(&["run", "--config", "/nonexistent/cfg.toml"], &out).status.code(), Some(1));
    assert_eq!(unsflow(&["run", "--frobnicate"], &out).status.code(), Some(1));
    let blowup = unsflow(
        &[
            "run",
            "--config",
            &cfg,
            "--set",
            "experiment.initial=random",
            "--set",
            "experiment.amplitude=1e11",
            "--set",
            "physics.nu=1e-6",
            "--set",
            "time.dt=0.5",
            "--set",
            "time.t_end=5.0",
        ],
        &out,
    );
    assert_eq!(blowup.status.code(), Some(2), "{}", String::from_utf8_lossy(&blowup.stderr));
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("from_env");
    let o = Command::new(BIN)
        .args(["project", "--config", &cfg, "--set", "experiment.samples=3"])
        .env("UNSFLOW_OUT", &out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("projection.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn analysis_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("beta");
    let o = unsflow(&["beta", "--config", &cfg], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(out.join("beta.csv")).unwrap().lines().count(), 7);
    assert!(String::from_utf8_lossy(&o.stdout).contains("beta_emp"));

    let out = dir.path().join("spectrum");
    let o = unsflow(&["spectrum", "--config", &cfg], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(out.join("spectrum.csv")).unwrap().lines().count(), 1 + 12 * 12 + 12 * 11);

    let out = dir.path().join("decay");
    let o =
        unsflow(&["decay", "--config", &cfg, "--set", "experiment.initial=cosine_divergence", "--set", "time.t_end=1.0"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let decay = std::fs::read_to_string(out.join("decay.csv")).unwrap();
    assert!(decay.starts_with("quantity,rate,expected,relative_error\ndiv_defect,"));

    let out = dir.path().join("mms");
    let o = unsflow(
        &[
            "mms",
            "--config",
            &cfg,
            "--set",
            "experiment.resolutions=[8, 16]",
            "--set",
            "experiment.spatial_t_end=2.0",
            "--set",
            "experiment.temporal_n=8",
            "--set",
            "experiment.dts=[0.04, 0.02, 0.01]",
        ],
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(out.join("mms.csv")).unwrap().lines().count(), 1 + 2 + 2);
}

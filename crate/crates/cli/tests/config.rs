use unsflow_cli::config::{ForcingKind, InitialKind, Requirements};
use unsflow_cli::{parse_config, to_toml, CliError};

const MINIMAL: &str = "[grid]\nnx = 16\nny = 12\n\n[physics]\nnu = 0.1\n\n[time]\ndt = 0.01\nt_end = 0.5\n";

fn full() -> Requirements {
    Requirements { nu: true, time: true }
}

#[test]
fn minimal_config_gets_defaults() {
    let cfg = parse_config(MINIMAL, &[]).unwrap();
    cfg.validate(full()).unwrap();
    assert_eq!(cfg.grid.topology, "channel");
    assert_eq!((cfg.grid.lx, cfg.grid.ly), (1.0, 1.0));
    assert!(cfg.physics.advection);
    assert_eq!(cfg.forcing.kind, ForcingKind::None);
    assert_eq!(cfg.experiment.initial, InitialKind::Manufactured);
    assert_eq!(cfg.experiment.solver_tol, 1e-10);
    let run = cfg.run_config().unwrap();
    assert_eq!(run.steps(), 50);
    assert_eq!(run.grid.nx(), 16);
}

#[test]
fn negative_step_names_the_invariant() {
    let cfg = parse_config(MINIMAL, &["time.dt=-1".into()]).unwrap();
    match cfg.validate(full()) {
        Err(CliError::Validation(m)) => assert_eq!(m, "dt must be positive"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_keys_are_reported_per_command() {
    let cfg = parse_config("[grid]\nnx = 8\nny = 8\n", &[]).unwrap();
    cfg.validate(Requirements { nu: false, time: false }).unwrap();
    assert!(matches!(cfg.validate(full()), Err(CliError::Validation(m)) if m.contains("physics.nu")));
    assert!(matches!(parse_config("[physics]\nnu = 1.0\n", &[]), Err(CliError::Parse(m)) if m.contains("grid")));
}

#[test]
fn unknown_keys_and_bad_syntax_are_rejected_with_location() {
    let err = parse_config(&format!("{MINIMAL}\n[forcing]\nstrength = 2.0\n"), &[]).unwrap_err();
    assert!(matches!(&err, CliError::Parse(m) if m.contains("strength") && m.contains("line 13")), "{err}");
    let err = parse_config("[grid\nnx = 3\n", &[]).unwrap_err();
    assert!(matches!(&err, CliError::Parse(m) if m.contains("line 1")), "{err}");
    let err = parse_config(MINIMAL, &["physics.viscosity=1".into()]).unwrap_err();
    assert!(matches!(&err, CliError::Parse(m) if m.contains("viscosity")), "{err}");
    assert!(parse_config(MINIMAL, &["nu=1".into()]).is_err());
    assert!(parse_config(MINIMAL, &["physics.nu".into()]).is_err());
}

#[test]
fn overrides_beat_file_values_and_round_trip() {
    let overrides = vec![
        "physics.nu=0.25".to_string(),
        "grid.topology=box".to_string(),
        "experiment.c_values=[0.0, 5.0]".to_string(),
        "forcing.kind=manufactured".to_string(),
    ];
    let cfg = parse_config(MINIMAL, &overrides).unwrap();
    assert_eq!(cfg.physics.nu, Some(0.25));
    assert_eq!(cfg.grid.topology, "box");
    assert_eq!(cfg.experiment.c_values, vec![0.0, 5.0]);
    assert_eq!(cfg.forcing.kind, ForcingKind::Manufactured);
    let text = to_toml(&cfg).unwrap();
    let again = parse_config(&text, &[]).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(to_toml(&again).unwrap(), text);
}

#[test]
fn invalid_grids_and_topologies() {
    let cfg = parse_config(MINIMAL, &["grid.nx=2".into()]).unwrap();
    assert!(matches!(cfg.validate(full()), Err(CliError::Validation(_))));
    let cfg = parse_config(MINIMAL, &["grid.topology=torus".into()]).unwrap();
    assert!(matches!(cfg.validate(full()), Err(CliError::Validation(m)) if m.contains("topology")));
    let cfg = parse_config(MINIMAL, &["time.t_end=0.001".into()]).unwrap();
    assert!(matches!(cfg.validate(full()), Err(CliError::Validation(m)) if m.contains("t_end")));
}

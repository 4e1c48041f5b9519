//! Experiment drivers behind the subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unsflow_core::analysis::{beta_estimate, decay_fit, mms_convergence, spectrum, Quantity};
use unsflow_core::ops::div;
use unsflow_core::pressure::helmholtz_project;
use unsflow_core::{Error, Stepper, VectorField, WallCondition};

use crate::config::{parse_config, Config, Requirements};
use crate::error::{CliError, Result};
use crate::output::{
    fmt, write_diagnostics, write_fields_csv, write_metadata, write_scalar_csv, write_table, write_vector_csv, write_vtk,
    Metadata,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Project,
    Beta,
    Spectrum,
    Mms,
    Decay,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Project => "project",
            Command::Beta => "beta",
            Command::Spectrum => "spectrum",
            Command::Mms => "mms",
            Command::Decay => "decay",
        }
    }

    pub fn requirements(self) -> Requirements {
        match self {
            Command::Run | Command::Decay => Requirements { nu: true, time: true },
            Command::Mms => Requirements { nu: true, time: false },
            Command::Project | Command::Beta | Command::Spectrum => Requirements { nu: false, time: false },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub overrides: Vec<String>,
    pub seed: Option<u64>,
}

/// Reads, overrides and validates the configuration of `spec`.
pub fn load(spec: &ExperimentSpec) -> Result<Config> {
    let text = match &spec.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text, &spec.overrides)?;
    if let Some(seed) = spec.seed {
        cfg.experiment.seed = seed;
    }
    cfg.validate(spec.command.requirements())?;
    Ok(cfg)
}

/// Runs the experiment, writes its files into `spec.out` and returns a
/// `key = value` summary.
pub fn execute(spec: &ExperimentSpec) -> Result<String> {
    let cfg = load(spec)?;
    let out = spec.out.as_path();
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let grid = cfg.grid()?;
    let meta = Metadata::new(spec.command.name(), cfg.experiment.seed, &grid, &cfg);
    write_metadata(&out.join("metadata.toml"), &meta, &cfg)?;
    let mut summary = format!("command = \"{}\"\nversion = \"{}\"\n", spec.command.name(), meta.version);
    match spec.command {
        Command::Run => run(&cfg, out, &mut summary)?,
        Command::Project => project(&cfg, out, &mut summary)?,
        Command::Beta => beta(&cfg, out, &mut summary)?,
        Command::Spectrum => eigenvalues(&cfg, out, &mut summary)?,
        Command::Mms => mms(&cfg, out, &mut summary)?,
        Command::Decay => decay(&cfg, out, &mut summary)?,
    }
    Ok(summary)
}

fn line(summary: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(summary, "{key} = {value}");
}

/// Runs to `t_end`, writing diagnostics even when the run blows up.
fn simulate(cfg: &Config, out: &Path, summary: &mut String) -> Result<Vec<unsflow_core::DiagnosticsRecord>> {
    let stepper = Stepper::new(cfg.run_config()?)?;
    let mut records = Vec::new();
    let result = stepper.run_with(|prev, next| {
        if prev.n == 0 {
            records.push(prev.diagnostics);
        }
        records.push(next.diagnostics);
        Ok(())
    });
    if records.is_empty() {
        if let Ok(state) = stepper.initial_state() {
            records.push(state.diagnostics);
        }
    }
    write_diagnostics(&out.join("diagnostics.csv"), &records)?;
    let report = match result {
        Ok(r) => r,
        Err(e @ Error::Blowup { .. }) => {
            line(summary, "status", "\"blowup\"");
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let nu = cfg.nu()?;
    let state = &report.final_state;
    let p = state.split.total(nu);
    write_vector_csv(&out.join("velocity.csv"), &state.u)?;
    write_scalar_csv(&out.join("pressure.csv"), &p)?;
    write_fields_csv(&out.join("fields.csv"), &state.u, &p)?;
    write_vtk(&out.join("fields.vtk"), &state.u, &p, &format!("final state t = {}", state.t))?;
    let a = report.aggregates;
    write_table(
        &out.join("aggregates.csv"),
        &["sup_grad_sq", "sum_lap_sq_dt", "sum_dudt_sq_dt", "sum_convection_sq_dt"],
        &[vec![fmt(a.sup_grad_sq), fmt(a.sum_lap_sq_dt), fmt(a.sum_dudt_sq_dt), fmt(a.sum_convection_sq_dt)]],
    )?;
    line(summary, "status", "\"completed\"");
    line(summary, "steps", state.n);
    line(summary, "t", fmt(state.t));
    line(summary, "sup_grad_sq", fmt(a.sup_grad_sq));
    Ok(report.records)
}

fn run(cfg: &Config, out: &Path, summary: &mut String) -> Result<()> {
    let records = simulate(cfg, out, summary)?;
    if let Some(last) = records.last() {
        line(summary, "energy", fmt(last.energy));
        line(summary, "div_norm", fmt(last.div_norm_sq.sqrt()));
    }
    Ok(())
}

fn project(cfg: &Config, out: &Path, summary: &mut String) -> Result<()> {
    let solver = cfg.solver()?;
    let grid = *solver.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.experiment.seed);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut first = None;
    for k in 0..cfg.experiment.samples.max(1) {
        let a = VectorField::random(grid, WallCondition::NoSlip, &mut rng);
        let (pa, q) = helmholtz_project(&solver, &a)?;
        let (ppa, _) = helmholtz_project(&solver, &pa)?;
        let rest = &a - &pa;
        let idem = (&ppa - &pa).norm() / a.norm();
        let orth = pa.inner(&rest).abs() / (a.norm_sq());
        let pyth = (pa.norm_sq() + rest.norm_sq() - a.norm_sq()).abs() / a.norm_sq();
        let dv = div(&pa).norm() / div(&a).norm().max(f64::MIN_POSITIVE);
        worst = worst.max(idem).max(orth).max(pyth);
        rows.push(vec![k.to_string(), fmt(idem), fmt(orth), fmt(pyth), fmt(dv)]);
        if first.is_none() {
            first = Some((a, pa, q));
        }
    }
    write_table(&out.join("projection.csv"), &["sample", "idempotence", "orthogonality", "pythagoras", "div_ratio"], &rows)?;
    if let Some((a, pa, q)) = first {
        write_vector_csv(&out.join("input.csv"), &a)?;
        write_vector_csv(&out.join("projected.csv"), &pa)?;
        write_scalar_csv(&out.join("potential.csv"), &q)?;
        write_fields_csv(&out.join("fields.csv"), &pa, &q)?;
        write_vtk(&out.join("fields.vtk"), &pa, &q, "projected random field")?;
    }
    line(summary, "samples", rows.len());
    line(summary, "max_identity_defect", fmt(worst));
    Ok(())
}

fn beta(cfg: &Config, out: &Path, summary: &mut String) -> Result<()> {
    let est = beta_estimate(&cfg.solver()?, &cfg.experiment.c_values, cfg.beta_method())?;
    let rows: Vec<Vec<String>> = est
        .c_values
        .iter()
        .zip(&est.sup_ratio)
        .zip(&est.top3)
        .map(|((c, r), t)| vec![fmt(*c), fmt(*r), fmt(t[0]), fmt(t[1]), fmt(t[2])])
        .collect();
    write_table(&out.join("beta.csv"), &["c", "sup_ratio", "top1", "top2", "top3"], &rows)?;
    line(summary, "beta_emp", fmt(est.beta_emp));
    line(summary, "sup_ratio_c0", fmt(est.sup_ratio[0]));
    line(summary, "iterations", est.iterations);
    Ok(())
}

fn eigenvalues(cfg: &Config, out: &Path, summary: &mut String) -> Result<()> {
    let rep = spectrum(&cfg.solver()?)?;
    let rows: Vec<Vec<String>> =
        rep.eigenvalues.iter().enumerate().map(|(k, l)| vec![k.to_string(), fmt(l.re), fmt(l.im)]).collect();
    write_table(&out.join("spectrum.csv"), &["index", "re", "im"], &rows)?;
    let fields = [
        ("scale", rep.scale),
        ("min_real_part", rep.min_real_part),
        ("min_abs", rep.min_abs),
        ("max_imag_abs", rep.max_imag_abs),
        ("stokes_min", rep.stokes_min),
        ("dirichlet_min", rep.dirichlet_min),
        ("neumann_min", rep.neumann_min),
    ];
    write_table(&out.join("spectrum_summary.csv"), &fields.map(|f| f.0), &[fields.iter().map(|f| fmt(f.1)).collect()])?;
    for (k, v) in fields {
        line(summary, k, fmt(v));
    }
    Ok(())
}

fn mms(cfg: &Config, out: &Path, summary: &mut String) -> Result<()> {
    let table = mms_convergence(&cfg.mms_study()?)?;
    let mut rows = Vec::new();
    for (kind, set) in [("spatial", &table.spatial), ("temporal", &table.temporal)] {
        for r in set {
            rows.push(vec![kind.to_string(), r.n.to_string(), fmt(r.dt), fmt(r.error)]);
        }
    }
    write_table(&out.join("mms.csv"), &["study", "n", "dt", "error"], &rows)?;
    line(summary, "spatial_order", fmt(table.spatial_order));
    line(summary, "temporal_order", fmt(table.temporal_order));
    Ok(())
}

fn decay(cfg: &Config, out: &Path, summary: &mut String) -> Result<()> {
    let records = simulate(cfg, out, summary)?;
    let rate = decay_fit(&records, Quantity::Divergence)?;
    let ly = cfg.grid.ly;
    let expected = cfg.nu()? * std::f64::consts::PI.powi(2) / (ly * ly);
    let err = (rate - expected).abs() / expected;
    write_table(
        &out.join("decay.csv"),
        &["quantity", "rate", "expected", "relative_error"],
        &[vec!["div_defect".into(), fmt(rate), fmt(expected), fmt(err)]],
    )?;
    line(summary, "rate", fmt(rate));
    line(summary, "expected", fmt(expected));
    line(summary, "relative_error", fmt(err));
    Ok(())
}

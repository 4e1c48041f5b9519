//! CSV, legacy VTK and metadata writers. Floats are written with 17
//! significant digits so that every value reads back bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use unsflow_core::ops::div;
use unsflow_core::{DiagnosticsRecord, Grid, ScalarField, VectorField, WallCondition};

use crate::error::{CliError, Result};

pub const DIAGNOSTICS_HEADER: [&str; 8] =
    ["step", "t", "energy", "grad_norm_sq", "lap_norm_sq", "div_norm_sq", "stokes_grad_sq", "dissipation_residual"];

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))
}

/// Header plus string rows.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.step.to_string(),
                fmt(r.t),
                fmt(r.energy),
                fmt(r.grad_norm_sq),
                fmt(r.lap_norm_sq),
                fmt(r.div_norm_sq),
                fmt(r.stokes_grad_sq),
                fmt(r.dissipation_residual),
            ]
        })
        .collect();
    write_table(path, &DIAGNOSTICS_HEADER, &rows)
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut r = csv_reader(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        let f = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Parse(format!("{}: bad value in column {}", path.display(), DIAGNOSTICS_HEADER[k])))
        };
        out.push(DiagnosticsRecord {
            step: f(0)? as usize,
            t: f(1)?,
            energy: f(2)?,
            grad_norm_sq: f(3)?,
            lap_norm_sq: f(4)?,
            div_norm_sq: f(5)?,
            stokes_grad_sq: f(6)?,
            dissipation_residual: f(7)?,
        });
    }
    Ok(out)
}

/// Cell-centred scalar: `i, j, x, y, value`.
pub fn write_scalar_csv(path: &Path, p: &ScalarField) -> Result<()> {
    let g = p.grid;
    let mut rows = Vec::with_capacity(g.nx() * g.ny());
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let (x, y) = g.cell_center(i, j);
            rows.push(vec![i.to_string(), j.to_string(), fmt(x), fmt(y), fmt(p.values[(i, j)])]);
        }
    }
    write_table(path, &["i", "j", "x", "y", "value"], &rows)
}

/// Staggered velocity: `component, i, j, x, y, value`, the x-faces first.
pub fn write_vector_csv(path: &Path, w: &VectorField) -> Result<()> {
    let g = w.grid;
    let mut rows = Vec::with_capacity(g.velocity_dofs());
    for (name, m, at) in [("u", &w.u, Grid::u_face as fn(&Grid, usize, usize) -> (f64, f64)), ("v", &w.v, Grid::v_face)] {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let (x, y) = at(&g, i, j);
                rows.push(vec![name.to_string(), i.to_string(), j.to_string(), fmt(x), fmt(y), fmt(m[(i, j)])]);
            }
        }
    }
    write_table(path, &["component", "i", "j", "x", "y", "value"], &rows)
}

fn index(rec: &csv::StringRecord, k: usize, path: &Path) -> Result<usize> {
    rec.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| CliError::Parse(format!("{}: bad index in column {k}", path.display())))
}

fn value(rec: &csv::StringRecord, k: usize, path: &Path) -> Result<f64> {
    rec.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| CliError::Parse(format!("{}: bad value in column {k}", path.display())))
}

pub fn read_scalar_csv(path: &Path, grid: Grid) -> Result<ScalarField> {
    let mut p = ScalarField::zeros(grid);
    for rec in csv_reader(path)?.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        let (i, j) = (index(&rec, 0, path)?, index(&rec, 1, path)?);
        if i >= grid.nx() || j >= grid.ny() {
            return Err(CliError::Parse(format!("{}: cell ({i}, {j}) outside the grid", path.display())));
        }
        p.values[(i, j)] = value(&rec, 4, path)?;
    }
    Ok(p)
}

pub fn read_vector_csv(path: &Path, grid: Grid) -> Result<VectorField> {
    let mut w = VectorField::zeros(grid, WallCondition::NoSlip);
    for rec in csv_reader(path)?.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        let m = match rec.get(0) {
            Some("u") => &mut w.u,
            Some("v") => &mut w.v,
            other => return Err(CliError::Parse(format!("{}: unknown component {other:?}", path.display()))),
        };
        let (i, j) = (index(&rec, 1, path)?, index(&rec, 2, path)?);
        if i >= m.nrows() || j >= m.ncols() {
            return Err(CliError::Parse(format!("{}: face ({i}, {j}) outside the grid", path.display())));
        }
        m[(i, j)] = value(&rec, 5, path)?;
    }
    Ok(w)
}

/// Velocity averaged to cell centres, `i + nx j` ordering; wall-normal faces
/// on a wall count as zero.
pub fn cell_centered(w: &VectorField) -> (Vec<f64>, Vec<f64>) {
    let g = w.grid;
    let (nx, ny) = (g.nx(), g.ny());
    // full face index -> stored value
    let uf = |f: usize, j: usize| -> f64 {
        if g.periodic_x() {
            w.u[(f % nx, j)]
        } else if f == 0 || f == nx {
            0.0
        } else {
            w.u[(f - 1, j)]
        }
    };
    let vf = |i: usize, f: usize| -> f64 {
        if g.periodic_y() {
            w.v[(i, f % ny)]
        } else if f == 0 || f == ny {
            0.0
        } else {
            w.v[(i, f - 1)]
        }
    };
    let mut u = Vec::with_capacity(nx * ny);
    let mut v = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            u.push(0.5 * (uf(i, j) + uf(i + 1, j)));
            v.push(0.5 * (vf(i, j) + vf(i, j + 1)));
        }
    }
    (u, v)
}

fn flat(p: &ScalarField) -> Vec<f64> {
    let g = p.grid;
    (0..g.ny()).flat_map(|j| (0..g.nx()).map(move |i| p.values[(i, j)])).collect()
}

/// Cell-centred `i, j, x, y, u, v, p, div_u`.
pub fn write_fields_csv(path: &Path, w: &VectorField, p: &ScalarField) -> Result<()> {
    let g = w.grid;
    let (u, v) = cell_centered(w);
    let pv = flat(p);
    let dv = flat(&div(w));
    let mut rows = Vec::with_capacity(u.len());
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let k = i + g.nx() * j;
            let (x, y) = g.cell_center(i, j);
            rows.push(vec![i.to_string(), j.to_string(), fmt(x), fmt(y), fmt(u[k]), fmt(v[k]), fmt(pv[k]), fmt(dv[k])]);
        }
    }
    write_table(path, &["i", "j", "x", "y", "u", "v", "p", "div_u"], &rows)
}

/// Legacy ASCII structured-points file with point data `u`, `v`, `p`,
/// `div_u` at the cell centres.
pub fn write_vtk(path: &Path, w: &VectorField, p: &ScalarField, title: &str) -> Result<()> {
    let g = w.grid;
    let io = |e| CliError::io(path, e);
    let mut f = BufWriter::new(File::create(path).map_err(io)?);
    let (u, v) = cell_centered(w);
    let n = g.nx() * g.ny();
    writeln!(f, "# vtk DataFile Version 3.0").map_err(io)?;
    writeln!(f, "{}", title.lines().next().unwrap_or("unsflow")).map_err(io)?;
    writeln!(f, "ASCII").map_err(io)?;
    writeln!(f, "DATASET STRUCTURED_POINTS").map_err(io)?;
    writeln!(f, "DIMENSIONS {} {} 1", g.nx(), g.ny()).map_err(io)?;
    writeln!(f, "ORIGIN {} {} 0", fmt(0.5 * g.dx()), fmt(0.5 * g.dy())).map_err(io)?;
    writeln!(f, "SPACING {} {} 1", fmt(g.dx()), fmt(g.dy())).map_err(io)?;
    writeln!(f, "POINT_DATA {n}").map_err(io)?;
    for (name, data) in [("u", u), ("v", v), ("p", flat(p)), ("div_u", flat(&div(w)))] {
        writeln!(f, "SCALARS {name} double 1").map_err(io)?;
        writeln!(f, "LOOKUP_TABLE default").map_err(io)?;
        for x in data {
            writeln!(f, "{}", fmt(x)).map_err(io)?;
        }
    }
    f.flush().map_err(io)
}

/// Run provenance written next to every output set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub topology: String,
    pub nx: usize,
    pub ny: usize,
    pub corners: String,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub preconditioner: String,
}

impl Metadata {
    pub fn new(command: &str, seed: u64, grid: &Grid, cfg: &crate::config::Config) -> Self {
        let solver = cfg.solver_config();
        Self {
            version: crate::VERSION.to_string(),
            command: command.to_string(),
            seed,
            topology: grid.topology().name().to_string(),
            nx: grid.nx(),
            ny: grid.ny(),
            corners: if grid.has_corners() { "smooth boundary assumption violated".into() } else { "none".into() },
            solver_tol: solver.tol,
            solver_max_iter: solver.max_iter.unwrap_or(10 * (grid.nx() + grid.ny())),
            preconditioner: format!("{:?}", solver.preconditioner),
        }
    }
}

#[derive(Serialize)]
struct MetadataFile<'a> {
    run: &'a Metadata,
    config: &'a crate::config::Config,
}

/// Metadata followed by the resolved configuration.
pub fn write_metadata(path: &Path, meta: &Metadata, cfg: &crate::config::Config) -> Result<()> {
    let text = toml::to_string(&MetadataFile { run: meta, config: cfg }).map_err(|e| CliError::Parse(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

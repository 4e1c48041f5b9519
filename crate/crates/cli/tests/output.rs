use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unsflow_cli::output::{
    cell_centered, read_diagnostics, read_scalar_csv, read_vector_csv, write_diagnostics, write_scalar_csv, write_vector_csv,
    write_vtk, DIAGNOSTICS_HEADER,
};
use unsflow_core::{DiagnosticsRecord, Grid, ScalarField, VectorField, WallCondition};

#[test]
fn empty_series_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_diagnostics(&path, &[]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, format!("{}\n", DIAGNOSTICS_HEADER.join(",")));
    assert!(read_diagnostics(&path).unwrap().is_empty());
}

#[test]
fn diagnostics_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let recs: Vec<DiagnosticsRecord> = (0..5)
        .map(|k| DiagnosticsRecord {
            step: k,
            t: 0.1 * k as f64,
            energy: 1.0 / 3.0 + k as f64,
            grad_norm_sq: std::f64::consts::PI * 1e-300,
            lap_norm_sq: 1e300 / 7.0,
            div_norm_sq: 0.0,
            stokes_grad_sq: f64::MIN_POSITIVE,
            dissipation_residual: -2.0f64.sqrt(),
        })
        .collect();
    write_diagnostics(&path, &recs).unwrap();
    assert_eq!(read_diagnostics(&path).unwrap(), recs);
}

#[test]
fn fields_round_trip_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for g in [Grid::channel(9, 7, 1.3, 0.7).unwrap(), Grid::closed_box(6, 8, 1.0, 2.0).unwrap()] {
        let w = VectorField::random(g, WallCondition::NoSlip, &mut rng).scale(1.0 / 3.0);
        let p = ScalarField::random(g, &mut rng).scale(1e-7);
        write_vector_csv(&dir.path().join("w.csv"), &w).unwrap();
        write_scalar_csv(&dir.path().join("p.csv"), &p).unwrap();
        let w2 = read_vector_csv(&dir.path().join("w.csv"), g).unwrap();
        let p2 = read_scalar_csv(&dir.path().join("p.csv"), g).unwrap();
        assert!(w.u.iter().zip(w2.u.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(w.v.iter().zip(w2.v.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(p.values.iter().zip(p2.values.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn cell_centred_velocity_of_a_linear_field() {
    // u = x on the box interpolates exactly to the cell centres
    let g = Grid::closed_box(8, 6, 1.0, 1.0).unwrap();
    let w = VectorField::from_fn(g, WallCondition::NoSlip, |x, _| x * (1.0 - x), |_, _| 0.0);
    let (u, v) = cell_centered(&w);
    let (x, _) = g.cell_center(3, 2);
    let dx = g.dx();
    let expect = 0.5 * ((x - dx / 2.0) * (1.0 - x + dx / 2.0) + (x + dx / 2.0) * (1.0 - x - dx / 2.0));
    assert!((u[3 + 8 * 2] - expect).abs() < 1e-15);
    assert!(v.iter().all(|v| *v == 0.0));
}

#[test]
fn vtk_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.vtk");
    let g = Grid::channel(5, 4, 1.0, 1.0).unwrap();
    let w = VectorField::zeros(g, WallCondition::NoSlip);
    write_vtk(&path, &w, &ScalarField::zeros(g), "zero").unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# vtk DataFile Version 3.0");
    assert_eq!(lines[3], "DATASET STRUCTURED_POINTS");
    assert_eq!(lines[4], "DIMENSIONS 5 4 1");
    assert!(lines[5].starts_with("ORIGIN ") && lines[6].starts_with("SPACING "));
    assert_eq!(lines[7], "POINT_DATA 20");
    for name in ["u", "v", "p", "div_u"] {
        assert!(lines.contains(&format!("SCALARS {name} double 1").as_str()));
    }
    assert_eq!(lines.len(), 8 + 4 * (2 + 20));
}

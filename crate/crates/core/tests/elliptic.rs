mod common;

use std::f64::consts::PI;

use common::{rng, Oracle};
use proptest::prelude::*;
use unsflow_core::ops::{laplacian_scalar, laplacian_vector};
use unsflow_core::{EllipticKind, Grid, ScalarBc, ScalarField, Solver, SolverConfig, Topology, VectorField, WallCondition};

fn kind() -> impl Strategy<Value = EllipticKind> {
    prop_oneof![
        Just(EllipticKind::PoissonDirichlet),
        Just(EllipticKind::PoissonNeumann),
        (1e-4f64..1.0).prop_map(|alpha| EllipticKind::HelmholtzDirichlet { alpha }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solutions_satisfy_the_operator(channel in any::<bool>(), nx in 4usize..24, ny in 4usize..24, k in kind(), seed in any::<u64>()) {
        let top = if channel { Topology::PeriodicChannel } else { Topology::ClosedBox };
        let g = Grid::new(top, nx, ny, 1.0, 1.0).unwrap();
        let rhs = ScalarField::random(g, &mut rng(seed));
        let (x, rep) = Solver::new(g).solve(k, &rhs).unwrap();
        prop_assert!(rep.residual <= 1e-10);
        let (ax, mut b) = match k {
            EllipticKind::PoissonDirichlet => (laplacian_scalar(&x, ScalarBc::Dirichlet), rhs.clone()),
            EllipticKind::PoissonNeumann => (laplacian_scalar(&x, ScalarBc::Neumann), rhs.clone().pinned()),
            EllipticKind::HelmholtzDirichlet { alpha } => (&x - &(&laplacian_scalar(&x, ScalarBc::Dirichlet) * alpha), rhs.clone()),
        };
        b.mean_pinned = false;
        prop_assert!((&ax - &b).norm() <= 1e-9 * b.norm());
        if k == EllipticKind::PoissonNeumann {
            prop_assert!(x.mean().abs() <= 1e-12 * x.max_abs());
            prop_assert!(x.mean_pinned);
        }
    }

    #[test]
    fn neumann_solution_ignores_constant_shifts(shift in -10.0f64..10.0, seed in any::<u64>()) {
        let g = Grid::channel(12, 10, 1.0, 1.0).unwrap();
        let s = Solver::new(g);
        let rhs = ScalarField::random(g, &mut rng(seed));
        let mut shifted = rhs.clone();
        shifted.values.add_scalar_mut(shift);
        let (a, _) = s.solve(EllipticKind::PoissonNeumann, &rhs).unwrap();
        let (b, _) = s.solve(EllipticKind::PoissonNeumann, &shifted).unwrap();
        prop_assert!((&a - &b).max_abs() <= 1e-9 * a.max_abs().max(1e-12));
    }

    #[test]
    fn vector_helmholtz_satisfies_the_operator(alpha in 1e-5f64..1.0, seed in any::<u64>()) {
        let g = Grid::channel(10, 12, 1.0, 1.0).unwrap();
        let rhs = VectorField::random(g, WallCondition::NoSlip, &mut rng(seed));
        let (x, _) = Solver::new(g).solve_vector(EllipticKind::HelmholtzDirichlet { alpha }, &rhs).unwrap();
        let ax = &x - &(&laplacian_vector(&x) * alpha);
        prop_assert!((&ax - &rhs).norm() <= 1e-9 * rhs.norm());
    }
}

#[test]
fn solves_agree_with_dense_inverse() {
    let g = Grid::closed_box(9, 8, 1.0, 1.0).unwrap();
    let o = Oracle::new(g);
    let rhs = VectorField::random(g, WallCondition::NoSlip, &mut rng(3));
    let (x, _) = Solver::new(g).solve_vector(EllipticKind::PoissonDirichlet, &rhs).unwrap();
    let expect = o.l.clone().lu().solve(&rhs.to_vector()).unwrap();
    assert!((x.to_vector() - &expect).norm() <= 1e-9 * expect.norm());
}

#[test]
fn helmholtz_damps_every_mode() {
    let g = Grid::channel(16, 16, 1.0, 1.0).unwrap();
    let s = Solver::new(g);
    for kx in 0..8 {
        for ky in 1..16 {
            let f = ScalarField::from_fn(g, |x, y| (2.0 * PI * kx as f64 * x).cos() * (PI * ky as f64 * y).sin());
            let (x, _) = s.solve(EllipticKind::HelmholtzDirichlet { alpha: 0.3 }, &f).unwrap();
            assert!(x.norm() <= f.norm() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn strict_mode_on_random_data() {
    let g = Grid::channel(8, 8, 1.0, 1.0).unwrap();
    let s = Solver::with_config(g, SolverConfig { strict: true, ..Default::default() });
    let rhs = ScalarField::random(g, &mut rng(1)).pinned();
    assert!(s.solve(EllipticKind::PoissonNeumann, &rhs).is_ok());
    let mut bad = rhs.clone();
    bad.values[(0, 0)] += 1.0;
    assert!(s.solve(EllipticKind::PoissonNeumann, &bad).is_err());
}

use dirac_beltrami::clifford::grade_of;
use dirac_beltrami::gridfield::{
    read_snapshot, write_snapshot, EndoGridField, EndoMode, GridSpec, MultivectorGridField,
};
use dirac_beltrami::linmaps::{cayley, VectorMap};
use dirac_beltrami::solver::{
    dv_residual, extract_scalar, gauge_reconstruct, grades_vanish, hodge_duality_check, neumann_solve,
    reduce_second_order, residual_second_order, BeltramiProblem, Coefficient, EllipticProblem,
};
use dirac_beltrami::spectral::{dminus, dplus};
use dirac_beltrami::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Sum of a few random low Fourier modes on each blade kept by `keep`,
/// with zero mean.
fn smooth_field(spec: GridSpec, seed: u64, keep: impl Fn(usize) -> bool) -> MultivectorGridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.dim();
    let l = spec.box_length();
    let mut f = MultivectorGridField::zeros(spec);
    for s in (0..spec.nblades()).filter(|&s| keep(s)) {
        let modes: Vec<(Vec<f64>, f64, f64)> = (0..4)
            .map(|_| {
                let mut k: Vec<f64> = (0..n).map(|_| rng.random_range(-3i32..=3) as f64).collect();
                if k.iter().all(|&v| v == 0.0) {
                    k[0] = 1.0;
                }
                (k, rng.random_range(-1.0..1.0), rng.random_range(0.0..TAU))
            })
            .collect();
        let blade = MultivectorGridField::sample_blade(spec, s, |x| {
            modes
                .iter()
                .map(|(k, a, phase)| a * (TAU / l * (0..n).map(|j| k[j] * x[j]).sum::<f64>() + phase).cos())
                .sum()
        });
        f.axpy(1.0, &blade).unwrap();
    }
    f
}

fn relative_diff(a: &MultivectorGridField, b: &MultivectorGridField) -> f64 {
    a.sub(b).unwrap().l2_norm().unwrap() / b.l2_norm().unwrap()
}

#[test]
fn zero_coefficient_inverts_dminus() {
    for (n, points) in [(2, 32), (3, 16)] {
        let spec = GridSpec::new(n, points, 1.0).unwrap();
        let psi = smooth_field(spec, 1, |_| true);
        let m = EndoGridField::isotropic(spec, |_| 0.0).unwrap();
        let (f, report) = neumann_solve(&BeltramiProblem::new(Coefficient::Linear(m), psi.clone())).unwrap();
        assert_eq!(report.iterations, 1);
        assert!(relative_diff(&dminus(&f).unwrap(), &psi) < 1e-12);
        assert!(f.mean().unwrap().norm() < 1e-14);
    }
}

#[test]
fn iteration_contracts_at_the_coefficient_bound() {
    let spec = GridSpec::new(2, 64, 1.0).unwrap();
    let m = EndoGridField::isotropic(spec, |x| 0.25 * (1.0 + (TAU * x[0]).sin() * (TAU * x[1]).cos())).unwrap();
    let psi = smooth_field(spec, 2, |_| true);
    let problem = BeltramiProblem::new(Coefficient::Linear(m.clone()), psi.clone()).with_tol(1e-12);
    let (f, report) = neumann_solve(&problem).unwrap();
    let h = &report.residual_history;
    for w in h.windows(2).filter(|w| w[0] > 1e-10 * h[0]) {
        assert!(w[1] <= 0.5 * w[0] * (1.0 + 1e-9), "{} -> {}", w[0], w[1]);
    }
    let mut omega = MultivectorGridField::zeros(spec);
    omega.add_constant(&report.harmonic_offset).unwrap();
    let rhs = psi.add(&omega).unwrap().add(&m.apply(&omega).unwrap()).unwrap();
    let lhs = dminus(&f).unwrap().sub(&m.apply(&dplus(&f).unwrap()).unwrap()).unwrap();
    assert!(relative_diff(&lhs, &rhs) < 1e-10, "{:e}", relative_diff(&lhs, &rhs));
    assert!(report.final_residual < 1e-10);
}

#[test]
fn second_order_solution_lives_in_even_grades() {
    let spec = GridSpec::new(3, 16, 1.0).unwrap();
    let a = EndoGridField::from_fn(spec, EndoMode::Vector, |x| {
        VectorMap::diag(&[1.0 + 0.3 * (TAU * x[0]).sin(), 1.2, 0.8 + 0.2 * (TAU * x[2]).cos()]).unwrap()
    })
    .unwrap();
    let g = smooth_field(spec, 3, |s| grade_of(s) == 1);
    let p = EllipticProblem::new(a, g, 0.7).unwrap();
    let (f, _) = neumann_solve(&reduce_second_order(&p).unwrap().with_tol(1e-13)).unwrap();
    assert!(grades_vanish(&f, &[1, 3], 1e-12 * f.max_abs()).unwrap());
    let u = extract_scalar(&f).unwrap();
    assert!((u.values().iter().sum::<f64>() / spec.npts() as f64 - 0.7).abs() < 1e-12);
    assert!(residual_second_order(&p, &u).unwrap() < 1e-9);
    assert!(dv_residual(&f).unwrap() < 1e-9);
    let gauge = gauge_reconstruct(&p, &u, 1e-8).unwrap();
    assert!(gauge.d_residual < 1e-9 && gauge.delta_residual < 1e-9);
}

/// A constant coefficient and a mean-free source keep `ω = 0`, so the
/// homogeneous equation holds wherever the source vanishes.
#[test]
fn distortion_holds_where_the_source_vanishes() {
    let spec = GridSpec::new(2, 64, 1.0).unwrap();
    let a = VectorMap::from_row_slice(2, &[2.0, 0.6, 0.6, 0.8]).unwrap();
    let m = EndoGridField::constant(spec, EndoMode::Extension { min_grade: 1 }, &cayley(&a).unwrap()).unwrap();
    let big_m = m.applied_norm();
    assert!(big_m > 0.3 && big_m < 1.0);
    let (rr, c) = (0.04, 0.5);
    let bump_dx = |x: &[f64]| {
        let s = ((x[0] - c).powi(2) + (x[1] - c).powi(2)) / rr;
        if s < 1.0 {
            -8.0 * (x[0] - c) / rr * (1.0 - s).powi(3)
        } else {
            0.0
        }
    };
    let mut psi = MultivectorGridField::sample_blade(spec, 0b01, bump_dx);
    psi.axpy(0.5, &MultivectorGridField::sample_blade(spec, 0b11, bump_dx)).unwrap();
    let (f, report) =
        neumann_solve(&BeltramiProblem::new(Coefficient::Linear(m), psi.clone()).with_tol(1e-13)).unwrap();
    assert!(report.harmonic_offset.norm() < 1e-12);
    assert_eq!(report.distortion_violation_count, 0);
    let a = dplus(&f).unwrap().pointwise_norms().unwrap();
    let b = dminus(&f).unwrap().pointwise_norms().unwrap();
    let src = psi.pointwise_norms().unwrap();
    let scale = a.iter().fold(0.0f64, |s, v| s.max(*v));
    let outside: Vec<usize> = (0..spec.npts()).filter(|&p| src[p] == 0.0).collect();
    assert!(outside.len() > spec.npts() / 2);
    for p in outside {
        assert!(b[p] <= big_m * a[p] + 1e-9 * scale, "node {p}: {} > {big_m}·{}", b[p], a[p]);
    }
}

#[test]
fn duality_of_the_monogenic_equation() {
    let spec = GridSpec::new(3, 16, 1.0).unwrap();
    let m = EndoGridField::isotropic(spec, |_| 0.0).unwrap();
    let psi = smooth_field(spec, 4, |_| true);
    let (f, _) = neumann_solve(&BeltramiProblem::new(Coefficient::Linear(m.clone()), psi.clone())).unwrap();
    assert!(hodge_duality_check(&f, &m, &psi).unwrap() < 1e-12);
}

#[test]
fn duality_rejects_coefficients_that_are_not_self_dual() {
    let spec = GridSpec::new(2, 8, 1.0).unwrap();
    let f = smooth_field(spec, 5, |_| true);
    let stretch = VectorMap::diag(&[1.0, 2.0]).unwrap();
    let vector = EndoGridField::constant(spec, EndoMode::Vector, &stretch).unwrap();
    assert!(matches!(hodge_duality_check(&f, &vector, &f), Err(Error::NotSelfDual(_))));
    let extension = EndoGridField::constant(spec, EndoMode::Extension { min_grade: 1 }, &stretch.scale(0.3)).unwrap();
    assert!(matches!(hodge_duality_check(&f, &extension, &f), Err(Error::NotSelfDual(_))));
}

#[test]
fn snapshots_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for (n, points) in [(2, 16), (3, 8), (4, 4)] {
        let spec = GridSpec::new(n, points, 2.5).unwrap();
        let f = smooth_field(spec, 6, |_| true);
        let path = dir.path().join(format!("field-{n}.hdgf"));
        write_snapshot(&f, &path).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back.spec(), f.spec());
        assert_eq!(back.physical().unwrap(), f.physical().unwrap());
    }
}

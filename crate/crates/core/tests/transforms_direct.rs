//! Spectral transforms compared with direct lattice sums of their kernels.

use dirac_beltrami::clifford::{cliff_pos, grade_of, Multivector};
use dirac_beltrami::gridfield::{GridSpec, MultivectorGridField};
use dirac_beltrami::spectral::{beurling, cauchy_free, sphere_area};

const BUMP_RADIUS: f64 = 0.6;

/// `Δφ` for `φ(x) = (1 − |x|²/R²)⁶` on `|x| < R` in `ℝⁿ`.
fn laplacian_of_bump(n: usize, r2: f64) -> f64 {
    let rr = BUMP_RADIUS * BUMP_RADIUS;
    let s = r2 / rr;
    if s >= 1.0 {
        return 0.0;
    }
    let g1 = -6.0 * (1.0 - s).powi(5);
    let g2 = 30.0 * (1.0 - s).powi(4);
    g2 * 4.0 * r2 / (rr * rr) + g1 * 2.0 * n as f64 / rr
}

/// `Σ_l (n − 2l)/n ⟨w⟩_l`, the mean of `u∆ŵ∆u⁻¹` over unit vectors `u`.
fn sphere_mean(w: &Multivector) -> Multivector {
    let n = w.dim();
    let mut out = Multivector::zero(n);
    for s in 0..1 << n {
        out.set(s, (n as f64 - 2.0 * grade_of(s) as f64) / n as f64 * w.get(s));
    }
    out
}

/// Largest deviation between the spectral `𝒮F` and the lattice sum
/// `−𝐁F(x) + n hⁿ/σ_{n−1} Σ_{y≠x} [(x−y)∆F̂(y)∆(x−y)⁻¹ − 𝐁F(y)] / |x−y|ⁿ`,
/// with `𝐁` the sphere mean, relative to the largest value of `𝒮F` on the
/// support of `F = Δφ·c`.
fn beurling_quadrature_error(n: usize, points: usize, box_length: f64) -> f64 {
    let spec = GridSpec::new(n, points, box_length).unwrap();
    let c = spec.center();
    let coeffs: Vec<f64> = (0..1 << n).map(|s| ((s * 5 + 3) % 7) as f64 / 7.0 - 0.4).collect();
    let c0 = Multivector::from_coeffs(n, &coeffs).unwrap();
    let f = MultivectorGridField::sample(spec, |x| {
        let r2: f64 = (0..n).map(|a| (x[a] - c[a]).powi(2)).sum();
        c0.scale(laplacian_of_bump(n, r2))
    })
    .unwrap();
    let s = beurling(&f).unwrap();
    let support: Vec<usize> = (0..spec.npts()).filter(|&p| f.at(p).unwrap().norm() > 0.0).collect();
    let values: Vec<([f64; 3], Multivector, Multivector)> = support
        .iter()
        .map(|&p| {
            let x = spec.coords(p);
            let fy = f.at(p).unwrap();
            ([x[0], x[1], x[2]], fy.involution(), sphere_mean(&fy))
        })
        .collect();
    let weight = n as f64 * spec.cell_volume() / sphere_area(n);
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for (i, &p) in support.iter().enumerate() {
        let (x, _, mean_x) = &values[i];
        let mut sum = mean_x.scale(-1.0);
        for (j, (y, hat_y, mean_y)) in values.iter().enumerate() {
            if i == j {
                continue;
            }
            let z: Vec<f64> = (0..n).map(|a| x[a] - y[a]).collect();
            let r2: f64 = z.iter().map(|v| v * v).sum();
            let z = Multivector::vector(&z).unwrap();
            let z_inv = z.scale(1.0 / r2);
            let conj = cliff_pos(&cliff_pos(&z, hat_y).unwrap(), &z_inv).unwrap();
            sum = &sum + &(&conj - mean_y).scale(weight / r2.powf(0.5 * n as f64));
        }
        let spectral = s.at(p).unwrap();
        err = err.max((&sum - &spectral).norm());
        scale = scale.max(spectral.norm());
    }
    err / scale
}

#[test]
fn beurling_matches_integral_representation_in_the_plane() {
    let coarse = beurling_quadrature_error(2, 64, 4.0);
    let fine = beurling_quadrature_error(2, 128, 4.0);
    assert!(fine < 2e-2, "fine-grid error {fine:.3e}");
    assert!(coarse / fine > 3.0, "errors {coarse:.3e} -> {fine:.3e} do not refine");
}

#[test]
fn beurling_matches_integral_representation_in_space() {
    let coarse = beurling_quadrature_error(3, 32, 4.0);
    let fine = beurling_quadrature_error(3, 64, 4.0);
    assert!(fine < 6e-2, "fine-grid error {fine:.3e}");
    assert!(coarse / fine > 3.0, "errors {coarse:.3e} -> {fine:.3e} do not refine");
}

fn central_field(spec: GridSpec) -> Vec<f64> {
    let n = spec.points_per_axis();
    let dim = spec.dim();
    let mut data = vec![0.0; spec.npts() * spec.nblades()];
    for p in 0..spec.npts() {
        let idx = spec.multi_index(p);
        if (0..dim).all(|a| (idx[a] as i64 - (n / 2) as i64).abs() < (n / 4) as i64) {
            for s in 0..spec.nblades() {
                let t = (p * 7 + s * 13) % 17;
                data[s * spec.npts() + p] = t as f64 / 17.0 - 0.5;
            }
        }
    }
    data
}

#[test]
fn cauchy_transform_scales_with_the_box() {
    for (dim, n) in [(2, 32), (3, 16)] {
        let big = GridSpec::new(dim, n, 2.0).unwrap();
        let small = GridSpec::new(dim, n, 1.0).unwrap();
        let data = central_field(big);
        let on_big = cauchy_free(&MultivectorGridField::from_physical(big, data.clone()).unwrap(), 2).unwrap();
        let on_small = cauchy_free(&MultivectorGridField::from_physical(small, data).unwrap(), 2).unwrap();
        let a = on_big.physical().unwrap();
        let b = on_small.physical().unwrap();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((0.5 * x - y).abs()));
        assert!(scale > 0.0);
        assert!(diff <= 1e-12 * scale, "n={dim}: {diff:.3e} against {scale:.3e}");
    }
}

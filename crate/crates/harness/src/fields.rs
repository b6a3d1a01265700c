//! Seeded random inputs and smooth test functions.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with `seed_from_u64`, so a
//! seed reproduces the same inputs on every platform.

use dirac_beltrami::clifford::Multivector;
use dirac_beltrami::gridfield::{GridSpec, MultivectorGridField};
use dirac_beltrami::linmaps::VectorMap;
use dirac_beltrami::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type HarnessRng = ChaCha8Rng;

pub fn rng(seed: u64) -> HarnessRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut HarnessRng) -> f64 {
    rng.random_range(-1.0..1.0)
}

pub fn random_multivector(dim: usize, rng: &mut HarnessRng) -> Multivector {
    let c: Vec<f64> = (0..1usize << dim).map(|_| uniform(rng)).collect();
    Multivector::from_coeffs(dim, &c).expect("2^dim coefficients")
}

pub fn random_vector(dim: usize, rng: &mut HarnessRng) -> Multivector {
    let c: Vec<f64> = (0..dim).map(|_| uniform(rng)).collect();
    Multivector::vector(&c).expect("dim components")
}

/// A random vector with norm in `[0.5, 1]`.
pub fn random_unitish_vector(dim: usize, rng: &mut HarnessRng) -> Multivector {
    loop {
        let v = random_vector(dim, rng);
        let r = v.norm();
        if (0.5..=1.0).contains(&r) {
            return v;
        }
        if r > 1e-3 {
            return v.scale(0.75 / r);
        }
    }
}

pub fn random_matrix(dim: usize, rng: &mut HarnessRng) -> VectorMap {
    let e: Vec<f64> = (0..dim * dim).map(|_| uniform(rng)).collect();
    VectorMap::from_row_slice(dim, &e).expect("dim² entries")
}

/// `BBᵀ/n + 0.1 I + K` with `K` skew: positive, generally non-symmetric.
pub fn random_positive(dim: usize, rng: &mut HarnessRng) -> VectorMap {
    let b = random_matrix(dim, rng);
    let k = random_matrix(dim, rng);
    let skew = k.sub(&k.transpose()).scale(0.5);
    b.compose(&b.transpose())
        .expect("same dim")
        .scale(1.0 / dim as f64)
        .add(&VectorMap::scaled_identity(dim, 0.1))
        .add(&skew)
}

/// `Q D Qᵀ` with `Q` orthogonal and `D` block diagonal with `2×2` blocks
/// `[[a, −b], [b, a]]` (`a ∈ [0.2, 1.2]`): normal, with spectrum in the right
/// half plane.
pub fn random_normal(dim: usize, rng: &mut HarnessRng) -> VectorMap {
    let q = random_orthogonal(dim, rng);
    let mut d = vec![0.0; dim * dim];
    let mut i = 0;
    while i < dim {
        let a = 0.7 + 0.5 * uniform(rng);
        if i + 1 < dim && rng.random_bool(0.5) {
            let b = uniform(rng);
            d[i * dim + i] = a;
            d[(i + 1) * dim + i + 1] = a;
            d[i * dim + i + 1] = -b;
            d[(i + 1) * dim + i] = b;
            i += 2;
        } else {
            d[i * dim + i] = a;
            i += 1;
        }
    }
    let d = VectorMap::from_row_slice(dim, &d).expect("dim² entries");
    q.compose(&d).and_then(|qd| qd.compose(&q.transpose())).expect("same dim")
}

/// Orthogonal factor of the QR decomposition of a random matrix.
pub fn random_orthogonal(dim: usize, rng: &mut HarnessRng) -> VectorMap {
    let m = random_matrix(dim, rng).matrix().clone().qr().q();
    VectorMap::from_matrix(m).expect("square")
}

/// Uniform values on the blades selected by `keep`, restricted to
/// `|k|∞ ≤ N/3` and scaled to unit maximum.
pub fn random_field(
    spec: GridSpec,
    rng: &mut HarnessRng,
    keep: impl Fn(usize) -> bool,
) -> Result<MultivectorGridField> {
    let npts = spec.npts();
    let mut data = vec![0.0; npts * spec.nblades()];
    for s in 0..spec.nblades() {
        if keep(s) {
            data[s * npts..(s + 1) * npts].iter_mut().for_each(|x| *x = uniform(rng));
        }
    }
    let f = MultivectorGridField::from_physical(spec, data)?.band_limit(spec.points_per_axis() / 3)?;
    let scale = f.max_abs();
    Ok(if scale > 0.0 { f.scale(1.0 / scale) } else { f })
}

/// A smooth scalar function `Σ aⱼ cos(2π kⱼ·(x − c)/L + φⱼ)` with a few
/// low wavenumbers. `even` forces every phase to zero, making the function
/// even about `c`.
#[derive(Clone, Debug)]
pub struct SmoothScalar {
    terms: Vec<(Vec<f64>, f64, f64)>,
    center: Vec<f64>,
    box_length: f64,
}

impl SmoothScalar {
    pub fn random(spec: &GridSpec, rng: &mut HarnessRng, terms: usize, max_k: i32, even: bool) -> Self {
        let n = spec.dim();
        let mut out = Vec::with_capacity(terms);
        for _ in 0..terms {
            let k: Vec<f64> = (0..n).map(|_| rng.random_range(-max_k..=max_k) as f64).collect();
            let amp = uniform(rng);
            let phase = if even { 0.0 } else { PI * uniform(rng) };
            out.push((k, amp, phase));
        }
        let norm: f64 = out.iter().map(|t| t.1.abs()).sum();
        if norm > 0.0 {
            out.iter_mut().for_each(|t| t.1 /= norm);
        }
        SmoothScalar { terms: out, center: spec.center()[..n].to_vec(), box_length: spec.box_length() }
    }

    /// Value in `[−1, 1]`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let w = 2.0 * PI / self.box_length;
        self.terms
            .iter()
            .map(|(k, a, phi)| {
                let arg: f64 = k.iter().zip(x).zip(&self.center).map(|((k, x), c)| k * (x - c)).sum();
                a * (w * arg + phi).cos()
            })
            .sum()
    }
}

/// Periodic displacement `x − c` wrapped into `[−L/2, L/2)`.
pub fn wrapped_offset(x: &[f64], c: &[f64], box_length: f64) -> Vec<f64> {
    x.iter()
        .zip(c)
        .map(|(x, c)| {
            let d = x - c;
            d - box_length * (d / box_length + 0.5).floor()
        })
        .collect()
}

/// `exp(1 − 1/(1 − r²/ρ²))` for `r < ρ`, zero outside; equal to 1 at `r = 0`.
pub fn smooth_bump(r: f64, rho: f64) -> f64 {
    let t = r * r / (rho * rho);
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t)).exp()
    }
}

/// `(1 − r²/ρ²)ᵖ` for `r < ρ`, zero outside.
pub fn poly_bump(r: f64, rho: f64, power: i32) -> f64 {
    let t = r * r / (rho * rho);
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - t).powi(power)
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_reproduce() {
        let a: Vec<f64> = (0..5)
            .map({
                let mut r = rng(3);
                move |_| uniform(&mut r)
            })
            .collect();
        let b: Vec<f64> = (0..5)
            .map({
                let mut r = rng(3);
                move |_| uniform(&mut r)
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_maps_have_their_properties() {
        let mut r = rng(11);
        for dim in 2..=6 {
            let t = random_positive(dim, &mut r);
            assert!(t.min_quadratic_form() > 0.0);
            let q = random_orthogonal(dim, &mut r);
            assert!(q.compose(&q.transpose()).unwrap().max_abs_diff(&VectorMap::identity(dim)) < 1e-12);
            assert!(random_normal(dim, &mut r).is_normal(1e-12));
        }
    }

    #[test]
    fn random_field_is_band_limited() {
        let spec = GridSpec::new(2, 32, 1.0).unwrap();
        let f = random_field(spec, &mut rng(1), |s| s == 1).unwrap();
        assert!((f.max_abs() - 1.0).abs() < 1e-15);
        let hat = f.fft().unwrap();
        let npts = spec.npts();
        let v = &hat.spectral().unwrap()[npts..2 * npts];
        for (p, z) in v.iter().enumerate() {
            if spec.mode_order(p) > 10 {
                assert!(z.norm() < 1e-12);
            }
        }
        assert!(f.is_blade_zero(0) && f.is_blade_zero(3));
    }

    #[test]
    fn wrapped_offsets_are_centred() {
        let d = wrapped_offset(&[0.1, 0.9], &[0.5, 0.5], 1.0);
        assert!((d[0] + 0.4).abs() < 1e-15 && (d[1] - 0.4).abs() < 1e-15);
        let d = wrapped_offset(&[0.95], &[0.05], 1.0);
        assert!((d[0] + 0.1).abs() < 1e-15);
    }
}

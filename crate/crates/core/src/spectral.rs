//! Fourier multipliers on the periodic grid.
//!
//! With `∇ ↔ iξ` the first-order operators act by Clifford multiplication:
//!
//! | operator | symbol                 |
//! |----------|------------------------|
//! | `d`      | `iξ ∧ w`               |
//! | `δ`      | `iξ ⌟ w`               |
//! | `𝒟⁺`     | `iξ ∆ w`               |
//! | `𝒟⁻`     | `iξ ∇ w`               |
//! | `𝒞⁺`     | `(−iξ/|ξ|²) ∆ w`       |
//! | `𝒞⁻`     | `(iξ/|ξ|²) ∇ w`        |
//! | `𝒮`      | `−ξ̂ ∆ ŵ ∆ ξ̂`           |
//! | `𝐑∆`     | `iξ̂ ∆ w`               |
//! | `𝐑∇`     | `iξ̂ ∇ w`               |
//!
//! Here `ξ̂ = ξ/|ξ|` and `ŵ` is the grade involution. `δ = ∇⌟` is minus the
//! formal adjoint of `d`, so that `𝒟± = d ± δ`. With this sign `𝒮` fixes
//! exact fields `dα` and negates coexact fields `δβ`.
//!
//! Modes whose (Nyquist-cleared) wave vector vanishes follow a
//! [`ZeroModePolicy`].

use num_complex::Complex64;

use crate::clifford::{blade_product, kernels, Multivector, Signature};
use crate::gridfield::{fft_nd, GridSpec, MultivectorGridField, GRID_MAX_DIM, MAX_BLADES};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Action on modes with `ξ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroModePolicy {
    Annihilate,
    Identity,
    Negate,
}

/// Fourier multipliers, applied one wave vector at a time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    D,
    Delta,
    DPlus,
    DMinus,
    CauchyPlus,
    CauchyMinus,
    /// `𝒮` by the Clifford reflection formula.
    Beurling,
    /// `𝒮` as `(dδ − δd)Δ⁻¹`.
    BeurlingHodge,
    RieszPos,
    RieszNeg,
    /// `w ↦ w ∆ iξ̂`.
    RieszPosRight,
    Laplacian,
    InverseLaplacian,
    /// `∂_j`.
    Partial(usize),
}

/// A symbol together with its zero-mode policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplierOp {
    pub symbol: Symbol,
    pub zero_mode: ZeroModePolicy,
}

impl MultiplierOp {
    /// The symbol with its default policy: `𝒮` fixes constants, everything
    /// else annihilates them.
    pub fn new(symbol: Symbol) -> Self {
        let zero_mode = match symbol {
            Symbol::Beurling | Symbol::BeurlingHodge => ZeroModePolicy::Identity,
            _ => ZeroModePolicy::Annihilate,
        };
        MultiplierOp { symbol, zero_mode }
    }

    pub fn with_zero_mode(symbol: Symbol, zero_mode: ZeroModePolicy) -> Self {
        MultiplierOp { symbol, zero_mode }
    }

    /// `out = m(ξ) w` for a single wave vector.
    pub fn apply_symbol(&self, xi: &[f64], w: &[Complex64], out: &mut [Complex64]) {
        let n = xi.len();
        let xi2: f64 = xi.iter().map(|x| x * x).sum();
        if xi2 == 0.0 {
            match self.zero_mode {
                ZeroModePolicy::Annihilate => out.iter_mut().for_each(|o| *o = ZERO),
                ZeroModePolicy::Identity => out.copy_from_slice(w),
                ZeroModePolicy::Negate => out.iter_mut().zip(w).for_each(|(o, x)| *o = -x),
            }
            return;
        }
        let norm = xi2.sqrt();
        let mut v = [ZERO; GRID_MAX_DIM];
        let v = &mut v[..n];
        let mut tmp = [ZERO; MAX_BLADES];
        let tmp = &mut tmp[..w.len()];
        let mut tmp2 = [ZERO; MAX_BLADES];
        let tmp2 = &mut tmp2[..w.len()];
        let fill = |v: &mut [Complex64], c: Complex64| {
            v.iter_mut().zip(xi).for_each(|(a, &x)| *a = c * x);
        };
        match self.symbol {
            Symbol::D => {
                fill(v, I);
                kernels::vector_wedge_into(v, w, out);
            }
            Symbol::Delta => {
                fill(v, I);
                kernels::vector_lcontract_into(v, w, out);
            }
            Symbol::DPlus => {
                fill(v, I);
                kernels::vector_left_into(Signature::Pos, v, w, out);
            }
            Symbol::DMinus => {
                fill(v, I);
                kernels::vector_left_into(Signature::Neg, v, w, out);
            }
            Symbol::CauchyPlus => {
                fill(v, -I / xi2);
                kernels::vector_left_into(Signature::Pos, v, w, out);
            }
            Symbol::CauchyMinus => {
                fill(v, I / xi2);
                kernels::vector_left_into(Signature::Neg, v, w, out);
            }
            Symbol::Beurling => {
                fill(v, Complex64::new(1.0 / norm, 0.0));
                tmp2.copy_from_slice(w);
                kernels::involution_in_place(tmp2);
                kernels::vector_left_into(Signature::Pos, v, tmp2, tmp);
                kernels::vector_right_into(Signature::Pos, tmp, v, out);
                out.iter_mut().for_each(|o| *o = -*o);
            }
            Symbol::BeurlingHodge => {
                fill(v, Complex64::new(1.0, 0.0));
                kernels::vector_lcontract_into(v, w, tmp);
                kernels::vector_wedge_into(v, tmp, out);
                kernels::vector_wedge_into(v, w, tmp);
                kernels::vector_lcontract_into(v, tmp, tmp2);
                out.iter_mut().zip(tmp2.iter()).for_each(|(o, b)| *o = (*o - b) / xi2);
            }
            Symbol::RieszPos => {
                fill(v, I / norm);
                kernels::vector_left_into(Signature::Pos, v, w, out);
            }
            Symbol::RieszNeg => {
                fill(v, I / norm);
                kernels::vector_left_into(Signature::Neg, v, w, out);
            }
            Symbol::RieszPosRight => {
                fill(v, I / norm);
                kernels::vector_right_into(Signature::Pos, w, v, out);
            }
            Symbol::Laplacian => out.iter_mut().zip(w).for_each(|(o, x)| *o = x * -xi2),
            Symbol::InverseLaplacian => out.iter_mut().zip(w).for_each(|(o, x)| *o = x * (-1.0 / xi2)),
            Symbol::Partial(j) => out.iter_mut().zip(w).for_each(|(o, x)| *o = x * I * xi[j]),
        }
    }

    /// Apply to a spectral field in place.
    pub fn apply_spectral(&self, f: &mut MultivectorGridField) -> Result<()> {
        let spec = *f.spec();
        if let Symbol::Partial(j) = self.symbol {
            if j >= spec.dim() {
                return Err(Error::OutOfRange(format!("partial derivative index {j} ≥ n")));
            }
        }
        let npts = spec.npts();
        let nb = spec.nblades();
        let dim = spec.dim();
        let data = f.spectral_mut()?;
        let live: Vec<usize> = (0..nb).filter(|&s| data[s * npts..(s + 1) * npts].iter().any(|x| *x != ZERO)).collect();
        let (mut w, mut o) = ([ZERO; MAX_BLADES], [ZERO; MAX_BLADES]);
        for p in 0..npts {
            for &s in &live {
                w[s] = data[s * npts + p];
            }
            let xi = spec.wavevector(p);
            self.apply_symbol(&xi[..dim], &w[..nb], &mut o[..nb]);
            for s in 0..nb {
                data[s * npts + p] = o[s];
            }
        }
        Ok(())
    }

    /// Apply to a physical field.
    pub fn apply(&self, f: &MultivectorGridField) -> Result<MultivectorGridField> {
        let mut hat = f.fft()?;
        self.apply_spectral(&mut hat)?;
        hat.into_physical()
    }
}

fn apply(symbol: Symbol, f: &MultivectorGridField) -> Result<MultivectorGridField> {
    MultiplierOp::new(symbol).apply(f)
}

/// `dF`.
pub fn d(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::D, f)
}

/// `δF`.
pub fn delta(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::Delta, f)
}

/// `𝒟⁺F = dF + δF`.
pub fn dplus(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::DPlus, f)
}

/// `𝒟⁻F = dF − δF`.
pub fn dminus(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::DMinus, f)
}

/// Projection onto the modes with vanishing discrete wavevector: the zero
/// mode and, for even `N`, the modes built from `0` and Nyquist indices.
/// Every Dirac-type multiplier annihilates this space.
pub fn harmonic_part(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    let spec = *f.spec();
    let npts = spec.npts();
    let mut hat = f.fft()?;
    let data = hat.spectral_mut()?;
    for p in 0..npts {
        if spec.wavevector(p)[..spec.dim()].iter().any(|&x| x != 0.0) {
            for b in 0..spec.nblades() {
                data[b * npts + p] = ZERO;
            }
        }
    }
    hat.into_physical()
}

pub fn cauchy_plus(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::CauchyPlus, f)
}

pub fn cauchy_minus(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::CauchyMinus, f)
}

/// `𝒮F`, fixing constants.
pub fn beurling(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::Beurling, f)
}

/// `𝒮F` evaluated as `(dδ − δd)Δ⁻¹F`, fixing constants.
pub fn beurling_hodge(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::BeurlingHodge, f)
}

/// `𝐑∆F`.
pub fn riesz_pos(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::RieszPos, f)
}

/// `𝐑∇F`.
pub fn riesz_neg(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::RieszNeg, f)
}

/// `F∆𝐑`.
pub fn riesz_pos_right(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::RieszPosRight, f)
}

pub fn laplacian(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::Laplacian, f)
}

/// `Δ⁻¹F` on the mean-free part.
pub fn inverse_laplacian(f: &MultivectorGridField) -> Result<MultivectorGridField> {
    apply(Symbol::InverseLaplacian, f)
}

/// `∂_j F`.
pub fn partial(f: &MultivectorGridField, j: usize) -> Result<MultivectorGridField> {
    apply(Symbol::Partial(j), f)
}

fn relative(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Residuals `‖𝒟⁻𝒞⁺Φ₀ − 𝒮Φ₀‖/‖Φ₀‖` and `‖𝒟⁺𝒞⁻Φ₀ − 𝒮Φ₀‖/‖Φ₀‖` for the
/// mean-free part `Φ₀` of `Φ`.
pub fn dirac_of_cauchy_check(phi: &MultivectorGridField) -> Result<(f64, f64)> {
    let phi0 = phi.mean_project();
    let s = beurling(&phi0)?;
    let scale = phi0.l2_norm()?;
    let a = dminus(&cauchy_plus(&phi0)?)?.sub(&s)?.l2_norm()?;
    let b = dplus(&cauchy_minus(&phi0)?)?.sub(&s)?.l2_norm()?;
    Ok((relative(a, scale), relative(b, scale)))
}

/// Relative residuals of `(𝒟⁺F)★ = −𝒟⁻(F̂★)` and `(𝒟⁻F)★ = 𝒟⁺(F̂★)`.
pub fn star_conjugation_check(f: &MultivectorGridField) -> Result<(f64, f64)> {
    let hat_star = f.involution().hodge_right()?;
    let lhs1 = dplus(f)?.hodge_right()?;
    let rhs1 = dminus(&hat_star)?.scale(-1.0);
    let lhs2 = dminus(f)?.hodge_right()?;
    let rhs2 = dplus(&hat_star)?;
    let r1 = relative(lhs1.sub(&rhs1)?.l2_norm()?, lhs1.l2_norm()?.max(rhs1.l2_norm()?));
    let r2 = relative(lhs2.sub(&rhs2)?.l2_norm()?, lhs2.l2_norm()?.max(rhs2.l2_norm()?));
    Ok((r1, r2))
}

/// `hⁿ Σ_x ⟨dF(x), δF(x)⟩`.
pub fn null_lagrangian(f: &MultivectorGridField) -> Result<f64> {
    d(f)?.inner(&delta(f)?)
}

/// Surface area `σ_{n−1}` of the unit sphere in `ℝⁿ`.
pub fn sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        6 => PI.powi(3),
        7 => 16.0 * PI.powi(3) / 15.0,
        8 => PI.powi(4) / 3.0,
        _ => panic!("sphere_area: n = {n} outside 1..=8"),
    }
}

/// `E(x) = x/(σ_{n−1}|x|ⁿ)`, with `E(0) = 0`.
pub fn fundamental_solution(x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return;
    }
    let c = 1.0 / (sphere_area(n) * r2.powf(0.5 * n as f64));
    out.iter_mut().zip(x).for_each(|(o, v)| *o = c * v);
}

/// Free-space Cauchy transform `𝒞⁺Φ(x) = ∫ E(x − y) ∆ Φ(y) dy` of a field
/// supported in the central `1/pad_factor` of the box.
///
/// The convolution is a zero-padded FFT convolution on a grid of
/// `pad_factor·N` points per axis with the sampled kernel; the self-cell
/// kernel value is zero.
pub fn cauchy_free(phi: &MultivectorGridField, pad_factor: usize) -> Result<MultivectorGridField> {
    if pad_factor < 2 {
        return Err(Error::OutOfRange(format!("pad factor {pad_factor} < 2")));
    }
    let spec = *phi.spec();
    let (dim, n, npts, nb) = (spec.dim(), spec.points_per_axis(), spec.npts(), spec.nblades());
    let v = phi.physical()?;
    let half_width = n as f64 / (2.0 * pad_factor as f64);
    for p in 0..npts {
        if (0..nb).all(|s| v[s * npts + p] == 0.0) {
            continue;
        }
        let idx = spec.multi_index(p);
        if (0..dim).any(|a| (idx[a] as f64 - (n / 2) as f64).abs() > half_width) {
            return Err(Error::SupportViolation(format!(
                "nonzero value at node {:?} outside the central 1/{pad_factor} of the box",
                &idx[..dim]
            )));
        }
    }
    let big = GridSpec::new(dim, n * pad_factor, spec.box_length() * pad_factor as f64)?;
    let m = big.points_per_axis();
    let bpts = big.npts();
    let h = spec.spacing();
    let embed = |p: usize| {
        let idx = spec.multi_index(p);
        big.linear_index(&idx[..dim])
    };

    let mut src_hat: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for s in 0..nb {
        let b = &v[s * npts..(s + 1) * npts];
        if b.iter().all(|&x| x == 0.0) {
            continue;
        }
        let mut buf = vec![ZERO; bpts];
        for (p, &x) in b.iter().enumerate() {
            buf[embed(p)] = Complex64::new(x, 0.0);
        }
        fft_nd(&mut buf, dim, m, false);
        src_hat.push((s, buf));
    }

    let mut out_hat: Vec<Option<Vec<Complex64>>> = vec![None; nb];
    let weight = spec.cell_volume();
    let mut e = [0.0; GRID_MAX_DIM];
    let mut y = [0.0; GRID_MAX_DIM];
    for j in 0..dim {
        if src_hat.is_empty() {
            break;
        }
        let mut kernel = vec![ZERO; bpts];
        for (q, k) in kernel.iter_mut().enumerate() {
            let idx = big.multi_index(q);
            for a in 0..dim {
                y[a] = h * big.wavenumber(idx[a]) as f64;
            }
            fundamental_solution(&y[..dim], &mut e[..dim]);
            *k = Complex64::new(weight * e[j], 0.0);
        }
        fft_nd(&mut kernel, dim, m, false);
        for (s, hat) in &src_hat {
            let (sign, t) = blade_product(1 << j, *s, Signature::Pos);
            let acc = out_hat[t].get_or_insert_with(|| vec![ZERO; bpts]);
            for ((a, k), x) in acc.iter_mut().zip(&kernel).zip(hat) {
                *a += k * x * sign;
            }
        }
    }

    let mut out = vec![0.0; npts * nb];
    for (t, acc) in out_hat.into_iter().enumerate() {
        if let Some(mut buf) = acc {
            fft_nd(&mut buf, dim, m, true);
            for p in 0..npts {
                out[t * npts + p] = buf[embed(p)].re;
            }
        }
    }
    MultivectorGridField::from_physical(spec, out)
}

/// `Σ_y w·E(x − y) ∆ Φ(y)` over the given sources, skipping `y = x`.
pub fn cauchy_direct<'a>(
    x: &[f64],
    weight: f64,
    sources: impl IntoIterator<Item = (&'a [f64], &'a [f64])>,
) -> Vec<f64> {
    let dim = x.len();
    let nb = 1 << dim;
    let mut out = vec![0.0; nb];
    let mut z = [0.0; GRID_MAX_DIM];
    let mut e = [0.0; GRID_MAX_DIM];
    let mut tmp = [0.0; MAX_BLADES];
    for (y, w) in sources {
        for a in 0..dim {
            z[a] = x[a] - y[a];
        }
        if z[..dim].iter().all(|&c| c == 0.0) {
            continue;
        }
        fundamental_solution(&z[..dim], &mut e[..dim]);
        kernels::vector_left_into(Signature::Pos, &e[..dim], w, &mut tmp[..nb]);
        out.iter_mut().zip(&tmp[..nb]).for_each(|(o, t)| *o += weight * t);
    }
    out
}

/// Direct-sum free-space Cauchy transform of a grid field at the point `x`.
pub fn cauchy_direct_field(phi: &MultivectorGridField, x: &[f64]) -> Result<Multivector> {
    let spec = *phi.spec();
    let (dim, npts, nb) = (spec.dim(), spec.npts(), spec.nblades());
    if x.len() != dim {
        return Err(Error::DimMismatch(x.len(), dim));
    }
    let v = phi.physical()?;
    let pts: Vec<([f64; GRID_MAX_DIM], [f64; MAX_BLADES])> = (0..npts)
        .filter(|&p| (0..nb).any(|s| v[s * npts + p] != 0.0))
        .map(|p| {
            let mut w = [0.0; MAX_BLADES];
            (0..nb).for_each(|s| w[s] = v[s * npts + p]);
            (spec.coords(p), w)
        })
        .collect();
    let out = cauchy_direct(x, spec.cell_volume(), pts.iter().map(|(y, w)| (&y[..dim], &w[..nb])));
    Multivector::from_coeffs(dim, &out)
}

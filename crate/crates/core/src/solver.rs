//! Dirac–Beltrami solves on the periodic grid.
//!
//! The equation `𝒟⁻F − ℳ𝒟⁺F = Ψ` is solved for `Φ = 𝒟⁺F` by the fixed-point
//! iteration `Φ ← 𝒮ₕ(ℳΦ + Ψ)`, after which `F = 𝒞⁺Φ + mean_value`. Here
//! `𝒮ₕ` is the Beurling transform on non-constant modes and `−I` on
//! constants. It is an isometry, so the iteration contracts with factor
//! `‖ℳ‖∞`. Writing `ω` for the mean of the limit `Φ`, the returned field
//! solves
//!
//! ```text
//! 𝒟⁻F − ℳ𝒟⁺F = Ψ + (I + ℳ)ω
//! ```
//!
//! and `ω = 0` whenever `Ψ` is compatible (for instance manufactured from a
//! periodic field). For the reduction of `div A∇u = div G` the extra term
//! shifts `G` by the constant `ω` and leaves the scalar equation unchanged.

use std::fmt;
use std::sync::Arc;

use crate::clifford::{grade_of, Multivector, Signature};
use crate::gridfield::{EndoGridField, EndoMode, GridSpec, MultivectorGridField, ScalarGridField, MAX_BLADES};
use crate::linmaps::{self, StructureField};
use crate::spectral::{self, MultiplierOp, Symbol, ZeroModePolicy};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;
/// Solves with `‖ℳ‖∞` at or above this value log a conditioning warning.
pub const CONDITIONING_WARN_M: f64 = 0.95;

type CoefficientFn = dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync;

/// A nonlinear pointwise coefficient `w ↦ ℳ(x, w)` on `ΛV` with Lipschitz
/// constant `k` and `ℳ(x, 0) = 0`.
#[derive(Clone)]
pub struct NonlinearCoefficient {
    dim: usize,
    lipschitz: f64,
    eval: Arc<CoefficientFn>,
}

impl fmt::Debug for NonlinearCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearCoefficient")
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

impl NonlinearCoefficient {
    /// `eval(x, w, out)` writes `ℳ(x, w)` into `out`.
    pub fn new(
        dim: usize,
        lipschitz: f64,
        eval: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&lipschitz) {
            return Err(Error::NotContraction(lipschitz));
        }
        Ok(NonlinearCoefficient { dim, lipschitz, eval: Arc::new(eval) })
    }

    /// `ℳ(x, w) = c·w`.
    pub fn linear(dim: usize, c: f64) -> Result<Self> {
        NonlinearCoefficient::new(dim, c.abs(), move |_, w, o| o.iter_mut().zip(w).for_each(|(o, w)| *o = c * w))
    }

    /// `ℳ(x, w)_s = k·sin(w_s)` on every blade coefficient.
    pub fn saturated(dim: usize, k: f64) -> Result<Self> {
        NonlinearCoefficient::new(dim, k, move |_, w, o| o.iter_mut().zip(w).for_each(|(o, w)| *o = k * w.sin()))
    }

    /// The nonlinear Cayley transform of a structure field, acting on the
    /// grade-1 part; other grades are sent to zero.
    pub fn from_structure(a: StructureField) -> Result<Self> {
        let dim = a.dim;
        let k = ((a.k - 2.0) / (a.k + 2.0)).sqrt();
        NonlinearCoefficient::new(dim, k, move |x, w, o| {
            o.iter_mut().for_each(|v| *v = 0.0);
            let zeta: Vec<f64> = (0..dim).map(|j| w[1 << j]).collect();
            let m = linmaps::nonlinear_cayley(&a, x, &zeta).expect("structure field satisfies the ellipticity bound");
            for (j, v) in m.into_iter().enumerate() {
                o[1 << j] = v;
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn eval(&self, x: &[f64], w: &[f64], out: &mut [f64]) {
        (self.eval)(x, w, out)
    }

    /// `x ↦ ℳ(x, F(x))`.
    pub fn apply(&self, f: &MultivectorGridField) -> Result<MultivectorGridField> {
        if f.spec().dim() != self.dim {
            return Err(Error::DimMismatch(f.spec().dim(), self.dim));
        }
        f.map_pointwise(|x, w, o| self.eval(x, w, o))
    }

    /// Largest `|ℳ(x,a) − ℳ(x,b)| / |a − b|` over `count` deterministic
    /// sample pairs at a few nodes of `spec`, with coefficients of size up to
    /// `scale`.
    pub fn sampled_lipschitz(&self, spec: &GridSpec, count: usize, scale: f64) -> f64 {
        let nb = 1 << self.dim;
        let golden = 0.618_033_988_749_895_f64;
        let mut t = 0.5;
        let mut next = || {
            t = (t + golden).fract();
            scale * (2.0 * t - 1.0)
        };
        let (mut a, mut b, mut fa, mut fb) =
            ([0.0; MAX_BLADES], [0.0; MAX_BLADES], [0.0; MAX_BLADES], [0.0; MAX_BLADES]);
        let mut worst: f64 = 0.0;
        for i in 0..count {
            let p = (i * 7919) % spec.npts();
            let x = spec.coords(p);
            for s in 0..nb {
                a[s] = next();
                b[s] = if i % 2 == 0 { a[s] + 1e-3 * next() } else { next() };
            }
            self.eval(&x[..self.dim], &a[..nb], &mut fa[..nb]);
            self.eval(&x[..self.dim], &b[..nb], &mut fb[..nb]);
            let num: f64 = (0..nb).map(|s| (fa[s] - fb[s]).powi(2)).sum::<f64>().sqrt();
            let den: f64 = (0..nb).map(|s| (a[s] - b[s]).powi(2)).sum::<f64>().sqrt();
            if den > 0.0 {
                worst = worst.max(num / den);
            }
        }
        worst
    }
}

/// Linear or nonlinear Beltrami coefficient.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Linear(EndoGridField),
    Nonlinear(NonlinearCoefficient),
}

impl Coefficient {
    fn apply(&self, f: &MultivectorGridField) -> Result<MultivectorGridField> {
        match self {
            Coefficient::Linear(m) => m.apply(f),
            Coefficient::Nonlinear(m) => m.apply(f),
        }
    }

    /// Contraction constant: `‖ℳ‖∞` or the Lipschitz constant.
    pub fn contraction(&self) -> f64 {
        match self {
            Coefficient::Linear(m) => m.applied_norm(),
            Coefficient::Nonlinear(m) => m.lipschitz(),
        }
    }
}

/// `𝒟⁻F − ℳ𝒟⁺F = Ψ` with `mean(F) = mean_value`.
#[derive(Clone, Debug)]
pub struct BeltramiProblem {
    pub spec: GridSpec,
    pub coefficient: Coefficient,
    pub source: MultivectorGridField,
    pub mean_value: Multivector,
    pub tol: f64,
    pub max_iter: usize,
}

impl BeltramiProblem {
    pub fn new(coefficient: Coefficient, source: MultivectorGridField) -> Self {
        let spec = *source.spec();
        BeltramiProblem {
            spec,
            coefficient,
            mean_value: Multivector::zero(spec.dim()),
            source,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn with_mean(mut self, mean_value: Multivector) -> Self {
        self.mean_value = mean_value;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.source.spec() != &self.spec {
            return Err(Error::SpecMismatch);
        }
        if self.mean_value.dim() != self.spec.dim() {
            return Err(Error::DimMismatch(self.mean_value.dim(), self.spec.dim()));
        }
        if let Coefficient::Linear(m) = &self.coefficient {
            if m.spec() != &self.spec {
                return Err(Error::SpecMismatch);
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::OutOfRange(format!("tolerance {} is not positive", self.tol)));
        }
        Ok(())
    }
}

/// Outcome of a Dirac–Beltrami solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖Φₖ₊₁ − Φₖ‖₂` per iteration.
    pub residual_history: Vec<f64>,
    /// `‖𝒟⁻F − ℳ𝒟⁺F − Ψ − (I + ℳ)h‖₂ / ‖Ψ‖₂` (absolute when `Ψ = 0`), with
    /// `h` the [`spectral::harmonic_part`] of `Φ`.
    pub final_residual: f64,
    /// Largest ratio of consecutive entries of `residual_history`.
    pub contraction_estimate: f64,
    /// Contraction constant of the coefficient.
    pub coefficient_bound: f64,
    /// Mean `ω` of `Φ`.
    pub harmonic_offset: Multivector,
    /// `‖h − ω‖₂ / ‖Φ‖₂`: the part of `h` on nonzero modes with vanishing
    /// discrete wavevector. It has no continuum counterpart and shrinks as
    /// the grid resolves `ℳΦ`.
    pub grid_harmonic: f64,
    pub norm_d: f64,
    pub norm_delta: f64,
    pub norm_f: f64,
    /// Distortion-inequality violations at points where the effective source
    /// vanishes.
    pub distortion_violation_count: usize,
}

/// `𝒮ₕ`: the Beurling transform with `−I` on constants.
pub fn beurling_harmonic() -> MultiplierOp {
    MultiplierOp::with_zero_mode(Symbol::Beurling, ZeroModePolicy::Negate)
}

fn iterate(p: &BeltramiProblem) -> Result<(MultivectorGridField, Vec<f64>)> {
    let s_h = beurling_harmonic();
    let mut phi = s_h.apply(&p.source)?;
    let mut history = Vec::new();
    for _ in 0..p.max_iter {
        let mut g = p.coefficient.apply(&phi)?;
        g.axpy(1.0, &p.source)?;
        let mut hat = g.into_spectral()?;
        s_h.apply_spectral(&mut hat)?;
        let next = hat.into_physical()?;
        let change = next.sub(&phi)?.l2_norm()?;
        let size = next.l2_norm()?;
        history.push(change);
        phi = next;
        if change <= p.tol * size {
            return Ok((phi, history));
        }
    }
    Err(Error::NoConvergence { iterations: p.max_iter, last_change: history.last().copied().unwrap_or(f64::NAN) })
}

fn finish(
    p: &BeltramiProblem,
    phi: MultivectorGridField,
    history: Vec<f64>,
) -> Result<(MultivectorGridField, SolveReport)> {
    let omega = phi.mean()?;
    let mut f = spectral::cauchy_plus(&phi)?;
    f.add_constant(&p.mean_value)?;

    let dp = spectral::dplus(&f)?;
    let dm = spectral::dminus(&f)?;
    let h = spectral::harmonic_part(&phi)?;
    let grid_harmonic = {
        let phi_norm = phi.l2_norm()?;
        let extra = h.mean_project().l2_norm()?;
        if phi_norm > 0.0 {
            extra / phi_norm
        } else {
            extra
        }
    };
    let mut rhs = p.source.clone();
    rhs.axpy(1.0, &h)?;
    rhs.axpy(1.0, &p.coefficient.apply(&h)?)?;
    let mut res = dm.sub(&p.coefficient.apply(&dp)?)?;
    res.axpy(-1.0, &rhs)?;
    let src = p.source.l2_norm()?;
    let abs = res.l2_norm()?;
    let final_residual = if src > 0.0 { abs / src } else { abs };

    let contraction_estimate = history.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let bound = p.coefficient.contraction();
    let rhs_norms = rhs.pointwise_norms()?;
    let rhs_scale = rhs_norms.iter().copied().fold(0.0, f64::max);
    let mask: Vec<bool> = rhs_norms.iter().map(|&r| r <= 1e-12 * rhs_scale).collect();
    let violations =
        distortion_count(&dp, &dm, linmaps::distortion_constant(bound.min(1.0 - 1e-12)), 1e-8, Some(&mask))?;

    let report = SolveReport {
        iterations: history.len(),
        final_residual,
        contraction_estimate,
        coefficient_bound: bound,
        harmonic_offset: omega,
        grid_harmonic,
        norm_d: spectral::d(&f)?.l2_norm()?,
        norm_delta: spectral::delta(&f)?.l2_norm()?,
        norm_f: f.l2_norm()?,
        distortion_violation_count: violations,
        residual_history: history,
    };
    Ok((f, report))
}

/// Neumann-series solve for a linear coefficient.
pub fn neumann_solve(p: &BeltramiProblem) -> Result<(MultivectorGridField, SolveReport)> {
    p.validate()?;
    let m = match &p.coefficient {
        Coefficient::Linear(m) => m.applied_norm(),
        Coefficient::Nonlinear(_) => return Err(Error::OutOfRange("neumann_solve needs a linear coefficient".into())),
    };
    if m >= 1.0 {
        return Err(Error::NotContraction(m));
    }
    if m >= CONDITIONING_WARN_M {
        log::warn!("coefficient norm {m:.4} ≥ {CONDITIONING_WARN_M}: slow convergence expected");
    }
    let (phi, history) = iterate(p)?;
    log::debug!("neumann_solve: {} iterations, M = {m:.4}", history.len());
    finish(p, phi, history)
}

/// Successive approximations for a nonlinear coefficient.
pub fn nonlinear_solve(p: &BeltramiProblem) -> Result<(MultivectorGridField, SolveReport)> {
    p.validate()?;
    let c = match &p.coefficient {
        Coefficient::Nonlinear(c) => c,
        Coefficient::Linear(_) => {
            return Err(Error::OutOfRange("nonlinear_solve needs a nonlinear coefficient".into()))
        }
    };
    let scale = p.source.max_abs().max(1.0);
    let sampled = c.sampled_lipschitz(&p.spec, 256, scale);
    if sampled > c.lipschitz() * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::NotContraction(sampled));
    }
    let (phi, history) = iterate(p)?;
    let (f, report) = finish(p, phi, history)?;
    if report.contraction_estimate > c.lipschitz() + 0.05 {
        return Err(Error::NotContraction(report.contraction_estimate));
    }
    Ok((f, report))
}

/// Number of points (within `mask`, if given) where
/// `|𝒟⁺F|² + |𝒟⁻F|² − (K/2)(|𝒟⁺F|² − |𝒟⁻F|²)` exceeds `slack·max|𝒟⁺F|²`.
pub fn distortion_count(
    dplus_f: &MultivectorGridField,
    dminus_f: &MultivectorGridField,
    k: f64,
    slack: f64,
    mask: Option<&[bool]>,
) -> Result<usize> {
    let a = dplus_f.pointwise_norms()?;
    let b = dminus_f.pointwise_norms()?;
    let scale = a.iter().chain(&b).fold(0.0f64, |m, x| m.max(x * x));
    let tol = slack * scale;
    Ok((0..a.len())
        .filter(|&p| mask.is_none_or(|m| m[p]))
        .filter(|&p| {
            let (a2, b2) = (a[p] * a[p], b[p] * b[p]);
            a2 + b2 - 0.5 * k * (a2 - b2) > tol
        })
        .count())
}

/// Distortion-inequality violations of `F` for the constant `K`.
pub fn distortion_check(f: &MultivectorGridField, k: f64, slack: f64, mask: Option<&[bool]>) -> Result<usize> {
    distortion_count(&spectral::dplus(f)?, &spectral::dminus(f)?, k, slack, mask)
}

/// `div A∇u = div G` with `mean(u) = mean_u`.
#[derive(Clone, Debug)]
pub struct EllipticProblem {
    pub spec: GridSpec,
    pub a: EndoGridField,
    pub rhs: MultivectorGridField,
    pub mean_u: f64,
    /// `min_x min_{|v|=1} ⟨A(x)v, v⟩`.
    pub lambda: f64,
    /// `max_x ‖A(x)‖`.
    pub big_lambda: f64,
}

impl EllipticProblem {
    /// `A` in vector mode, `G` a vector field.
    pub fn new(a: EndoGridField, rhs: MultivectorGridField, mean_u: f64) -> Result<Self> {
        let spec = *a.spec();
        if rhs.spec() != &spec {
            return Err(Error::SpecMismatch);
        }
        if rhs.grades(0.0)?.iter().any(|&k| k != 1) {
            return Err(Error::OutOfRange("G must be a vector field".into()));
        }
        let mut lambda = f64::INFINITY;
        for p in 0..spec.npts() {
            let q = a.map_at(p).min_quadratic_form();
            if q <= 0.0 {
                return Err(Error::NotPositive(q));
            }
            lambda = lambda.min(q);
        }
        let big_lambda = a.sup_norm();
        let a = match a.mode() {
            EndoMode::Isotropic => EndoGridField::from_point_fn(spec, EndoMode::Vector, |p| Ok(a.map_at(p)))?,
            _ => a.with_mode(EndoMode::Vector)?,
        };
        Ok(EllipticProblem { spec, a, rhs, mean_u, lambda, big_lambda })
    }
}

/// `ℳ = 𝒞(A)` in exterior-extension mode on grades `≥ 1`, `Ψ = (I + ℳ)G`.
pub fn reduce_second_order(p: &EllipticProblem) -> Result<BeltramiProblem> {
    let m = p.a.with_mode(EndoMode::Extension { min_grade: 1 })?.map(linmaps::cayley)?;
    let mut psi = p.rhs.clone();
    psi.axpy(1.0, &m.apply(&p.rhs)?)?;
    Ok(BeltramiProblem::new(Coefficient::Linear(m), psi).with_mean(Multivector::scalar(p.spec.dim(), p.mean_u)))
}

/// `u = ⟨F⟩₀`.
pub fn extract_scalar(f: &MultivectorGridField) -> Result<ScalarGridField> {
    ScalarGridField::from_values(*f.spec(), f.blade(0)?.to_vec())
}

/// `A∇u − G`.
pub fn flux_defect(p: &EllipticProblem, u: &ScalarGridField) -> Result<MultivectorGridField> {
    let grad = u.gradient();
    p.a.apply(&grad)?.sub(&p.rhs)
}

/// `‖|ξ|⁻¹ δ(A∇u − G)‖₂ / ‖G‖₂` (absolute when `G = 0`).
pub fn residual_second_order(p: &EllipticProblem, u: &ScalarGridField) -> Result<f64> {
    let div = spectral::delta(&flux_defect(p, u)?)?;
    let lap = spectral::inverse_laplacian(&div)?;
    let neg = spectral::d(&lap)?.l2_norm()?;
    let g = p.rhs.l2_norm()?;
    Ok(if g > 0.0 { neg / g } else { neg })
}

/// `‖d⟨F⟩₂‖₂ / ‖F‖₂`.
pub fn dv_residual(f: &MultivectorGridField) -> Result<f64> {
    let num = spectral::d(&f.grade_project(2))?.l2_norm()?;
    let den = f.l2_norm()?;
    Ok(if den > 0.0 { num / den } else { num })
}

/// Bivector potential with residuals of its two defining equations.
#[derive(Clone, Debug)]
pub struct Gauge {
    pub v: MultivectorGridField,
    /// `‖dv‖₂ / ‖w‖₂`.
    pub d_residual: f64,
    /// `‖δv − w‖₂ / ‖w‖₂` with `w` the mean-free part of `A∇u − G`.
    pub delta_residual: f64,
}

/// Mean-free `v` with `dv = 0`, `δv = A∇u − G − mean(A∇u − G)`.
pub fn gauge_reconstruct(p: &EllipticProblem, u: &ScalarGridField, compat_tol: f64) -> Result<Gauge> {
    let compat = residual_second_order(p, u)?;
    if compat > compat_tol {
        return Err(Error::Compatibility(format!("δ(A∇u − G) residual {compat:.3e} > {compat_tol:.1e}")));
    }
    let w = flux_defect(p, u)?.mean_project();
    let v = spectral::cauchy_plus(&w)?.grade_project(2);
    let scale = w.l2_norm()?;
    let rel = |x: f64| if scale > 0.0 { x / scale } else { x };
    let d_residual = rel(spectral::d(&v)?.l2_norm()?);
    let delta_residual = rel(spectral::delta(&v)?.sub(&w)?.l2_norm()?);
    Ok(Gauge { v, d_residual, delta_residual })
}

/// `hⁿ Σ ⟨A∇u, ∇u⟩` restricted to `mask` (all points when `None`).
pub fn energy(p: &EllipticProblem, u: &ScalarGridField, mask: Option<&[bool]>) -> Result<f64> {
    let grad = u.gradient();
    let flux = p.a.apply(&grad)?;
    Ok(masked_inner(&flux, &grad, mask)? * p.spec.cell_volume())
}

/// `hⁿ Σ ⟨dF, δF⟩` restricted to `mask`.
pub fn null_lagrangian_density(f: &MultivectorGridField, mask: Option<&[bool]>) -> Result<f64> {
    Ok(masked_inner(&spectral::d(f)?, &spectral::delta(f)?, mask)? * f.spec().cell_volume())
}

fn masked_inner(a: &MultivectorGridField, b: &MultivectorGridField, mask: Option<&[bool]>) -> Result<f64> {
    let npts = a.spec().npts();
    let (x, y) = (a.physical()?, b.physical()?);
    let mut acc = 0.0;
    for s in 0..a.spec().nblades() {
        for p in 0..npts {
            if mask.is_none_or(|m| m[p]) {
                acc += x[s * npts + p] * y[s * npts + p];
            }
        }
    }
    Ok(acc)
}

/// Residuals of the localization identities for a cutoff `η`.
#[derive(Clone, Debug)]
pub struct LocalizationReport {
    /// `‖ηF − 𝒞⁻Θ − mean(ηF)‖₂ / ‖ηF‖₂` with `Θ = (I − ℳ₀𝒮)⁻¹σ_ℳ(∇η, x)F`.
    pub recursion: f64,
    /// `‖η𝒟⁺F − (𝒮Θ − ∇η∆F)‖₂ / ‖η𝒟⁺F‖₂`.
    pub dplus: f64,
    /// `‖η𝒟⁻F − (Θ − ∇η∇F)‖₂ / ‖η𝒟⁻F‖₂`.
    pub dminus: f64,
    pub iterations: usize,
}

/// Localization identities for a field `F` solving `𝒟⁻F = ℳ𝒟⁺F` on the
/// support of `η`. `ℳ₀` is `ℳ` set to zero off that support.
pub fn localization_check(
    f: &MultivectorGridField,
    m: &EndoGridField,
    eta: &ScalarGridField,
    tol: f64,
    max_iter: usize,
) -> Result<LocalizationReport> {
    let inside: Vec<bool> = eta.values().iter().map(|&e| e != 0.0).collect();
    let m0 = m.masked(&inside)?;
    let bound = m0.applied_norm();
    if bound >= 1.0 {
        return Err(Error::NotContraction(bound));
    }
    let sigma = crate::gridfield::symbol_source(eta, m, f)?;
    let s = MultiplierOp::new(Symbol::Beurling);
    let mut theta = sigma.clone();
    let mut iterations = 0;
    loop {
        if iterations >= max_iter {
            return Err(Error::NoConvergence { iterations, last_change: f64::NAN });
        }
        iterations += 1;
        let mut next = m0.apply(&s.apply(&theta)?)?;
        next.axpy(1.0, &sigma)?;
        let change = next.sub(&theta)?.l2_norm()?;
        let size = next.l2_norm()?;
        theta = next;
        if change <= tol * size {
            break;
        }
    }
    let rel = |a: &MultivectorGridField, b: &MultivectorGridField| -> Result<f64> {
        let den = a.l2_norm()?;
        let num = a.sub(b)?.l2_norm()?;
        Ok(if den > 0.0 { num / den } else { num })
    };
    let eta_f = crate::gridfield::cutoff_apply(eta, f)?;
    let mut rebuilt = spectral::cauchy_minus(&theta)?;
    rebuilt.add_constant(&eta_f.mean()?)?;
    let grad = eta.gradient();
    let eta_dp = crate::gridfield::cutoff_apply(eta, &spectral::dplus(f)?)?;
    let eta_dm = crate::gridfield::cutoff_apply(eta, &spectral::dminus(f)?)?;
    let dp_model = s.apply(&theta)?.sub(&grad.product(f, Signature::Pos)?)?;
    let dm_model = theta.sub(&grad.product(f, Signature::Neg)?)?;
    Ok(LocalizationReport {
        recursion: rel(&eta_f, &rebuilt)?,
        dplus: rel(&eta_dp, &dp_model)?,
        dminus: rel(&eta_dm, &dm_model)?,
        iterations,
    })
}

/// Both sides of the Caccioppoli inequality and their ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeyersReport {
    /// `hⁿ Σ |η|ᵖ |∇⊗F|ᵖ`.
    pub lhs: f64,
    /// `hⁿ Σ |∇η|ᵖ |F|ᵖ`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Admissible exponents: `2 ≤ p ≤ 2n/(n − 2)` and `p < 1 + 1/M`.
pub fn meyers_experiment(f: &MultivectorGridField, eta: &ScalarGridField, p: f64, m: f64) -> Result<MeyersReport> {
    let n = f.spec().dim() as f64;
    let upper = if n > 2.0 { 2.0 * n / (n - 2.0) } else { f64::INFINITY };
    let p_m = if m > 0.0 { 1.0 + 1.0 / m } else { f64::INFINITY };
    if !(p >= 2.0 && p <= upper && p < p_m) {
        return Err(Error::OutOfRange(format!("p = {p} outside [2, {upper}] ∩ [2, {p_m})")));
    }
    let npts = f.spec().npts();
    let mut grad2 = vec![0.0; npts];
    for j in 0..f.spec().dim() {
        let dj = spectral::partial(f, j)?;
        for (g, x) in grad2.iter_mut().zip(dj.pointwise_norms()?) {
            *g += x * x;
        }
    }
    let fnorm = f.pointwise_norms()?;
    let eta_grad = eta.gradient().pointwise_norms()?;
    let h = f.spec().cell_volume();
    let lhs: f64 = eta.values().iter().zip(&grad2).map(|(e, g)| (e.abs() * g.sqrt()).powf(p)).sum::<f64>() * h;
    let rhs: f64 = eta_grad.iter().zip(&fnorm).map(|(e, x)| (e * x).powf(p)).sum::<f64>() * h;
    Ok(MeyersReport { lhs, rhs, ratio: lhs / rhs })
}

/// How the `Lᵖ` norm of `𝒮` is modelled in [`critical_exponent`].
pub enum NormModel<'a> {
    /// `‖𝒮‖_p = max(p, p′) − 1`.
    Conjecture,
    /// A user-supplied increasing function of `p ≥ 2`.
    Function(&'a dyn Fn(f64) -> f64),
}

/// The `p ≥ 2` with `M·‖𝒮‖_p = 1`.
pub fn critical_exponent(m: f64, model: NormModel<'_>) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::OutOfRange(format!("M = {m} outside (0, 1)")));
    }
    match model {
        NormModel::Conjecture => Ok(1.0 + 1.0 / m),
        NormModel::Function(norm) => {
            let g = |p: f64| m * norm(p) - 1.0;
            let (mut lo, mut hi) = (2.0, 4.0);
            if g(lo) >= 0.0 {
                return Ok(lo);
            }
            while g(hi) < 0.0 {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(Error::NoConvergence { iterations: 40, last_change: hi });
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-14 * hi {
                    break;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// `f_n^k(x) = nx/(n − kx)`.
pub fn sobolev_iterate(n: usize, k: usize, x: f64) -> Result<f64> {
    let den = n as f64 - k as f64 * x;
    if den <= 0.0 {
        return Err(Error::OutOfRange(format!("iteration past the stopping grade: n − kx = {den}")));
    }
    Ok(n as f64 * x / den)
}

/// Relative residual `‖𝒟⁺(F̂★) + ℳ𝒟⁻(F̂★) − Ψ★‖₂ / ‖𝒟⁺(F̂★)‖₂` of the dual
/// equation, for `F` solving `𝒟⁻F − ℳ𝒟⁺F = Ψ` with a self-dual `ℳ`.
///
/// Follows from `(𝒟⁻F)★ = 𝒟⁺(F̂★)`, `(𝒟⁺F)★ = −𝒟⁻(F̂★)` and `(ℳw)★ = ℳ(w★)`;
/// the last needs `ℳ` to commute with `★` on the grades that `𝒟±F` occupies.
pub fn hodge_duality_check(f: &MultivectorGridField, m: &EndoGridField, psi: &MultivectorGridField) -> Result<f64> {
    let spec = *f.spec();
    match m.mode() {
        EndoMode::Isotropic => {}
        EndoMode::Vector => return Err(Error::NotSelfDual("vector-mode coefficient".into())),
        EndoMode::Extension { .. } => {
            for p in 0..spec.npts() {
                if !linmaps::is_self_dual(&m.map_at(p), 1e-10) {
                    return Err(Error::NotSelfDual(format!("ℳ at node {p}")));
                }
            }
        }
    }
    let g = f.involution().hodge_right()?;
    let dp = spectral::dplus(&g)?;
    let mut r = dp.add(&m.apply(&spectral::dminus(&g)?)?)?;
    r.axpy(-1.0, &psi.hodge_right()?)?;
    let den = dp.l2_norm()?;
    let num = r.l2_norm()?;
    Ok(if den > 0.0 { num / den } else { num })
}

/// Whether every blade with grade in `grades` is within `tol` of zero.
pub fn grades_vanish(f: &MultivectorGridField, grades: &[usize], tol: f64) -> Result<bool> {
    let npts = f.spec().npts();
    let v = f.physical()?;
    Ok((0..f.spec().nblades())
        .filter(|&s| grades.contains(&grade_of(s)))
        .all(|s| v[s * npts..(s + 1) * npts].iter().all(|x| x.abs() <= tol)))
}

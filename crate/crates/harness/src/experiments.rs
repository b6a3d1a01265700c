//! Convergence sweeps and local-estimate experiments.

use crate::config::ExperimentConfig;
use crate::fields::{self, norm, poly_bump, smooth_bump, wrapped_offset, HarnessRng, SmoothScalar};
use crate::recipes::{self, manufactured_coefficient, RotationField};
use crate::report::{Bound, ReportRow};
use dirac_beltrami::clifford::{grade_of, Multivector};
use dirac_beltrami::gridfield::{EndoGridField, EndoMode, GridSpec, MultivectorGridField, ScalarGridField};
use dirac_beltrami::linmaps::VectorMap;
use dirac_beltrami::solver::{
    self, BeltramiProblem, Coefficient, EllipticProblem, NonlinearCoefficient, NormModel, SolveReport,
};
use dirac_beltrami::spectral;
use dirac_beltrami::Result;
use num_complex::Complex64;

fn rel_err(a: &MultivectorGridField, exact: &MultivectorGridField) -> Result<f64> {
    let den = exact.l2_norm()?;
    let num = a.sub(exact)?.l2_norm()?;
    Ok(if den > 0.0 { num / den } else { num })
}

fn n_param(spec: &GridSpec) -> String {
    format!("n={};N={}", spec.dim(), spec.points_per_axis())
}

// ---------------------------------------------------------------- Cauchy ball

/// Relative `L²` and absolute `L∞` errors of the free-space transform of
/// the indicator of the unit ball in a box of side 4, against `x/3` inside
/// and `x/(3|x|³)` outside.
pub fn cauchy_ball_errors(points: usize) -> Result<(f64, f64)> {
    let spec = GridSpec::new(3, points, 4.0)?;
    let c = spec.center();
    let chi = MultivectorGridField::sample_blade(spec, 0, |x| {
        let d: Vec<f64> = (0..3).map(|a| x[a] - c[a]).collect();
        if norm(&d) <= 1.0 {
            1.0
        } else {
            0.0
        }
    });
    let f = spectral::cauchy_free(&chi, 2)?;
    let (mut err2, mut nrm2, mut linf) = (0.0, 0.0, 0.0f64);
    for p in 0..spec.npts() {
        let x = spec.coords(p);
        let d: Vec<f64> = (0..3).map(|a| x[a] - c[a]).collect();
        let r = norm(&d);
        let scale = if r <= 1.0 { 1.0 / 3.0 } else { 1.0 / (3.0 * r * r * r) };
        let mut e2 = 0.0;
        for (j, dj) in d.iter().enumerate() {
            let got = f.blade(1 << j)?[p];
            let exact = scale * dj;
            e2 += (got - exact).powi(2);
            nrm2 += exact * exact;
        }
        err2 += e2;
        linf = linf.max(e2.sqrt());
    }
    Ok(((err2 / nrm2).sqrt(), linf))
}

/// Ball sweep: errors per level and error ratios between consecutive
/// levels. The `L²` bound applies at `N = 128`, the ratio window to the
/// `64 → 128` step.
pub fn cauchy_ball(levels: &[usize], seed: u64) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let mut prev: Option<(usize, f64, f64)> = None;
    for &n in levels {
        let params = format!("n=3;N={n};L=4");
        match cauchy_ball_errors(n) {
            Ok((l2, linf)) => {
                let bound = if n == 128 { Bound::AtMost(0.02) } else { Bound::Record };
                rows.push(ReportRow::new("cauchy-ball", "l2-error", &params, l2, bound, seed));
                rows.push(ReportRow::new("cauchy-ball", "linf-error", &params, linf, Bound::Record, seed));
                if let Some((n0, l2_0, linf_0)) = prev {
                    let params = format!("n=3;N={n0}->{n};L=4");
                    let bound = if (n0, n) == (64, 128) { Bound::Within(1.7, 2.6) } else { Bound::Record };
                    rows.push(ReportRow::new("cauchy-ball", "l2-ratio", &params, l2_0 / l2, bound, seed));
                    rows.push(ReportRow::new("cauchy-ball", "linf-ratio", &params, linf_0 / linf, Bound::Record, seed));
                }
                prev = Some((n, l2, linf));
            }
            Err(e) => rows.push(ReportRow::failed("cauchy-ball", "l2-error", &params, seed, e)),
        }
    }
    rows
}

// ------------------------------------------------------------------- Hölder

/// Parameters of the Hölder experiment: density `|x − c|^{−a}` on the
/// lattice points of a ball of `radius_cells` cells, two-point differences of
/// the free-space transform at `c ± s h e₁` for `s = 2⁰ … 2^{max_power}`.
#[derive(Clone, Copy, Debug)]
pub struct HolderParams {
    pub exponent: f64,
    pub radius_cells: i64,
    pub max_power: u32,
    /// Midpoint subcells per axis for the cell average at the centre node.
    pub subcells: usize,
}

impl Default for HolderParams {
    fn default() -> Self {
        HolderParams { exponent: 0.49, radius_cells: 160, max_power: 7, subcells: 64 }
    }
}

/// Separations `2sh` and quotients `|𝒞⁺Φ(c + she₁) − 𝒞⁺Φ(c − she₁)|`.
pub fn holder_quotients(p: HolderParams) -> Result<Vec<(f64, f64)>> {
    let h = 1.0 / p.radius_cells as f64;
    let a = p.exponent;
    let centre_value = {
        let m = p.subcells;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let z = [i, j, k].map(|t| (t as f64 + 0.5) / m as f64 - 0.5);
                    acc += norm(&z).powf(-a);
                }
            }
        }
        acc / (m * m * m) as f64 * h.powf(-a)
    };
    let evals: Vec<[f64; 3]> = (0..=p.max_power)
        .flat_map(|j| {
            let s = (1u64 << j) as f64 * h;
            [[s, 0.0, 0.0], [-s, 0.0, 0.0]]
        })
        .collect();
    let mut sums = vec![vec![0.0; 8]; evals.len()];
    let rc = p.radius_cells;
    let weight = h * h * h;
    for i in -rc..=rc {
        let mut pos = Vec::new();
        let mut val = Vec::new();
        for j in -rc..=rc {
            for k in -rc..=rc {
                if i * i + j * j + k * k > rc * rc {
                    continue;
                }
                let y = [i as f64 * h, j as f64 * h, k as f64 * h];
                let r = norm(&y);
                let mut w = [0.0; 8];
                w[0] = if r == 0.0 { centre_value } else { r.powf(-a) };
                pos.push(y);
                val.push(w);
            }
        }
        for (x, acc) in evals.iter().zip(sums.iter_mut()) {
            let part = spectral::cauchy_direct(x, weight, pos.iter().zip(&val).map(|(y, w)| (&y[..], &w[..])));
            acc.iter_mut().zip(part).for_each(|(s, v)| *s += v);
        }
    }
    Ok((0..=p.max_power as usize)
        .map(|j| {
            let s = (1u64 << j) as f64 * h;
            let d: Vec<f64> = sums[2 * j].iter().zip(&sums[2 * j + 1]).map(|(u, v)| u - v).collect();
            (2.0 * s, norm(&d))
        })
        .collect())
}

/// Least-squares slope of `log q` against `log s`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn holder(p: HolderParams, seed: u64) -> Vec<ReportRow> {
    let params = format!("n=3;a={};R={}h", p.exponent, p.radius_cells);
    match holder_quotients(p) {
        Ok(q) => {
            let mut rows: Vec<ReportRow> = q
                .iter()
                .map(|(s, v)| {
                    ReportRow::new("holder", "quotient", &format!("{params};sep={:.6}", s), *v, Bound::Record, seed)
                })
                .collect();
            let decades = (q.last().map_or(1.0, |l| l.0) / q[0].0).log10();
            rows.push(ReportRow::new("holder", "decades", &params, decades, Bound::AtLeast(2.0), seed));
            rows.push(ReportRow::new("holder", "exponent", &params, log_log_slope(&q), Bound::Within(0.4, 0.6), seed));
            rows
        }
        Err(e) => vec![ReportRow::failed("holder", "exponent", &params, seed, e)],
    }
}

// ------------------------------------------------------ manufactured solves

/// Outcome of a solve against a known exact field.
#[derive(Clone, Debug)]
pub struct ManufacturedOutcome {
    pub error: f64,
    pub report: SolveReport,
    pub field: MultivectorGridField,
    pub exact: MultivectorGridField,
}

/// `F*` random band-limited, `Ψ = 𝒟⁻F* − ℳ𝒟⁺F*`, solve, compare with `F*`.
pub fn manufactured_linear(spec: GridSpec, m: f64, tol: f64, rng: &mut HarnessRng) -> Result<ManufacturedOutcome> {
    let coeff = manufactured_coefficient(spec, m, rng, false)?;
    let exact = fields::random_field(spec, rng, |_| true)?;
    let psi = spectral::dminus(&exact)?.sub(&coeff.apply(&spectral::dplus(&exact)?)?)?;
    let problem = BeltramiProblem::new(Coefficient::Linear(coeff), psi).with_mean(exact.mean()?).with_tol(tol);
    let (field, report) = solver::neumann_solve(&problem)?;
    Ok(ManufacturedOutcome { error: rel_err(&field, &exact)?, report, field, exact })
}

pub fn manufactured_nonlinear(spec: GridSpec, k: f64, tol: f64, rng: &mut HarnessRng) -> Result<ManufacturedOutcome> {
    let coeff = NonlinearCoefficient::saturated(spec.dim(), k)?;
    let exact = fields::random_field(spec, rng, |_| true)?;
    let psi = spectral::dminus(&exact)?.sub(&coeff.apply(&spectral::dplus(&exact)?)?)?;
    let problem = BeltramiProblem::new(Coefficient::Nonlinear(coeff), psi).with_mean(exact.mean()?).with_tol(tol);
    let (field, report) = solver::nonlinear_solve(&problem)?;
    Ok(ManufacturedOutcome { error: rel_err(&field, &exact)?, report, field, exact })
}

/// Iteration budget `⌈log tol / log M⌉ + 5`.
pub fn iteration_budget(m: f64, tol: f64) -> f64 {
    let steps = tol.ln() / m.ln();
    let nearest = steps.round();
    (if (steps - nearest).abs() < 1e-9 { nearest } else { steps.ceil() }) + 5.0
}

/// Manufactured linear solves for every `M` and grid.
pub fn manufactured_sweep(specs: &[GridSpec], ms: &[f64], seed: u64) -> Vec<ReportRow> {
    let tol = solver::DEFAULT_TOL;
    let mut rows = Vec::new();
    for spec in specs {
        for &m in ms {
            let params = format!("{};M={m}", n_param(spec));
            let mut rng = fields::rng(seed ^ (spec.dim() as u64) << 8 ^ (m * 1000.0) as u64);
            match manufactured_linear(*spec, m, tol, &mut rng) {
                Ok(out) => {
                    rows.push(ReportRow::new("manufactured", "error", &params, out.error, Bound::AtMost(1e-7), seed));
                    rows.push(ReportRow::new(
                        "manufactured",
                        "rate",
                        &params,
                        out.report.contraction_estimate,
                        Bound::AtMost(m + 0.05),
                        seed,
                    ));
                    rows.push(ReportRow::new(
                        "manufactured",
                        "iterations",
                        &params,
                        out.report.iterations as f64,
                        Bound::AtMost(iteration_budget(m, tol)),
                        seed,
                    ));
                    rows.push(ReportRow::new(
                        "manufactured",
                        "residual",
                        &params,
                        out.report.final_residual,
                        Bound::AtMost(1e-8),
                        seed,
                    ));
                }
                Err(e) => rows.push(ReportRow::failed("manufactured", "error", &params, seed, e)),
            }
        }
    }
    rows
}

/// Nonlinear manufactured solve and the zero-source check.
pub fn nonlinear_sweep(specs: &[GridSpec], k: f64, seed: u64) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for spec in specs {
        let params = format!("{};k={k}", n_param(spec));
        let mut rng = fields::rng(seed ^ 0x6e6c ^ spec.dim() as u64);
        match manufactured_nonlinear(*spec, k, solver::DEFAULT_TOL, &mut rng) {
            Ok(out) => {
                rows.push(ReportRow::new("nonlinear", "error", &params, out.error, Bound::AtMost(1e-7), seed));
                rows.push(ReportRow::new(
                    "nonlinear",
                    "rate",
                    &params,
                    out.report.contraction_estimate,
                    Bound::AtMost(k + 0.05),
                    seed,
                ));
            }
            Err(e) => rows.push(ReportRow::failed("nonlinear", "error", &params, seed, e)),
        }
        let mean = fields::random_multivector(spec.dim(), &mut rng);
        let zero = NonlinearCoefficient::saturated(spec.dim(), k).and_then(|c| {
            let p = BeltramiProblem::new(Coefficient::Nonlinear(c), MultivectorGridField::zeros(*spec))
                .with_mean(mean.clone());
            let (f, _) = solver::nonlinear_solve(&p)?;
            let mut constant = MultivectorGridField::zeros(*spec);
            constant.add_constant(&mean)?;
            f.max_abs_diff(&constant)
        });
        rows.push(match zero {
            Ok(d) => ReportRow::new("nonlinear", "zero-source", &params, d, Bound::AtMost(0.0), seed),
            Err(e) => ReportRow::failed("nonlinear", "zero-source", &params, seed, e),
        });
    }
    rows
}

// -------------------------------------------------------- second order loop

/// `u` solving `aΔu = div G` with `mean(u) = mean_u`, computed mode by mode.
pub fn fourier_poisson(a: f64, g: &MultivectorGridField, mean_u: f64) -> Result<Vec<f64>> {
    let spec = *g.spec();
    let n = spec.dim();
    let npts = spec.npts();
    let ghat = g.fft()?;
    let gh = ghat.spectral()?;
    let mut u = vec![Complex64::new(0.0, 0.0); npts];
    for (p, up) in u.iter_mut().enumerate() {
        let xi = spec.wavevector(p);
        let xi2: f64 = xi[..n].iter().map(|x| x * x).sum();
        if xi2 == 0.0 {
            continue;
        }
        let div: Complex64 = (0..n).map(|j| Complex64::new(0.0, xi[j]) * gh[(1 << j) * npts + p]).sum();
        *up = -div / (a * xi2);
    }
    let mut data = vec![Complex64::new(0.0, 0.0); npts * spec.nblades()];
    data[..npts].copy_from_slice(&u);
    let f = MultivectorGridField::from_spectral(spec, data)?.into_physical()?;
    Ok(f.blade(0)?.iter().map(|x| x + mean_u).collect())
}

/// Constant `A = aI`: relative error of the extracted `u` against
/// [`fourier_poisson`].
pub fn second_order_constant(spec: GridSpec, a: f64, rng: &mut HarnessRng) -> Result<f64> {
    let g = fields::random_field(spec, rng, |s| grade_of(s) == 1)?;
    let mean_u = 0.3;
    let amap = EndoGridField::constant(spec, EndoMode::Vector, &VectorMap::scaled_identity(spec.dim(), a))?;
    let p = EllipticProblem::new(amap, g.clone(), mean_u)?;
    let (f, _) = solver::neumann_solve(&solver::reduce_second_order(&p)?)?;
    let u = solver::extract_scalar(&f)?;
    let exact = fourier_poisson(a, &g, mean_u)?;
    let num: f64 = u.values().iter().zip(&exact).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = exact.iter().map(|y| (y - mean_u).powi(2)).sum::<f64>().sqrt();
    Ok(num / den)
}

/// Measurements of the variable-coefficient second-order loop.
#[derive(Clone, Debug)]
pub struct SecondOrderOutcome {
    pub coefficient_bound: f64,
    pub equation_residual: f64,
    pub dv_residual: f64,
    /// `|ω|` after the divergence-free correction.
    pub offset: f64,
    /// `|∫_U⟨dF,δF⟩ − ∫_U⟨A∇u,∇u⟩| / ∫_U⟨A∇u,∇u⟩`.
    pub energy_defect: f64,
    pub region_energy: f64,
    /// `∫⟨dF,δF⟩` and `∫⟨A∇u,∇u⟩` over the whole torus.
    pub global_null_lagrangian: f64,
    pub global_energy: f64,
}

/// Smooth SPD `A` with `λ = 0.5`, `Λ = 2`. `G` is a sum of vector bumps away
/// from the ball `U` of radius 0.15 about the centre plus a divergence-free
/// field of slabs, also away from `U`, chosen so that `ω = 0`. On `U` the
/// pointwise identity `⟨dF,δF⟩ = ⟨A∇u,∇u⟩` then holds.
pub fn second_order_variable(spec: GridSpec, rng: &mut HarnessRng) -> Result<SecondOrderOutcome> {
    let n = spec.dim();
    let l = spec.box_length();
    let c = spec.center();
    let a = recipes::smooth_spd(spec, 0.5, 2.0, rng)?;
    let region = 0.15 * l;
    let bumps: Vec<(Vec<f64>, Vec<f64>)> = (0..3)
        .map(|_| {
            let mut dir = fields::random_unitish_vector(n, rng).vector_part();
            let r = norm(&dir);
            dir.iter_mut().for_each(|d| *d /= r);
            let centre: Vec<f64> = (0..n).map(|a| c[a] + 0.32 * l * dir[a]).collect();
            let amp = fields::random_vector(n, rng).vector_part();
            (centre, amp)
        })
        .collect();
    let g0 = MultivectorGridField::sample(spec, |x| {
        let mut v = vec![0.0; n];
        for (centre, amp) in &bumps {
            let b = smooth_bump(norm(&wrapped_offset(x, centre, l)), 0.12 * l);
            v.iter_mut().zip(amp).for_each(|(vi, ai)| *vi += b * ai);
        }
        Multivector::vector(&v).expect("n components")
    })?;

    let mut slabs = MultivectorGridField::zeros(spec);
    for j in 0..n {
        let k = (j + 1) % n;
        let prof = MultivectorGridField::sample_blade(spec, 1 << j, |x| {
            let mut d = wrapped_offset(x, &c[..n], l);
            d[j] = 0.0;
            d[k] -= 0.35 * l;
            smooth_bump(norm(&d), 0.1 * l)
        });
        let mean = prof.mean()?.get(1 << j);
        slabs.axpy(1.0 / mean, &prof)?;
    }

    let solve = |g: &MultivectorGridField| -> Result<(EllipticProblem, MultivectorGridField, SolveReport)> {
        let p = EllipticProblem::new(a.clone(), g.clone(), 0.0)?;
        let (f, r) = solver::neumann_solve(&solver::reduce_second_order(&p)?)?;
        Ok((p, f, r))
    };
    let (_, _, first) = solve(&g0)?;
    let omega0 = first.harmonic_offset.clone();
    let correction = slabs.map_pointwise(|_, w, out| {
        for j in 0..n {
            out[1 << j] = w[1 << j] * omega0.get(1 << j);
        }
    })?;
    let g = g0.add(&correction)?;
    let (p, f, report) = solve(&g)?;
    let u = solver::extract_scalar(&f)?;

    let mask: Vec<bool> =
        (0..spec.npts()).map(|q| norm(&wrapped_offset(&spec.coords(q)[..n], &c[..n], l)) < region).collect();
    let g_on_region =
        (0..spec.npts()).filter(|&q| mask[q]).map(|q| g.at(q).map(|w| w.norm())).collect::<Result<Vec<_>>>()?;
    debug_assert!(g_on_region.iter().all(|&v| v < 1e-12));
    let e_region = solver::energy(&p, &u, Some(&mask))?;
    let nl_region = solver::null_lagrangian_density(&f, Some(&mask))?;
    Ok(SecondOrderOutcome {
        coefficient_bound: solver::reduce_second_order(&p)?.coefficient.contraction(),
        equation_residual: solver::residual_second_order(&p, &u)?,
        dv_residual: solver::dv_residual(&f)?,
        offset: report.harmonic_offset.norm(),
        energy_defect: (nl_region - e_region).abs() / e_region,
        region_energy: e_region,
        global_null_lagrangian: solver::null_lagrangian_density(&f, None)?,
        global_energy: solver::energy(&p, &u, None)?,
    })
}

/// Second-order checks per grid. The energy identity is bounded on grids
/// flagged `true` and recorded on the others: it holds up to the flux
/// content on the nonzero modes with vanishing discrete wavevector, which
/// decays with resolution.
pub fn second_order_sweep(specs: &[(GridSpec, bool)], seed: u64) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for (spec, energy_bounded) in specs {
        for a in [0.5, 2.0] {
            let params = format!("{};a={a}", n_param(spec));
            let mut rng = fields::rng(seed ^ 0x736f ^ spec.dim() as u64);
            rows.push(match second_order_constant(*spec, a, &mut rng) {
                Ok(e) => ReportRow::new("second-order", "constant-error", &params, e, Bound::AtMost(1e-8), seed),
                Err(e) => ReportRow::failed("second-order", "constant-error", &params, seed, e),
            });
        }
        let params = format!("{};lambda=0.5;Lambda=2", n_param(spec));
        let mut rng = fields::rng(seed ^ 0x7661 ^ spec.dim() as u64);
        match second_order_variable(*spec, &mut rng) {
            Ok(o) => {
                let row = |check: &str, v: f64, b: Bound| ReportRow::new("second-order", check, &params, v, b, seed);
                rows.push(row(
                    "coefficient-bound",
                    o.coefficient_bound,
                    Bound::Within(1.0 / 3.0 - 1e-12, 1.0 / 3.0 + 1e-12),
                ));
                rows.push(row("equation-residual", o.equation_residual, Bound::AtMost(1e-7)));
                rows.push(row("dv-residual", o.dv_residual, Bound::AtMost(1e-8)));
                rows.push(row("offset", o.offset, Bound::AtMost(1e-9)));
                let energy_bound = if *energy_bounded { Bound::AtMost(1e-8) } else { Bound::Record };
                rows.push(row("energy-identity", o.energy_defect, energy_bound));
                rows.push(
                    row("global-null-lagrangian", (o.global_null_lagrangian / o.global_energy).abs(), Bound::Record)
                        .with_note(format!("global energy {:.6e}", o.global_energy)),
                );
            }
            Err(e) => rows.push(ReportRow::failed("second-order", "energy-identity", &params, seed, e)),
        }
    }
    rows
}

// ------------------------------------------------------- homogeneous fields

/// A field solving `𝒟⁻F = ℳ𝒟⁺F` near the centre `c`: `ℳ` is even about `c`
/// with `‖ℳ‖ = M`, `Ψ` is an odd pair of vector bumps at `c ± y₁`, so `Φ` is
/// odd and `ω = 0`.
pub struct HomogeneousSetup {
    pub coefficient: EndoGridField,
    pub source: MultivectorGridField,
    pub field: MultivectorGridField,
    pub report: SolveReport,
}

/// Offset of the source bumps and their radius, in units of the box length.
pub const SOURCE_OFFSET: f64 = 0.3;
pub const SOURCE_RADIUS: f64 = 0.12;

pub fn homogeneous_setup(spec: GridSpec, m: f64, seed: u64) -> Result<HomogeneousSetup> {
    let n = spec.dim();
    let l = spec.box_length();
    let c = spec.center();
    let mut rng = fields::rng(seed);
    let coefficient = manufactured_coefficient(spec, m, &mut rng, true)?;
    let amp = fields::random_unitish_vector(n, &mut rng).vector_part();
    let source = MultivectorGridField::sample(spec, |x| {
        let mut d = wrapped_offset(x, &c[..n], l);
        d[0] -= SOURCE_OFFSET * l;
        let plus = smooth_bump(norm(&d), SOURCE_RADIUS * l);
        d[0] += 2.0 * SOURCE_OFFSET * l;
        let minus = smooth_bump(norm(&d), SOURCE_RADIUS * l);
        let v: Vec<f64> = amp.iter().map(|a| a * (plus - minus)).collect();
        Multivector::vector(&v).expect("n components")
    })?;
    let problem = BeltramiProblem::new(Coefficient::Linear(coefficient.clone()), source.clone()).with_tol(1e-12);
    let (field, report) = solver::neumann_solve(&problem)?;
    Ok(HomogeneousSetup { coefficient, source, field, report })
}

/// `η(x) = s(|x − c|)` with `s` the smooth bump of radius `rho·L`.
pub fn centred_cutoff(spec: GridSpec, rho: f64, profile: impl Fn(f64, f64) -> f64) -> ScalarGridField {
    let n = spec.dim();
    let l = spec.box_length();
    let c = spec.center();
    ScalarGridField::sample(spec, |x| profile(norm(&wrapped_offset(x, &c[..n], l)), rho * l))
}

/// Caccioppoli ratios for `n = 3`, `M = 0.2`, `p = 2.5` across levels;
/// the spread `max/min − 1` is bounded by 0.2.
pub fn meyers(levels: &[usize], m: f64, p: f64, seed: u64) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for &n in levels {
        let params = format!("n=3;N={n};M={m};p={p}");
        let run = || -> Result<(f64, f64)> {
            let spec = GridSpec::new(3, n, 1.0)?;
            let setup = homogeneous_setup(spec, m, seed)?;
            let eta = centred_cutoff(spec, 0.15, smooth_bump);
            let rep = solver::meyers_experiment(&setup.field, &eta, p, m)?;
            Ok((rep.ratio, setup.report.harmonic_offset.norm()))
        };
        match run() {
            Ok((ratio, offset)) => {
                rows.push(ReportRow::new("meyers", "ratio", &params, ratio, Bound::Record, seed));
                rows.push(ReportRow::new("meyers", "offset", &params, offset, Bound::AtMost(1e-10), seed));
                ratios.push(ratio);
            }
            Err(e) => rows.push(ReportRow::failed("meyers", "ratio", &params, seed, e)),
        }
    }
    if ratios.len() == levels.len() && !ratios.is_empty() {
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        let params = format!("n=3;N={levels:?};M={m};p={p}");
        rows.push(ReportRow::new("meyers", "spread", &params, hi / lo - 1.0, Bound::AtMost(0.2), seed));
    }
    rows
}

/// Cutoff `(1 − r²/ρ²)³`, whose limited smoothness makes the discrete
/// residual converge algebraically.
pub const LOCALIZATION_POWER: i32 = 3;

/// Residuals of the localization recursion for `n = 2` across levels:
/// monotone decrease and `≤ 1e−3` at the finest level.
pub fn localization(levels: &[usize], m: f64, seed: u64) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let mut res = Vec::new();
    for &n in levels {
        let params = format!("n=2;N={n};M={m}");
        let run = || -> Result<solver::LocalizationReport> {
            let spec = GridSpec::new(2, n, 1.0)?;
            let setup = homogeneous_setup(spec, m, seed)?;
            let eta = centred_cutoff(spec, 0.15, |r, rho| poly_bump(r, rho, LOCALIZATION_POWER));
            solver::localization_check(&setup.field, &setup.coefficient, &eta, 1e-13, 500)
        };
        match run() {
            Ok(rep) => {
                rows.push(ReportRow::new("localization", "recursion", &params, rep.recursion, Bound::Record, seed));
                rows.push(ReportRow::new("localization", "dplus", &params, rep.dplus, Bound::Record, seed));
                rows.push(ReportRow::new("localization", "dminus", &params, rep.dminus, Bound::Record, seed));
                res.push(rep.recursion);
            }
            Err(e) => rows.push(ReportRow::failed("localization", "recursion", &params, seed, e)),
        }
    }
    if res.len() == levels.len() && !res.is_empty() {
        let params = format!("n=2;N={levels:?};M={m}");
        let decreasing = res.windows(2).filter(|w| w[1] >= w[0]).count();
        rows.push(ReportRow::new(
            "localization",
            "non-decreasing-steps",
            &params,
            decreasing as f64,
            Bound::AtMost(0.0),
            seed,
        ));
        let last = *res.last().expect("nonempty");
        rows.push(ReportRow::new("localization", "finest-residual", &params, last, Bound::AtMost(1e-3), seed));
    }
    rows
}

// -------------------------------------------------------------- duality

/// Solve with `ℳ`, then measure the dual equation for `F̂★` against the
/// source `F` satisfies, `𝒟⁻F − ℳ𝒟⁺F`. Also returns the solver's primal
/// residual and the relative size of the grid-only harmonic modes.
fn dual_residuals(m: EndoGridField, psi: MultivectorGridField) -> Result<(f64, SolveReport)> {
    let problem = BeltramiProblem::new(Coefficient::Linear(m.clone()), psi).with_tol(1e-13);
    let (f, rep) = solver::neumann_solve(&problem)?;
    let lhs = spectral::dminus(&f)?.sub(&m.apply(&spectral::dplus(&f)?)?)?;
    Ok((solver::hodge_duality_check(&f, &m, &lhs)?, rep))
}

/// Dual-equation residuals: `n = 2` with a conformal coefficient in extension
/// mode and `F` in grades `{0, 2}`; `n = 3` with an isotropic coefficient.
pub fn duality(points2: usize, points3: usize, seed: u64) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let run2 = || -> Result<(f64, SolveReport)> {
        let spec = GridSpec::new(2, points2, 1.0)?;
        let mut rng = fields::rng(seed ^ 0x6475);
        let rot = RotationField::random(&spec, &mut rng, std::f64::consts::PI, false);
        let scale = SmoothScalar::random(&spec, &mut rng, 3, 2, false);
        let m = EndoGridField::from_fn(spec, EndoMode::Extension { min_grade: 1 }, |x| {
            rot.eval(x).scale(0.3 + 0.2 * scale.eval(x))
        })?;
        let psi = fields::random_field(spec, &mut rng, |s| grade_of(s) == 1)?;
        dual_residuals(m, psi)
    };
    let run3 = || -> Result<(f64, SolveReport)> {
        let spec = GridSpec::new(3, points3, 1.0)?;
        let mut rng = fields::rng(seed ^ 0x6476);
        let mu = SmoothScalar::random(&spec, &mut rng, 3, 2, false);
        let m = EndoGridField::isotropic(spec, |x| 0.4 * mu.eval(x))?;
        let psi = fields::random_field(spec, &mut rng, |_| true)?;
        dual_residuals(m, psi)
    };
    for (params, r) in [(format!("n=2;N={points2};conformal"), run2()), (format!("n=3;N={points3};isotropic"), run3())]
    {
        match r {
            Ok((dual, rep)) => {
                rows.push(ReportRow::new("duality", "dual-residual", &params, dual, Bound::AtMost(1e-8), seed));
                rows.push(
                    ReportRow::new(
                        "duality",
                        "primal-residual",
                        &params,
                        rep.final_residual,
                        Bound::AtMost(1e-8),
                        seed,
                    )
                    .with_note(format!("grid harmonic part {:.3e}", rep.grid_harmonic)),
                );
            }
            Err(e) => rows.push(ReportRow::failed("duality", "dual-residual", &params, seed, e)),
        }
    }
    rows
}

// ------------------------------------------------------------- exponents

pub fn exponents(seed: u64) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    rows.push(match solver::critical_exponent(0.25, NormModel::Conjecture) {
        Ok(p) => ReportRow::new("exponents", "critical-exponent", "M=0.25", (p - 5.0).abs(), Bound::AtMost(0.0), seed),
        Err(e) => ReportRow::failed("exponents", "critical-exponent", "M=0.25", seed, e),
    });
    for n in 2..=9usize {
        let (k, target) = if n % 2 == 1 { ((n - 1) / 2, 2 * n) } else { (n / 2 - 1, n) };
        let params = format!("n={n};k={k}");
        rows.push(match solver::sobolev_iterate(n, k, 2.0) {
            Ok(x) => ReportRow::new(
                "exponents",
                "stopping-value",
                &params,
                (x - target as f64).abs(),
                Bound::AtMost(0.0),
                seed,
            ),
            Err(e) => ReportRow::failed("exponents", "stopping-value", &params, seed, e),
        });
    }
    rows
}

// ------------------------------------------------------------ dispatch

/// Experiment names accepted by the `experiments` command.
pub const EXPERIMENTS: [&str; 9] = [
    "cauchy-ball",
    "holder",
    "manufactured",
    "second-order",
    "nonlinear",
    "meyers",
    "localization",
    "duality",
    "exponents",
];

/// Run one named experiment. `levels` replaces the refinement levels of the
/// sweeps; `dim` and `points` select the grid of the single-grid ones.
pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> Option<Vec<ReportRow>> {
    let seed = cfg.seed;
    let levels = |default: &[usize]| cfg.levels.clone().unwrap_or_else(|| default.to_vec());
    let grids = |defaults: &[(usize, usize)]| -> Vec<GridSpec> {
        let chosen: Vec<(usize, usize)> = match cfg.dim {
            Some(d) => vec![(d, cfg.points.unwrap_or_else(|| defaults.iter().find(|g| g.0 == d).map_or(32, |g| g.1)))],
            None => defaults.to_vec(),
        };
        chosen.into_iter().filter_map(|(d, n)| GridSpec::new(d, n, cfg.box_length).ok()).collect()
    };
    Some(match name {
        "cauchy-ball" => cauchy_ball(&levels(&[32, 64, 128]), seed),
        "holder" => holder(HolderParams::default(), seed),
        "manufactured" => manufactured_sweep(&grids(&[(2, 64), (3, 32)]), &[0.1, 0.3, 0.6], seed),
        "second-order" => {
            let specs: Vec<(GridSpec, bool)> = match cfg.dim {
                Some(_) => grids(&[]).into_iter().map(|g| (g, true)).collect(),
                None => [(2, 256, true), (3, 32, false), (3, 64, false)]
                    .iter()
                    .filter_map(|&(d, n, b)| GridSpec::new(d, n, cfg.box_length).ok().map(|g| (g, b)))
                    .collect(),
            };
            second_order_sweep(&specs, seed)
        }
        "nonlinear" => nonlinear_sweep(&grids(&[(2, 64), (3, 32)]), 0.5, seed),
        "meyers" => meyers(&levels(&[32, 64, 128]), 0.2, 2.5, seed),
        "localization" => localization(&levels(&[64, 128, 256]), 0.2, seed),
        "duality" => duality(cfg.points.unwrap_or(64), cfg.points.unwrap_or(32), seed),
        "exponents" => exponents(seed),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (0..6).map(|j| (2f64.powi(j), 3.0 * 2f64.powi(j).powf(0.7))).collect();
        assert!((log_log_slope(&pts) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn budget_matches_formula() {
        assert_eq!(iteration_budget(0.6, 1e-10), 51.0);
        assert_eq!(iteration_budget(0.1, 1e-10), 15.0);
    }

    #[test]
    fn fourier_poisson_inverts_laplacian() {
        let spec = GridSpec::new(2, 32, 1.0).unwrap();
        let g = fields::random_field(spec, &mut fields::rng(4), |s| grade_of(s) == 1).unwrap();
        let u = fourier_poisson(2.0, &g, 0.0).unwrap();
        let uf = ScalarGridField::from_values(spec, u).unwrap().to_multivector();
        let lhs = spectral::laplacian(&uf).unwrap().scale(2.0);
        let rhs = spectral::delta(&g).unwrap();
        assert!(lhs.sub(&rhs).unwrap().l2_norm().unwrap() < 1e-10 * rhs.l2_norm().unwrap());
    }

    #[test]
    fn small_manufactured_solve() {
        let spec = GridSpec::new(2, 16, 1.0).unwrap();
        let out = manufactured_linear(spec, 0.3, 1e-10, &mut fields::rng(1)).unwrap();
        assert!(out.error < 1e-8, "{}", out.error);
    }

    #[test]
    fn dual_residual_detects_wrong_source() {
        let spec = GridSpec::new(3, 16, 1.0).unwrap();
        let mut rng = fields::rng(3);
        let m = EndoGridField::isotropic(spec, |x| 0.3 * (6.0 * x[0]).sin()).unwrap();
        let psi = fields::random_field(spec, &mut rng, |_| true).unwrap();
        let (f, _) = solver::neumann_solve(&BeltramiProblem::new(Coefficient::Linear(m.clone()), psi)).unwrap();
        let lhs = spectral::dminus(&f).unwrap().sub(&m.apply(&spectral::dplus(&f).unwrap()).unwrap()).unwrap();
        assert!(solver::hodge_duality_check(&f, &m, &lhs).unwrap() < 1e-12);
        let bent = lhs.add(&lhs.filter_blades(|s| s == 1).scale(1e-3)).unwrap();
        assert!(solver::hodge_duality_check(&f, &m, &bent).unwrap() > 1e-5);
    }

    #[test]
    fn exponent_rows_pass() {
        assert!(exponents(0).iter().all(|r| r.pass));
    }
}

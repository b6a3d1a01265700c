//! Built-in coefficient fields.

use crate::fields::{HarnessRng, SmoothScalar};
use dirac_beltrami::gridfield::{EndoGridField, EndoMode, GridSpec};
use dirac_beltrami::linmaps::{self, VectorMap};
use dirac_beltrami::solver::NonlinearCoefficient;
use dirac_beltrami::{Error, Result};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Smooth field of rotations `Q(x) = Π_{i<j} G_{ij}(θ_{ij}(x))`, a product of
/// plane rotations with smooth angles of size at most `amplitude`.
#[derive(Clone, Debug)]
pub struct RotationField {
    dim: usize,
    angles: Vec<(usize, usize, SmoothScalar)>,
    amplitude: f64,
}

impl RotationField {
    pub fn random(spec: &GridSpec, rng: &mut HarnessRng, amplitude: f64, even: bool) -> Self {
        let n = spec.dim();
        let mut angles = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                angles.push((i, j, SmoothScalar::random(spec, rng, 3, 2, even)));
            }
        }
        RotationField { dim: n, angles, amplitude }
    }

    pub fn eval(&self, x: &[f64]) -> VectorMap {
        let n = self.dim;
        let mut q = VectorMap::identity(n);
        for (i, j, s) in &self.angles {
            let t = self.amplitude * s.eval(x);
            let mut g = vec![0.0; n * n];
            for k in 0..n {
                g[k * n + k] = 1.0;
            }
            g[i * n + i] = t.cos();
            g[j * n + j] = t.cos();
            g[i * n + j] = -t.sin();
            g[j * n + i] = t.sin();
            let g = VectorMap::from_row_slice(n, &g).expect("n×n");
            q = q.compose(&g).expect("same dim");
        }
        q
    }
}

/// `ℳ(x) = M·Q(x)·D(x)` on grades `≥ 1` with `Q` a smooth rotation field and
/// `D = diag(1, d₂(x), …)`, `dⱼ ∈ [0.5, 1]`, so `‖ℳ(x)‖ = M` everywhere.
pub fn manufactured_coefficient(spec: GridSpec, m: f64, rng: &mut HarnessRng, even: bool) -> Result<EndoGridField> {
    let n = spec.dim();
    let q = RotationField::random(&spec, rng, PI, even);
    let d: Vec<SmoothScalar> = (1..n).map(|_| SmoothScalar::random(&spec, rng, 3, 2, even)).collect();
    EndoGridField::from_fn(spec, EndoMode::Extension { min_grade: 1 }, |x| {
        let mut diag = vec![1.0];
        diag.extend(d.iter().map(|s| 0.75 + 0.25 * s.eval(x)));
        let dm = VectorMap::diag(&diag).expect("n entries");
        q.eval(x).compose(&dm).expect("same dim").scale(m)
    })
}

/// Symmetric `A(x) = Q(x) Λ(x) Q(x)ᵀ` whose smallest eigenvalue is `lambda`
/// and largest is `big_lambda` at every point, in vector mode.
pub fn smooth_spd(spec: GridSpec, lambda: f64, big_lambda: f64, rng: &mut HarnessRng) -> Result<EndoGridField> {
    if !(lambda > 0.0 && big_lambda >= lambda) {
        return Err(Error::OutOfRange(format!("eigenvalue bounds {lambda}, {big_lambda}")));
    }
    let n = spec.dim();
    let q = RotationField::random(&spec, rng, PI, false);
    let mid: Vec<SmoothScalar> = (2..n).map(|_| SmoothScalar::random(&spec, rng, 3, 2, false)).collect();
    EndoGridField::from_fn(spec, EndoMode::Vector, |x| {
        let mut diag = vec![lambda, big_lambda];
        diag.extend(mid.iter().map(|s| {
            let t = 0.5 * (1.0 + s.eval(x));
            lambda + t * (big_lambda - lambda)
        }));
        let qx = q.eval(x);
        let l = VectorMap::diag(&diag).expect("n entries");
        qx.compose(&l).and_then(|ql| ql.compose(&qx.transpose())).expect("same dim")
    })
}

/// `ℳ(x) = ±M·I` on grades `≥ 1`, alternating over `cells` cells per axis.
pub fn checkerboard(spec: GridSpec, m: f64, cells: usize) -> Result<EndoGridField> {
    let n = spec.dim();
    let l = spec.box_length();
    EndoGridField::from_fn(spec, EndoMode::Extension { min_grade: 1 }, |x| {
        let parity: usize = x.iter().map(|xi| ((xi / l) * cells as f64).floor() as usize).sum();
        let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
        VectorMap::scaled_identity(n, sign * m)
    })
}

/// `ℳ = 𝒞(aI) = (1 − a)/(1 + a)·I` on grades `≥ 1`.
pub fn constant_conductivity(spec: GridSpec, a: f64) -> Result<EndoGridField> {
    let c = linmaps::cayley(&VectorMap::scaled_identity(spec.dim(), a))?;
    EndoGridField::constant(spec, EndoMode::Extension { min_grade: 1 }, &c)
}

/// Named coefficient recipes accepted by the `solve` command.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Recipe {
    /// `A = I`, so `ℳ = 0`.
    Identity,
    /// `A = aI`.
    Constant(f64),
    /// Smooth symmetric `A` with eigenvalues in `[0.5, 2]`.
    SmoothSpd,
    /// Piecewise constant `±M·I`.
    Checkerboard(f64),
    /// [`manufactured_coefficient`] with a known exact solution.
    Manufactured(f64),
    /// Componentwise `k·sin` with a known exact solution.
    Nonlinear(f64),
}

impl Recipe {
    /// Whether the recipe comes with an exact solution.
    pub fn is_manufactured(&self) -> bool {
        matches!(self, Recipe::Manufactured(_) | Recipe::Nonlinear(_))
    }

    /// Linear coefficient field on `spec`.
    pub fn linear_coefficient(&self, spec: GridSpec, rng: &mut HarnessRng) -> Result<EndoGridField> {
        match *self {
            Recipe::Identity => constant_conductivity(spec, 1.0),
            Recipe::Constant(a) => constant_conductivity(spec, a),
            Recipe::SmoothSpd => {
                smooth_spd(spec, 0.5, 2.0, rng)?.with_mode(EndoMode::Extension { min_grade: 1 })?.map(linmaps::cayley)
            }
            Recipe::Checkerboard(m) => checkerboard(spec, m, 4),
            Recipe::Manufactured(m) => manufactured_coefficient(spec, m, rng, false),
            Recipe::Nonlinear(_) => Err(Error::OutOfRange("nonlinear recipe has no linear coefficient".into())),
        }
    }

    pub fn nonlinear_coefficient(&self, dim: usize) -> Result<NonlinearCoefficient> {
        match *self {
            Recipe::Nonlinear(k) => NonlinearCoefficient::saturated(dim, k),
            _ => Err(Error::OutOfRange(format!("recipe {self} is linear"))),
        }
    }
}

fn parse_value(s: &str, prefix: &str) -> Option<f64> {
    s.strip_prefix(prefix).and_then(|v| v.parse::<f64>().ok()).filter(|v| v.is_finite())
}

impl FromStr for Recipe {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let r = match s {
            "identity" => Recipe::Identity,
            "smooth-spd" => Recipe::SmoothSpd,
            _ => {
                if let Some(a) = parse_value(s, "constant-a") {
                    if a <= 0.0 {
                        return Err(format!("constant recipe needs a > 0, got {a}"));
                    }
                    Recipe::Constant(a)
                } else if let Some(m) = parse_value(s, "checkerboard-M") {
                    Recipe::Checkerboard(m)
                } else if let Some(m) = parse_value(s, "manufactured-M") {
                    Recipe::Manufactured(m)
                } else if let Some(k) = parse_value(s, "nonlinear-k") {
                    Recipe::Nonlinear(k)
                } else {
                    return Err(format!(
                        "unknown recipe {s:?} (expected identity, constant-a<a>, smooth-spd, \
                         checkerboard-M<m>, manufactured-M<m> or nonlinear-k<k>)"
                    ));
                }
            }
        };
        match r {
            Recipe::Checkerboard(m) | Recipe::Manufactured(m) | Recipe::Nonlinear(m) if !(0.0..1.0).contains(&m) => {
                Err(format!("recipe {s:?}: contraction constant must lie in [0, 1)"))
            }
            _ => Ok(r),
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Identity => write!(f, "identity"),
            Recipe::Constant(a) => write!(f, "constant-a{a}"),
            Recipe::SmoothSpd => write!(f, "smooth-spd"),
            Recipe::Checkerboard(m) => write!(f, "checkerboard-M{m}"),
            Recipe::Manufactured(m) => write!(f, "manufactured-M{m}"),
            Recipe::Nonlinear(k) => write!(f, "nonlinear-k{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::rng;

    #[test]
    fn recipes_round_trip() {
        for s in ["identity", "constant-a0.5", "smooth-spd", "checkerboard-M0.6", "manufactured-M0.3", "nonlinear-k0.5"]
        {
            let r: Recipe = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("manufactured-M1.2".parse::<Recipe>().is_err());
        assert!("constant-a-1".parse::<Recipe>().is_err());
        assert!("spiral".parse::<Recipe>().is_err());
    }

    #[test]
    fn manufactured_norm_is_exact() {
        let spec = GridSpec::new(3, 8, 1.0).unwrap();
        let m = manufactured_coefficient(spec, 0.3, &mut rng(2), true).unwrap();
        assert!((m.applied_norm() - 0.3).abs() < 1e-12);
        for p in 0..spec.npts() {
            assert!((linmaps::operator_norm(&m.map_at(p)) - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_spd_has_pinned_bounds() {
        let spec = GridSpec::new(2, 8, 1.0).unwrap();
        let a = smooth_spd(spec, 0.5, 2.0, &mut rng(5)).unwrap();
        for p in 0..spec.npts() {
            let e = linmaps::ellipticity_constants(&a.map_at(p)).unwrap();
            assert!((e.m - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn even_rotations_are_even() {
        let spec = GridSpec::new(3, 8, 2.0).unwrap();
        let q = RotationField::random(&spec, &mut rng(9), 1.0, true);
        let c = spec.center();
        let z = [0.3, -0.2, 0.45];
        let plus: Vec<f64> = (0..3).map(|i| c[i] + z[i]).collect();
        let minus: Vec<f64> = (0..3).map(|i| c[i] - z[i]).collect();
        assert!(q.eval(&plus).max_abs_diff(&q.eval(&minus)) < 1e-14);
    }
}

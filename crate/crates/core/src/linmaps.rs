//! Linear maps on `V = ℝⁿ` and on `ΛV`.
//!
//! [`VectorMap`] is an `n×n` matrix. [`ExteriorMap`] is a grade-preserving
//! map on `ΛV` stored as one square block per grade, with the blades of
//! grade `k` ordered by increasing bitmask. The exterior extension fills
//! block `k` with the `k×k` minors of `T`:
//!
//! ```text
//! T̂(e_s) = T e_{s₁} ∧ … ∧ T e_{s_k} = Σ_t det T[t, s] e_t
//! ```
//!
//! Also here: the Cayley transform `(I − T)(I + T)⁻¹`, its nonlinear version
//! for monotone structure fields, and the ellipticity constants
//! `M = ‖𝒞(A)‖`, `K = 2(1 + M²)/(1 − M²)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::clifford::{self, grade_of, Multivector, MAX_DIM, MIN_DIM};
use crate::{Error, Result};

fn check_dim(dim: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::DimOutOfRange { dim, min: MIN_DIM, max: MAX_DIM })
    }
}

/// Blade bitmasks of grade `k` in increasing order.
pub fn grade_blades(dim: usize, k: usize) -> Vec<usize> {
    (0..1usize << dim).filter(|&s| grade_of(s) == k).collect()
}

/// Position of each blade inside its grade block.
fn grade_positions(dim: usize) -> Vec<usize> {
    let mut pos = vec![0; 1 << dim];
    let mut count = vec![0; dim + 1];
    for (s, p) in pos.iter_mut().enumerate() {
        let k = grade_of(s);
        *p = count[k];
        count[k] += 1;
    }
    pos
}

fn bits(s: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|j| s & (1 << j) != 0).collect()
}

/// Linear map on `ℝⁿ`.
#[derive(Clone, PartialEq)]
pub struct VectorMap {
    m: DMatrix<f64>,
}

impl fmt::Debug for VectorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorMap{:?}", self.m.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

impl VectorMap {
    /// From `n²` entries in row-major order.
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch(entries.len(), dim * dim));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::OutOfRange("non-finite matrix entry".into()));
        }
        Ok(VectorMap { m: DMatrix::from_row_slice(dim, dim, entries) })
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        check_dim(m.nrows())?;
        if m.nrows() != m.ncols() {
            return Err(Error::DimMismatch(m.nrows(), m.ncols()));
        }
        Ok(VectorMap { m })
    }

    pub fn identity(dim: usize) -> Self {
        VectorMap { m: DMatrix::identity(dim, dim) }
    }

    pub fn zero(dim: usize) -> Self {
        VectorMap { m: DMatrix::zeros(dim, dim) }
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        VectorMap { m: DMatrix::identity(dim, dim) * c }
    }

    pub fn diag(d: &[f64]) -> Result<Self> {
        check_dim(d.len())?;
        Ok(VectorMap { m: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(d)) })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// Row-major entries.
    pub fn to_row_vec(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n * n).map(|k| self.m[(k / n, k % n)]).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.m[(i, j)] * v[j]).sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        VectorMap { m: self.m.transpose() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &VectorMap) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(self.dim(), other.dim()));
        }
        Ok(VectorMap { m: &self.m * &other.m })
    }

    pub fn scale(&self, c: f64) -> Self {
        VectorMap { m: &self.m * c }
    }

    pub fn add(&self, other: &VectorMap) -> Self {
        VectorMap { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &VectorMap) -> Self {
        VectorMap { m: &self.m - &other.m }
    }

    pub fn det(&self) -> f64 {
        self.m.determinant()
    }

    pub fn inverse(&self) -> Result<Self> {
        self.m
            .clone()
            .try_inverse()
            .map(|m| VectorMap { m })
            .ok_or_else(|| Error::NotInvertible("singular matrix".into()))
    }

    pub fn max_abs_diff(&self, other: &VectorMap) -> f64 {
        (&self.m - &other.m).amax()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.transpose()) <= tol
    }

    /// `T Tᵀ = Tᵀ T`.
    pub fn is_normal(&self, tol: f64) -> bool {
        let a = &self.m * self.m.transpose();
        let b = self.m.transpose() * &self.m;
        (a - b).amax() <= tol * self.m.amax().max(1.0).powi(2)
    }

    /// Smallest eigenvalue of `(T + Tᵀ)/2`, i.e. `min_{|v|=1} ⟨Tv, v⟩`.
    pub fn min_quadratic_form(&self) -> f64 {
        let sym = (&self.m + self.m.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.m.clone().svd(false, false).singular_values.iter().copied().collect()
    }
}

/// Grade-preserving linear map on `ΛV`, one block per grade.
#[derive(Clone, PartialEq)]
pub struct ExteriorMap {
    dim: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl fmt::Debug for ExteriorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExteriorMap").field("dim", &self.dim).field("blocks", &self.blocks).finish()
    }
}

impl ExteriorMap {
    pub fn identity(dim: usize) -> Self {
        let blocks = (0..=dim)
            .map(|k| {
                let c = grade_blades(dim, k).len();
                DMatrix::identity(c, c)
            })
            .collect();
        ExteriorMap { dim, blocks }
    }

    pub fn from_blocks(dim: usize, blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        check_dim(dim)?;
        if blocks.len() != dim + 1 {
            return Err(Error::DimMismatch(blocks.len(), dim + 1));
        }
        for (k, b) in blocks.iter().enumerate() {
            let c = grade_blades(dim, k).len();
            if b.nrows() != c || b.ncols() != c {
                return Err(Error::DimMismatch(b.nrows(), c));
            }
        }
        Ok(ExteriorMap { dim, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, k: usize) -> &DMatrix<f64> {
        &self.blocks[k]
    }

    pub fn apply(&self, w: &Multivector) -> Result<Multivector> {
        if w.dim() != self.dim {
            return Err(Error::DimMismatch(w.dim(), self.dim));
        }
        let mut out = Multivector::zero(self.dim);
        for k in 0..=self.dim {
            let blades = grade_blades(self.dim, k);
            let b = &self.blocks[k];
            for (i, &t) in blades.iter().enumerate() {
                let mut acc = 0.0;
                for (j, &s) in blades.iter().enumerate() {
                    acc += b[(i, j)] * w.get(s);
                }
                out.set(t, acc);
            }
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ExteriorMap) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        Ok(ExteriorMap { dim: self.dim, blocks })
    }

    pub fn scale(&self, c: f64) -> Self {
        ExteriorMap { dim: self.dim, blocks: self.blocks.iter().map(|b| b * c).collect() }
    }

    /// Largest entrywise difference over the blocks of grades `grades`.
    pub fn max_abs_diff_on(&self, other: &ExteriorMap, grades: std::ops::RangeInclusive<usize>) -> f64 {
        grades.map(|k| (&self.blocks[k] - &other.blocks[k]).amax()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ExteriorMap) -> f64 {
        self.max_abs_diff_on(other, 0..=self.dim)
    }

    /// Dense `2ⁿ×2ⁿ` matrix in blade-bitmask order.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = 1 << self.dim;
        let pos = grade_positions(self.dim);
        let mut d = DMatrix::zeros(n, n);
        for t in 0..n {
            for s in 0..n {
                if grade_of(s) == grade_of(t) {
                    d[(t, s)] = self.blocks[grade_of(s)][(pos[t], pos[s])];
                }
            }
        }
        d
    }

    /// Build a grade-preserving map from its action on basis blades.
    pub fn from_blade_action(dim: usize, f: impl Fn(&Multivector) -> Multivector) -> Result<Self> {
        check_dim(dim)?;
        let pos = grade_positions(dim);
        let mut blocks: Vec<DMatrix<f64>> = (0..=dim)
            .map(|k| {
                let c = grade_blades(dim, k).len();
                DMatrix::zeros(c, c)
            })
            .collect();
        for s in 0..1usize << dim {
            let image = f(&Multivector::blade(dim, s)?);
            let k = grade_of(s);
            for (t, &c) in image.coeffs().iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                if grade_of(t) != k {
                    return Err(Error::OutOfRange(format!("image of blade {s:#b} leaves grade {k}")));
                }
                blocks[k][(pos[t], pos[s])] = c;
            }
        }
        Ok(ExteriorMap { dim, blocks })
    }
}

/// Determinant of the submatrix of `t` (row-major, `n×n`) with the given rows
/// and columns, by Gaussian elimination with partial pivoting.
pub(crate) fn minor(t: &[f64], n: usize, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    match k {
        0 => 1.0,
        1 => t[rows[0] * n + cols[0]],
        2 => t[rows[0] * n + cols[0]] * t[rows[1] * n + cols[1]] - t[rows[0] * n + cols[1]] * t[rows[1] * n + cols[0]],
        _ => {
            let mut a = [[0.0f64; MAX_DIM]; MAX_DIM];
            for (i, &r) in rows.iter().enumerate() {
                for (j, &c) in cols.iter().enumerate() {
                    a[i][j] = t[r * n + c];
                }
            }
            let mut det = 1.0;
            for col in 0..k {
                let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
                if a[piv][col] == 0.0 {
                    return 0.0;
                }
                if piv != col {
                    a.swap(piv, col);
                    det = -det;
                }
                det *= a[col][col];
                for r in col + 1..k {
                    let f = a[r][col] / a[col][col];
                    for c in col..k {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
            det
        }
    }
}

/// `T̂`: the algebra homomorphism of `ΛV` extending `T`.
pub fn exterior_extend(t: &VectorMap) -> ExteriorMap {
    let n = t.dim();
    let entries = t.to_row_vec();
    let blocks = (0..=n)
        .map(|k| {
            let blades = grade_blades(n, k);
            let idx: Vec<Vec<usize>> = blades.iter().map(|&s| bits(s)).collect();
            let c = blades.len();
            DMatrix::from_fn(c, c, |i, j| minor(&entries, n, &idx[i], &idx[j]))
        })
        .collect();
    ExteriorMap { dim: n, blocks }
}

/// Grassmann dual `Lᶜ(w) = L(★w)★`.
pub fn grassmann_dual(l: &ExteriorMap) -> ExteriorMap {
    ExteriorMap::from_blade_action(l.dim, |w| {
        let inner = l.apply(&clifford::hodge_left(w)).expect("same dimension");
        clifford::hodge_right(&inner)
    })
    .expect("grade-preserving by construction")
}

/// Self-duality `(T̂)ᶜ = T̂` on the grades `1..=n−1`. Grades 0 and `n` are
/// excluded: there the two sides are `det T` and 1 in swapped order.
pub fn is_self_dual(t: &VectorMap, tol: f64) -> bool {
    let n = t.dim();
    let ext = exterior_extend(t);
    let dual = grassmann_dual(&ext);
    dual.max_abs_diff_on(&ext, 1..=n - 1) <= tol
}

/// `T Tᵀ = det(T)·I` within `tol`.
pub fn is_conformal(t: &VectorMap, tol: f64) -> bool {
    let ttt = t.compose(&t.transpose()).expect("same dimension");
    ttt.max_abs_diff(&VectorMap::scaled_identity(t.dim(), t.det())) <= tol
}

/// `𝒞(T) = (I − T)(I + T)⁻¹`.
pub fn cayley(t: &VectorMap) -> Result<VectorMap> {
    let n = t.dim();
    let id = DMatrix::<f64>::identity(n, n);
    let plus = &id + &t.m;
    let scale = plus.amax().max(1.0);
    let lu = plus.lu();
    if lu.determinant().abs() <= 1e-13 * scale.powi(n as i32) {
        return Err(Error::NotInvertible("I + T is singular".into()));
    }
    let inv = lu.try_inverse().ok_or_else(|| Error::NotInvertible("I + T is singular".into()))?;
    Ok(VectorMap { m: (&id - &t.m) * inv })
}

/// Largest singular value.
pub fn operator_norm(t: &VectorMap) -> f64 {
    t.singular_values().into_iter().fold(0.0, f64::max)
}

/// Largest singular value over the blocks of grade `≥ min_grade`.
pub fn ext_operator_norm(l: &ExteriorMap, min_grade: usize) -> f64 {
    l.blocks
        .iter()
        .skip(min_grade)
        .map(|b| if b.is_empty() { 0.0 } else { b.clone().svd(false, false).singular_values.max() })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipticity {
    /// `‖𝒞(A)‖ < 1`.
    pub m: f64,
    /// `2(1 + M²)/(1 − M²) ≥ 2`.
    pub k: f64,
}

/// `K` from `M`.
pub fn distortion_constant(m: f64) -> f64 {
    2.0 * (1.0 + m * m) / (1.0 - m * m)
}

/// Ellipticity constants of a positive map.
pub fn ellipticity_constants(a: &VectorMap) -> Result<Ellipticity> {
    let q = a.min_quadratic_form();
    if q <= 0.0 {
        return Err(Error::NotPositive(q));
    }
    let m = operator_norm(&cayley(a)?);
    if m >= 1.0 {
        return Err(Error::NotPositive(q));
    }
    Ok(Ellipticity { m, k: distortion_constant(m) })
}

type StructureFn = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;

/// A structure field `𝒜(x, ξ)` with its ellipticity constant `K`.
#[derive(Clone)]
pub struct StructureField {
    pub dim: usize,
    pub k: f64,
    eval: Arc<StructureFn>,
}

impl fmt::Debug for StructureField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StructureField").field("dim", &self.dim).field("k", &self.k).finish_non_exhaustive()
    }
}

impl StructureField {
    pub fn new(dim: usize, k: f64, eval: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Result<Self> {
        check_dim(dim)?;
        if !(k >= 2.0) {
            return Err(Error::OutOfRange(format!("ellipticity constant K = {k} < 2")));
        }
        Ok(StructureField { dim, k, eval: Arc::new(eval) })
    }

    /// Linear field `𝒜(x, ξ) = A ξ` for a positive `A`, with its `K`.
    pub fn linear(a: VectorMap) -> Result<Self> {
        let e = ellipticity_constants(&a)?;
        let dim = a.dim();
        StructureField::new(dim, e.k, move |_x, xi| a.apply(xi))
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        (self.eval)(x, xi)
    }

    /// Worst ratio `(|Δξ|² + |Δ𝒜|²) / (K⟨Δ𝒜, Δξ⟩)` over the given pairs; at
    /// most 1 when the ellipticity bound holds.
    pub fn bound_ratio(&self, x: &[f64], pairs: &[(Vec<f64>, Vec<f64>)]) -> f64 {
        pairs
            .iter()
            .map(|(a, b)| {
                let fa = self.eval(x, a);
                let fb = self.eval(x, b);
                let dxi: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
                let da: Vec<f64> = fa.iter().zip(&fb).map(|(p, q)| p - q).collect();
                let lhs: f64 = dxi.iter().map(|v| v * v).sum::<f64>() + da.iter().map(|v| v * v).sum::<f64>();
                let rhs: f64 = self.k * da.iter().zip(&dxi).map(|(p, q)| p * q).sum::<f64>();
                if lhs == 0.0 {
                    0.0
                } else {
                    lhs / rhs
                }
            })
            .fold(0.0, f64::max)
    }
}

pub const NONLINEAR_CAYLEY_MAX_ITER: usize = 10_000;
pub const NONLINEAR_CAYLEY_TOL: f64 = 1e-12;

/// `ℳ(x, ζ) = 2ξ − ζ` where `ξ + 𝒜(x, ξ) = ζ`, solved by the damped
/// iteration `ξ ← ξ − θ(ξ + 𝒜(x, ξ) − ζ)`, `θ = 2/(K + 2)`, which contracts
/// with factor `√((K − 2)/(K + 2))`.
pub fn nonlinear_cayley(a: &StructureField, x: &[f64], zeta: &[f64]) -> Result<Vec<f64>> {
    if zeta.len() != a.dim {
        return Err(Error::DimMismatch(zeta.len(), a.dim));
    }
    let theta = 2.0 / (a.k + 2.0);
    let scale = zeta.iter().map(|z| z * z).sum::<f64>().sqrt();
    if scale == 0.0 {
        let f0 = a.eval(x, zeta);
        if f0.iter().any(|v| *v != 0.0) {
            return Err(Error::OutOfRange("structure field has 𝒜(x, 0) ≠ 0".into()));
        }
        return Ok(vec![0.0; a.dim]);
    }
    let mut xi: Vec<f64> = zeta.iter().map(|z| 0.5 * z).collect();
    let mut change = f64::INFINITY;
    for _ in 0..NONLINEAR_CAYLEY_MAX_ITER {
        let f = a.eval(x, &xi);
        let mut step2 = 0.0;
        for j in 0..a.dim {
            let s = theta * (xi[j] + f[j] - zeta[j]);
            xi[j] -= s;
            step2 += s * s;
        }
        change = step2.sqrt();
        if change <= NONLINEAR_CAYLEY_TOL * scale {
            return Ok(xi.iter().zip(zeta).map(|(p, z)| 2.0 * p - z).collect());
        }
    }
    Err(Error::NoConvergence { iterations: NONLINEAR_CAYLEY_MAX_ITER, last_change: change })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_extend_examples() {
        let id = exterior_extend(&VectorMap::identity(3));
        assert_eq!(id.max_abs_diff(&ExteriorMap::identity(3)), 0.0);
        let d = exterior_extend(&VectorMap::diag(&[2.0, 3.0]).unwrap());
        assert_eq!(d.block(2)[(0, 0)], 6.0);
        assert_eq!(d.block(0)[(0, 0)], 1.0);
    }

    #[test]
    fn grassmann_dual_examples() {
        let id = ExteriorMap::identity(4);
        assert_eq!(grassmann_dual(&id).max_abs_diff(&id), 0.0);
        // n = 2, T = diag(a, b): the dual is b, a on grade 1, ab on grade 0, 1 on grade 2
        let d = grassmann_dual(&exterior_extend(&VectorMap::diag(&[2.0, 5.0]).unwrap()));
        assert_eq!(d.block(0)[(0, 0)], 10.0);
        assert_eq!(d.block(1)[(0, 0)], 5.0);
        assert_eq!(d.block(1)[(1, 1)], 2.0);
        assert_eq!(d.block(2)[(0, 0)], 1.0);
    }

    #[test]
    fn self_dual_examples() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rs = VectorMap::from_row_slice(2, &[1.7 * c, -1.7 * s, 1.7 * s, 1.7 * c]).unwrap();
        assert!(is_self_dual(&rs, 1e-12));
        assert!(is_conformal(&rs, 1e-12));
        assert!(!is_self_dual(&VectorMap::diag(&[1.0, 2.0]).unwrap(), 1e-12));
        assert!(is_self_dual(&VectorMap::identity(3), 0.0));
    }

    #[test]
    fn cayley_examples() {
        let c = cayley(&VectorMap::scaled_identity(3, 3.0)).unwrap();
        assert!(c.max_abs_diff(&VectorMap::scaled_identity(3, -0.5)) < 1e-15);
        assert_eq!(cayley(&VectorMap::identity(2)).unwrap().max_abs_diff(&VectorMap::zero(2)), 0.0);
        assert_eq!(cayley(&VectorMap::zero(2)).unwrap().max_abs_diff(&VectorMap::identity(2)), 0.0);
        assert!(cayley(&VectorMap::scaled_identity(2, -1.0)).is_err());
    }

    #[test]
    fn norm_examples() {
        let d = VectorMap::diag(&[0.5, 2.0]).unwrap();
        assert!((operator_norm(&d) - 2.0).abs() < 1e-14);
        assert!((operator_norm(&cayley(&d).unwrap()) - 1.0 / 3.0).abs() < 1e-14);
        let half = exterior_extend(&VectorMap::scaled_identity(3, 0.5));
        assert!((ext_operator_norm(&half, 1) - 0.5).abs() < 1e-14);
        assert!((ext_operator_norm(&half, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ellipticity_examples() {
        let e = ellipticity_constants(&VectorMap::identity(3)).unwrap();
        assert_eq!((e.m, e.k), (0.0, 2.0));
        let e = ellipticity_constants(&VectorMap::diag(&[0.5, 2.0]).unwrap()).unwrap();
        assert!((e.m - 1.0 / 3.0).abs() < 1e-14);
        assert!((e.k - 2.5).abs() < 1e-13);
        assert!(matches!(ellipticity_constants(&VectorMap::diag(&[1.0, -0.1]).unwrap()), Err(Error::NotPositive(_))));
    }

    #[test]
    fn nonlinear_cayley_examples() {
        let id = StructureField::linear(VectorMap::identity(3)).unwrap();
        let r = nonlinear_cayley(&id, &[0.0; 3], &[1.0, -2.0, 0.5]).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-14));
        assert_eq!(nonlinear_cayley(&id, &[0.0; 3], &[0.0; 3]).unwrap(), vec![0.0; 3]);
        let a = 3.0;
        let lin = StructureField::linear(VectorMap::scaled_identity(2, a)).unwrap();
        let r = nonlinear_cayley(&lin, &[0.0; 2], &[1.0, 2.0]).unwrap();
        let c = (1.0 - a) / (1.0 + a);
        assert!((r[0] - c).abs() < 1e-11 && (r[1] - 2.0 * c).abs() < 1e-11);
    }
}

//! Exterior and Clifford algebra of `ℝⁿ`, `2 ≤ n ≤ 8`.
//!
//! A multivector stores `2ⁿ` coefficients indexed by blade bitmask: bit `j`
//! set means `e_{j+1}` is a factor, and every blade is kept in increasing
//! index order. All products reduce to the sign of the permutation that
//! sorts the concatenated index lists, which is read off the bitmasks by
//! counting inversions.
//!
//! Two Clifford products are provided: `∆` (`e_j² = +1`) and `∇`
//! (`e_j² = −1`). The interior products are the adjoints of `∧`:
//!
//! ```text
//! ⟨a ⌟ b, c⟩ = ⟨b, a ∧ c⟩        ⟨b ⌞ a, c⟩ = ⟨b, c ∧ a⟩
//! ```
//!
//! The Hodge stars are `★w = e_V ⌞ w` and `w★ = w ⌟ e_V`.
//!
//! ```
//! use dirac_beltrami::clifford::{cliff_pos, Multivector};
//! let e1 = Multivector::basis(3, &[1]).unwrap();
//! let e23 = Multivector::basis(3, &[2, 3]).unwrap();
//! let p = cliff_pos(&e1, &e23).unwrap();
//! assert_eq!(p, Multivector::basis(3, &[1, 2, 3]).unwrap());
//! ```

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use smallvec::{smallvec, SmallVec};

use crate::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

/// Choice of Clifford product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    /// `∆`, euclidean: `e_j ∆ e_j = 1`.
    Pos,
    /// `∇`, anti-euclidean: `e_j ∇ e_j = −1`.
    Neg,
}

/// Coefficient ring of a multivector: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn abs2(self) -> f64;
    fn is_zero(self) -> bool {
        self.abs2() == 0.0
    }
}

impl Scalar for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn abs2(self) -> f64 {
        self * self
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
}

/// Grade of the blade with bitmask `s`.
#[inline]
pub fn grade_of(s: usize) -> usize {
    s.count_ones() as usize
}

/// Sign of the permutation sorting the index list of `a` followed by that of
/// `b` (both already increasing).
#[inline]
pub fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `e_s ⋄ e_t = sign · e_{s△t}` for the Clifford product of the given signature.
#[inline]
pub fn blade_product(s: usize, t: usize, sig: Signature) -> (f64, usize) {
    let mut sign = reorder_sign(s, t);
    if sig == Signature::Neg && grade_of(s & t) % 2 == 1 {
        sign = -sign;
    }
    (sign, s ^ t)
}

#[inline]
fn grade_sign_reversion(k: usize) -> f64 {
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Slice-level kernels shared with the Fourier-side code. `out` is
/// overwritten; all slices have length `2ⁿ` except vector arguments
/// (length `n`).
pub mod kernels {
    use super::*;

    pub fn product_into<T: Scalar>(sig: Signature, a: &[T], b: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (s, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (t, &y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let (sign, u) = blade_product(s, t, sig);
                out[u] += x * y * sign;
            }
        }
    }

    pub fn wedge_into<T: Scalar>(a: &[T], b: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (s, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (t, &y) in b.iter().enumerate() {
                if s & t != 0 || y.is_zero() {
                    continue;
                }
                out[s | t] += x * y * reorder_sign(s, t);
            }
        }
    }

    /// `a ⌟ b`.
    pub fn lcontract_into<T: Scalar>(a: &[T], b: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (s, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (t, &y) in b.iter().enumerate() {
                if s & t != s || y.is_zero() {
                    continue;
                }
                let u = t ^ s;
                out[u] += x * y * reorder_sign(s, u);
            }
        }
    }

    /// `b ⌞ a`.
    pub fn rcontract_into<T: Scalar>(b: &[T], a: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (t, &y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (s, &x) in a.iter().enumerate() {
                if s & t != s || x.is_zero() {
                    continue;
                }
                let u = t ^ s;
                out[u] += x * y * reorder_sign(u, s);
            }
        }
    }

    /// `v ⋄ w` for a vector `v` given by its `n` components.
    #[inline]
    pub fn vector_left_into<T: Scalar>(sig: Signature, v: &[T], w: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (j, &vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let m = 1usize << j;
            for (s, &ws) in w.iter().enumerate() {
                if ws.is_zero() {
                    continue;
                }
                let (sign, u) = blade_product(m, s, sig);
                out[u] += vj * ws * sign;
            }
        }
    }

    /// `w ⋄ v` for a vector `v`.
    #[inline]
    pub fn vector_right_into<T: Scalar>(sig: Signature, w: &[T], v: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (j, &vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let m = 1usize << j;
            for (s, &ws) in w.iter().enumerate() {
                if ws.is_zero() {
                    continue;
                }
                let (sign, u) = blade_product(s, m, sig);
                out[u] += ws * vj * sign;
            }
        }
    }

    /// `v ∧ w` for a vector `v`.
    #[inline]
    pub fn vector_wedge_into<T: Scalar>(v: &[T], w: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (j, &vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let m = 1usize << j;
            for (s, &ws) in w.iter().enumerate() {
                if s & m != 0 {
                    continue;
                }
                out[s | m] += vj * ws * reorder_sign(m, s);
            }
        }
    }

    /// `v ⌟ w` for a vector `v`.
    #[inline]
    pub fn vector_lcontract_into<T: Scalar>(v: &[T], w: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (j, &vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let m = 1usize << j;
            for (s, &ws) in w.iter().enumerate() {
                if s & m == 0 {
                    continue;
                }
                let u = s ^ m;
                out[u] += vj * ws * reorder_sign(m, u);
            }
        }
    }

    pub fn involution_in_place<T: Scalar>(w: &mut [T]) {
        for (s, c) in w.iter_mut().enumerate() {
            if grade_of(s) % 2 == 1 {
                *c = -*c;
            }
        }
    }
}

/// Multivector over the coefficient ring `T`.
#[derive(Clone, PartialEq)]
pub struct Mv<T: Scalar> {
    dim: usize,
    coeffs: SmallVec<[T; 16]>,
}

/// Real multivector in `Λℝⁿ`.
pub type Multivector = Mv<f64>;
/// Complexified multivector, used on the Fourier side.
pub type ComplexMultivector = Mv<Complex64>;

fn check_dim(dim: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::DimOutOfRange { dim, min: MIN_DIM, max: MAX_DIM })
    }
}

fn same_dim<T: Scalar>(a: &Mv<T>, b: &Mv<T>) -> Result<()> {
    if a.dim == b.dim {
        Ok(())
    } else {
        Err(Error::DimMismatch(a.dim, b.dim))
    }
}

impl<T: Scalar> Mv<T> {
    /// The zero multivector. Panics if `dim` is outside `2..=8`; use
    /// [`Mv::from_coeffs`] for a fallible constructor.
    pub fn zero(dim: usize) -> Self {
        check_dim(dim).expect("multivector dimension");
        Mv { dim, coeffs: smallvec![T::zero(); 1 << dim] }
    }

    pub fn from_coeffs(dim: usize, coeffs: &[T]) -> Result<Self> {
        check_dim(dim)?;
        if coeffs.len() != 1 << dim {
            return Err(Error::DimMismatch(coeffs.len(), 1 << dim));
        }
        Ok(Mv { dim, coeffs: SmallVec::from_slice(coeffs) })
    }

    pub fn scalar(dim: usize, x: T) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[0] = x;
        m
    }

    /// Basis blade from a bitmask.
    pub fn blade(dim: usize, mask: usize) -> Result<Self> {
        check_dim(dim)?;
        if mask >> dim != 0 {
            return Err(Error::OutOfRange(format!("blade mask {mask:#b} in dimension {dim}")));
        }
        let mut m = Self::zero(dim);
        m.coeffs[mask] = T::from_real(1.0);
        Ok(m)
    }

    /// `e_{i₁} ∧ … ∧ e_{i_k}` from 1-based indices in any order; the sign of
    /// the sorting permutation is applied, repeated indices give zero.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        check_dim(dim)?;
        let mut acc = Self::scalar(dim, T::from_real(1.0));
        for &i in indices {
            if i == 0 || i > dim {
                return Err(Error::OutOfRange(format!("basis index {i} in dimension {dim}")));
            }
            let e = Self::blade(dim, 1 << (i - 1))?;
            acc = wedge(&acc, &e)?;
        }
        Ok(acc)
    }

    /// Grade-1 multivector with the given components.
    pub fn vector(comps: &[T]) -> Result<Self> {
        let dim = comps.len();
        check_dim(dim)?;
        let mut m = Self::zero(dim);
        for (j, &c) in comps.iter().enumerate() {
            m.coeffs[1 << j] = c;
        }
        Ok(m)
    }

    /// Unit volume blade `e_V = e_1 ∧ … ∧ e_n`.
    pub fn volume(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[(1 << dim) - 1] = T::from_real(1.0);
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    #[inline]
    pub fn get(&self, mask: usize) -> T {
        self.coeffs[mask]
    }

    #[inline]
    pub fn set(&mut self, mask: usize, v: T) {
        self.coeffs[mask] = v;
    }

    /// `⟨w⟩₀`.
    pub fn scalar_part(&self) -> T {
        self.coeffs[0]
    }

    /// Components of the grade-1 part.
    pub fn vector_part(&self) -> Vec<T> {
        (0..self.dim).map(|j| self.coeffs[1 << j]).collect()
    }

    /// `⟨w⟩ₖ`.
    pub fn grade_project(&self, k: usize) -> Self {
        let mut out = self.clone();
        for (s, c) in out.coeffs.iter_mut().enumerate() {
            if grade_of(s) != k {
                *c = T::zero();
            }
        }
        out
    }

    /// Grades carrying a coefficient of magnitude above `tol`.
    pub fn grades(&self, tol: f64) -> Vec<usize> {
        let mut g: Vec<usize> = (0..=self.dim)
            .filter(|&k| self.coeffs.iter().enumerate().any(|(s, c)| grade_of(s) == k && c.abs2().sqrt() > tol))
            .collect();
        g.dedup();
        g
    }

    /// Sum of squared coefficient magnitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs2()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, a: T) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c = *c * a);
        out
    }

    /// `ŵ`: grade-k part times `(−1)ᵏ`.
    pub fn involution(&self) -> Self {
        let mut out = self.clone();
        kernels::involution_in_place(&mut out.coeffs);
        out
    }

    /// `w̄`: grade-k part times `(−1)^{k(k−1)/2}`.
    pub fn reversion(&self) -> Self {
        let mut out = self.clone();
        for (s, c) in out.coeffs.iter_mut().enumerate() {
            *c = *c * grade_sign_reversion(grade_of(s));
        }
        out
    }

    pub fn is_homogeneous_vector(&self, tol: f64) -> bool {
        self.coeffs.iter().enumerate().all(|(s, c)| grade_of(s) == 1 || c.abs2().sqrt() <= tol)
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| (*a - *b).abs2().sqrt()).fold(0.0, f64::max)
    }
}

impl Multivector {
    /// Real part of a complex multivector.
    pub fn from_real_part(z: &ComplexMultivector) -> Self {
        Mv { dim: z.dim, coeffs: z.coeffs.iter().map(|c| c.re).collect() }
    }
}

impl ComplexMultivector {
    pub fn from_real(w: &Multivector) -> Self {
        Mv { dim: w.dim, coeffs: w.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect() }
    }
}

impl<T: Scalar> Add for &Mv<T> {
    type Output = Mv<T>;
    fn add(self, rhs: &Mv<T>) -> Mv<T> {
        assert_eq!(self.dim, rhs.dim, "multivector dimension mismatch");
        let mut out = self.clone();
        for (o, &r) in out.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *o += r;
        }
        out
    }
}

impl<T: Scalar> Sub for &Mv<T> {
    type Output = Mv<T>;
    fn sub(self, rhs: &Mv<T>) -> Mv<T> {
        assert_eq!(self.dim, rhs.dim, "multivector dimension mismatch");
        let mut out = self.clone();
        for (o, &r) in out.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *o -= r;
        }
        out
    }
}

impl<T: Scalar> Neg for &Mv<T> {
    type Output = Mv<T>;
    fn neg(self) -> Mv<T> {
        self.scale(T::from_real(-1.0))
    }
}

impl<T: Scalar> fmt::Debug for Mv<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mv{}[", self.dim)?;
        let mut first = true;
        for (s, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:?}")?;
            if s != 0 {
                write!(f, "·e")?;
                for j in 0..self.dim {
                    if s & (1 << j) != 0 {
                        write!(f, "{}", j + 1)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "]")
    }
}

fn binary<T: Scalar>(a: &Mv<T>, b: &Mv<T>, k: impl FnOnce(&[T], &[T], &mut [T])) -> Result<Mv<T>> {
    same_dim(a, b)?;
    let mut out = Mv::zero(a.dim);
    k(&a.coeffs, &b.coeffs, &mut out.coeffs);
    Ok(out)
}

/// `a ∧ b`.
pub fn wedge<T: Scalar>(a: &Mv<T>, b: &Mv<T>) -> Result<Mv<T>> {
    binary(a, b, kernels::wedge_into)
}

/// `a ⌟ b`, the adjoint of `a ∧ ·`.
pub fn lcontract<T: Scalar>(a: &Mv<T>, b: &Mv<T>) -> Result<Mv<T>> {
    binary(a, b, kernels::lcontract_into)
}

/// `a ⌞ b`, the adjoint of `· ∧ b`.
pub fn rcontract<T: Scalar>(a: &Mv<T>, b: &Mv<T>) -> Result<Mv<T>> {
    binary(a, b, kernels::rcontract_into)
}

pub fn product<T: Scalar>(a: &Mv<T>, b: &Mv<T>, sig: Signature) -> Result<Mv<T>> {
    binary(a, b, |x, y, o| kernels::product_into(sig, x, y, o))
}

/// `a ∆ b`.
pub fn cliff_pos<T: Scalar>(a: &Mv<T>, b: &Mv<T>) -> Result<Mv<T>> {
    product(a, b, Signature::Pos)
}

/// `a ∇ b`.
pub fn cliff_neg<T: Scalar>(a: &Mv<T>, b: &Mv<T>) -> Result<Mv<T>> {
    product(a, b, Signature::Neg)
}

pub fn involution<T: Scalar>(w: &Mv<T>) -> Mv<T> {
    w.involution()
}

pub fn reversion<T: Scalar>(w: &Mv<T>) -> Mv<T> {
    w.reversion()
}

/// `★w = e_V ⌞ w`.
pub fn hodge_left<T: Scalar>(w: &Mv<T>) -> Mv<T> {
    let mut out = Mv::zero(w.dim);
    kernels::rcontract_into(&Mv::<T>::volume(w.dim).coeffs, &w.coeffs, &mut out.coeffs);
    out
}

/// `w★ = w ⌟ e_V`.
pub fn hodge_right<T: Scalar>(w: &Mv<T>) -> Mv<T> {
    let mut out = Mv::zero(w.dim);
    kernels::lcontract_into(&w.coeffs, &Mv::<T>::volume(w.dim).coeffs, &mut out.coeffs);
    out
}

/// Euclidean inner product `Σ_s a_s b_s` (bilinear also for complex input).
pub fn inner<T: Scalar>(a: &Mv<T>, b: &Mv<T>) -> Result<T> {
    same_dim(a, b)?;
    let mut acc = T::zero();
    for (&x, &y) in a.coeffs.iter().zip(b.coeffs.iter()) {
        acc += x * y;
    }
    Ok(acc)
}

pub fn norm<T: Scalar>(w: &Mv<T>) -> f64 {
    w.norm()
}

/// Clifford inverse of a nonzero vector: `v/|v|²` for `∆`, `−v/|v|²` for `∇`.
pub fn vector_inverse(v: &Multivector, sig: Signature) -> Result<Multivector> {
    let scale = v.norm().max(1.0);
    if !v.is_homogeneous_vector(1e-14 * scale) {
        return Err(Error::NotVector);
    }
    let n2 = v.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s = match sig {
        Signature::Pos => 1.0 / n2,
        Signature::Neg => -1.0 / n2,
    };
    Ok(v.grade_project(1).scale(s))
}

/// `Bw = Σ_j e_j ∆ ŵ ∆ e_j`, evaluated by the sum.
pub fn b_op<T: Scalar>(w: &Mv<T>) -> Mv<T> {
    let n = w.dim;
    let hat = w.involution();
    let mut acc = Mv::zero(n);
    let mut tmp: SmallVec<[T; 16]> = smallvec![T::zero(); 1 << n];
    let mut tmp2: SmallVec<[T; 16]> = smallvec![T::zero(); 1 << n];
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::from_real(1.0);
        kernels::vector_left_into(Signature::Pos, &e, &hat.coeffs, &mut tmp);
        kernels::vector_right_into(Signature::Pos, &tmp, &e, &mut tmp2);
        for (a, &b) in acc.coeffs.iter_mut().zip(tmp2.iter()) {
            *a += b;
        }
    }
    acc
}

/// Skew Euler operator `Ew = Σ_j e_j ∧ (e_j ⌟ w)`; scales the grade-k part by
/// `k`, so that `B = nI − 2E`.
pub fn euler_op<T: Scalar>(w: &Mv<T>) -> Mv<T> {
    let n = w.dim;
    let mut acc = Mv::zero(n);
    let mut tmp: SmallVec<[T; 16]> = smallvec![T::zero(); 1 << n];
    let mut tmp2: SmallVec<[T; 16]> = smallvec![T::zero(); 1 << n];
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::from_real(1.0);
        kernels::vector_lcontract_into(&e, &w.coeffs, &mut tmp);
        kernels::vector_wedge_into(&e, &tmp, &mut tmp2);
        for (a, &b) in acc.coeffs.iter_mut().zip(tmp2.iter()) {
            *a += b;
        }
    }
    acc
}

/// Twisted adjoint action of a versor `q = v₁ ∆ … ∆ v_k`:
/// `q ∆ ŵ ∆ q⁻¹` for odd `q`, `q ∆ w ∆ q⁻¹` for even `q`. For a unit vector
/// `q = v` this is the exterior extension of the reflection in `v^⊥`.
pub fn rotor_conjugate(q: &Multivector, w: &Multivector) -> Result<Multivector> {
    same_dim(q, w)?;
    let scale = q.norm();
    if scale == 0.0 {
        return Err(Error::NotInvertible("zero versor".into()));
    }
    let tol = 1e-10 * scale * scale;
    let qq = cliff_pos(q, &q.reversion())?;
    let s = qq.scalar_part();
    if s.abs() <= tol || qq.grade_project(0).max_abs_diff(&qq) > tol {
        return Err(Error::NotInvertible("q ∆ q̄ is not a nonzero scalar".into()));
    }
    let even = q.coeffs.iter().enumerate().all(|(m, c)| grade_of(m).is_multiple_of(2) || c.abs() <= tol);
    let odd = q.coeffs.iter().enumerate().all(|(m, c)| grade_of(m) % 2 == 1 || c.abs() <= tol);
    let arg = match (even, odd) {
        (true, _) => w.clone(),
        (false, true) => w.involution(),
        (false, false) => return Err(Error::NotInvertible("q has mixed parity".into())),
    };
    let qinv = q.reversion().scale(1.0 / s);
    cliff_pos(&cliff_pos(q, &arg)?, &qinv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, idx: &[usize]) -> Multivector {
        Multivector::basis(n, idx).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(&e(3, &[1]), &e(3, &[2])).unwrap(), e(3, &[1, 2]));
        assert_eq!(wedge(&e(3, &[1]), &e(3, &[1])).unwrap(), Multivector::zero(3));
        let s = &e(3, &[1]) + &e(3, &[2]);
        assert_eq!(wedge(&s, &e(3, &[2])).unwrap(), e(3, &[1, 2]));
        assert_eq!(e(3, &[2, 1]), -&e(3, &[1, 2]));
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(lcontract(&e(2, &[1]), &e(2, &[1, 2])).unwrap(), e(2, &[2]));
        assert_eq!(lcontract(&e(2, &[1]), &e(2, &[2])).unwrap(), Multivector::zero(2));
        assert_eq!(rcontract(&e(2, &[1, 2]), &e(2, &[2])).unwrap(), e(2, &[1]));
    }

    #[test]
    fn clifford_examples() {
        let one = Multivector::scalar(3, 1.0);
        assert_eq!(cliff_pos(&e(3, &[1]), &e(3, &[1])).unwrap(), one);
        assert_eq!(cliff_neg(&e(3, &[1]), &e(3, &[1])).unwrap(), -&one);
        assert_eq!(cliff_pos(&e(3, &[1]), &e(3, &[2, 3])).unwrap(), e(3, &[1, 2, 3]));
    }

    #[test]
    fn involution_and_reversion_examples() {
        let w = &(&Multivector::scalar(2, 1.0) + &e(2, &[1])) + &e(2, &[1, 2]);
        let expect = &(&Multivector::scalar(2, 1.0) - &e(2, &[1])) + &e(2, &[1, 2]);
        assert_eq!(w.involution(), expect);
        assert_eq!(e(2, &[1, 2]).reversion(), -&e(2, &[1, 2]));
        assert_eq!(e(3, &[1, 2, 3]).reversion(), -&e(3, &[1, 2, 3]));
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(hodge_left(&Multivector::scalar(3, 1.0)), Multivector::volume(3));
        // e12 ⌞ e1 = −e2 since e2 ∧ e1 = −e12
        assert_eq!(hodge_left(&e(2, &[1])), -&e(2, &[2]));
        assert_eq!(hodge_right(&e(2, &[1])), e(2, &[2]));
    }

    #[test]
    fn vector_inverse_examples() {
        let e1 = e(3, &[1]);
        assert_eq!(vector_inverse(&e1, Signature::Pos).unwrap(), e1);
        assert_eq!(vector_inverse(&e1.scale(2.0), Signature::Pos).unwrap(), e1.scale(0.5));
        assert_eq!(vector_inverse(&e1, Signature::Neg).unwrap(), -&e1);
        assert!(matches!(vector_inverse(&Multivector::zero(3), Signature::Pos), Err(Error::ZeroVector)));
        assert!(matches!(vector_inverse(&e(3, &[1, 2]), Signature::Pos), Err(Error::NotVector)));
    }

    #[test]
    fn b_and_euler_examples() {
        assert_eq!(b_op(&e(3, &[1, 2])), -&e(3, &[1, 2]));
        assert_eq!(b_op(&Multivector::scalar(4, 1.0)), Multivector::scalar(4, 4.0));
        assert_eq!(euler_op(&e(4, &[1, 3, 4])), e(4, &[1, 3, 4]).scale(3.0));
    }

    #[test]
    fn rotor_examples() {
        let e1 = e(3, &[1]);
        assert_eq!(rotor_conjugate(&e1, &e1).unwrap(), -&e1);
        assert_eq!(rotor_conjugate(&e1, &e(3, &[2])).unwrap(), e(3, &[2]));
        assert!(rotor_conjugate(&(&e1 + &e(3, &[1, 2])), &e1).is_err());
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(wedge(&e(2, &[1]), &e(3, &[1])), Err(Error::DimMismatch(2, 3))));
        assert!(Multivector::from_coeffs(9, &[0.0; 512]).is_err());
        assert!(Multivector::basis(3, &[4]).is_err());
    }
}

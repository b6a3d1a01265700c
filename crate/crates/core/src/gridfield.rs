//! Multivector fields on a periodic grid `[0, L)ⁿ` with `N` nodes per axis.
//!
//! Nodes sit at `x = h·(i₁, …, iₙ)`, `h = L/N`, with the last axis fastest.
//! Field data is blade-major: blade `s` occupies `data[s·Nⁿ .. (s+1)·Nⁿ]`.
//! The forward transform is unnormalized and the inverse divides by `Nⁿ`.
//!
//! Wave numbers are `k ∈ {−N/2, …, N/2 − 1}` per axis and the wave vector is
//! `ξ = 2πk/L`, except that the Nyquist component `k = −N/2` is set to zero.
//! Derivative symbols therefore map real fields to real fields.
//!
//! # Snapshot format
//!
//! A 64-byte little-endian header followed by the payload:
//!
//! | offset | type    | content                    |
//! |--------|---------|----------------------------|
//! | 0      | `[u8;4]`| magic `HDGF`               |
//! | 4      | `u32`   | format version (1)         |
//! | 8      | `u32`   | dimension `n`              |
//! | 12     | `u32`   | points per axis `N`        |
//! | 16     | `f64`   | box length `L`             |
//! | 24     | 40 B    | zero                       |
//!
//! The payload is `Nⁿ·2ⁿ` `f64` values, point-major: all `2ⁿ` blade
//! coefficients of point 0, then point 1, and so on.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::clifford::{grade_of, kernels, Multivector, Signature};
use crate::linmaps::{self, minor, VectorMap};
use crate::{Error, Result};

pub const GRID_MIN_DIM: usize = 2;
pub const GRID_MAX_DIM: usize = 4;
/// Largest supported `2ⁿ` for grid fields.
pub const MAX_BLADES: usize = 1 << GRID_MAX_DIM;

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"HDGF";
pub const SNAPSHOT_VERSION: u32 = 1;
const SNAPSHOT_HEADER_LEN: usize = 64;

/// Periodic grid geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        if !(GRID_MIN_DIM..=GRID_MAX_DIM).contains(&dim) {
            return Err(Error::DimOutOfRange { dim, min: GRID_MIN_DIM, max: GRID_MAX_DIM });
        }
        if points_per_axis < 4 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {points_per_axis} is not a power of two ≥ 4")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {box_length} is not positive")));
        }
        let total = (points_per_axis as u64)
            .checked_pow(dim as u32)
            .and_then(|p| p.checked_mul(1 << dim))
            .filter(|&t| t <= 1 << 34);
        if total.is_none() {
            return Err(Error::InvalidGrid(format!("{points_per_axis}^{dim} points overflow")));
        }
        Ok(GridSpec { dim, n: points_per_axis, length: box_length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn npts(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn nblades(&self) -> usize {
        1 << self.dim
    }

    /// Same geometry with `N` multiplied by `factor` and `L` kept.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        GridSpec::new(self.dim, self.n * factor, self.length)
    }

    pub fn multi_index(&self, p: usize) -> [usize; GRID_MAX_DIM] {
        let mut idx = [0; GRID_MAX_DIM];
        let mut r = p;
        for a in (0..self.dim).rev() {
            idx[a] = r % self.n;
            r /= self.n;
        }
        idx
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.n + i % self.n)
    }

    /// Node coordinates `h·i`.
    pub fn coords(&self, p: usize) -> [f64; GRID_MAX_DIM] {
        let h = self.spacing();
        let idx = self.multi_index(p);
        let mut x = [0.0; GRID_MAX_DIM];
        for a in 0..self.dim {
            x[a] = h * idx[a] as f64;
        }
        x
    }

    pub fn center(&self) -> [f64; GRID_MAX_DIM] {
        let mut c = [0.0; GRID_MAX_DIM];
        c[..self.dim].iter_mut().for_each(|v| *v = 0.5 * self.length);
        c
    }

    /// Signed wave number of index `j` along an axis.
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Wave vector at spectral index `p`, Nyquist components zeroed.
    pub fn wavevector(&self, p: usize) -> [f64; GRID_MAX_DIM] {
        let idx = self.multi_index(p);
        let c = 2.0 * std::f64::consts::PI / self.length;
        let mut xi = [0.0; GRID_MAX_DIM];
        for a in 0..self.dim {
            if idx[a] != self.n / 2 {
                xi[a] = c * self.wavenumber(idx[a]) as f64;
            }
        }
        xi
    }

    /// Largest `|k|_∞` of the mode at spectral index `p` (Nyquist counts as `N/2`).
    pub fn mode_order(&self, p: usize) -> usize {
        let idx = self.multi_index(p);
        (0..self.dim).map(|a| self.wavenumber(idx[a]).unsigned_abs() as usize).max().unwrap_or(0)
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
        })
        .clone()
}

/// In-place `d`-dimensional transform of one `Nᵈ` array (last axis fastest).
/// The inverse is normalized.
pub fn fft_nd(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    const BATCH: usize = 64;
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let p = plans(n);
    let fft = if inverse { &p.inverse } else { &p.forward };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); BATCH * n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        for block in data.chunks_mut(n * stride) {
            let mut i0 = 0;
            while i0 < stride {
                let width = BATCH.min(stride - i0);
                for k in 0..n {
                    let row = &block[k * stride + i0..k * stride + i0 + width];
                    for (l, &v) in row.iter().enumerate() {
                        buf[l * n + k] = v;
                    }
                }
                fft.process_with_scratch(&mut buf[..width * n], &mut scratch);
                for k in 0..n {
                    let row = &mut block[k * stride + i0..k * stride + i0 + width];
                    for (l, v) in row.iter_mut().enumerate() {
                        *v = buf[l * n + k];
                    }
                }
                i0 += width;
            }
        }
    }
    if inverse {
        let s = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

/// Physical (real) or spectral (complex) representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Physical,
    Spectral,
}

impl Domain {
    fn name(self) -> &'static str {
        match self {
            Domain::Physical => "physical",
            Domain::Spectral => "spectral",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum FieldData {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// A `ΛV`-valued field on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct MultivectorGridField {
    spec: GridSpec,
    data: FieldData,
}

impl MultivectorGridField {
    pub fn zeros(spec: GridSpec) -> Self {
        MultivectorGridField { spec, data: FieldData::Physical(vec![0.0; spec.npts() * spec.nblades()]) }
    }

    pub fn spectral_zeros(spec: GridSpec) -> Self {
        MultivectorGridField {
            spec,
            data: FieldData::Spectral(vec![Complex64::new(0.0, 0.0); spec.npts() * spec.nblades()]),
        }
    }

    /// From blade-major physical data.
    pub fn from_physical(spec: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != spec.npts() * spec.nblades() {
            return Err(Error::DimMismatch(data.len(), spec.npts() * spec.nblades()));
        }
        Ok(MultivectorGridField { spec, data: FieldData::Physical(data) })
    }

    /// From blade-major spectral data.
    pub fn from_spectral(spec: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != spec.npts() * spec.nblades() {
            return Err(Error::DimMismatch(data.len(), spec.npts() * spec.nblades()));
        }
        Ok(MultivectorGridField { spec, data: FieldData::Spectral(data) })
    }

    /// Pointwise evaluation of `f` at the grid nodes.
    pub fn sample(spec: GridSpec, f: impl Fn(&[f64]) -> Multivector) -> Result<Self> {
        let npts = spec.npts();
        let mut data = vec![0.0; npts * spec.nblades()];
        for p in 0..npts {
            let x = spec.coords(p);
            let w = f(&x[..spec.dim]);
            if w.dim() != spec.dim {
                return Err(Error::DimMismatch(w.dim(), spec.dim));
            }
            for (s, &c) in w.coeffs().iter().enumerate() {
                data[s * npts + p] = c;
            }
        }
        Ok(MultivectorGridField { spec, data: FieldData::Physical(data) })
    }

    /// Field `f(x)·e_s` for a single blade.
    pub fn sample_blade(spec: GridSpec, blade: usize, f: impl Fn(&[f64]) -> f64) -> Self {
        let npts = spec.npts();
        let mut data = vec![0.0; npts * spec.nblades()];
        for p in 0..npts {
            let x = spec.coords(p);
            data[blade * npts + p] = f(&x[..spec.dim]);
        }
        MultivectorGridField { spec, data: FieldData::Physical(data) }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        match self.data {
            FieldData::Physical(_) => Domain::Physical,
            FieldData::Spectral(_) => Domain::Spectral,
        }
    }

    fn expect(&self, d: Domain) -> Result<()> {
        if self.domain() == d {
            Ok(())
        } else {
            Err(Error::DomainMismatch { expected: d.name(), found: self.domain().name() })
        }
    }

    pub fn physical(&self) -> Result<&[f64]> {
        match &self.data {
            FieldData::Physical(v) => Ok(v),
            FieldData::Spectral(_) => Err(Error::DomainMismatch { expected: "physical", found: "spectral" }),
        }
    }

    pub fn physical_mut(&mut self) -> Result<&mut [f64]> {
        match &mut self.data {
            FieldData::Physical(v) => Ok(v),
            FieldData::Spectral(_) => Err(Error::DomainMismatch { expected: "physical", found: "spectral" }),
        }
    }

    pub fn spectral(&self) -> Result<&[Complex64]> {
        match &self.data {
            FieldData::Spectral(v) => Ok(v),
            FieldData::Physical(_) => Err(Error::DomainMismatch { expected: "spectral", found: "physical" }),
        }
    }

    pub fn spectral_mut(&mut self) -> Result<&mut [Complex64]> {
        match &mut self.data {
            FieldData::Spectral(v) => Ok(v),
            FieldData::Physical(_) => Err(Error::DomainMismatch { expected: "spectral", found: "physical" }),
        }
    }

    /// Physical data of one blade.
    pub fn blade(&self, s: usize) -> Result<&[f64]> {
        let npts = self.spec.npts();
        Ok(&self.physical()?[s * npts..(s + 1) * npts])
    }

    pub fn blade_mut(&mut self, s: usize) -> Result<&mut [f64]> {
        let npts = self.spec.npts();
        Ok(&mut self.physical_mut()?[s * npts..(s + 1) * npts])
    }

    /// Whether every coefficient of blade `s` is exactly zero.
    pub fn is_blade_zero(&self, s: usize) -> bool {
        let npts = self.spec.npts();
        let r = s * npts..(s + 1) * npts;
        match &self.data {
            FieldData::Physical(v) => v[r].iter().all(|&x| x == 0.0),
            FieldData::Spectral(v) => v[r].iter().all(|x| x.re == 0.0 && x.im == 0.0),
        }
    }

    /// Multivector at point `p` (physical domain).
    pub fn at(&self, p: usize) -> Result<Multivector> {
        let v = self.physical()?;
        let npts = self.spec.npts();
        let coeffs: Vec<f64> = (0..self.spec.nblades()).map(|s| v[s * npts + p]).collect();
        Multivector::from_coeffs(self.spec.dim, &coeffs)
    }

    pub fn set_at(&mut self, p: usize, w: &Multivector) -> Result<()> {
        if w.dim() != self.spec.dim {
            return Err(Error::DimMismatch(w.dim(), self.spec.dim));
        }
        let npts = self.spec.npts();
        let v = self.physical_mut()?;
        for (s, &c) in w.coeffs().iter().enumerate() {
            v[s * npts + p] = c;
        }
        Ok(())
    }

    /// Forward transform of every nonzero blade.
    pub fn fft(&self) -> Result<Self> {
        self.expect(Domain::Physical)?;
        self.clone().into_spectral()
    }

    /// Inverse transform, keeping the real part.
    pub fn ifft(&self) -> Result<Self> {
        self.expect(Domain::Spectral)?;
        self.clone().into_physical()
    }

    pub fn into_spectral(self) -> Result<Self> {
        let spec = self.spec;
        let npts = spec.npts();
        let v = match self.data {
            FieldData::Physical(v) => v,
            FieldData::Spectral(_) => return Err(Error::DomainMismatch { expected: "physical", found: "spectral" }),
        };
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (src, dst) in v.chunks(npts).zip(out.chunks_mut(npts)) {
            if src.iter().all(|&x| x == 0.0) {
                continue;
            }
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = Complex64::new(s, 0.0);
            }
            fft_nd(dst, spec.dim, spec.n, false);
        }
        Ok(MultivectorGridField { spec, data: FieldData::Spectral(out) })
    }

    pub fn into_physical(self) -> Result<Self> {
        let spec = self.spec;
        let npts = spec.npts();
        let mut v = match self.data {
            FieldData::Spectral(v) => v,
            FieldData::Physical(_) => return Err(Error::DomainMismatch { expected: "spectral", found: "physical" }),
        };
        let mut out = vec![0.0; v.len()];
        for (src, dst) in v.chunks_mut(npts).zip(out.chunks_mut(npts)) {
            if src.iter().all(|x| x.re == 0.0 && x.im == 0.0) {
                continue;
            }
            fft_nd(src, spec.dim, spec.n, true);
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d = s.re;
            }
        }
        Ok(MultivectorGridField { spec, data: FieldData::Physical(out) })
    }

    /// Average value of each blade.
    pub fn mean(&self) -> Result<Multivector> {
        let npts = self.spec.npts();
        let coeffs: Vec<f64> = match &self.data {
            FieldData::Physical(v) => v.chunks(npts).map(|b| b.iter().sum::<f64>() / npts as f64).collect(),
            FieldData::Spectral(v) => v.chunks(npts).map(|b| b[0].re / npts as f64).collect(),
        };
        Multivector::from_coeffs(self.spec.dim, &coeffs)
    }

    pub fn add_constant(&mut self, w: &Multivector) -> Result<()> {
        if w.dim() != self.spec.dim {
            return Err(Error::DimMismatch(w.dim(), self.spec.dim));
        }
        let npts = self.spec.npts();
        match &mut self.data {
            FieldData::Physical(v) => {
                for (b, &c) in v.chunks_mut(npts).zip(w.coeffs()) {
                    b.iter_mut().for_each(|x| *x += c);
                }
            }
            FieldData::Spectral(v) => {
                for (b, &c) in v.chunks_mut(npts).zip(w.coeffs()) {
                    b[0] += c * npts as f64;
                }
            }
        }
        Ok(())
    }

    /// `self + a·other`.
    pub fn axpy(&mut self, a: f64, other: &MultivectorGridField) -> Result<()> {
        self.spec.check_same(&other.spec)?;
        match (&mut self.data, &other.data) {
            (FieldData::Physical(x), FieldData::Physical(y)) => {
                x.iter_mut().zip(y).for_each(|(p, q)| *p += a * q);
            }
            (FieldData::Spectral(x), FieldData::Spectral(y)) => {
                x.iter_mut().zip(y).for_each(|(p, q)| *p += q * a);
            }
            _ => return Err(Error::DomainMismatch { expected: self.domain().name(), found: other.domain().name() }),
        }
        Ok(())
    }

    pub fn add(&self, other: &MultivectorGridField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &MultivectorGridField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        match &mut out.data {
            FieldData::Physical(v) => v.iter_mut().for_each(|x| *x *= a),
            FieldData::Spectral(v) => v.iter_mut().for_each(|x| *x *= a),
        }
        out
    }

    /// Blades of grade `k` only.
    pub fn grade_project(&self, k: usize) -> Self {
        self.filter_blades(|s| grade_of(s) == k)
    }

    /// Keep the blades selected by `keep`.
    pub fn filter_blades(&self, keep: impl Fn(usize) -> bool) -> Self {
        let npts = self.spec.npts();
        let mut out = self.clone();
        match &mut out.data {
            FieldData::Physical(v) => {
                for (s, b) in v.chunks_mut(npts).enumerate() {
                    if !keep(s) {
                        b.fill(0.0);
                    }
                }
            }
            FieldData::Spectral(v) => {
                for (s, b) in v.chunks_mut(npts).enumerate() {
                    if !keep(s) {
                        b.fill(Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
        out
    }

    /// Grades carrying a coefficient above `tol` in absolute value.
    pub fn grades(&self, tol: f64) -> Result<Vec<usize>> {
        let npts = self.spec.npts();
        let v = self.physical()?;
        let mut gs: Vec<usize> = v
            .chunks(npts)
            .enumerate()
            .filter(|(_, b)| b.iter().any(|x| x.abs() > tol))
            .map(|(s, _)| grade_of(s))
            .collect();
        gs.sort_unstable();
        gs.dedup();
        Ok(gs)
    }

    /// Apply `f(x, w, out)` at every point of a physical field.
    pub fn map_pointwise(&self, f: impl Fn(&[f64], &[f64], &mut [f64])) -> Result<Self> {
        let v = self.physical()?;
        let npts = self.spec.npts();
        let nb = self.spec.nblades();
        let dim = self.spec.dim;
        let mut out = vec![0.0; v.len()];
        let mut w = [0.0; MAX_BLADES];
        let mut o = [0.0; MAX_BLADES];
        for p in 0..npts {
            for s in 0..nb {
                w[s] = v[s * npts + p];
            }
            let x = self.spec.coords(p);
            f(&x[..dim], &w[..nb], &mut o[..nb]);
            for s in 0..nb {
                out[s * npts + p] = o[s];
            }
        }
        Ok(MultivectorGridField { spec: self.spec, data: FieldData::Physical(out) })
    }

    /// Apply `f(a, b, out)` pointwise to two physical fields.
    pub fn zip_pointwise(&self, other: &MultivectorGridField, f: impl Fn(&[f64], &[f64], &mut [f64])) -> Result<Self> {
        self.spec.check_same(&other.spec)?;
        let (a, b) = (self.physical()?, other.physical()?);
        let npts = self.spec.npts();
        let nb = self.spec.nblades();
        let mut out = vec![0.0; a.len()];
        let (mut wa, mut wb, mut o) = ([0.0; MAX_BLADES], [0.0; MAX_BLADES], [0.0; MAX_BLADES]);
        for p in 0..npts {
            for s in 0..nb {
                wa[s] = a[s * npts + p];
                wb[s] = b[s * npts + p];
            }
            f(&wa[..nb], &wb[..nb], &mut o[..nb]);
            for s in 0..nb {
                out[s * npts + p] = o[s];
            }
        }
        Ok(MultivectorGridField { spec: self.spec, data: FieldData::Physical(out) })
    }

    /// Pointwise `self ⋄ other` for the Clifford product of signature `sig`.
    pub fn product(&self, other: &MultivectorGridField, sig: Signature) -> Result<Self> {
        self.zip_pointwise(other, |a, b, o| kernels::product_into(sig, a, b, o))
    }

    /// Pointwise `self ∧ other`.
    pub fn wedge(&self, other: &MultivectorGridField) -> Result<Self> {
        self.zip_pointwise(other, kernels::wedge_into)
    }

    pub fn involution(&self) -> Self {
        self.filter_sign(|s| grade_of(s) % 2 == 1)
    }

    pub fn reversion(&self) -> Self {
        self.filter_sign(|s| (grade_of(s) / 2) % 2 == 1)
    }

    fn filter_sign(&self, negate: impl Fn(usize) -> bool) -> Self {
        let npts = self.spec.npts();
        let mut out = self.clone();
        match &mut out.data {
            FieldData::Physical(v) => {
                for (s, b) in v.chunks_mut(npts).enumerate() {
                    if negate(s) {
                        b.iter_mut().for_each(|x| *x = -*x);
                    }
                }
            }
            FieldData::Spectral(v) => {
                for (s, b) in v.chunks_mut(npts).enumerate() {
                    if negate(s) {
                        b.iter_mut().for_each(|x| *x = -*x);
                    }
                }
            }
        }
        out
    }

    /// Pointwise `★F = e_V ⌞ F`.
    pub fn hodge_left(&self) -> Result<Self> {
        let vol = Multivector::volume(self.spec.dim);
        self.map_pointwise(|_, w, o| kernels::rcontract_into(vol.coeffs(), w, o))
    }

    /// Pointwise `F★ = F ⌟ e_V`.
    pub fn hodge_right(&self) -> Result<Self> {
        let vol = Multivector::volume(self.spec.dim);
        self.map_pointwise(|_, w, o| kernels::lcontract_into(w, vol.coeffs(), o))
    }

    /// Discrete `L²` pairing `hⁿ Σ_x ⟨F(x), G(x)⟩`.
    pub fn inner(&self, other: &MultivectorGridField) -> Result<f64> {
        self.spec.check_same(&other.spec)?;
        let s: f64 = self.physical()?.iter().zip(other.physical()?).map(|(a, b)| a * b).sum();
        Ok(s * self.spec.cell_volume())
    }

    pub fn l2_norm(&self) -> Result<f64> {
        self.lp_norm(2.0)
    }

    /// `(hⁿ Σ |F(x)|ᵖ)^{1/p}` with the multivector norm; `p = ∞` is the maximum.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::OutOfRange(format!("Lᵖ exponent {p} < 1")));
        }
        let pw = self.pointwise_norms()?;
        if p.is_infinite() {
            return Ok(pw.iter().copied().fold(0.0, f64::max));
        }
        let s: f64 = if p == 2.0 { pw.iter().map(|x| x * x).sum() } else { pw.iter().map(|x| x.powf(p)).sum() };
        Ok((s * self.spec.cell_volume()).powf(1.0 / p))
    }

    /// `|F(x)|` at every point.
    pub fn pointwise_norms(&self) -> Result<Vec<f64>> {
        let v = self.physical()?;
        let npts = self.spec.npts();
        let mut acc = vec![0.0; npts];
        for b in v.chunks(npts) {
            acc.iter_mut().zip(b).for_each(|(a, x)| *a += x * x);
        }
        acc.iter_mut().for_each(|a| *a = a.sqrt());
        Ok(acc)
    }

    pub fn max_abs(&self) -> f64 {
        match &self.data {
            FieldData::Physical(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            FieldData::Spectral(v) => v.iter().fold(0.0, |m, x| m.max(x.norm())),
        }
    }

    pub fn max_abs_diff(&self, other: &MultivectorGridField) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Zero mode removed.
    pub fn mean_project(&self) -> Self {
        let npts = self.spec.npts();
        let mut out = self.clone();
        match &mut out.data {
            FieldData::Physical(v) => {
                for b in v.chunks_mut(npts) {
                    let m = b.iter().sum::<f64>() / npts as f64;
                    b.iter_mut().for_each(|x| *x -= m);
                }
            }
            FieldData::Spectral(v) => {
                for b in v.chunks_mut(npts) {
                    b[0] = Complex64::new(0.0, 0.0);
                }
            }
        }
        out
    }

    /// Zero every spectral mode with `|k|_∞ > max_order`.
    pub fn band_limit(&self, max_order: usize) -> Result<Self> {
        let mut s = self.fft()?;
        let spec = self.spec;
        let npts = spec.npts();
        let data = s.spectral_mut()?;
        for p in 0..npts {
            if spec.mode_order(p) > max_order {
                for b in 0..spec.nblades() {
                    data[b * npts + p] = Complex64::new(0.0, 0.0);
                }
            }
        }
        s.into_physical()
    }
}

/// A real scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGridField {
    spec: GridSpec,
    data: Vec<f64>,
}

impl ScalarGridField {
    pub fn sample(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let data = (0..spec.npts()).map(|p| f(&spec.coords(p)[..spec.dim])).collect();
        ScalarGridField { spec, data }
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        ScalarGridField { spec, data: vec![c; spec.npts()] }
    }

    pub fn from_values(spec: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != spec.npts() {
            return Err(Error::DimMismatch(data.len(), spec.npts()));
        }
        Ok(ScalarGridField { spec, data })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// As the grade-0 part of a multivector field.
    pub fn to_multivector(&self) -> MultivectorGridField {
        let mut data = vec![0.0; self.spec.npts() * self.spec.nblades()];
        data[..self.spec.npts()].copy_from_slice(&self.data);
        MultivectorGridField { spec: self.spec, data: FieldData::Physical(data) }
    }

    /// Spectral gradient `∇η` as a vector field.
    pub fn gradient(&self) -> MultivectorGridField {
        let spec = self.spec;
        let npts = spec.npts();
        let mut hat: Vec<Complex64> = self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft_nd(&mut hat, spec.dim, spec.n, false);
        let mut out = vec![0.0; npts * spec.nblades()];
        let mut buf = vec![Complex64::new(0.0, 0.0); npts];
        for a in 0..spec.dim {
            for (p, b) in buf.iter_mut().enumerate() {
                let xi = spec.wavevector(p)[a];
                *b = hat[p] * Complex64::new(0.0, xi);
            }
            fft_nd(&mut buf, spec.dim, spec.n, true);
            let blade = 1 << a;
            for (o, b) in out[blade * npts..(blade + 1) * npts].iter_mut().zip(&buf) {
                *o = b.re;
            }
        }
        MultivectorGridField { spec, data: FieldData::Physical(out) }
    }
}

/// How an [`EndoGridField`] acts on multivectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndoMode {
    /// `ℳ(x)` on the grade-1 part; other grades are sent to zero.
    Vector,
    /// Exterior extension `ℳ̂(x)` on grades `≥ min_grade`; lower grades are
    /// sent to zero.
    Extension { min_grade: usize },
    /// `μ(x)·I` on all of `ΛV`.
    Isotropic,
}

/// A field of linear maps `ℳ(x)`, stored as `n×n` matrices (or scalars
/// `μ(x)` in isotropic mode) and extended to `ΛV` on application.
#[derive(Clone, Debug)]
pub struct EndoGridField {
    spec: GridSpec,
    mode: EndoMode,
    entries: Vec<f64>,
    sup_norm: f64,
}

impl EndoGridField {
    /// `ℳ(x) = f(x)` in vector or extension mode.
    pub fn from_fn(spec: GridSpec, mode: EndoMode, f: impl Fn(&[f64]) -> VectorMap) -> Result<Self> {
        if mode == EndoMode::Isotropic {
            return Err(Error::OutOfRange("isotropic fields are built with EndoGridField::isotropic".into()));
        }
        let n = spec.dim;
        let mut entries = Vec::with_capacity(spec.npts() * n * n);
        let mut sup: f64 = 0.0;
        for p in 0..spec.npts() {
            let m = f(&spec.coords(p)[..n]);
            if m.dim() != n {
                return Err(Error::DimMismatch(m.dim(), n));
            }
            sup = sup.max(linmaps::operator_norm(&m));
            entries.extend(m.to_row_vec());
        }
        if !sup.is_finite() {
            return Err(Error::OutOfRange("non-finite coefficient".into()));
        }
        Ok(EndoGridField { spec, mode, entries, sup_norm: sup })
    }

    pub fn constant(spec: GridSpec, mode: EndoMode, m: &VectorMap) -> Result<Self> {
        EndoGridField::from_fn(spec, mode, |_| m.clone())
    }

    /// `ℳ(x) = μ(x)·I_{ΛV}`.
    pub fn isotropic(spec: GridSpec, mu: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let entries: Vec<f64> = (0..spec.npts()).map(|p| mu(&spec.coords(p)[..spec.dim])).collect();
        let sup = entries.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !sup.is_finite() {
            return Err(Error::OutOfRange("non-finite coefficient".into()));
        }
        Ok(EndoGridField { spec, mode: EndoMode::Isotropic, entries, sup_norm: sup })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn mode(&self) -> EndoMode {
        self.mode
    }

    /// `max_x ‖ℳ(x)‖`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// `max_x` of the norm of the map actually applied to `ΛV`.
    pub fn applied_norm(&self) -> f64 {
        match self.mode {
            EndoMode::Vector | EndoMode::Isotropic => self.sup_norm,
            EndoMode::Extension { min_grade } => {
                if min_grade == 0 {
                    return self.sup_norm.max(1.0);
                }
                if self.sup_norm <= 1.0 {
                    return self.sup_norm;
                }
                (0..self.spec.npts())
                    .map(|p| linmaps::ext_operator_norm(&linmaps::exterior_extend(&self.map_at(p)), min_grade))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// `ℳ(x)` at point `p` (`μ·I` in isotropic mode).
    pub fn map_at(&self, p: usize) -> VectorMap {
        let n = self.spec.dim;
        match self.mode {
            EndoMode::Isotropic => VectorMap::scaled_identity(n, self.entries[p]),
            _ => VectorMap::from_row_slice(n, &self.entries[p * n * n..(p + 1) * n * n]).expect("stored n×n"),
        }
    }

    /// Same maps, different mode.
    pub fn with_mode(&self, mode: EndoMode) -> Result<Self> {
        if (mode == EndoMode::Isotropic) != (self.mode == EndoMode::Isotropic) {
            return Err(Error::OutOfRange("cannot convert between isotropic and matrix storage".into()));
        }
        Ok(EndoGridField { mode, ..self.clone() })
    }

    /// Pointwise transform of the stored maps.
    pub fn map(&self, f: impl Fn(&VectorMap) -> Result<VectorMap>) -> Result<Self> {
        if self.mode == EndoMode::Isotropic {
            return Err(Error::OutOfRange("isotropic fields store scalars".into()));
        }
        EndoGridField::from_point_fn(self.spec, self.mode, |p| f(&self.map_at(p)))
    }

    /// `ℳ` set to zero at the points where `keep` is false.
    pub fn masked(&self, keep: &[bool]) -> Result<Self> {
        if keep.len() != self.spec.npts() {
            return Err(Error::DimMismatch(keep.len(), self.spec.npts()));
        }
        let mut out = self.clone();
        let stride = if self.mode == EndoMode::Isotropic { 1 } else { self.spec.dim * self.spec.dim };
        for (chunk, &k) in out.entries.chunks_mut(stride).zip(keep) {
            if !k {
                chunk.fill(0.0);
            }
        }
        out.sup_norm = match self.mode {
            EndoMode::Isotropic => out.entries.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            _ => (0..self.spec.npts())
                .filter(|&p| keep[p])
                .map(|p| linmaps::operator_norm(&out.map_at(p)))
                .fold(0.0, f64::max),
        };
        Ok(out)
    }

    /// `ℳ` at node `p` given by `f(p)`, in vector or extension mode.
    pub fn from_point_fn(spec: GridSpec, mode: EndoMode, f: impl Fn(usize) -> Result<VectorMap>) -> Result<Self> {
        if mode == EndoMode::Isotropic {
            return Err(Error::OutOfRange("isotropic fields are built with EndoGridField::isotropic".into()));
        }
        let n = spec.dim;
        let mut entries = Vec::with_capacity(spec.npts() * n * n);
        let mut sup: f64 = 0.0;
        for p in 0..spec.npts() {
            let m = f(p)?;
            sup = sup.max(linmaps::operator_norm(&m));
            entries.extend(m.to_row_vec());
        }
        Ok(EndoGridField { spec, mode, entries, sup_norm: sup })
    }

    /// Apply the map at point `p` to the coefficient slice `w`.
    pub fn apply_point(&self, p: usize, w: &[f64], out: &mut [f64]) {
        let n = self.spec.dim;
        out.iter_mut().for_each(|o| *o = 0.0);
        match self.mode {
            EndoMode::Isotropic => {
                let mu = self.entries[p];
                out.iter_mut().zip(w).for_each(|(o, x)| *o = mu * x);
            }
            EndoMode::Vector => {
                let t = &self.entries[p * n * n..(p + 1) * n * n];
                for i in 0..n {
                    out[1 << i] = (0..n).map(|j| t[i * n + j] * w[1 << j]).sum();
                }
            }
            EndoMode::Extension { min_grade } => {
                let t = &self.entries[p * n * n..(p + 1) * n * n];
                let tables = blade_tables(n);
                for k in min_grade..=n {
                    let blades = &tables.by_grade[k];
                    for &s in blades {
                        let ws = w[s];
                        if ws == 0.0 {
                            continue;
                        }
                        for &u in blades {
                            out[u] += ws * minor(t, n, &tables.bits[u], &tables.bits[s]);
                        }
                    }
                }
            }
        }
    }

    /// `x ↦ ℳ(x)F(x)`.
    pub fn apply(&self, f: &MultivectorGridField) -> Result<MultivectorGridField> {
        self.spec.check_same(&f.spec)?;
        let v = f.physical()?;
        let npts = self.spec.npts();
        let nb = self.spec.nblades();
        let mut out = vec![0.0; v.len()];
        let (mut w, mut o) = ([0.0; MAX_BLADES], [0.0; MAX_BLADES]);
        for p in 0..npts {
            for s in 0..nb {
                w[s] = v[s * npts + p];
            }
            self.apply_point(p, &w[..nb], &mut o[..nb]);
            for s in 0..nb {
                out[s * npts + p] = o[s];
            }
        }
        Ok(MultivectorGridField { spec: self.spec, data: FieldData::Physical(out) })
    }
}

struct BladeTables {
    bits: Vec<Vec<usize>>,
    by_grade: Vec<Vec<usize>>,
}

fn blade_tables(n: usize) -> &'static BladeTables {
    static TABLES: OnceLock<Vec<BladeTables>> = OnceLock::new();
    let all = TABLES.get_or_init(|| {
        (0..=GRID_MAX_DIM)
            .map(|d| BladeTables {
                bits: (0..1usize << d).map(|s| (0..d).filter(|j| s & (1 << j) != 0).collect()).collect(),
                by_grade: (0..=d).map(|k| linmaps::grade_blades(d, k)).collect(),
            })
            .collect()
    });
    &all[n]
}

/// `x ↦ ℳ(x)F(x)`.
pub fn apply_endo(m: &EndoGridField, f: &MultivectorGridField) -> Result<MultivectorGridField> {
    m.apply(f)
}

/// `x ↦ η(x)F(x)`.
pub fn cutoff_apply(eta: &ScalarGridField, f: &MultivectorGridField) -> Result<MultivectorGridField> {
    eta.spec.check_same(&f.spec)?;
    let mut out = f.clone();
    let npts = f.spec.npts();
    for b in out.physical_mut()?.chunks_mut(npts) {
        b.iter_mut().zip(&eta.data).for_each(|(x, e)| *x *= e);
    }
    Ok(out)
}

/// `σ_ℳ(∇η, x)F = ∇η ∇ F − ℳ(x)(∇η ∆ F)`, with `∇η` computed spectrally.
pub fn symbol_source(
    eta: &ScalarGridField,
    m: &EndoGridField,
    f: &MultivectorGridField,
) -> Result<MultivectorGridField> {
    eta.spec.check_same(&f.spec)?;
    let grad = eta.gradient();
    let neg = grad.product(f, Signature::Neg)?;
    let pos = grad.product(f, Signature::Pos)?;
    neg.sub(&m.apply(&pos)?)
}

/// Write a physical field in the snapshot format.
pub fn write_snapshot(f: &MultivectorGridField, path: &Path) -> Result<()> {
    let v = f.physical()?;
    let spec = f.spec;
    let mut w = BufWriter::new(File::create(path)?);
    let mut header = [0u8; SNAPSHOT_HEADER_LEN];
    header[0..4].copy_from_slice(&SNAPSHOT_MAGIC);
    header[4..8].copy_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    header[8..12].copy_from_slice(&(spec.dim as u32).to_le_bytes());
    header[12..16].copy_from_slice(&(spec.n as u32).to_le_bytes());
    header[16..24].copy_from_slice(&spec.length.to_le_bytes());
    w.write_all(&header)?;
    let npts = spec.npts();
    for p in 0..npts {
        for s in 0..spec.nblades() {
            w.write_all(&v[s * npts + p].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a field written by [`write_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<MultivectorGridField> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; SNAPSHOT_HEADER_LEN];
    r.read_exact(&mut header).map_err(|_| Error::Snapshot("truncated header".into()))?;
    if header[0..4] != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().expect("4 bytes"));
    let version = u32_at(4);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let dim = u32_at(8) as usize;
    let n = u32_at(12) as usize;
    let length = f64::from_le_bytes(header[16..24].try_into().expect("8 bytes"));
    let spec = GridSpec::new(dim, n, length).map_err(|e| Error::Snapshot(format!("bad header: {e}")))?;
    let npts = spec.npts();
    let nb = spec.nblades();
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != npts * nb * 8 {
        return Err(Error::Snapshot(format!("payload has {} bytes, expected {}", payload.len(), npts * nb * 8)));
    }
    let mut data = vec![0.0; npts * nb];
    for (i, chunk) in payload.chunks_exact(8).enumerate() {
        let (p, s) = (i / nb, i % nb);
        data[s * npts + p] = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
    }
    MultivectorGridField::from_physical(spec, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(2, 16, 1.0).is_ok());
        assert!(GridSpec::new(5, 16, 1.0).is_err());
        assert!(GridSpec::new(2, 12, 1.0).is_err());
        assert!(GridSpec::new(2, 16, 0.0).is_err());
        let g = GridSpec::new(3, 8, 2.0).unwrap();
        assert_eq!(g.npts(), 512);
        assert_eq!(g.linear_index(&g.multi_index(300)), 300);
        assert_eq!(g.wavenumber(5), -3);
        assert_eq!(g.wavevector(g.linear_index(&[4, 1, 0]))[..3], [0.0, PI, 0.0]);
    }

    #[test]
    fn sample_and_modes() {
        let g = GridSpec::new(2, 16, 2.0).unwrap();
        let c = MultivectorGridField::sample(g, |_| Multivector::scalar(2, 3.0)).unwrap();
        assert!(c.blade(0).unwrap().iter().all(|&x| x == 3.0));
        let s = MultivectorGridField::sample_blade(g, 1, |x| (PI * x[0]).sin());
        let hat = s.fft().unwrap();
        let npts = g.npts();
        let nonzero: Vec<usize> = (0..npts).filter(|&p| hat.spectral().unwrap()[npts + p].norm() > 1e-9).collect();
        assert_eq!(nonzero, vec![g.linear_index(&[1, 0]), g.linear_index(&[15, 0])]);
    }

    #[test]
    fn mean_project_and_norms() {
        let g = GridSpec::new(2, 8, 2.0).unwrap();
        let c = MultivectorGridField::sample(g, |_| Multivector::scalar(2, 1.5)).unwrap();
        assert_eq!(c.mean_project().max_abs(), 0.0);
        assert!((c.lp_norm(2.0).unwrap() - 1.5 * 2.0).abs() < 1e-14);
        assert!((c.lp_norm(1.0).unwrap() - 1.5 * 4.0).abs() < 1e-14);
        assert_eq!(c.lp_norm(f64::INFINITY).unwrap(), 1.5);
        assert!(c.lp_norm(0.5).is_err());
        let half = MultivectorGridField::sample_blade(g, 0, |x| if x[0] < 1.0 { 1.0 } else { 0.0 });
        assert!((half.l2_norm().unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn endo_modes() {
        let g = GridSpec::new(3, 4, 1.0).unwrap();
        let f = MultivectorGridField::sample(g, |x| {
            Multivector::from_coeffs(3, &(0..8).map(|s| (s as f64 + 1.0) * (x[0] + 0.3)).collect::<Vec<_>>()).unwrap()
        })
        .unwrap();
        let zero = EndoGridField::constant(g, EndoMode::Extension { min_grade: 1 }, &VectorMap::zero(3)).unwrap();
        assert_eq!(zero.apply(&f).unwrap().max_abs(), 0.0);
        let c = 0.7;
        let ext = EndoGridField::constant(g, EndoMode::Extension { min_grade: 0 }, &VectorMap::scaled_identity(3, c))
            .unwrap();
        let out = ext.apply(&f).unwrap();
        for k in 0..=3 {
            let expect = f.grade_project(k).scale(c.powi(k as i32));
            assert!(out.grade_project(k).max_abs_diff(&expect).unwrap() < 1e-15);
        }
        let vec = EndoGridField::constant(g, EndoMode::Vector, &VectorMap::scaled_identity(3, c)).unwrap();
        assert!(vec.apply(&f).unwrap().max_abs_diff(&f.grade_project(1).scale(c)).unwrap() < 1e-15);
        let iso = EndoGridField::isotropic(g, |x| x[1] - 0.5).unwrap();
        let expect = f.map_pointwise(|x, w, o| o.iter_mut().zip(w).for_each(|(o, w)| *o = (x[1] - 0.5) * w)).unwrap();
        assert_eq!(iso.apply(&f).unwrap(), expect);
        assert_eq!(iso.sup_norm(), 0.5);
    }

    #[test]
    fn symbol_source_examples() {
        let g = GridSpec::new(2, 16, 1.0).unwrap();
        let f = MultivectorGridField::sample_blade(g, 1, |x| (2.0 * PI * x[1]).cos());
        let one = ScalarGridField::constant(g, 1.0);
        let m = EndoGridField::constant(g, EndoMode::Extension { min_grade: 1 }, &VectorMap::scaled_identity(2, 0.3))
            .unwrap();
        assert_eq!(symbol_source(&one, &m, &f).unwrap().max_abs(), 0.0);
        assert_eq!(cutoff_apply(&one, &f).unwrap(), f);
    }

    #[test]
    fn snapshot_errors() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(2, 4, 1.5).unwrap();
        let f = MultivectorGridField::sample(g, |x| Multivector::vector(&[x[0], -x[1]]).unwrap()).unwrap();
        let path = dir.path().join("f.hdgf");
        write_snapshot(&f, &path).unwrap();
        assert_eq!(read_snapshot(&path).unwrap(), f);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 64 + 16 * 4 * 8);
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Snapshot(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Snapshot(_))));
        assert!(write_snapshot(&f.fft().unwrap(), &path).is_err());
    }
}

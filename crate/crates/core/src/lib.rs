//! Exterior/Clifford algebra, linear-map calculus, periodic grid fields,
//! spectral Hodge-Dirac, Cauchy and Beurling-Ahlfors operators, and
//! fixed-point solvers for first-order Dirac-Beltrami systems.
//!
//! Module layering, bottom to top:
//!
//! - [`clifford`]: multivectors over an orthonormal basis, all products,
//!   involutions, Hodge stars.
//! - [`linmaps`]: exterior extension, Grassmann dual, Cayley transform,
//!   ellipticity constants.
//! - [`gridfield`]: periodic grids of multivectors and of linear maps,
//!   FFT transport, snapshots.
//! - [`spectral`]: Fourier-multiplier realizations of `d`, `δ`, `𝒟±`, `𝒞±`,
//!   `𝒮` and the Riesz transforms, plus a zero-padded free-space Cauchy
//!   transform.
//! - [`solver`]: Neumann-series and successive-approximation solvers,
//!   second-order reduction and the local-estimate experiments.

pub mod clifford;
pub mod gridfield;
pub mod linmaps;
pub mod solver;
pub mod spectral;

mod error;

pub use error::{Error, Result};

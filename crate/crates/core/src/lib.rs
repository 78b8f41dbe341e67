//! Numerical core for two-dimensional Laplacian growth (Hele-Shaw flow).
//!
//! Throughout the crate `Δ` denotes `∂²/∂z∂z̄`, a quarter of the standard
//! Laplacian, so that `φ = |z|²` has `Δφ = 1`. Densities `ρ = 1/κ` play the
//! role of `Δφ`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cauchy;
pub mod contour;
pub mod curve;
pub mod density;
mod error;
pub mod fronttrack;
pub mod grid;
pub mod linalg;
pub mod momentflow;
pub mod moments;
pub mod obstacle;
pub mod potentials;
pub mod quadrature;
pub mod rules;

/// Items every numerical module needs. `Float` supplies `f64` math under
/// `no_std`; when std is linked the inherent methods take precedence, so it is
/// brought in by glob to stay warning-free in both builds.
mod prelude {
    pub use crate::Complex;
    pub use alloc::vec::Vec;
    pub use num_traits::Float;
}

pub use num_complex::Complex64 as Complex;

pub use cauchy::{BoundaryFunction, LaurentTail, SchwarzData};
pub use curve::MarkerCurve;
pub use density::DensityField;
pub use error::{Error, Result};
pub use grid::ScalarGrid;
pub use moments::MomentSeries;

/// `(2γ + ln 8)/π`: constant term of the five-point lattice Green's function,
/// `a(x) = (2/π)(log|x| + γ + ln 8 / 2) + o(1)`.
pub const LATTICE_GREEN_CONSTANT: f64 = 1.029_373_705_654_571;

//! Flat tori, spectral geometry and the continuity-method solvers built on
//! `fnell-core`.
//!
//! * [`grid`], [`field`] and [`spectral`]: periodic grids, sampled fields and
//!   FFT derivatives.
//! * [`geometry`]: `A[u]`, quadrature, form ratios and the constant `c`.
//! * [`solver`]: Newton-Krylov with the unknown constant and the Hessian,
//!   quotient and Riemannian paths.
//! * [`monitors`]: the gradient/second-order ratio and the trace estimate.
//! * [`generators`] and [`io`]: named backgrounds and field files.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod field;
pub mod generators;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod monitors;
pub mod solver;
pub mod spectral;

pub use error::{Result, TorusError};
pub use field::{MatrixField, ScalarField};
pub use grid::{GridMode, PeriodicGrid};

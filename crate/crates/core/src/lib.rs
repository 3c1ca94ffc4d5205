//! Symmetric eigenvalue operators for fully nonlinear elliptic equations of the
//! form `F(A) = f(λ(A)) = h`.
//!
//! This crate is `no_std` (it needs `alloc`). It holds the pure pieces:
//!
//! * [`symmetric`]: elementary symmetric polynomials and their derivatives.
//! * [`cone`]: the admissible cones `Γ_k` and their preimages under the
//!   `(n-1)`-averaging map `T`.
//! * [`operator`]: the symmetric functions `f` with gradient, Hessian and the
//!   limit `f_∞`, plus level-set constants.
//! * [`linalg`] and [`calculus`]: small Hermitian matrices, a deterministic
//!   Jacobi eigensolver and the first/second derivatives of `F(A)`.
//! * [`subsolution`]: pointwise C-subsolution certification, the dichotomy
//!   check and empirical `κ`.
//! * [`diagnostics`]: the ABP contact-set bound and strong-concavity flags.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod calculus;
pub mod cone;
pub mod diagnostics;
mod error;
pub mod level_set;
pub mod linalg;
pub mod operator;
pub mod subsolution;
pub mod symmetric;

pub use error::{Error, Result};
pub use operator::{ExtendedReal, OperatorKind, SymmetricOperator};
pub use cone::ConeSpec;
pub use linalg::{CMatrix, EigenSystem, Hermitian};

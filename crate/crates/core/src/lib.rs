//! Spectral enclosures for non-self-adjoint one-dimensional discrete Dirac
//! operators with complex 2x2 matrix potentials.
//!
//! The free operator is the 2x2-block tridiagonal Laurent matrix with
//! diagonal block `b = [[-m, 1], [1, m]]` and off-diagonal blocks
//! `a = [[0, 0], [-1, 0]]`, `a^T`, acting on square-summable C^2-valued
//! sequences. Its spectrum is the union of two real bands
//! `[-sqrt(m^2+4), -m] U [m, sqrt(m^2+4)]`. Perturbing by a block-diagonal
//! complex potential `V` moves point spectrum into the complex plane; this
//! crate computes closed regions guaranteed to contain it, for potential
//! budgets measured in any l^p norm.
//!
//! Everything closed-form is cross-checked against independent numerical
//! oracles: truncated resolvent inversion, dense non-Hermitian eigensolves,
//! and 2x2 singular value decompositions.
//!
//! Module map:
//! - [`spectral_map`]: the lambda <-> k mapping onto the punctured unit
//!   disk, essential spectrum, distances.
//! - [`linalg`]: 2x2 closed forms, dense complex eigenvalues/solves, banded
//!   factorizations.
//! - [`resolvent`]: free-resolvent blocks, their norms, truncation oracle.
//! - [`operator`]: potentials, truncated perturbed operators, the
//!   Birman-Schwinger matrix.
//! - [`enclosures`]: the bound functions and membership predicates.
//! - [`tracer`]: implicit-curve extraction for enclosure boundaries.
//! - [`verify`]: eigenvalue-containment ensembles and the optimality
//!   construction.

pub mod enclosures;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod resolvent;
pub mod spectral_map;
pub mod tracer;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

//! Dense and banded complex linear algebra used as oracles and building
//! blocks: 2x2 closed forms, LU solves, non-Hermitian eigenvalues.

pub mod banded;
pub mod dense;
pub mod eig;
pub mod mat2;

pub use banded::{banded_lu, localized_mass_fraction, nearest_eigenvalue, BandedCMat, BandedLu, PivotPolicy};
pub use dense::{dense_det, dense_solve, DenseCMat};
pub use eig::dense_eigenvalues;
pub use mat2::{hermitian_eigen_2x2, hs_norm_2x2, polar_decompose_2x2, spectral_norm_2x2, sqrt_psd_2x2, Mat2C};

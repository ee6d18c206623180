//! 2x2 complex matrices with closed-form norms and decompositions.
//!
//! These small matrices carry the whole model: potential blocks, resolvent
//! blocks, and the per-site factors of the Birman-Schwinger operator. The
//! closed forms here (largest singular value, polar factors, PSD square
//! root) are exact up to rounding, so they double as oracles for the dense
//! routines.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::c64;

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Mat2C {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn zero() -> Self {
        let z = Complex64::ZERO;
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        Self::diag(Complex64::ONE, Complex64::ONE)
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, Complex64::ZERO, Complex64::ZERO, d2)
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(c64(a11, 0.0), c64(a12, 0.0), c64(a21, 0.0), c64(a22, 0.0))
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(
            self.a11.conj(),
            self.a21.conj(),
            self.a12.conj(),
            self.a22.conj(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.re == 0.0 && e.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|e| e.re.is_finite() && e.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = *self - self.adjoint();
        hs_norm_2x2(&d) <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, rhs: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a11 + rhs.a11,
            self.a12 + rhs.a12,
            self.a21 + rhs.a21,
            self.a22 + rhs.a22,
        )
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, rhs: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, rhs: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        self.scale(c64(-1.0, 0.0))
    }
}

/// Largest singular value of a 2x2 complex matrix, by the closed form
/// `sigma_max^2 = (s + sqrt(s^2 - 4d)) / 2` with `s` the squared Frobenius
/// norm and `d = |det|^2`.
pub fn spectral_norm_2x2(a: &Mat2C) -> f64 {
    let s: f64 = a.entries().iter().map(|e| e.norm_sqr()).sum();
    let d = a.det().norm_sqr();
    // s^2 - 4d >= 0 in exact arithmetic; clamp rounding noise.
    let disc = (s * s - 4.0 * d).max(0.0);
    (0.5 * (s + disc.sqrt())).sqrt()
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm_2x2(a: &Mat2C) -> f64 {
    a.entries()
        .iter()
        .map(|e| e.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigen-decomposition of a Hermitian 2x2 matrix.
///
/// Returns eigenvalues in descending order together with orthonormal
/// eigenvector columns. The input is assumed Hermitian; only the lower
/// triangle and the real parts of the diagonal are read.
pub fn hermitian_eigen_2x2(h: &Mat2C) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let a = h.a11.re;
    let c = h.a22.re;
    let b = h.a21; // lower off-diagonal; upper is conj(b)
    let bb = b.norm_sqr();
    if bb == 0.0 {
        return if a >= c {
            (
                [a, c],
                [
                    [Complex64::ONE, Complex64::ZERO],
                    [Complex64::ZERO, Complex64::ONE],
                ],
            )
        } else {
            (
                [c, a],
                [
                    [Complex64::ZERO, Complex64::ONE],
                    [Complex64::ONE, Complex64::ZERO],
                ],
            )
        };
    }
    let half_tr = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let r = (half_diff * half_diff + bb).sqrt();
    let l1 = half_tr + r;
    let l2 = half_tr - r;
    // Eigenvector for l1: (l1 - c, b) expressed against the lower entry,
    // choosing the formula with the larger pivot to avoid cancellation.
    let (v1, w1) = if half_diff >= 0.0 {
        // |l1 - c| = r + half_diff is the large quantity
        (c64(l1 - c, 0.0), b)
    } else {
        (b.conj(), c64(l1 - a, 0.0))
    };
    let n1 = (v1.norm_sqr() + w1.norm_sqr()).sqrt();
    let e1 = [v1 / n1, w1 / n1];
    // Orthogonal complement in C^2.
    let e2 = [-e1[1].conj(), e1[0].conj()];
    ([l1, l2], [e1, e2])
}

/// PSD square root of a Hermitian positive semidefinite 2x2 matrix via its
/// eigen-decomposition, with eigenvalues clamped at 0 from below to guard
/// against round-off.
pub fn sqrt_psd_2x2(h: &Mat2C) -> Mat2C {
    let (vals, vecs) = hermitian_eigen_2x2(h);
    let s1 = vals[0].max(0.0).sqrt();
    let s2 = vals[1].max(0.0).sqrt();
    // sum_i s_i e_i e_i^*
    let mut out = Mat2C::zero();
    for (s, e) in [(s1, vecs[0]), (s2, vecs[1])] {
        if s != 0.0 {
            let sc = c64(s, 0.0);
            out = out
                + Mat2C::new(
                    sc * e[0] * e[0].conj(),
                    sc * e[0] * e[1].conj(),
                    sc * e[1] * e[0].conj(),
                    sc * e[1] * e[1].conj(),
                );
        }
    }
    out
}

/// Polar decomposition `A = U W` with `W = sqrt(A* A)` Hermitian PSD and
/// `U` a partial isometry extended by zero on `ker(W)`.
pub fn polar_decompose_2x2(a: &Mat2C) -> (Mat2C, Mat2C) {
    let h = a.adjoint() * *a;
    let (vals, vecs) = hermitian_eigen_2x2(&h);
    let s1 = vals[0].max(0.0).sqrt();
    let s2 = vals[1].max(0.0).sqrt();
    // Singular values below the rounding floor of the larger one are
    // treated as exact kernel directions.
    let cutoff = s1 * 1e-14;
    let mut w = Mat2C::zero();
    let mut u = Mat2C::zero();
    for (s, e) in [(s1, vecs[0]), (s2, vecs[1])] {
        if s <= cutoff {
            continue;
        }
        let sc = c64(s, 0.0);
        w = w
            + Mat2C::new(
                sc * e[0] * e[0].conj(),
                sc * e[0] * e[1].conj(),
                sc * e[1] * e[0].conj(),
                sc * e[1] * e[1].conj(),
            );
        // u_col = A e / s, and U += u_col e^*
        let ae = a.apply(e);
        let inv = c64(1.0 / s, 0.0);
        let col = [ae[0] * inv, ae[1] * inv];
        u = u
            + Mat2C::new(
                col[0] * e[0].conj(),
                col[0] * e[1].conj(),
                col[1] * e[0].conj(),
                col[1] * e[1].conj(),
            );
    }
    (u, w)
}

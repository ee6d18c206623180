//! Closed-form free-resolvent blocks, their spectral and Hilbert-Schmidt
//! norms, the entrywise HS bound, and the truncated-inversion oracle.
//!
//! Off the essential spectrum the free resolvent is a 2x2-block Laurent
//! matrix whose block at offset j depends only on the disk parameter k:
//! the diagonal block for j = 0, a rank-one block scaled by k^{j-1} for
//! j >= 1, and transposes for j <= -1. Every closed form here is checked
//! against a sharp-cut truncation of the operator inverted by banded LU.

use num_complex::Complex64;

use crate::c64;
use crate::error::{Error, Result};
use crate::linalg::banded::{banded_lu, BandedCMat, PivotPolicy};
use crate::linalg::dense::DenseCMat;
use crate::linalg::mat2::Mat2C;
use crate::spectral_map::{on_spectrum, KPoint, MassParam};

/// The diagonal resolvent block.
fn t0(kp: &KPoint) -> Mat2C {
    let k = kp.k;
    let lambda = kp.lambda;
    let m = c64(kp.m.value(), 0.0);
    let inv_gap = (k.inv() - k).inv();
    Mat2C::new(lambda - m, Complex64::ONE - k, Complex64::ONE - k, lambda + m).scale(inv_gap)
}

/// The first off-diagonal resolvent block (rank one).
fn t1(kp: &KPoint) -> Mat2C {
    let k = kp.k;
    let lambda = kp.lambda;
    let m = c64(kp.m.value(), 0.0);
    let f = k * (k.inv() - k).inv();
    Mat2C::new(
        lambda - m,
        Complex64::ONE - k,
        Complex64::ONE - k.inv(),
        lambda + m,
    )
    .scale(f)
}

/// Resolvent block at offset `j`: the block in row-block i, column-block
/// i+j of the free resolvent. Satisfies `T_{-j} = T_j^T` and
/// `T_j = k^{j-1} T_1` for j >= 1; powers of k are accumulated iteratively
/// and clamped to exact zero below 1e-300.
pub fn t_matrix(j: i64, kp: &KPoint) -> Mat2C {
    if j == 0 {
        return t0(kp);
    }
    let base = t1(kp);
    let jj = j.unsigned_abs();
    let mut factor = Complex64::ONE;
    for _ in 1..jj {
        factor *= kp.k;
        if factor.norm() < 1e-300 {
            return Mat2C::zero();
        }
    }
    let tj = base.scale(factor);
    if j > 0 {
        tj
    } else {
        tj.transpose()
    }
}

/// Spectral norm of the diagonal block from its closed form
/// `|T_0|^2 = (B + sqrt(B^2 - 4C)) / 2`.
pub fn t0_spectral_norm(kp: &KPoint) -> f64 {
    let lambda = kp.lambda;
    let m = kp.m.value();
    let lp = (lambda + m).norm_sqr();
    let lm = (lambda - m).norm_sqr();
    let a = kp.dist_sq_lower();
    let b = kp.dist_sq_upper();
    let kn = kp.k.norm();
    let big_b = (lp + lm + 2.0 * kn * a) / (a * b);
    let big_c = kn / b;
    let disc = (big_b * big_b - 4.0 * big_c).max(0.0);
    (0.5 * (big_b + disc.sqrt())).sqrt()
}

/// Spectral norm of the first off-diagonal block from its closed form.
pub fn t1_spectral_norm(kp: &KPoint) -> f64 {
    let lambda = kp.lambda;
    let m = kp.m.value();
    let lp = (lambda + m).norm_sqr();
    let lm = (lambda - m).norm_sqr();
    let a = kp.dist_sq_lower();
    let b = kp.dist_sq_upper();
    let kn = kp.k.norm();
    (kn * kn * (lp + lm + (kn + 1.0 / kn) * a) / (a * b)).sqrt()
}

/// Entrywise Hilbert-Schmidt bound for the block at offset `j`:
/// `|C_j| (|lambda - m| + |lambda + m|) / |1/k - k|` with `|C_0| = 1` and
/// `|C_j| = |k|^{|j| - 1/2}` otherwise.
pub fn hs_bound(j: i64, kp: &KPoint) -> f64 {
    let lambda = kp.lambda;
    let m = kp.m.value();
    let num = (lambda - m).norm() + (lambda + m).norm();
    let cj = if j == 0 {
        1.0
    } else {
        kp.k.norm().powf(j.unsigned_abs() as f64 - 0.5)
    };
    cj * num / kp.k_gap()
}

/// Exact squared HS norm of the diagonal block,
/// `(|lambda-m|^2 + |lambda+m|^2 + 2|k| |lambda^2-m^2|) / |1/k - k|^2`.
pub fn t0_hs_norm_sq(kp: &KPoint) -> f64 {
    let lambda = kp.lambda;
    let m = kp.m.value();
    let lp = (lambda + m).norm_sqr();
    let lm = (lambda - m).norm_sqr();
    let a = kp.dist_sq_lower();
    let g = kp.k_gap();
    (lm + lp + 2.0 * kp.k.norm() * a) / (g * g)
}

/// Exact squared HS norm of the block at offset `j >= 1`,
/// `|k|^{2j-1} (|k||lambda-m|^2 + |k||lambda+m|^2 + (1+|k|^2)|lambda^2-m^2|) / |1/k - k|^2`.
pub fn tj_hs_norm_sq(j: u32, kp: &KPoint) -> f64 {
    assert!(j >= 1);
    let lambda = kp.lambda;
    let m = kp.m.value();
    let lp = (lambda + m).norm_sqr();
    let lm = (lambda - m).norm_sqr();
    let a = kp.dist_sq_lower();
    let g = kp.k_gap();
    let kn = kp.k.norm();
    kn.powi(2 * j as i32 - 1) * (kn * lm + kn * lp + (1.0 + kn * kn) * a) / (g * g)
}

/// Scalar-tridiagonal truncation of the free operator over sites
/// `[-N, N]`: diagonal alternates `-m, m`, off-diagonals alternate `1, -1`.
pub fn free_dirac_banded(m: MassParam, n_sites: usize) -> BandedCMat {
    let dim = 2 * (2 * n_sites + 1);
    let mut a = BandedCMat::zeros(dim, 1, 1);
    let mv = m.value();
    for s in 0..(2 * n_sites + 1) {
        a.set(2 * s, 2 * s, c64(-mv, 0.0));
        a.set(2 * s + 1, 2 * s + 1, c64(mv, 0.0));
        // within-site coupling of the diagonal block
        a.set(2 * s, 2 * s + 1, Complex64::ONE);
        a.set(2 * s + 1, 2 * s, Complex64::ONE);
        if s + 1 < 2 * n_sites + 1 {
            // hopping blocks a and a^T
            a.set(2 * s + 1, 2 * s + 2, c64(-1.0, 0.0));
            a.set(2 * s + 2, 2 * s + 1, c64(-1.0, 0.0));
        }
    }
    a
}

/// Dense inverse of the sharp-cut truncation of `D_0 - lambda` over sites
/// `[-N, N]` (matrix size `(4N+2)^2`), computed by banded LU.
pub fn truncated_free_resolvent(
    lambda: Complex64,
    m: MassParam,
    n_sites: usize,
) -> Result<DenseCMat> {
    if n_sites < 8 {
        return Err(Error::InvalidParam(format!(
            "truncation needs N >= 8, got {n_sites}"
        )));
    }
    if on_spectrum(lambda, m) {
        return Err(Error::SpectralPoint);
    }
    let a = free_dirac_banded(m, n_sites).shifted(lambda);
    let lu = banded_lu(&a, PivotPolicy::Error)?;
    Ok(lu.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat2::{hs_norm_2x2, spectral_norm_2x2};
    use crate::spectral_map::k_from_lambda;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(v: f64) -> MassParam {
        MassParam::new(v).unwrap()
    }

    fn kp(lre: f64, lim: f64, mv: f64) -> KPoint {
        k_from_lambda(c64(lre, lim), m(mv)).unwrap()
    }

    #[test]
    fn t0_massless_at_i() {
        // m = 0, lambda = i: k = (3 - sqrt 5)/2, 1/k - k = sqrt 5
        let p = kp(0.0, 1.0, 0.0);
        let t = t_matrix(0, &p);
        let r5 = 5.0f64.sqrt();
        let off = (1.0 - (3.0 - r5) / 2.0) / r5;
        assert!((t.a11 - c64(0.0, 1.0 / r5)).norm() < 1e-14);
        assert!((t.a12 - c64(off, 0.0)).norm() < 1e-14);
        assert!((t.a21 - c64(off, 0.0)).norm() < 1e-14);
        assert!((t.a22 - c64(0.0, 1.0 / r5)).norm() < 1e-14);
        // the quoted decimals
        assert!((t.a11.im - 0.44721).abs() < 1e-5);
        assert!((t.a12.re - 0.27639).abs() < 1e-5);
    }

    #[test]
    fn t0_massive_at_zero() {
        // m = 1, lambda = 0: T0 = [[-1, 1-k], [1-k, 1]] / sqrt 5
        let p = kp(0.0, 0.0, 1.0);
        let t = t_matrix(0, &p);
        let r5 = 5.0f64.sqrt();
        let k = (3.0 - r5) / 2.0;
        assert!((t.a11 - c64(-1.0 / r5, 0.0)).norm() < 1e-13);
        assert!((t.a22 - c64(1.0 / r5, 0.0)).norm() < 1e-13);
        assert!((t.a12 - c64((1.0 - k) / r5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn transpose_symmetry() {
        let p = kp(0.3, 1.7, 0.8);
        for j in [1i64, 2, 5, 17] {
            let tj = t_matrix(j, &p);
            let tmj = t_matrix(-j, &p);
            assert!(tmj.max_abs_diff(&tj.transpose()) < 1e-15);
        }
    }

    #[test]
    fn geometric_decay_of_blocks() {
        let p = kp(0.4, 0.9, 1.0);
        let t1n = spectral_norm_2x2(&t_matrix(1, &p));
        let kn = p.k.norm();
        for j in 2..12i64 {
            let tjn = spectral_norm_2x2(&t_matrix(j, &p));
            let want = kn.powi(j as i32 - 1) * t1n;
            assert!((tjn - want).abs() < 1e-12 * want.max(1e-30), "j={j}");
        }
    }

    #[test]
    fn underflow_clamps_to_zero() {
        let p = kp(0.0, 1.0, 0.0); // |k| ~ 0.38
        let far = t_matrix(800, &p);
        assert!(far.is_zero());
    }

    #[test]
    fn norm_examples_massless_at_i() {
        let p = kp(0.0, 1.0, 0.0);
        let k = (3.0 - 5.0f64.sqrt()) / 2.0;
        // |T0| = sqrt((1+k)/5), sharp because B^2 = 4C there
        assert!((t0_spectral_norm(&p) - ((1.0 + k) / 5.0).sqrt()).abs() < 1e-12);
        assert!((t0_spectral_norm(&p) - 0.5257311).abs() < 1e-7);
        // |T1| = k
        assert!((t1_spectral_norm(&p) - k).abs() < 1e-12);
        assert!((t1_spectral_norm(&p) - 0.3819660).abs() < 1e-7);
    }

    #[test]
    fn closed_norms_match_svd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let mass = m(rng.random::<f64>() * 2.0);
            let lam = c64(
                (rng.random::<f64>() - 0.5) * 8.0,
                (rng.random::<f64>() - 0.5) * 6.0,
            );
            if crate::spectral_map::dist_to_spectrum(lam, mass) < 1e-2 {
                continue;
            }
            let p = k_from_lambda(lam, mass).unwrap();
            let o0 = spectral_norm_2x2(&t_matrix(0, &p));
            let o1 = spectral_norm_2x2(&t_matrix(1, &p));
            assert!(
                (t0_spectral_norm(&p) - o0).abs() <= 1e-10 * o0.max(1.0),
                "T0 norm mismatch at lam={lam} m={}",
                mass.value()
            );
            assert!(
                (t1_spectral_norm(&p) - o1).abs() <= 1e-10 * o1.max(1.0),
                "T1 norm mismatch at lam={lam}"
            );
        }
    }

    #[test]
    fn hs_bound_examples_and_property() {
        let p = kp(0.0, 1.0, 0.0);
        assert!((hs_bound(0, &p) - 2.0 / 5.0f64.sqrt()).abs() < 1e-12);
        assert!((hs_bound(0, &p) - 0.8944272).abs() < 1e-7);
        let q = kp(0.7, -1.3, 1.4);
        assert_eq!(hs_bound(1, &q), hs_bound(-1, &q));
        for j in -20..=20i64 {
            let lhs = hs_norm_2x2(&t_matrix(j, &q));
            assert!(lhs <= hs_bound(j, &q) + 1e-12, "violated at j={j}");
        }
    }

    #[test]
    fn hs_closed_forms_match_entrywise() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let mass = m(rng.random::<f64>() * 2.0);
            let lam = c64(
                (rng.random::<f64>() - 0.5) * 6.0,
                (rng.random::<f64>() - 0.5) * 6.0,
            );
            if crate::spectral_map::dist_to_spectrum(lam, mass) < 5e-2 {
                continue;
            }
            let p = k_from_lambda(lam, mass).unwrap();
            let h0 = hs_norm_2x2(&t_matrix(0, &p));
            assert!(
                (t0_hs_norm_sq(&p) - h0 * h0).abs() <= 1e-12 * (h0 * h0).max(1.0),
                "T0 HS closed form at lam={lam}"
            );
            for j in [1u32, 2, 3, 7] {
                let hj = hs_norm_2x2(&t_matrix(j as i64, &p));
                assert!(
                    (tj_hs_norm_sq(j, &p) - hj * hj).abs() <= 1e-12 * (hj * hj).max(1.0),
                    "Tj HS closed form at lam={lam}, j={j}"
                );
            }
        }
    }

    #[test]
    fn free_truncation_matches_expected_pattern() {
        let a = free_dirac_banded(m(1.0), 1).to_dense();
        assert_eq!(a.nrows(), 6);
        let expect = [
            [-1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, -1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, -1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0, -1.0, 1.0],
            [0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
        ];
        for i in 0..6 {
            for j in 0..6 {
                assert!(
                    (a[(i, j)] - c64(expect[i][j], 0.0)).norm() < 1e-15,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn truncated_resolvent_center_blocks() {
        // m = 0, lambda = i, N = 300: center block matches the closed form
        let n_sites = 300;
        let r = truncated_free_resolvent(c64(0.0, 1.0), m(0.0), n_sites).unwrap();
        let p = kp(0.0, 1.0, 0.0);
        let center = n_sites; // site index of n = 0
        let got = r.block2(center, center);
        assert!(got.max_abs_diff(&t_matrix(0, &p)) < 1e-10);
        assert!((got.a11 - c64(0.0, 0.44721)).norm() < 1e-4);
        assert!((got.a12 - c64(0.27639, 0.0)).norm() < 1e-4);
        // off-diagonal blocks along the center row
        for j in -10..=10i64 {
            let col = (center as i64 + j) as usize;
            let dev = r.block2(center, col).max_abs_diff(&t_matrix(j, &p));
            assert!(dev < 1e-8, "block offset {j}: deviation {dev}");
        }
    }

    #[test]
    fn truncated_resolvent_center_block_fast_decay() {
        // m = 1, lambda = 3i: |k| ~ 0.08, so even N = 100 nails the
        // center block well below 1e-10
        let n_sites = 100;
        let r = truncated_free_resolvent(c64(0.0, 3.0), m(1.0), n_sites).unwrap();
        let p = kp(0.0, 3.0, 1.0);
        let dev = r.block2(n_sites, n_sites).max_abs_diff(&t_matrix(0, &p));
        assert!(dev < 1e-10, "center block deviation {dev}");
    }

    #[test]
    fn truncated_resolvent_identity_residual() {
        let n_sites = 60;
        let lam = c64(0.5, 1.2);
        let mass = m(1.0);
        let r = truncated_free_resolvent(lam, mass, n_sites).unwrap();
        let a = free_dirac_banded(mass, n_sites).shifted(lam);
        // central rows of (D0 - lambda) R should be unit rows
        let dim = r.nrows();
        let mut col = vec![Complex64::ZERO; dim];
        for i in (dim / 2 - 20)..(dim / 2 + 20) {
            for j in (dim / 2 - 20)..(dim / 2 + 20) {
                for (t, c) in col.iter_mut().enumerate() {
                    *c = r[(t, j)];
                }
                let mut out = vec![Complex64::ZERO; dim];
                a.apply(&col, &mut out);
                let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
                assert!(
                    (out[i] - want).norm() < 1e-10,
                    "residual at ({i},{j}): {}",
                    (out[i] - want).norm()
                );
            }
        }
    }

    #[test]
    fn rejects_spectral_and_small_truncations() {
        assert!(matches!(
            truncated_free_resolvent(c64(1.5, 0.0), m(1.0), 50),
            Err(Error::SpectralPoint)
        ));
        assert!(matches!(
            truncated_free_resolvent(c64(0.0, 1.0), m(1.0), 4),
            Err(Error::InvalidParam(_))
        ));
    }
}

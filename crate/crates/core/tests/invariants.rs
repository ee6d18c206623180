//! Cross-module property tests.

use proptest::prelude::*;

use dirac_spectra::c64;
use dirac_spectra::enclosures::{h_q, holder_conjugate, l1_prefactor};
use dirac_spectra::linalg::mat2::{
    hermitian_eigen_2x2, hs_norm_2x2, polar_decompose_2x2, spectral_norm_2x2, Mat2C,
};
use dirac_spectra::operator::{bs_norm_bounds, lp_norm, polarize, Potential};
use dirac_spectra::spectral_map::{
    dist_to_spectrum, k_from_lambda, lambda_pair_from_k, MassParam,
};
use dirac_spectra::Complex64;

fn cpx() -> impl Strategy<Value = Complex64> {
    (-4.0..4.0f64, -4.0..4.0f64).prop_map(|(re, im)| c64(re, im))
}

fn mat2() -> impl Strategy<Value = Mat2C> {
    (cpx(), cpx(), cpx(), cpx()).prop_map(|(a, b, c, d)| Mat2C::new(a, b, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn spectral_norm_below_hs_and_matches_eigen_oracle(a in mat2()) {
        let s = spectral_norm_2x2(&a);
        let hs = hs_norm_2x2(&a);
        prop_assert!(s <= hs + 1e-12 * hs.max(1.0));
        let h = a.adjoint() * a;
        let (vals, _) = hermitian_eigen_2x2(&h);
        let oracle = vals[0].max(0.0).sqrt();
        prop_assert!((s - oracle).abs() <= 1e-12 * oracle.max(1.0));
    }

    #[test]
    fn polar_reconstructs_and_w_is_psd(a in mat2()) {
        let (u, w) = polar_decompose_2x2(&a);
        prop_assert!((u * w).max_abs_diff(&a) <= 1e-12 * (1.0 + hs_norm_2x2(&a)));
        prop_assert!(w.max_abs_diff(&w.adjoint()) <= 1e-12 * (1.0 + hs_norm_2x2(&w)));
        let (vals, _) = hermitian_eigen_2x2(&w);
        prop_assert!(vals[1] >= -1e-13 * vals[0].abs().max(1.0));
        // U* U is the orthogonal projector onto range(W)
        let p = u.adjoint() * u;
        prop_assert!((p * p).max_abs_diff(&p) <= 1e-10);
        prop_assert!((p * w).max_abs_diff(&w) <= 1e-10 * (1.0 + hs_norm_2x2(&w)));
    }

    #[test]
    fn k_map_round_trip(re in -6.0..6.0f64, im in -5.0..5.0f64, mv in 0.0..3.0f64) {
        let m = MassParam::new(mv).unwrap();
        let lam = c64(re, im);
        prop_assume!(dist_to_spectrum(lam, m) > 1e-3);
        let kp = k_from_lambda(lam, m).unwrap();
        prop_assert!(kp.k.norm() > 0.0 && kp.k.norm() < 1.0);
        let (a, b) = lambda_pair_from_k(kp.k, m).unwrap();
        let err = (a - lam).norm().min((b - lam).norm());
        prop_assert!(err <= 1e-10 * (1.0 + lam.norm()));
    }

    #[test]
    fn lp_norms_are_ordered(blocks in proptest::collection::vec(mat2(), 1..5)) {
        let v = Potential::new(0, blocks);
        prop_assume!(!v.is_zero());
        let n1 = lp_norm(&v, 1.0).unwrap();
        let ninf = lp_norm(&v, f64::INFINITY).unwrap();
        for p in [1.25, 2.0, 4.0] {
            let np = lp_norm(&v, p).unwrap();
            prop_assert!(ninf <= np + 1e-12 && np <= n1 + 1e-12);
        }
    }

    #[test]
    fn polarize_site_identity(b in mat2()) {
        let pol = polarize(&Potential::single_site(0, b));
        let back = pol.u_blocks[0] * pol.w_blocks[0];
        prop_assert!(back.max_abs_diff(&b) <= 1e-12 * (1.0 + hs_norm_2x2(&b)));
        let sq = pol.sqrt_w_blocks[0] * pol.sqrt_w_blocks[0];
        prop_assert!(sq.max_abs_diff(&pol.w_blocks[0]) <= 1e-12 * (1.0 + hs_norm_2x2(&b)));
    }

    #[test]
    fn young_bound_dominated_by_l1_prefactor_times_growth(
        re in -6.0..6.0f64,
        im in -5.0..5.0f64,
        mv in 0.0..2.0f64,
        p in 1.0..8.0f64,
    ) {
        let m = MassParam::new(mv).unwrap();
        let lam = c64(re, im);
        prop_assume!(dist_to_spectrum(lam, m) > 0.05);
        // h_inf <= l1 prefactor everywhere off the spectrum
        let hinf = h_q(lam, m, f64::INFINITY).unwrap();
        prop_assert!(hinf <= l1_prefactor(lam, m) * (1.0 + 1e-12));
        // and every finite-q value dominates the q = infinity one
        let q = holder_conjugate(p);
        let hq = h_q(lam, m, q).unwrap();
        prop_assert!(hq >= hinf * (1.0 - 1e-12));
    }

    #[test]
    fn bs_bounds_scale_linearly_in_potential(b in mat2(), scale in 0.1..4.0f64) {
        let m = MassParam::new(1.0).unwrap();
        let lam = c64(0.4, 1.7);
        let v1 = Potential::single_site(0, b);
        prop_assume!(!v1.is_zero());
        let v2 = v1.scale(scale);
        let b1 = bs_norm_bounds(lam, m, &v1, 2.0).unwrap();
        let b2 = bs_norm_bounds(lam, m, &v2, 2.0).unwrap();
        prop_assert!((b2.hs_style - scale * b1.hs_style).abs() <= 1e-10 * b2.hs_style.max(1.0));
        prop_assert!((b2.max_style - scale * b1.max_style).abs() <= 1e-10 * b2.max_style.max(1.0));
        prop_assert!((b2.young_style - scale * b1.young_style).abs() <= 1e-10 * b2.young_style.max(1.0));
    }
}

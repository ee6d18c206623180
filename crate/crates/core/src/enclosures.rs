//! Enclosure bound functions, membership predicates, embedded-eigenvalue
//! free intervals, topology thresholds, and the diagonal-dominance region.
//!
//! Five bound families are implemented. Each one maps a spectral parameter
//! off the essential spectrum to a positive number `B(lambda)`; the
//! corresponding enclosure at potential budget `Q = ||V||_p` is the set
//! where `B(lambda) Q >= 1` (together with the essential spectrum itself),
//! and `B(lambda) Q < 1` certifies that `lambda` is not an eigenvalue.
//! The l^1 family additionally covers points inside the essential
//! spectrum, which is why its membership predicate is a polynomial
//! inequality defined on all of C.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::resolvent::{t0_spectral_norm, t1_spectral_norm};
use crate::spectral_map::{dist_to_spectrum, k_from_lambda, on_spectrum, KPoint, MassParam};

/// Which bound family an enclosure uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnclosureKind {
    /// Pure l^1 polynomial enclosure (covers embedded points).
    L1,
    /// Interpolation bound `g_p`, p > 1.
    Stein,
    /// Convolution bound `h_q`.
    Young,
    /// The more explicit but weaker HS-majorized variant `f_q`, p > 1.
    YoungHs,
    /// Interpolation against the improved l^1 endpoint, `psi_q`.
    SteinImproved,
}

impl EnclosureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnclosureKind::L1 => "l1",
            EnclosureKind::Stein => "stein",
            EnclosureKind::Young => "young",
            EnclosureKind::YoungHs => "young-hs",
            EnclosureKind::SteinImproved => "stein-improved",
        }
    }
}

/// A fully specified enclosure: bound family, mass, exponent, and budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnclosureSpec {
    pub kind: EnclosureKind,
    pub m: MassParam,
    pub p: f64,
    /// The potential budget `Q = ||V||_p`.
    pub budget: f64,
}

impl EnclosureSpec {
    pub fn new(kind: EnclosureKind, m: MassParam, p: f64, budget: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::BadExponent);
        }
        if !(budget > 0.0) || !budget.is_finite() {
            return Err(Error::InvalidParam(format!("budget must be positive, got {budget}")));
        }
        let ok = match kind {
            EnclosureKind::L1 => p == 1.0,
            EnclosureKind::Stein | EnclosureKind::YoungHs => p > 1.0,
            EnclosureKind::Young | EnclosureKind::SteinImproved => true,
        };
        if !ok {
            return Err(Error::InvalidParam(format!(
                "exponent p={p} is not admissible for kind {}",
                kind.as_str()
            )));
        }
        Ok(Self { kind, m, p, budget })
    }

    /// The bound value `B(lambda)`; for the l^1 kind this is the prefactor
    /// whose product with Q decides membership. Fails on the essential
    /// spectrum.
    pub fn bound_value(&self, lambda: Complex64) -> Result<f64> {
        let q = holder_conjugate(self.p);
        match self.kind {
            EnclosureKind::L1 => {
                if on_spectrum(lambda, self.m) {
                    return Err(Error::SpectralPoint);
                }
                Ok(l1_prefactor(lambda, self.m))
            }
            EnclosureKind::Stein => g_p(lambda, self.m, self.p),
            EnclosureKind::Young => h_q(lambda, self.m, q),
            EnclosureKind::YoungHs => f_q(lambda, self.m, q),
            EnclosureKind::SteinImproved => psi_q(lambda, self.m, q),
        }
    }

    /// Membership in the enclosure. Points of the essential spectrum are
    /// members for every kind except that the l^1 predicate is evaluated
    /// exactly (its polynomial form also excludes embedded sub-intervals).
    pub fn contains(&self, lambda: Complex64) -> bool {
        if self.kind == EnclosureKind::L1 {
            return in_l1_enclosure(lambda, self.m, self.budget);
        }
        if on_spectrum(lambda, self.m) {
            return true;
        }
        match self.bound_value(lambda) {
            Ok(b) => b * self.budget >= 1.0,
            Err(_) => true,
        }
    }
}

/// The Hoelder conjugate: `q = p/(p-1)`, with `q = infinity` for p = 1 and
/// `q = 1` for p = infinity.
pub fn holder_conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `(|lambda-m| + |lambda+m|) / sqrt(|lambda^2-m^2| |lambda^2-m^2-4|)`,
/// the prefactor of the l^1 enclosure.
pub fn l1_prefactor(lambda: Complex64, m: MassParam) -> f64 {
    let mv = m.value();
    let num = (lambda - mv).norm() + (lambda + mv).norm();
    let l2 = lambda * lambda;
    let den = ((l2 - mv * mv).norm() * (l2 - mv * mv - 4.0).norm()).sqrt();
    num / den
}

/// Membership in the closed l^1 enclosure:
/// `|lambda^2-m^2| |lambda^2-m^2-4| <= (|lambda+m| + |lambda-m|)^2 Q^2`.
/// Defined on all of C, embedded points included.
pub fn in_l1_enclosure(lambda: Complex64, m: MassParam, budget: f64) -> bool {
    let mv = m.value();
    let l2 = lambda * lambda;
    let lhs = (l2 - mv * mv).norm() * (l2 - mv * mv - 4.0).norm();
    let s = (lambda + mv).norm() + (lambda - mv).norm();
    lhs <= s * s * budget * budget
}

/// The interpolation bound: for p in (1, inf),
/// `g_p = (|lambda-m|+|lambda+m|)^{1/p} / (|lambda^2-m^2|^{1/2p} |lambda^2-m^2-4|^{1/2p} dist^{1-1/p})`;
/// for p = infinity, `1/dist`.
pub fn g_p(lambda: Complex64, m: MassParam, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::BadExponent);
    }
    let dist = dist_to_spectrum(lambda, m);
    if on_spectrum(lambda, m) {
        return Err(Error::SpectralPoint);
    }
    if p.is_infinite() {
        return Ok(1.0 / dist);
    }
    let mv = m.value();
    let num = ((lambda - mv).norm() + (lambda + mv).norm()).powf(1.0 / p);
    let l2 = lambda * lambda;
    let den = (l2 - mv * mv).norm().powf(0.5 / p)
        * (l2 - mv * mv - 4.0).norm().powf(0.5 / p)
        * dist.powf(1.0 - 1.0 / p);
    Ok(num / den)
}

/// The convolution bound at a prebuilt k-point; `q` is the Hoelder
/// conjugate of the potential exponent.
/// For q < infinity: `(|T_0|^q + 2 |T_1|^q / (1 - |k|^q))^{1/q}`, evaluated
/// with the dominant norm factored out so large q cannot overflow; for
/// q = infinity: `max(|T_0|, |T_1|)`.
pub fn h_q_at(kp: &KPoint, q: f64) -> f64 {
    let n0 = t0_spectral_norm(kp);
    let n1 = t1_spectral_norm(kp);
    if q.is_infinite() {
        return n0.max(n1);
    }
    let kq = kp.k.norm().powf(q);
    let top = n0.max(n1);
    if top == 0.0 {
        return 0.0;
    }
    let r0 = (n0 / top).powf(q);
    let r1 = (n1 / top).powf(q);
    top * (r0 + 2.0 * r1 / (1.0 - kq)).powf(1.0 / q)
}

/// The convolution bound as a function of lambda.
pub fn h_q(lambda: Complex64, m: MassParam, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::BadExponent);
    }
    let kp = k_from_lambda(lambda, m)?;
    Ok(h_q_at(&kp, q))
}

/// The explicit HS-majorized bound, q in [1, inf):
/// `l1_prefactor * (1 + 2 sqrt(|k|^q) / (1 - |k|^q))^{1/q}`.
pub fn f_q(lambda: Complex64, m: MassParam, q: f64) -> Result<f64> {
    if !(q >= 1.0) || q.is_infinite() {
        return Err(Error::BadExponent);
    }
    let kp = k_from_lambda(lambda, m)?;
    let kq = kp.k.norm().powf(q);
    Ok(l1_prefactor(lambda, m) * (1.0 + 2.0 * kq.sqrt() / (1.0 - kq)).powf(1.0 / q))
}

/// The improved interpolation bound:
/// `max(|T_0|, |T_1|)^{1-1/q} dist^{-1/q}`, q in [1, inf]. The degenerate
/// exponents reproduce the endpoint quantities exactly: q = 1 gives
/// `1/dist`, q = infinity gives `max(|T_0|, |T_1|)`.
pub fn psi_q(lambda: Complex64, m: MassParam, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::BadExponent);
    }
    let kp = k_from_lambda(lambda, m)?;
    let top = t0_spectral_norm(&kp).max(t1_spectral_norm(&kp));
    if q.is_infinite() {
        return Ok(top);
    }
    let dist = dist_to_spectrum(lambda, m);
    if q == 1.0 {
        return Ok(1.0 / dist);
    }
    Ok(top.powf(1.0 - 1.0 / q) * dist.powf(-1.0 / q))
}

/// The real-axis crossings of the l^1 boundary inside the upper band:
/// `lambda_{+-} = sqrt(m^2 + 2 (1 - Q^2 +- sqrt((1-Q^2)^2 - Q^2 m^2)))`,
/// defined when `Q^2 < m^2/2 + 1 - m sqrt(m^2/4 + 1)` (strictly).
/// The intervals `(lambda_-, lambda_+)` and its mirror are then free of
/// embedded eigenvalues for potentials of l^1 norm Q.
pub fn lambda_pm(m: MassParam, budget: f64) -> Result<(f64, f64)> {
    if !(budget > 0.0) {
        return Err(Error::InvalidParam("budget must be positive".into()));
    }
    let q2 = budget * budget;
    let (t1, _) = topology_thresholds(m);
    if !(q2 < t1) {
        return Err(Error::RegimeViolation);
    }
    let mv = m.value();
    let a = 1.0 - q2;
    let disc = (a * a - q2 * mv * mv).sqrt();
    let lm = (mv * mv + 2.0 * (a - disc)).sqrt();
    let lp = (mv * mv + 2.0 * (a + disc)).sqrt();
    Ok((lm, lp))
}

/// Generic shape of the l^1 enclosure boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyClass {
    /// Four simple closed curves around the four band endpoints.
    FourLoops,
    /// Two simple closed curves, one around each band.
    TwoLoops,
    /// A single closed curve around both bands.
    OneLoop,
}

impl TopologyClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TopologyClass::FourLoops => "four-loops",
            TopologyClass::TwoLoops => "two-loops",
            TopologyClass::OneLoop => "one-loop",
        }
    }
}

/// The two Q^2 thresholds separating the three boundary shapes:
/// `m^2/2 + 1 - m sqrt(m^2/4 + 1)` and `m^2/4 + 1`.
pub fn topology_thresholds(m: MassParam) -> (f64, f64) {
    let mv = m.value();
    let t1 = mv * mv / 2.0 + 1.0 - mv * (mv * mv / 4.0 + 1.0).sqrt();
    let t2 = mv * mv / 4.0 + 1.0;
    (t1, t2)
}

/// Classify the boundary shape by Q^2 against the two thresholds; refuses
/// classification within 1e-12 of either threshold.
pub fn classify_topology(m: MassParam, budget: f64) -> Result<TopologyClass> {
    if !(budget > 0.0) || !budget.is_finite() {
        return Err(Error::InvalidParam("budget must be positive".into()));
    }
    let q2 = budget * budget;
    let (t1, t2) = topology_thresholds(m);
    if (q2 - t1).abs() <= 1e-12 || (q2 - t2).abs() <= 1e-12 {
        return Err(Error::AtThreshold);
    }
    Ok(if q2 < t1 {
        TopologyClass::FourLoops
    } else if q2 < t2 {
        TopologyClass::TwoLoops
    } else {
        TopologyClass::OneLoop
    })
}

/// Diagonal dominance at a prebuilt k-point: `|T_0(k)| >= |T_1(k)|`.
pub fn in_region_d_at(kp: &KPoint) -> bool {
    t0_spectral_norm(kp) >= t1_spectral_norm(kp)
}

/// Whether the free resolvent is diagonally dominant at `lambda`.
pub fn in_region_d(lambda: Complex64, m: MassParam) -> Result<bool> {
    Ok(in_region_d_at(&k_from_lambda(lambda, m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(v: f64) -> MassParam {
        MassParam::new(v).unwrap()
    }

    fn sample_offspec(rng: &mut ChaCha8Rng, mass: MassParam, min_dist: f64) -> Complex64 {
        loop {
            let lam = c64(
                (rng.random::<f64>() - 0.5) * 8.0,
                (rng.random::<f64>() - 0.5) * 6.0,
            );
            if dist_to_spectrum(lam, mass) > min_dist {
                return lam;
            }
        }
    }

    #[test]
    fn l1_membership_examples() {
        // lambda = 0, m = 1: member iff Q >= sqrt(5)/2
        let q_star = 5.0f64.sqrt() / 2.0;
        assert!(!in_l1_enclosure(c64(0.0, 0.0), m(1.0), q_star - 1e-6));
        assert!(in_l1_enclosure(c64(0.0, 0.0), m(1.0), q_star + 1e-6));
        // band endpoints are always members; the rounded edge value makes
        // the left side ~1e-15 rather than exactly 0, so keep the budget
        // above the rounding floor
        for mass in [0.0f64, 0.5, 1.0, 2.0] {
            let edge = (mass * mass + 4.0).sqrt();
            for l in [mass, -mass, edge, -edge] {
                assert!(in_l1_enclosure(c64(l, 0.0), m(mass), 1e-6));
            }
        }
    }

    #[test]
    fn g_p_examples() {
        let v = g_p(c64(0.0, 3.0), m(1.0), f64::INFINITY).unwrap();
        assert!((v - 1.0 / 10.0f64.sqrt()).abs() < 1e-12);
        assert!((v - 0.3162278).abs() < 1e-7);
        // p -> 1+ approaches the l1 prefactor
        let lam = c64(0.0, 3.0);
        let lim = l1_prefactor(lam, m(1.0));
        let near = g_p(lam, m(1.0), 1.001).unwrap();
        assert!((near - lim).abs() / lim < 0.01, "got {near}, limit {lim}");
    }

    #[test]
    fn g_p_rejects_bad_input() {
        assert_eq!(g_p(c64(0.0, 3.0), m(1.0), 1.0), Err(Error::BadExponent));
        assert_eq!(g_p(c64(1.5, 0.0), m(1.0), 2.0), Err(Error::SpectralPoint));
    }

    #[test]
    fn h_q_examples() {
        // q = inf at m = 0, lambda = i
        let v = h_q(c64(0.0, 1.0), m(0.0), f64::INFINITY).unwrap();
        assert!((v - 0.5257311).abs() < 1e-7);
        // q = 1: |T0| + 2 |T1| / (1 - |k|)
        let kp = k_from_lambda(c64(0.0, 1.0), m(0.0)).unwrap();
        let n0 = t0_spectral_norm(&kp);
        let n1 = t1_spectral_norm(&kp);
        let kn = kp.k.norm();
        let v1 = h_q(c64(0.0, 1.0), m(0.0), 1.0).unwrap();
        assert!((v1 - (n0 + 2.0 * n1 / (1.0 - kn))).abs() < 1e-13);
    }

    #[test]
    fn h_q_large_q_approaches_infinity_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let mass = m(rng.random::<f64>() * 2.0);
            let lam = sample_offspec(&mut rng, mass, 0.05);
            let hinf = h_q(lam, mass, f64::INFINITY).unwrap();
            let h200 = h_q(lam, mass, 200.0).unwrap();
            assert!(
                (h200 - hinf).abs() / hinf <= 0.05,
                "q=200 gap too large at lam={lam}: {h200} vs {hinf}"
            );
            assert!(h200 >= hinf - 1e-12, "h_q must dominate its limit");
        }
    }

    #[test]
    fn f_q_dominates_h_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let mass = m(rng.random::<f64>() * 2.0);
            let lam = sample_offspec(&mut rng, mass, 1e-3);
            let q = 1.0 + rng.random::<f64>() * 9.0;
            let f = f_q(lam, mass, q).unwrap();
            let h = h_q(lam, mass, q).unwrap();
            assert!(f >= h - 1e-10 * h.abs(), "f_q < h_q at lam={lam}, q={q}");
        }
    }

    #[test]
    fn f_q_limit_recovers_l1_prefactor() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let mass = m(rng.random::<f64>() * 2.0);
            let lam = sample_offspec(&mut rng, mass, 0.2);
            let f = f_q(lam, mass, 400.0).unwrap();
            let pre = l1_prefactor(lam, mass);
            assert!((f - pre).abs() / pre < 0.01, "lam={lam}: {f} vs {pre}");
        }
    }

    #[test]
    fn psi_q_degenerate_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let mass = m(rng.random::<f64>() * 2.0);
            let lam = sample_offspec(&mut rng, mass, 1e-2);
            let hinf = h_q(lam, mass, f64::INFINITY).unwrap();
            let ginf = 1.0 / dist_to_spectrum(lam, mass);
            let p_inf = psi_q(lam, mass, f64::INFINITY).unwrap();
            let p_1 = psi_q(lam, mass, 1.0).unwrap();
            assert!((p_inf - hinf).abs() <= 1e-14 * hinf);
            assert!((p_1 - ginf).abs() <= 1e-12 * ginf);
            // geometric interpolation between the endpoints
            let q = 1.0 + rng.random::<f64>() * 20.0;
            let pq = psi_q(lam, mass, q).unwrap();
            assert!(pq <= hinf.max(ginf) + 1e-12 * hinf.max(ginf));
        }
    }

    #[test]
    fn lambda_pm_example_and_limits() {
        let (lm, lp) = lambda_pm(m(1.0), 0.5).unwrap();
        assert!((lm - 1.1755705).abs() < 1e-7, "{lm}");
        assert!((lp - 1.9021130).abs() < 1e-7, "{lp}");
        // lambda_pm^2 = 2.5 -+ 2 sqrt(0.3125)
        assert!((lm * lm - (2.5 - 2.0 * 0.3125f64.sqrt())).abs() < 1e-12);
        assert!((lp * lp - (2.5 + 2.0 * 0.3125f64.sqrt())).abs() < 1e-12);
        // Q -> 0 recovers the whole interior
        let (lm0, lp0) = lambda_pm(m(1.0), 1e-9).unwrap();
        assert!((lm0 - 1.0).abs() < 1e-6);
        assert!((lp0 - 5.0f64.sqrt()).abs() < 1e-6);
        assert_eq!(lambda_pm(m(1.0), 0.7), Err(Error::RegimeViolation));
    }

    #[test]
    fn lambda_pm_consistent_with_l1_boundary() {
        let mass = m(1.0);
        let budget = 0.5;
        let (lm, lp) = lambda_pm(mass, budget).unwrap();
        let eps = 1e-4;
        // dense sample of the open interval is outside the enclosure
        for t in 0..200 {
            let x = lm + eps + (lp - lm - 2.0 * eps) * t as f64 / 199.0;
            assert!(
                !in_l1_enclosure(c64(x, 0.0), mass, budget),
                "interval point {x} unexpectedly inside"
            );
        }
        assert!(in_l1_enclosure(c64(lm - eps, 0.0), mass, budget));
        assert!(in_l1_enclosure(c64(lp + eps, 0.0), mass, budget));
    }

    #[test]
    fn topology_thresholds_and_classification() {
        let (t1, t2) = topology_thresholds(m(1.0));
        assert!((t1 - (1.5 - 5.0f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!((t1 - 0.3819660).abs() < 1e-7);
        assert_eq!(t2, 1.25);
        assert_eq!(classify_topology(m(1.0), 0.5).unwrap(), TopologyClass::FourLoops);
        assert_eq!(classify_topology(m(1.0), 1.0).unwrap(), TopologyClass::TwoLoops);
        assert_eq!(classify_topology(m(1.0), 1.5).unwrap(), TopologyClass::OneLoop);
        let at = t1.sqrt();
        assert_eq!(classify_topology(m(1.0), at), Err(Error::AtThreshold));
    }

    #[test]
    fn region_d_examples() {
        assert!(in_region_d(c64(0.0, 1.0), m(0.0)).unwrap());
        // dominance holds for large |lambda|
        for mass in [0.0, 0.5, 1.0] {
            assert!(in_region_d(c64(600.0, 800.0), m(mass)).unwrap());
        }
    }

    #[test]
    fn region_d_has_nonempty_complement_for_small_mass() {
        // scan the unit k-disk at m = 1/8 for |T0| < |T1|
        let mass = m(0.125);
        let mut found = 0;
        for i in 0..80 {
            for j in 0..80 {
                let k = c64(-0.99 + 1.98 * i as f64 / 79.0, -0.99 + 1.98 * j as f64 / 79.0);
                if k.norm() <= 1e-3 || k.norm() >= 0.999 {
                    continue;
                }
                let kp = match crate::spectral_map::kpoint_from_k(k, mass) {
                    Ok(kp) => kp,
                    Err(_) => continue,
                };
                if !in_region_d_at(&kp) {
                    found += 1;
                }
            }
        }
        assert!(found > 0, "no non-dominant k found at m = 1/8");
    }

    #[test]
    fn bounds_symmetric_under_reflections() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let mass = m(rng.random::<f64>() * 2.0);
            let lam = sample_offspec(&mut rng, mass, 1e-2);
            for (name, f) in [
                ("g2", g_p(lam, mass, 2.0).unwrap()),
                ("hinf", h_q(lam, mass, f64::INFINITY).unwrap()),
                ("h3", h_q(lam, mass, 3.0).unwrap()),
                ("f2", f_q(lam, mass, 2.0).unwrap()),
                ("psi2", psi_q(lam, mass, 2.0).unwrap()),
            ] {
                let neg = match name {
                    "g2" => g_p(-lam, mass, 2.0).unwrap(),
                    "hinf" => h_q(-lam, mass, f64::INFINITY).unwrap(),
                    "h3" => h_q(-lam, mass, 3.0).unwrap(),
                    "f2" => f_q(-lam, mass, 2.0).unwrap(),
                    _ => psi_q(-lam, mass, 2.0).unwrap(),
                };
                let conj = match name {
                    "g2" => g_p(lam.conj(), mass, 2.0).unwrap(),
                    "hinf" => h_q(lam.conj(), mass, f64::INFINITY).unwrap(),
                    "h3" => h_q(lam.conj(), mass, 3.0).unwrap(),
                    "f2" => f_q(lam.conj(), mass, 2.0).unwrap(),
                    _ => psi_q(lam.conj(), mass, 2.0).unwrap(),
                };
                assert!((f - neg).abs() <= 1e-10 * f, "{name} not even in lambda");
                assert!((f - conj).abs() <= 1e-10 * f, "{name} not conj-symmetric");
            }
        }
    }

    #[test]
    fn stein_bound_diverges_toward_spectrum() {
        // interior band point, vertical approach
        let mass = m(1.0);
        let l0 = 1.5;
        let eps = 1e-7;
        assert!(g_p(c64(l0, eps), mass, f64::INFINITY).unwrap() > 1e6);
        assert!(g_p(c64(l0, eps), mass, 8.0).unwrap() > 1e6);
        // divergence rate for moderate p: one decade of eps gives
        // 10^{1-1/p} growth
        let g1 = g_p(c64(l0, 1e-4), mass, 2.0).unwrap();
        let g2 = g_p(c64(l0, 1e-6), mass, 2.0).unwrap();
        assert!(g2 > 5.0 * g1, "sqrt-rate divergence violated");
    }

    #[test]
    fn h_inf_bounded_by_l1_prefactor() {
        // Entrywise HS bounds give max(|T0|,|T1|) <= l1 prefactor on the
        // whole resolvent set, which is the boundary-limit consistency of
        // the improved bound.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let mass = m(rng.random::<f64>() * 2.0);
            let lam = sample_offspec(&mut rng, mass, 1e-3);
            let h = h_q(lam, mass, f64::INFINITY).unwrap();
            let pre = l1_prefactor(lam, mass);
            assert!(h <= pre * (1.0 + 1e-12), "h_inf > prefactor at {lam}");
        }
        // and along a vertical approach to a band interior point
        let mass = m(1.0);
        for e in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
            let lam = c64(1.7, e);
            let h = h_q(lam, mass, f64::INFINITY).unwrap();
            let pre = l1_prefactor(lam, mass);
            assert!(h <= pre * (1.0 + 1e-10));
        }
    }

    #[test]
    fn enclosure_spec_validation() {
        assert!(EnclosureSpec::new(EnclosureKind::L1, m(1.0), 1.0, 0.5).is_ok());
        assert!(EnclosureSpec::new(EnclosureKind::L1, m(1.0), 2.0, 0.5).is_err());
        assert!(EnclosureSpec::new(EnclosureKind::Stein, m(1.0), 1.0, 0.5).is_err());
        assert!(EnclosureSpec::new(EnclosureKind::YoungHs, m(1.0), 1.0, 0.5).is_err());
        assert!(EnclosureSpec::new(EnclosureKind::Young, m(1.0), 1.0, 0.5).is_ok());
        assert!(EnclosureSpec::new(EnclosureKind::SteinImproved, m(1.0), 1.0, 0.5).is_ok());
        assert!(EnclosureSpec::new(EnclosureKind::Young, m(1.0), 0.9, 0.5).is_err());
    }
}

//! The lambda <-> k spectral mapping, the essential spectrum of the free
//! operator, and distance computations.
//!
//! Off the two spectral bands, the relation `lambda^2 = m^2 + 2 - k - 1/k`
//! identifies the resolvent set with the punctured open unit k-disk (two
//! lambda per k). The quadratic for k has root product 1, so the root
//! inside the disk is computed as the reciprocal of the stably-computed
//! large root, which avoids cancellation when |lambda| is large.

use num_complex::Complex64;

use crate::c64;
use crate::error::{Error, Result};

/// Non-negative mass parameter of the free operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassParam(f64);

impl MassParam {
    pub fn new(m: f64) -> Result<Self> {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::InvalidParam(format!(
                "mass must be finite and non-negative, got {m}"
            )));
        }
        Ok(Self(m))
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.0
    }

    /// Upper band edge `sqrt(m^2 + 4)`.
    #[inline]
    pub fn band_edge(&self) -> f64 {
        (self.0 * self.0 + 4.0).sqrt()
    }
}

/// The essential spectrum as an ordered pair of closed real intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumIntervals {
    /// `[-sqrt(m^2+4), -m]` and `[m, sqrt(m^2+4)]`, in that order.
    pub intervals: [(f64, f64); 2],
}

/// Essential spectrum of the free operator:
/// `[-sqrt(m^2+4), -m] U [m, sqrt(m^2+4)]`; the intervals touch at 0 when
/// m = 0.
pub fn essential_spectrum(m: MassParam) -> SpectrumIntervals {
    let b = m.band_edge();
    SpectrumIntervals {
        intervals: [(-b, -m.value()), (m.value(), b)],
    }
}

/// Euclidean distance from `lambda` to the essential spectrum; 0 inside.
pub fn dist_to_spectrum(lambda: Complex64, m: MassParam) -> f64 {
    let b = m.band_edge();
    let x = lambda.re;
    let y = lambda.im;
    let seg = |lo: f64, hi: f64| -> f64 {
        let dx = (lo - x).max(x - hi).max(0.0);
        dx.hypot(y)
    };
    seg(-b, -m.value()).min(seg(m.value(), b))
}

/// Floating-point membership test for the essential spectrum:
/// `dist <= 1e-14 (1 + |lambda|)`.
pub fn on_spectrum(lambda: Complex64, m: MassParam) -> bool {
    dist_to_spectrum(lambda, m) <= 1e-14 * (1.0 + lambda.norm())
}

/// A point k in the punctured open unit disk, paired with its mass
/// parameter and the lambda branch it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPoint {
    pub k: Complex64,
    pub m: MassParam,
    pub lambda: Complex64,
}

impl KPoint {
    /// Validated constructor: `0 < |k| < 1`, the defining relation holds to
    /// relative 1e-12, and the modulus identity
    /// `|k - 1/k|^2 = |lambda^2 - m^2| |lambda^2 - m^2 - 4|` to 1e-10.
    pub fn new(k: Complex64, m: MassParam, lambda: Complex64) -> Result<Self> {
        let kn = k.norm();
        if !(kn > 0.0 && kn < 1.0) {
            return Err(Error::UnitDisk);
        }
        let mm = m.value() * m.value();
        let lhs = lambda * lambda;
        let rhs = c64(mm + 2.0, 0.0) - k - k.inv();
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        if (lhs - rhs).norm() > 1e-12 * scale {
            return Err(Error::InvalidParam(
                "k and lambda do not satisfy the defining relation".into(),
            ));
        }
        let a = (lhs - mm).norm();
        let b = (lhs - mm - 4.0).norm();
        let modulus = (k - k.inv()).norm_sqr();
        let mscale = modulus.max(a * b).max(1.0);
        if (modulus - a * b).abs() > 1e-10 * mscale {
            return Err(Error::InvalidParam("modulus identity violated".into()));
        }
        Ok(Self { k, m, lambda })
    }

    /// `|lambda^2 - m^2|`
    pub fn dist_sq_lower(&self) -> f64 {
        (self.lambda * self.lambda - self.m.value() * self.m.value()).norm()
    }

    /// `|lambda^2 - m^2 - 4|`
    pub fn dist_sq_upper(&self) -> f64 {
        (self.lambda * self.lambda - self.m.value() * self.m.value() - 4.0).norm()
    }

    /// `|1/k - k|`
    pub fn k_gap(&self) -> f64 {
        (self.k.inv() - self.k).norm()
    }
}

/// The unique root k of `k^2 - (m^2 + 2 - lambda^2) k + 1 = 0` inside the
/// punctured unit disk, for `lambda` off the essential spectrum.
///
/// The two roots multiply to 1; the large root is computed with the
/// sign-matched quadratic formula and the returned one is its reciprocal.
pub fn k_from_lambda(lambda: Complex64, m: MassParam) -> Result<KPoint> {
    if on_spectrum(lambda, m) {
        return Err(Error::SpectralPoint);
    }
    let w = c64(m.value() * m.value() + 2.0, 0.0) - lambda * lambda;
    let disc = (w * w - 4.0).sqrt();
    // branch with no cancellation against w
    let big = if (w.conj() * disc).re >= 0.0 {
        0.5 * (w + disc)
    } else {
        0.5 * (w - disc)
    };
    if big.norm() <= 1.0 {
        // both roots on the unit circle: lambda is effectively spectral
        return Err(Error::SpectralPoint);
    }
    let k = big.inv();
    KPoint::new(k, m, lambda)
}

/// The two square roots `(+lambda, -lambda)` of `m^2 + 2 - k - 1/k` for k
/// in the punctured unit disk. The first element has non-negative
/// imaginary part, ties broken by non-negative real part.
pub fn lambda_pair_from_k(k: Complex64, m: MassParam) -> Result<(Complex64, Complex64)> {
    let kn = k.norm();
    if !(kn > 0.0 && kn < 1.0) {
        return Err(Error::UnitDisk);
    }
    let lam_sq = c64(m.value() * m.value() + 2.0, 0.0) - k - k.inv();
    let s = lam_sq.sqrt(); // principal: Re >= 0, Im sign of branch cut up
    let first = if s.im > 0.0 || (s.im == 0.0 && s.re >= 0.0) {
        s
    } else {
        -s
    };
    Ok((first, -first))
}

/// Package a k-disk point with its first lambda branch.
pub fn kpoint_from_k(k: Complex64, m: MassParam) -> Result<KPoint> {
    let (lambda, _) = lambda_pair_from_k(k, m)?;
    KPoint::new(k, m, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(v: f64) -> MassParam {
        MassParam::new(v).unwrap()
    }

    #[test]
    fn essential_spectrum_examples() {
        let s0 = essential_spectrum(m(0.0));
        assert_eq!(s0.intervals, [(-2.0, 0.0), (0.0, 2.0)]);
        let s1 = essential_spectrum(m(1.0));
        let r5 = 5.0f64.sqrt();
        assert!((s1.intervals[0].0 + r5).abs() < 1e-15);
        assert_eq!(s1.intervals[0].1, -1.0);
        assert_eq!(s1.intervals[1].0, 1.0);
        assert!((s1.intervals[1].1 - r5).abs() < 1e-15);
        let s2 = essential_spectrum(m(2.0));
        assert!((s2.intervals[1].1 - 2.0 * 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(s2.intervals[1].0, 2.0);
    }

    #[test]
    fn dist_examples() {
        assert!((dist_to_spectrum(c64(0.0, 0.0), m(1.0)) - 1.0).abs() < 1e-15);
        assert_eq!(dist_to_spectrum(c64(1.5, 0.0), m(1.0)), 0.0);
        assert!((dist_to_spectrum(c64(0.0, 3.0), m(1.0)) - 10.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn k_from_lambda_examples() {
        let golden = (3.0 - 5.0f64.sqrt()) / 2.0;
        let kp = k_from_lambda(c64(0.0, 1.0), m(0.0)).unwrap();
        assert!((kp.k - c64(golden, 0.0)).norm() < 1e-14, "k = {}", kp.k);
        let kp = k_from_lambda(c64(0.0, 0.0), m(1.0)).unwrap();
        assert!((kp.k - c64(golden, 0.0)).norm() < 1e-14);
        let kp = k_from_lambda(c64(0.0, 2.0), m(0.0)).unwrap();
        assert!((kp.k - c64(3.0 - 2.0 * 2.0f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn k_from_lambda_rejects_spectral_points() {
        assert_eq!(k_from_lambda(c64(1.5, 0.0), m(1.0)), Err(Error::SpectralPoint));
        // degenerate endpoints
        for l in [1.0, -1.0, 5.0f64.sqrt(), -(5.0f64.sqrt())] {
            assert_eq!(k_from_lambda(c64(l, 0.0), m(1.0)), Err(Error::SpectralPoint));
        }
    }

    #[test]
    fn lambda_pair_examples() {
        let (a, b) = lambda_pair_from_k(c64(0.5, 0.0), m(0.0)).unwrap();
        let want = 1.0 / 2.0f64.sqrt();
        assert!((a - c64(0.0, want)).norm() < 1e-15);
        assert!((b + c64(0.0, want)).norm() < 1e-15);
        let (a, _) = lambda_pair_from_k(c64((3.0 - 5.0f64.sqrt()) / 2.0, 0.0), m(1.0)).unwrap();
        assert!(a.norm() < 1e-7, "lambda^2 = 0 case, got {a}");
        let (a, b) = lambda_pair_from_k(c64(3.0 - 2.0 * 2.0f64.sqrt(), 0.0), m(0.0)).unwrap();
        assert!((a - c64(0.0, 2.0)).norm() < 1e-13);
        assert!((b - c64(0.0, -2.0)).norm() < 1e-13);
    }

    #[test]
    fn lambda_pair_rejects_outside_disk() {
        assert_eq!(lambda_pair_from_k(c64(0.0, 0.0), m(1.0)), Err(Error::UnitDisk));
        assert_eq!(lambda_pair_from_k(c64(1.0, 0.0), m(1.0)), Err(Error::UnitDisk));
        assert_eq!(lambda_pair_from_k(c64(0.8, 0.7), m(1.0)), Err(Error::UnitDisk));
    }

    fn sample_offspec(rng: &mut ChaCha8Rng) -> (Complex64, MassParam) {
        loop {
            let mass = m(rng.random::<f64>() * 3.0);
            let lam = c64(
                (rng.random::<f64>() - 0.5) * 10.0,
                (rng.random::<f64>() - 0.5) * 8.0,
            );
            if dist_to_spectrum(lam, mass) > 1e-3 {
                return (lam, mass);
            }
        }
    }

    #[test]
    fn round_trip_and_modulus_identity_ensemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10_000 {
            let (lam, mass) = sample_offspec(&mut rng);
            let kp = k_from_lambda(lam, mass).unwrap();
            let (a, b) = lambda_pair_from_k(kp.k, mass).unwrap();
            let err = (a - lam).norm().min((b - lam).norm());
            assert!(
                err <= 1e-10 * (1.0 + lam.norm()),
                "round trip failed at lam={lam}, m={}: err={err}",
                mass.value()
            );
            let mm = mass.value() * mass.value();
            let l2 = lam * lam;
            let lhs = (kp.k - kp.k.inv()).norm_sqr();
            let rhs = (l2 - mm).norm() * (l2 - mm - 4.0).norm();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * lhs.max(rhs).max(1.0),
                "modulus identity failed at lam={lam}"
            );
        }
    }

    #[test]
    fn symmetry_of_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let (lam, mass) = sample_offspec(&mut rng);
            let k0 = k_from_lambda(lam, mass).unwrap().k;
            let kneg = k_from_lambda(-lam, mass).unwrap().k;
            let kconj = k_from_lambda(lam.conj(), mass).unwrap().k;
            assert!((k0 - kneg).norm() < 1e-13 * (1.0 + k0.norm()));
            assert!((k0 - kconj.conj()).norm() < 1e-13 * (1.0 + k0.norm()));
        }
    }

    #[test]
    fn boundary_approach_smoke() {
        // |k| -> 1 monotonically as lambda -> band interior point, with the
        // local rate constant c = |1 - k0^2| / (2 |lambda0|)
        for (l0, mass) in [(1.5, m(1.0)), (-1.2, m(0.5)), (1.0, m(0.0))] {
            let mut prev = 0.0;
            for e in [1e-2, 1e-3, 1e-4, 1e-5] {
                let kp = k_from_lambda(c64(l0, e), mass).unwrap();
                let kn = kp.k.norm();
                assert!(kn > prev, "not monotone at eps={e}");
                prev = kn;
                let c = (Complex64::ONE - kp.k * kp.k).norm() / (2.0 * l0.abs());
                assert!(kn > 1.0 - 10.0 * e / c, "rate check failed at eps={e}");
            }
        }
    }
}

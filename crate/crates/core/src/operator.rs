//! Potentials, l^p norms, truncated perturbed operators, and the finite
//! Birman-Schwinger matrix.
//!
//! A potential is a finitely supported doubly-infinite sequence of 2x2
//! complex blocks; sites outside the stored window are the zero matrix.
//! The Birman-Schwinger matrix is indexed over the contiguous support
//! window (gaps zero-padded): the operator vanishes off the support, so
//! this finite section carries its full nonzero action.

use num_complex::Complex64;

use crate::c64;
use crate::error::{Error, Result};
use crate::linalg::banded::BandedCMat;
use crate::linalg::dense::DenseCMat;
use crate::linalg::mat2::{polar_decompose_2x2, spectral_norm_2x2, sqrt_psd_2x2, Mat2C};
use crate::resolvent::{free_dirac_banded, t_matrix};
use crate::spectral_map::{k_from_lambda, MassParam};

/// Finitely supported block potential. `blocks[i]` is the 2x2 block at
/// site `offset + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    offset: i64,
    blocks: Vec<Mat2C>,
}

impl Potential {
    /// The zero potential (empty support).
    pub fn zero() -> Self {
        Self {
            offset: 0,
            blocks: Vec::new(),
        }
    }

    pub fn new(offset: i64, blocks: Vec<Mat2C>) -> Self {
        let mut p = Self { offset, blocks };
        p.trim();
        p
    }

    pub fn single_site(site: i64, block: Mat2C) -> Self {
        Self::new(site, vec![block])
    }

    /// Build from (site, block) pairs; sites need not be contiguous or
    /// sorted, gaps are zero-filled, repeated sites accumulate.
    pub fn from_sites(sites: &[(i64, Mat2C)]) -> Self {
        if sites.is_empty() {
            return Self::zero();
        }
        let lo = sites.iter().map(|(n, _)| *n).min().unwrap();
        let hi = sites.iter().map(|(n, _)| *n).max().unwrap();
        let mut blocks = vec![Mat2C::zero(); (hi - lo + 1) as usize];
        for (n, b) in sites {
            let i = (n - lo) as usize;
            blocks[i] = blocks[i] + *b;
        }
        Self::new(lo, blocks)
    }

    fn trim(&mut self) {
        while self.blocks.last().is_some_and(Mat2C::is_zero) {
            self.blocks.pop();
        }
        while self.blocks.first().is_some_and(Mat2C::is_zero) {
            self.blocks.remove(0);
            self.offset += 1;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// First stored site.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn blocks(&self) -> &[Mat2C] {
        &self.blocks
    }

    /// Inclusive support window, None for the zero potential.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.blocks.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.blocks.len() as i64 - 1))
        }
    }

    pub fn block_at(&self, site: i64) -> Mat2C {
        let i = site - self.offset;
        if i < 0 || i as usize >= self.blocks.len() {
            Mat2C::zero()
        } else {
            self.blocks[i as usize]
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            offset: self.offset,
            blocks: self.blocks.iter().map(|b| b.scale(c64(s, 0.0))).collect(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.blocks.iter().all(|b| b.is_hermitian(tol))
    }

    /// Parse the text format: one line per site,
    /// `n re11 im11 re12 im12 re21 im21 re22 im22`, whitespace-separated,
    /// `#` starts a comment, sites need not be contiguous.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut sites = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() != 9 {
                return Err(Error::InvalidParam(format!(
                    "potential line {}: expected 9 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let site: i64 = fields[0].parse().map_err(|_| {
                Error::InvalidParam(format!("potential line {}: bad site index", lineno + 1))
            })?;
            let mut vals = [0.0f64; 8];
            for (t, f) in fields[1..].iter().enumerate() {
                vals[t] = f.parse().map_err(|_| {
                    Error::InvalidParam(format!(
                        "potential line {}: bad number `{f}`",
                        lineno + 1
                    ))
                })?;
            }
            sites.push((
                site,
                Mat2C::new(
                    c64(vals[0], vals[1]),
                    c64(vals[2], vals[3]),
                    c64(vals[4], vals[5]),
                    c64(vals[6], vals[7]),
                ),
            ));
        }
        Ok(Self::from_sites(&sites))
    }

    /// Inverse of [`Potential::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, b) in self.blocks.iter().enumerate() {
            let n = self.offset + i as i64;
            out.push_str(&format!(
                "{n} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}\n",
                b.a11.re, b.a11.im, b.a12.re, b.a12.im, b.a21.re, b.a21.im, b.a22.re, b.a22.im
            ));
        }
        out
    }
}

/// `(sum_n |v_n|^p)^{1/p}` with the per-site spectral norm; `sup_n |v_n|`
/// for p = infinity. Fails with [`Error::BadExponent`] for p < 1.
pub fn lp_norm(v: &Potential, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent);
    }
    let norms = v.blocks.iter().map(spectral_norm_2x2);
    if p.is_infinite() {
        Ok(norms.fold(0.0, f64::max))
    } else if p == 1.0 {
        Ok(norms.sum())
    } else {
        Ok(norms.map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p))
    }
}

/// Per-site polar data for a potential: `v_n = u_n w_n` with `w_n`
/// Hermitian PSD and `sqrt(w_n)` its PSD square root.
#[derive(Debug, Clone)]
pub struct PolarPotential {
    pub offset: i64,
    pub u_blocks: Vec<Mat2C>,
    pub w_blocks: Vec<Mat2C>,
    pub sqrt_w_blocks: Vec<Mat2C>,
}

impl PolarPotential {
    pub fn len(&self) -> usize {
        self.u_blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_blocks.is_empty()
    }
}

/// Site-wise polar decomposition of a potential.
pub fn polarize(v: &Potential) -> PolarPotential {
    let mut u_blocks = Vec::with_capacity(v.blocks.len());
    let mut w_blocks = Vec::with_capacity(v.blocks.len());
    let mut sqrt_w_blocks = Vec::with_capacity(v.blocks.len());
    for b in &v.blocks {
        let (u, w) = polar_decompose_2x2(b);
        sqrt_w_blocks.push(sqrt_psd_2x2(&w));
        u_blocks.push(u);
        w_blocks.push(w);
    }
    PolarPotential {
        offset: v.offset,
        u_blocks,
        w_blocks,
        sqrt_w_blocks,
    }
}

/// Sharp-cut truncation of `D_0 + V` over sites `[-N, N]` as a banded
/// (scalar tridiagonal) matrix.
pub fn build_truncated_dirac_banded(
    m: MassParam,
    v: &Potential,
    n_sites: usize,
) -> Result<BandedCMat> {
    if let Some((lo, hi)) = v.support() {
        let nn = n_sites as i64;
        if lo < -nn || hi > nn {
            return Err(Error::SupportOverflow);
        }
    }
    let mut a = free_dirac_banded(m, n_sites);
    for (i, b) in v.blocks.iter().enumerate() {
        let site = v.offset + i as i64;
        let s = (site + n_sites as i64) as usize;
        a.add_to(2 * s, 2 * s, b.a11);
        a.add_to(2 * s, 2 * s + 1, b.a12);
        a.add_to(2 * s + 1, 2 * s, b.a21);
        a.add_to(2 * s + 1, 2 * s + 1, b.a22);
    }
    Ok(a)
}

/// Same truncation as a dense matrix of size `(4N+2)^2`.
pub fn build_truncated_dirac(m: MassParam, v: &Potential, n_sites: usize) -> Result<DenseCMat> {
    Ok(build_truncated_dirac_banded(m, v, n_sites)?.to_dense())
}

/// The finite Birman-Schwinger matrix with 2x2 blocks
/// `K_ij = sqrt(w_i) T_{j-i}(k) u_j sqrt(w_j)` over the support window of
/// the potential. Empty (0x0) for the zero potential.
pub fn birman_schwinger_matrix(
    lambda: Complex64,
    m: MassParam,
    v: &Potential,
) -> Result<DenseCMat> {
    if v.is_zero() {
        return Ok(DenseCMat::zeros(0, 0));
    }
    let kp = k_from_lambda(lambda, m)?;
    let pol = polarize(v);
    let s = pol.len();
    let mut k = DenseCMat::zeros(2 * s, 2 * s);
    for i in 0..s {
        if pol.sqrt_w_blocks[i].is_zero() {
            continue;
        }
        for j in 0..s {
            if pol.sqrt_w_blocks[j].is_zero() {
                continue;
            }
            let t = t_matrix(j as i64 - i as i64, &kp);
            let block = pol.sqrt_w_blocks[i] * t * pol.u_blocks[j] * pol.sqrt_w_blocks[j];
            k.set_block2(i, j, &block);
        }
    }
    Ok(k)
}

/// The three upper bounds for the Birman-Schwinger norm used in the
/// containment arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsNormBounds {
    /// `||V||_1 (|lambda-m| + |lambda+m|) / sqrt(|lambda^2-m^2| |lambda^2-m^2-4|)`
    pub hs_style: f64,
    /// `max(|T_0|, |T_1|) ||V||_1`
    pub max_style: f64,
    /// `(|T_0|^q + 2 |T_1|^q / (1-|k|^q))^{1/q} ||V||_p`, with the
    /// q = infinity convention equal to the max bound
    pub young_style: f64,
}

/// Evaluate the three Birman-Schwinger norm bounds at `lambda` for the
/// given potential and exponent p.
pub fn bs_norm_bounds(
    lambda: Complex64,
    m: MassParam,
    v: &Potential,
    p: f64,
) -> Result<BsNormBounds> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent);
    }
    let kp = k_from_lambda(lambda, m)?;
    let v1 = lp_norm(v, 1.0)?;
    let vp = lp_norm(v, p)?;
    let mv = m.value();
    let num = (lambda - mv).norm() + (lambda + mv).norm();
    let hs_style = v1 * num / (kp.dist_sq_lower() * kp.dist_sq_upper()).sqrt();
    let q = crate::enclosures::holder_conjugate(p);
    let max_style = crate::enclosures::h_q_at(&kp, f64::INFINITY) * v1;
    let young_style = crate::enclosures::h_q_at(&kp, q) * vp;
    Ok(BsNormBounds {
        hs_style,
        max_style,
        young_style,
    })
}

//! Dense complex matrices, row-major, with a partial-pivoting solver.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::mat2::Mat2C;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl DenseCMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![Complex64::ZERO; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|r| r.len() == ncols));
        Self {
            nrows,
            ncols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Row-sum norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).iter().map(|e| e.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Write the 2x2 block whose top-left scalar entry is `(2i, 2j)`.
    pub fn set_block2(&mut self, i: usize, j: usize, b: &Mat2C) {
        self[(2 * i, 2 * j)] = b.a11;
        self[(2 * i, 2 * j + 1)] = b.a12;
        self[(2 * i + 1, 2 * j)] = b.a21;
        self[(2 * i + 1, 2 * j + 1)] = b.a22;
    }

    /// Read the 2x2 block whose top-left scalar entry is `(2i, 2j)`.
    pub fn block2(&self, i: usize, j: usize) -> Mat2C {
        Mat2C::new(
            self[(2 * i, 2 * j)],
            self[(2 * i, 2 * j + 1)],
            self[(2 * i + 1, 2 * j)],
            self[(2 * i + 1, 2 * j + 1)],
        )
    }

    pub fn matmul(&self, rhs: &DenseCMat) -> DenseCMat {
        assert_eq!(self.ncols, rhs.nrows);
        let mut out = DenseCMat::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = out.row_mut(i);
                for (o, r) in orow.iter_mut().zip(rrow.iter()) {
                    *o += a * r;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v.iter())
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for DenseCMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseCMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// Solve `A X = B` by LU with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot falls below
/// `n * ulp * ||A||_inf`.
pub fn dense_solve(a: &DenseCMat, b: &DenseCMat) -> Result<DenseCMat> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "solve needs a square matrix, got {}x{}",
            a.nrows, a.ncols
        )));
    }
    if a.nrows != b.nrows {
        return Err(Error::Dimension(format!(
            "rhs has {} rows, matrix has {}",
            b.nrows, a.nrows
        )));
    }
    let n = a.nrows;
    let tol = n as f64 * f64::EPSILON * a.inf_norm();
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        // pivot search in column k
        let (piv, pmag) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pmag <= tol {
            return Err(Error::Singular);
        }
        if piv != k {
            for j in 0..n {
                lu.data.swap(piv * n + j, k * n + j);
            }
            for j in 0..x.ncols {
                x.data.swap(piv * x.ncols + j, k * x.ncols + j);
            }
        }
        let inv = Complex64::ONE / lu[(k, k)];
        for i in (k + 1)..n {
            let m = lu[(i, k)] * inv;
            if m == Complex64::ZERO {
                continue;
            }
            lu[(i, k)] = m;
            let (top, bottom) = lu.data.split_at_mut(i * n);
            let krow = &top[k * n..k * n + n];
            let irow = &mut bottom[..n];
            for j in (k + 1)..n {
                irow[j] -= m * krow[j];
            }
            let (xtop, xbottom) = x.data.split_at_mut(i * x.ncols);
            let kxrow = &xtop[k * x.ncols..(k + 1) * x.ncols];
            let ixrow = &mut xbottom[..x.ncols];
            for j in 0..x.ncols {
                ixrow[j] -= m * kxrow[j];
            }
        }
    }
    // back substitution
    for k in (0..n).rev() {
        let inv = Complex64::ONE / lu[(k, k)];
        for j in 0..x.ncols {
            x[(k, j)] *= inv;
        }
        for i in 0..k {
            let m = lu[(i, k)];
            if m == Complex64::ZERO {
                continue;
            }
            for j in 0..x.ncols {
                let v = x[(k, j)];
                x[(i, j)] -= m * v;
            }
        }
    }
    Ok(x)
}

/// Determinant via LU with partial pivoting; 0 for numerically singular input.
pub fn dense_det(a: &DenseCMat) -> Complex64 {
    assert!(a.is_square());
    let n = a.nrows;
    let mut lu = a.clone();
    let mut det = Complex64::ONE;
    for k in 0..n {
        let (piv, pmag) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pmag == 0.0 {
            return Complex64::ZERO;
        }
        if piv != k {
            for j in 0..n {
                lu.data.swap(piv * n + j, k * n + j);
            }
            det = -det;
        }
        det *= lu[(k, k)];
        let inv = Complex64::ONE / lu[(k, k)];
        for i in (k + 1)..n {
            let m = lu[(i, k)] * inv;
            let (top, bottom) = lu.data.split_at_mut(i * n);
            let krow = &top[k * n..k * n + n];
            let irow = &mut bottom[..n];
            for j in (k + 1)..n {
                irow[j] -= m * krow[j];
            }
        }
    }
    det
}

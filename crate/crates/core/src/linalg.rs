//! Small dense helpers shared by the solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A convolution kernel on a uniform grid: entry `(i, j)` is `vals[i - j + n - 1]`.
#[derive(Debug, Clone)]
pub struct Toeplitz<T> {
    n: usize,
    vals: Vec<T>,
}

impl<T: Copy> Toeplitz<T> {
    /// Builds from `f(d)` for offsets `d = -(n-1) ..= n-1`.
    pub fn from_fn<F: FnMut(isize) -> T>(n: usize, mut f: F) -> Self {
        let vals = (0..2 * n - 1).map(|i| f(i as isize - (n as isize - 1))).collect();
        Toeplitz { n, vals }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.vals[i + self.n - 1 - j]
    }

    pub fn offset(&self, d: isize) -> T {
        self.vals[(d + self.n as isize - 1) as usize]
    }
}

impl Toeplitz<f64> {
    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.at(i, j))
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let row = &self.vals[i..i + self.n];
                row.iter().rev().zip(v).map(|(k, x)| x * *k).sum()
            })
            .collect()
    }
}

impl Toeplitz<C64> {
    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.at(i, j))
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let row = &self.vals[i..i + self.n];
                row.iter().rev().zip(v).map(|(k, x)| k * x).sum()
            })
            .collect()
    }
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

pub fn cvec(v: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(v)
}

/// Largest relative asymmetry `max|K - Kᵀ| / max|K|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst / scale
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Nonnegative square root of a symmetric matrix; eigenvalues within
/// `-clip * ‖M‖` of zero are set to zero, anything more negative is an error.
pub fn psd_sqrt(m: &DMatrix<f64>, clip: f64) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    let norm = eig.eigenvalues.amax();
    let mut d = eig.eigenvalues.clone();
    for v in d.iter_mut() {
        if *v < 0.0 {
            if *v < -clip * norm {
                return Err(Error::Indefinite(*v));
            }
            *v = 0.0;
        }
        *v = v.sqrt();
    }
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, s) in d.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*s);
    }
    let mut out = scaled * q.transpose();
    symmetrize(&mut out);
    Ok(out)
}

/// Positive part of a symmetric matrix.
pub fn positive_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, v) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v.max(0.0));
    }
    let mut out = scaled * q.transpose();
    symmetrize(&mut out);
    out
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

pub fn spectral_norm_c(m: &DMatrix<C64>) -> f64 {
    m.clone().singular_values().max()
}

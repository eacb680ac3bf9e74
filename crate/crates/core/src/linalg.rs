//! Small dense linear algebra: a row-major matrix and a symmetric
//! eigensolver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(data.len(), rows * cols));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unit eigenvectors as rows, matching `values`. Each vector's
    /// largest-magnitude entry is positive.
    pub vectors: Matrix,
}

/// Cyclic Jacobi rotations until the off-diagonal mass vanishes.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::DimensionMismatch(a.rows(), a.cols()));
    }
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale: f64 = m.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)] * m[(p, q)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (row, &i) in order.iter().enumerate() {
        let mut col = v.column(i);
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            col.iter_mut().for_each(|x| *x = -*x);
        }
        vectors.row_mut(row).copy_from_slice(&col);
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Least squares `y ~ c + Σ coef_j * columns[j]` via a pseudo-inverse of the
/// correlation matrix of the centred, unit-scaled columns.
///
/// Columns with no variance, and directions whose eigenvalue falls below
/// `1e-10` of the largest, are dropped; `rank_deficient` reports whether
/// that happened. Returns `(intercept, coefficients, rank_deficient)`.
pub fn least_squares_centered(columns: &[&[f64]], y: &[f64]) -> Result<(f64, Vec<f64>, bool)> {
    let n = y.len();
    if n == 0 {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::DimensionMismatch(c.len(), n));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let y_mean = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let means: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let centered: Vec<Vec<f64>> = columns
        .iter()
        .zip(&means)
        .map(|(c, m)| c.iter().map(|v| v - m).collect())
        .collect();
    let raw_scale = columns
        .iter()
        .flat_map(|c| c.iter())
        .chain(y)
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE)
        * (n as f64).sqrt();
    let norms: Vec<f64> = centered.iter().map(|c| dot(c, c).sqrt()).collect();

    let mut rank_deficient = false;
    let active: Vec<usize> = (0..columns.len())
        .filter(|&j| {
            let keep = norms[j] > 1e-12 * raw_scale;
            rank_deficient |= !keep;
            keep
        })
        .collect();
    let k = active.len();
    let scaled: Vec<Vec<f64>> = active
        .iter()
        .map(|&j| centered[j].iter().map(|v| v / norms[j]).collect())
        .collect();
    let mut gram = Matrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let g = dot(&scaled[a], &scaled[b]);
            gram[(a, b)] = g;
            gram[(b, a)] = g;
        }
    }
    let rhs: Vec<f64> = scaled.iter().map(|c| dot(c, &yc)).collect();

    let mut solution = vec![0.0; k];
    if k > 0 {
        let eig = symmetric_eigen(&gram)?;
        let top = eig.values[0];
        for (lambda, vec) in eig.values.iter().zip(0..k) {
            if *lambda <= 1e-10 * top {
                rank_deficient = true;
                continue;
            }
            let e = eig.vectors.row(vec);
            let proj = dot(e, &rhs) / lambda;
            for (s, ei) in solution.iter_mut().zip(e) {
                *s += proj * ei;
            }
        }
    }

    let mut coef = vec![0.0; columns.len()];
    for (s, &j) in solution.iter().zip(&active) {
        coef[j] = s / norms[j];
    }
    let intercept = y_mean - coef.iter().zip(&means).map(|(c, m)| c * m).sum::<f64>();
    Ok((intercept, coef, rank_deficient))
}

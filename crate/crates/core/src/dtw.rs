//! Dynamic time warping between two multivariate sequences.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::linalg::Matrix;
use crate::{Error, Result};

/// A monotone frame correspondence from `(0, 0)` to `(n_a - 1, n_b - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
    /// True where the pair repeats the previous pair's `i` or `j`.
    pub duplicate_mask: Vec<bool>,
    /// Summed Euclidean frame distance along the path.
    pub cost: f64,
}

impl Alignment {
    /// Pairs that advance both sequences (the first pair included).
    pub fn fresh_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs
            .iter()
            .zip(&self.duplicate_mask)
            .filter(|(_, dup)| !**dup)
            .map(|(p, _)| *p)
    }
}

fn frame_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Optimal alignment under the step set `{(1,0), (0,1), (1,1)}`.
///
/// Rows of `a` and `b` are frames; both need the same column count. Ties
/// while tracing back prefer the diagonal step, then advancing `a`, then
/// advancing `b`.
pub fn align(a: &Matrix, b: &Matrix) -> Result<Alignment> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(a.cols(), b.cols()));
    }
    if a.cols() == 0 {
        return Err(Error::InvalidParameter("sequences need at least one component".into()));
    }
    let (na, nb) = (a.rows(), b.rows());
    if na == 0 || nb == 0 {
        return Err(Error::TooShort {
            len: na.min(nb),
            min: 1,
        });
    }

    let mut acc = vec![f64::INFINITY; na * nb];
    let at = |i: usize, j: usize| i * nb + j;
    for i in 0..na {
        for j in 0..nb {
            let d = frame_distance(a.row(i), b.row(j));
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 && j > 0 {
                    best = best.min(acc[at(i - 1, j - 1)]);
                }
                if i > 0 {
                    best = best.min(acc[at(i - 1, j)]);
                }
                if j > 0 {
                    best = best.min(acc[at(i, j - 1)]);
                }
                best
            };
            acc[at(i, j)] = d + prev;
        }
    }

    let mut pairs = Vec::with_capacity(na + nb);
    let (mut i, mut j) = (na - 1, nb - 1);
    pairs.push((i, j));
    while i > 0 || j > 0 {
        if i == 0 {
            j -= 1;
        } else if j == 0 {
            i -= 1;
        } else {
            let diag = acc[at(i - 1, j - 1)];
            let up = acc[at(i - 1, j)];
            let left = acc[at(i, j - 1)];
            if diag <= up && diag <= left {
                i -= 1;
                j -= 1;
            } else if up <= left {
                i -= 1;
            } else {
                j -= 1;
            }
        }
        pairs.push((i, j));
    }
    pairs.reverse();

    let duplicate_mask = duplicate_mask(&pairs);
    Ok(Alignment {
        cost: acc[at(na - 1, nb - 1)],
        pairs,
        duplicate_mask,
    })
}

fn duplicate_mask(pairs: &[(usize, usize)]) -> Vec<bool> {
    let mut mask = Vec::with_capacity(pairs.len());
    let mut prev: Option<(usize, usize)> = None;
    for &(i, j) in pairs {
        mask.push(prev.is_some_and(|(pi, pj)| pi == i || pj == j));
        prev = Some((i, j));
    }
    mask
}

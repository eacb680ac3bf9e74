//! Joint principal component analysis of two feature matrices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, symmetric_eigen, Matrix};
use crate::trajectory::ResampledTrace;
use crate::{Error, Result};

/// Minimum frames for a feature matrix: enough for AR(2) residuals and a
/// correlation.
pub const MIN_FRAMES: usize = 8;

/// `n × d` movement features of one trace, columns
/// `[f1.x, f1.y, f2.x, f2.y, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub frames: Matrix,
    pub frame_rate_hz: f64,
}

impl FeatureMatrix {
    pub fn n(&self) -> usize {
        self.frames.rows()
    }

    pub fn d(&self) -> usize {
        self.frames.cols()
    }
}

pub fn to_feature_matrix(trace: &ResampledTrace) -> Result<FeatureMatrix> {
    let n = trace.frame_count();
    if n < MIN_FRAMES {
        return Err(Error::TooShort {
            len: n,
            min: MIN_FRAMES,
        });
    }
    let d = 2 * trace.finger_count();
    let mut frames = Matrix::zeros(n, d);
    for (f, path) in trace.fingers.iter().enumerate() {
        for (t, p) in path.iter().enumerate() {
            frames[(t, 2 * f)] = p[0];
            frames[(t, 2 * f + 1)] = p[1];
        }
    }
    Ok(FeatureMatrix {
        frames,
        frame_rate_hz: trace.rate_hz,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    pub mean: Vec<f64>,
    /// `retained_k × d`, orthonormal rows, strongest first.
    pub components: Matrix,
    /// All `d` eigenvalues of the joint covariance, descending.
    pub eigenvalues: Vec<f64>,
    pub retained_k: usize,
    /// Mean squared reconstruction error per frame with `retained_k`
    /// components.
    pub reprojection_mse: f64,
}

impl PcaBasis {
    pub fn total_variance(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Projects centred frames onto the retained components: `n × k`.
    pub fn project(&self, m: &FeatureMatrix) -> Result<Matrix> {
        if m.d() != self.mean.len() {
            return Err(Error::DimensionMismatch(m.d(), self.mean.len()));
        }
        let k = self.retained_k;
        let mut out = Matrix::zeros(m.n(), k);
        let mut centered = vec![0.0; m.d()];
        for t in 0..m.n() {
            for (c, (v, mu)) in centered.iter_mut().zip(m.frames.row(t).iter().zip(&self.mean)) {
                *c = v - mu;
            }
            for j in 0..k {
                out[(t, j)] = dot(self.components.row(j), &centered);
            }
        }
        Ok(out)
    }
}

/// Fits one basis to the stacked rows of both matrices and keeps the
/// fewest components whose reprojection MSE is at most
/// `mse_cutoff_fraction` of the total variance.
pub fn fit_pca(a: &FeatureMatrix, b: &FeatureMatrix, mse_cutoff_fraction: f64) -> Result<PcaBasis> {
    if !(mse_cutoff_fraction > 0.0 && mse_cutoff_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "mse cutoff fraction {mse_cutoff_fraction} is outside (0, 1]"
        )));
    }
    let d = a.d();
    if b.d() != d {
        return Err(Error::DimensionMismatch(d, b.d()));
    }
    let rows = a.n() + b.n();
    let all_rows = || {
        (0..a.n())
            .map(|t| a.frames.row(t))
            .chain((0..b.n()).map(|t| b.frames.row(t)))
    };

    let mut mean = vec![0.0; d];
    for r in all_rows() {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= rows as f64);

    let mut cov = Matrix::zeros(d, d);
    let mut centered = vec![0.0; d];
    for r in all_rows() {
        for (c, (v, mu)) in centered.iter_mut().zip(r.iter().zip(&mean)) {
            *c = v - mu;
        }
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / rows as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let eig = symmetric_eigen(&cov)?;
    let eigenvalues: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroVariance);
    }

    let budget = mse_cutoff_fraction * total;
    let mut retained_k = d;
    let mut reprojection_mse = 0.0;
    for k in 1..=d {
        let discarded: f64 = eigenvalues[k..].iter().sum();
        if discarded <= budget {
            retained_k = k;
            reprojection_mse = discarded;
            break;
        }
    }

    let mut components = Matrix::zeros(retained_k, d);
    for j in 0..retained_k {
        components.row_mut(j).copy_from_slice(eig.vectors.row(j));
    }
    Ok(PcaBasis {
        mean,
        components,
        eigenvalues,
        retained_k,
        reprojection_mse,
    })
}

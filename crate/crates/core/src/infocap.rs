//! Estimated mutual information between repetitions of a gesture.
//!
//! The score is the number of bits two repetitions share after removing
//! what a constant-velocity model already predicts. For a pair of traces:
//!
//! 1. Each trace becomes an `n × 2F` feature matrix, is centred column-wise
//!    and divided by its own RMS radius (this makes the score independent
//!    of where and how large the gesture was drawn).
//! 2. A joint PCA basis is fitted to both traces, keeping the fewest
//!    components whose reprojection MSE stays under the cutoff, and both
//!    traces are projected onto it.
//! 3. The projections are aligned with DTW. The alignment input is a short
//!    moving average of the projections so that the warp follows the
//!    trajectory rather than frame-level noise.
//! 4. Every component of each projection gets an AR(2) fit. Residuals are
//!    paired through the alignment, skipping pairs that reuse a frame and
//!    pairs inside the AR warm-up.
//! 5. Each component contributes `-(n/2)·log2(1 - r²) - log2(e)/2` bits
//!    (bias corrected, `r²` clamped, floored at zero) and the total is the
//!    sum over components.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::ar::{fit_ar2, AR_WARMUP};
use crate::dtw::align;
use crate::linalg::Matrix;
use crate::pca::{fit_pca, to_feature_matrix, FeatureMatrix};
use crate::trajectory::ResampledTrace;
use crate::{Error, Result};

pub use crate::pca::PcaBasis;

/// Fewest usable residual pairs for a correlation.
pub const MIN_EFFECTIVE_PAIRS: usize = 4;

const LOG2_E: f64 = core::f64::consts::LOG2_E;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiConfig {
    /// Allowed reprojection MSE as a fraction of total variance.
    pub mse_cutoff_fraction: f64,
    /// Upper bound applied to `r²` so identical pairs stay finite.
    pub r2_clamp: f64,
    /// Width of the moving average applied to the projections before DTW.
    /// `1` aligns the raw projections.
    pub align_smoothing_frames: usize,
}

impl Default for MiConfig {
    fn default() -> Self {
        Self {
            mse_cutoff_fraction: 0.05,
            r2_clamp: 1.0 - 1e-6,
            align_smoothing_frames: 15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentMi {
    pub component_index: usize,
    pub n_effective: usize,
    pub pearson_r: f64,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiResult {
    pub total_bits: f64,
    pub retained_k: usize,
    pub components: Vec<ComponentMi>,
}

/// Outcome of comparing two traces. Traces with different finger counts
/// have no defined score, which is not the same as zero bits.
#[derive(Debug, Clone, PartialEq)]
pub enum PairOutcome {
    Estimated(MiResult),
    Incomparable { fingers_a: usize, fingers_b: usize },
}

impl PairOutcome {
    pub fn bits(&self) -> Option<f64> {
        match self {
            Self::Estimated(r) => Some(r.total_bits),
            Self::Incomparable { .. } => None,
        }
    }

    pub fn result(&self) -> Option<&MiResult> {
        match self {
            Self::Estimated(r) => Some(r),
            Self::Incomparable { .. } => None,
        }
    }
}

/// Bias-corrected bits for `n` pairs with sample correlation `r`, before
/// clamping and flooring.
pub fn gaussian_mi_bits(n: usize, r: f64) -> f64 {
    gaussian_mi_bits_r2(n, r * r)
}

fn gaussian_mi_bits_r2(n: usize, r2: f64) -> f64 {
    -(n as f64 / 2.0) * (1.0 - r2).log2() - LOG2_E / 2.0
}

/// Pearson correlation; zero when either side has no spread.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n == 0 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let scale = mx.abs().max(my.abs()).max(1.0);
    let tiny = (1e-12 * scale) * (1e-12 * scale) * n as f64;
    if sxx <= tiny || syy <= tiny {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Centres each column and divides by the trace's RMS radius per finger.
fn standardize(m: &FeatureMatrix) -> FeatureMatrix {
    let (n, d) = (m.n(), m.d());
    let mut out = m.frames.clone();
    for c in 0..d {
        let mean = (0..n).map(|t| out[(t, c)]).sum::<f64>() / n as f64;
        (0..n).for_each(|t| out[(t, c)] -= mean);
    }
    let fingers = (d / 2).max(1) as f64;
    let ss: f64 = out.as_slice().iter().map(|v| v * v).sum();
    let radius = (ss / (n as f64 * fingers)).sqrt();
    if radius > 0.0 {
        for t in 0..n {
            out.row_mut(t).iter_mut().for_each(|v| *v /= radius);
        }
    }
    FeatureMatrix {
        frames: out,
        frame_rate_hz: m.frame_rate_hz,
    }
}

/// Centred moving average over `width` frames; the window shrinks at the
/// ends.
pub fn moving_average(m: &Matrix, width: usize) -> Matrix {
    let half = width.max(1) / 2;
    let n = m.rows();
    let mut out = Matrix::zeros(n, m.cols());
    for t in 0..n {
        let lo = t.saturating_sub(half);
        let hi = (t + half).min(n - 1);
        let count = (hi - lo + 1) as f64;
        for c in 0..m.cols() {
            out[(t, c)] = (lo..=hi).map(|s| m[(s, c)]).sum::<f64>() / count;
        }
    }
    out
}

/// Estimated mutual information between two repetitions.
pub fn mutual_information(a: &ResampledTrace, b: &ResampledTrace, config: &MiConfig) -> Result<PairOutcome> {
    if a.finger_count() != b.finger_count() {
        return Ok(PairOutcome::Incomparable {
            fingers_a: a.finger_count(),
            fingers_b: b.finger_count(),
        });
    }
    if !(config.r2_clamp > 0.0 && config.r2_clamp < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "r2 clamp {} is outside (0, 1)",
            config.r2_clamp
        )));
    }
    let fa = standardize(&to_feature_matrix(a)?);
    let fb = standardize(&to_feature_matrix(b)?);
    let basis = fit_pca(&fa, &fb, config.mse_cutoff_fraction)?;
    let pa = basis.project(&fa)?;
    let pb = basis.project(&fb)?;

    let width = config.align_smoothing_frames;
    let alignment = align(&moving_average(&pa, width), &moving_average(&pb, width))?;
    let kept: Vec<(usize, usize)> = alignment
        .fresh_pairs()
        .filter(|&(i, j)| i >= AR_WARMUP && j >= AR_WARMUP)
        .collect();
    let n_effective = kept.len();
    if n_effective < MIN_EFFECTIVE_PAIRS {
        return Err(Error::TooFewPairs {
            found: n_effective,
            min: MIN_EFFECTIVE_PAIRS,
        });
    }

    let mut components = Vec::with_capacity(basis.retained_k);
    for c in 0..basis.retained_k {
        let ra = fit_ar2(&pa.column(c))?;
        let rb = fit_ar2(&pb.column(c))?;
        let xs: Vec<f64> = kept.iter().map(|&(i, _)| ra.residuals[i - AR_WARMUP]).collect();
        let ys: Vec<f64> = kept.iter().map(|&(_, j)| rb.residuals[j - AR_WARMUP]).collect();
        let r = pearson(&xs, &ys);
        let r2 = (r * r).min(config.r2_clamp);
        let bits = gaussian_mi_bits_r2(n_effective, r2).max(0.0);
        components.push(ComponentMi {
            component_index: c,
            n_effective,
            pearson_r: r,
            bits,
        });
    }
    let total_bits = components.iter().map(|c| c.bits).sum();
    Ok(PairOutcome::Estimated(MiResult {
        total_bits,
        retained_k: basis.retained_k,
        components,
    }))
}

/// One evaluated pair, indices into the input list(s).
#[derive(Debug, Clone, PartialEq)]
pub struct PairMi {
    pub a_index: usize,
    pub b_index: usize,
    pub outcome: PairOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupMi {
    pub mean_bits: f64,
    pub pairs: Vec<PairMi>,
    pub incomparable: usize,
}

impl GroupMi {
    /// Mean score of the pairs involving `index` on either side (for
    /// within-group results) or on side `a` (for cross-group results when
    /// `cross` is set).
    pub fn mean_for(&self, index: usize, cross: bool) -> Option<f64> {
        let vals: Vec<f64> = self
            .pairs
            .iter()
            .filter(|p| p.a_index == index || (!cross && p.b_index == index))
            .filter_map(|p| p.outcome.bits())
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

fn summarize(pairs: Vec<PairMi>) -> Result<GroupMi> {
    let scored: Vec<f64> = pairs.iter().filter_map(|p| p.outcome.bits()).collect();
    if scored.is_empty() {
        return Err(Error::AllIncomparable);
    }
    let incomparable = pairs.len() - scored.len();
    Ok(GroupMi {
        mean_bits: scored.iter().sum::<f64>() / scored.len() as f64,
        pairs,
        incomparable,
    })
}

fn check_same_gesture<'a>(traces: impl IntoIterator<Item = &'a ResampledTrace>) -> Result<()> {
    let mut iter = traces.into_iter();
    if let Some(first) = iter.next() {
        if let Some(other) = iter.find(|t| t.meta.gesture_id != first.meta.gesture_id) {
            return Err(Error::InvalidParameter(alloc::format!(
                "traces of gestures {:?} and {:?} mixed in one group",
                first.meta.gesture_id,
                other.meta.gesture_id
            )));
        }
    }
    Ok(())
}

/// Mean score over all unordered pairs of `traces`.
pub fn group_mean_mi(traces: &[ResampledTrace], config: &MiConfig) -> Result<GroupMi> {
    if traces.len() < 2 {
        return Err(Error::TooShort {
            len: traces.len(),
            min: 2,
        });
    }
    check_same_gesture(traces)?;
    let mut pairs = Vec::with_capacity(traces.len() * (traces.len() - 1) / 2);
    for i in 0..traces.len() {
        for j in i + 1..traces.len() {
            pairs.push(PairMi {
                a_index: i,
                b_index: j,
                outcome: mutual_information(&traces[i], &traces[j], config)?,
            });
        }
    }
    summarize(pairs)
}

/// Mean score over every pair taking one trace from each group.
pub fn cross_group_mi(a: &[ResampledTrace], b: &[ResampledTrace], config: &MiConfig) -> Result<GroupMi> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    check_same_gesture(a.iter().chain(b))?;
    let mut pairs = Vec::with_capacity(a.len() * b.len());
    for (i, ta) in a.iter().enumerate() {
        for (j, tb) in b.iter().enumerate() {
            pairs.push(PairMi {
                a_index: i,
                b_index: j,
                outcome: mutual_information(ta, tb, config)?,
            });
        }
    }
    summarize(pairs)
}

/// Cross-group score of (Generate, Recall2) relative to the within-Generate
/// score.
pub fn memorability_ratio(generate: &[ResampledTrace], recall2: &[ResampledTrace], config: &MiConfig) -> Result<f64> {
    let within = group_mean_mi(generate, config)?.mean_bits;
    if !(within > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "generate group mean {within} bits cannot be a denominator"
        )));
    }
    Ok(cross_group_mi(generate, recall2, config)?.mean_bits / within)
}

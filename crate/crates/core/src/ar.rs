//! Second-order autoregressive fits.
//!
//! `x_t = β0 + β1·x_{t-1} + β2·x_{t-2} + ε_t`. The residuals are the part of
//! the movement a constant-velocity continuation does not explain.

use alloc::vec::Vec;

use crate::linalg::least_squares_centered;
use crate::{Error, Result};

/// Shortest series accepted by [`fit_ar2`].
pub const MIN_AR_LEN: usize = 8;

/// Frames lost at the start of a series before the first residual exists.
pub const AR_WARMUP: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    /// `[β0, β1, β2]`.
    pub beta: [f64; 3],
    /// `residuals[t - 2]` belongs to frame `t`.
    pub residuals: Vec<f64>,
    /// The design matrix was rank deficient (e.g. a constant or a
    /// constant-velocity series) and the pseudo-inverse solution was used.
    pub degenerate: bool,
}

impl ArFit {
    /// Residual for frame `t`, `None` during warm-up.
    pub fn residual_at(&self, t: usize) -> Option<f64> {
        t.checked_sub(AR_WARMUP).and_then(|i| self.residuals.get(i)).copied()
    }
}

/// Least-squares AR(2) fit.
///
/// The regression is carried out on the better-conditioned pair
/// (position, velocity) = `(x_{t-1}, x_{t-1} - x_{t-2})` and mapped back to
/// the lag form; both span the same column space.
pub fn fit_ar2(series: &[f64]) -> Result<ArFit> {
    let n = series.len();
    if n < MIN_AR_LEN {
        return Err(Error::TooShort {
            len: n,
            min: MIN_AR_LEN,
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("series"));
    }
    let target = &series[2..];
    let lag1 = &series[1..n - 1];
    let velocity: Vec<f64> = series.windows(2).take(n - 2).map(|w| w[1] - w[0]).collect();

    let (intercept, coef, degenerate) = least_squares_centered(&[lag1, &velocity], target)?;
    let (a, b) = (coef[0], coef[1]);
    let beta = [intercept, a + b, -b];

    // Centred form keeps the residuals accurate when positions are large.
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (my, mu, mw) = (mean(target), mean(lag1), mean(&velocity));
    let residuals = (0..n - 2)
        .map(|i| (target[i] - my) - a * (lag1[i] - mu) - b * (velocity[i] - mw))
        .collect();

    Ok(ArFit {
        beta,
        residuals,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_velocity_line_has_zero_residuals() {
        let series: Vec<f64> = (0..50).map(|t| 12.0 + 3.5 * t as f64).collect();
        let fit = fit_ar2(&series).unwrap();
        assert!(fit.degenerate);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-9));
    }

    #[test]
    fn constant_series_is_degenerate_not_an_error() {
        let fit = fit_ar2(&[4.0; 20]).unwrap();
        assert!(fit.degenerate);
        assert!(fit.residuals.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn exact_ar2_recurrence_is_recovered() {
        let mut x = vec![1.0, 2.0];
        for t in 2..60 {
            let v = 0.3 + 1.2 * x[t - 1] - 0.5 * x[t - 2];
            x.push(v + (t as f64 * 0.7).sin());
        }
        let fit = fit_ar2(&x).unwrap();
        assert!(!fit.degenerate);
        assert_eq!(fit.residuals.len(), 58);
        for t in 2..x.len() {
            let pred = fit.beta[0] + fit.beta[1] * x[t - 1] + fit.beta[2] * x[t - 2];
            assert!((x[t] - pred - fit.residual_at(t).unwrap()).abs() < 1e-9);
        }
        assert_eq!(fit.residual_at(1), None);
    }

    #[test]
    fn short_series_is_rejected() {
        assert_eq!(fit_ar2(&[1.0; 7]), Err(Error::TooShort { len: 7, min: 8 }));
    }
}

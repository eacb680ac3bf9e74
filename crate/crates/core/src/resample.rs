//! Uniform-rate resampling of raw traces.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::spline::NaturalCubicSpline;
use crate::trajectory::{FingerStream, GestureTrace, Point, ResampledTrace};
use crate::{Error, Result};

/// Analysis frame rate.
pub const DEFAULT_RATE_HZ: f64 = 60.0;

/// Interpolates every finger onto a common uniform grid at `target_hz`.
///
/// The grid starts at the latest first timestamp among the fingers and
/// stops at or before the earliest last timestamp, so nothing is
/// extrapolated. Samples repeating the previous timestamp are dropped
/// before each natural cubic spline is fitted.
pub fn resample(trace: &GestureTrace, target_hz: f64) -> Result<ResampledTrace> {
    if !(target_hz.is_finite() && target_hz > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("target rate {target_hz} Hz")));
    }
    if trace.fingers.is_empty() {
        return Err(Error::NoFingers);
    }

    let mut splines = Vec::with_capacity(trace.fingers.len());
    for (finger, stream) in trace.fingers.iter().enumerate() {
        let mut stream: FingerStream = stream.clone();
        stream.dedup_timestamps();
        if stream.samples.len() < 3 {
            return Err(Error::TooFewSamples {
                finger,
                found: stream.samples.len(),
                required: 3,
            });
        }
        let ts: Vec<f64> = stream.samples.iter().map(|s| s.t_ms / 1000.0).collect();
        let xs: Vec<f64> = stream.samples.iter().map(|s| s.x).collect();
        let ys: Vec<f64> = stream.samples.iter().map(|s| s.y).collect();
        let sx = NaturalCubicSpline::fit(&ts, &xs)?;
        let sy = NaturalCubicSpline::fit(&ts, &ys)?;
        splines.push((sx, sy));
    }

    let start = splines
        .iter()
        .map(|(s, _)| s.domain().0)
        .fold(f64::NEG_INFINITY, f64::max);
    let end = splines.iter().map(|(s, _)| s.domain().1).fold(f64::INFINITY, f64::min);
    let span = end - start;
    // A hair of slack keeps an exactly representable end point on the grid.
    let frames = if span > 0.0 {
        (span * target_hz + 1e-9).floor() as usize + 1
    } else {
        if span < 0.0 {
            return Err(Error::DegenerateGrid { frames: 0 });
        }
        1
    };
    if frames < 2 {
        return Err(Error::DegenerateGrid { frames });
    }

    let fingers: Vec<Vec<Point>> = splines
        .iter()
        .map(|(sx, sy)| {
            (0..frames)
                .map(|k| {
                    let t = start + k as f64 / target_hz;
                    [sx.eval(t), sy.eval(t)]
                })
                .collect()
        })
        .collect();

    ResampledTrace::from_uniform(trace.meta.clone(), target_hz, fingers)
}

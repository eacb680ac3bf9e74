//! Multitouch Protractor.
//!
//! Each finger is matched on its own with Protractor's closed-form
//! rotation-optimal cosine similarity, per-finger scores are averaged for
//! each template and the best template wins. A candidate with a different
//! finger count than the enrolled gesture scores 0 without any matching.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::finger_order::{apply_permutation, canonical_permutation};
use crate::trajectory::{Point, ResampledTrace};
use crate::{Error, Result};

/// Points per normalized stroke.
pub const DEFAULT_POINTS: usize = 16;

/// Score reported when the angular distance is (numerically) zero.
pub const MAX_SCORE: f64 = 1e4;

/// Templates a gesture may hold.
pub const MAX_TEMPLATES: usize = 10;

/// A stroke resampled to equidistant points, centred on its centroid and
/// scaled so the flattened vector has unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedStroke {
    pub points: Vec<Point>,
}

/// Resamples `path` to `n_points` points equally spaced in arc length,
/// moves the centroid to the origin and scales to unit norm.
pub fn normalize_stroke(path: &[Point], n_points: usize) -> Result<NormalizedStroke> {
    if n_points < 2 {
        return Err(Error::InvalidParameter(alloc::format!("{n_points} stroke points")));
    }
    let mut cumulative = Vec::with_capacity(path.len());
    let mut total = 0.0;
    for (k, p) in path.iter().enumerate() {
        if k > 0 {
            let q = path[k - 1];
            total += (p[0] - q[0]).hypot(p[1] - q[1]);
        }
        cumulative.push(total);
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ZeroLengthStroke);
    }

    let mut points = Vec::with_capacity(n_points);
    let mut seg = 0;
    for k in 0..n_points {
        let target = total * k as f64 / (n_points - 1) as f64;
        while seg + 2 < path.len() && cumulative[seg + 1] < target {
            seg += 1;
        }
        let (l0, l1) = (cumulative[seg], cumulative[seg + 1]);
        let f = if l1 > l0 {
            ((target - l0) / (l1 - l0)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (p, q) = (path[seg], path[seg + 1]);
        points.push([p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])]);
    }

    let n = n_points as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    points.iter_mut().for_each(|p| *p = [p[0] - cx, p[1] - cy]);
    let norm = points.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroLengthStroke);
    }
    points.iter_mut().for_each(|p| *p = [p[0] / norm, p[1] / norm]);
    Ok(NormalizedStroke { points })
}

/// Protractor score `1 / acos(s)`, where `s` is the cosine similarity of
/// the two strokes after rotating `b` by the optimal angle (or by zero
/// when `rotation_invariant` is off). Capped at [`MAX_SCORE`].
pub fn stroke_similarity(a: &NormalizedStroke, b: &NormalizedStroke, rotation_invariant: bool) -> f64 {
    let (mut dot, mut cross) = (0.0, 0.0);
    for (p, q) in a.points.iter().zip(&b.points) {
        dot += p[0] * q[0] + p[1] * q[1];
        cross += p[0] * q[1] - p[1] * q[0];
    }
    let s = if rotation_invariant {
        let theta = cross.atan2(dot);
        dot * theta.cos() + cross * theta.sin()
    } else {
        dot
    };
    let s = s.clamp(-1.0, 1.0);
    if s >= 1.0 - 1e-12 {
        return MAX_SCORE;
    }
    (1.0 / s.acos()).min(MAX_SCORE)
}

/// One enrolled repetition: a stroke per finger.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub strokes: Vec<NormalizedStroke>,
}

/// Enrolled templates of one gesture.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSet {
    pub gesture_id: String,
    pub finger_count: usize,
    pub templates: Vec<Template>,
    /// Finger start positions of the reference repetition. When present,
    /// candidates are put into this finger order before matching.
    pub layout: Vec<Point>,
}

impl TemplateSet {
    /// Builds a set from already ordered repetitions, using the first one's
    /// finger starts as the reference layout.
    pub fn from_traces(gesture_id: impl Into<String>, traces: &[ResampledTrace], n_points: usize) -> Result<Self> {
        let first = traces.first().ok_or(Error::EmptyTemplateSet)?;
        if traces.len() > MAX_TEMPLATES {
            return Err(Error::TemplateCount(traces.len()));
        }
        let finger_count = first.finger_count();
        let mut templates = Vec::with_capacity(traces.len());
        for t in traces {
            if t.finger_count() != finger_count {
                return Err(Error::FingerCountMismatch {
                    expected: finger_count,
                    found: t.finger_count(),
                });
            }
            let strokes = t
                .fingers
                .iter()
                .map(|f| normalize_stroke(f, n_points))
                .collect::<Result<_>>()?;
            templates.push(Template { strokes });
        }
        Ok(Self {
            gesture_id: gesture_id.into(),
            finger_count,
            templates,
            layout: first.starts(),
        })
    }

    /// Wraps templates that were stored without a layout.
    pub fn new(gesture_id: impl Into<String>, finger_count: usize, templates: Vec<Template>) -> Result<Self> {
        let set = Self {
            gesture_id: gesture_id.into(),
            finger_count,
            templates,
            layout: Vec::new(),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.templates.is_empty() {
            return Err(Error::EmptyTemplateSet);
        }
        if self.templates.len() > MAX_TEMPLATES {
            return Err(Error::TemplateCount(self.templates.len()));
        }
        if self.finger_count == 0 {
            return Err(Error::NoFingers);
        }
        for t in &self.templates {
            if t.strokes.len() != self.finger_count {
                return Err(Error::FingerCountMismatch {
                    expected: self.finger_count,
                    found: t.strokes.len(),
                });
            }
        }
        if !self.layout.is_empty() && self.layout.len() != self.finger_count {
            return Err(Error::FingerCountMismatch {
                expected: self.finger_count,
                found: self.layout.len(),
            });
        }
        Ok(())
    }

    pub fn points_per_stroke(&self) -> usize {
        self.templates
            .first()
            .and_then(|t| t.strokes.first())
            .map_or(DEFAULT_POINTS, |s| s.points.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub score: f64,
    pub best_template_index: Option<usize>,
    /// Per-finger scores against the best template.
    pub per_finger_scores: Vec<f64>,
    pub gate_failed: bool,
}

impl MatchResult {
    fn gate_failure() -> Self {
        Self {
            score: 0.0,
            best_template_index: None,
            per_finger_scores: Vec::new(),
            gate_failed: true,
        }
    }
}

/// Scores `candidate` against every template and keeps the best average.
pub fn match_trace(candidate: &ResampledTrace, tset: &TemplateSet, rotation_invariant: bool) -> Result<MatchResult> {
    tset.validate()?;
    if candidate.finger_count() != tset.finger_count {
        return Ok(MatchResult::gate_failure());
    }
    let ordered;
    let candidate = if tset.layout.is_empty() || tset.finger_count == 1 {
        candidate
    } else {
        let perm = canonical_permutation(&tset.layout, &candidate.starts())?;
        ordered = apply_permutation(candidate, &perm);
        &ordered
    };

    let n_points = tset.points_per_stroke();
    // A finger that never moves cannot be compared and scores 0.
    let strokes: Vec<Option<NormalizedStroke>> = candidate
        .fingers
        .iter()
        .map(|f| match normalize_stroke(f, n_points) {
            Ok(s) => Ok(Some(s)),
            Err(Error::ZeroLengthStroke) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for (idx, template) in tset.templates.iter().enumerate() {
        let per_finger: Vec<f64> = strokes
            .iter()
            .zip(&template.strokes)
            .map(|(c, t)| c.as_ref().map_or(0.0, |c| stroke_similarity(c, t, rotation_invariant)))
            .collect();
        let mean = per_finger.iter().sum::<f64>() / per_finger.len() as f64;
        if best.as_ref().is_none_or(|(_, b, _)| mean > *b) {
            best = Some((idx, mean, per_finger));
        }
    }
    let (idx, score, per_finger_scores) = best.ok_or(Error::EmptyTemplateSet)?;
    Ok(MatchResult {
        score,
        best_template_index: Some(idx),
        per_finger_scores,
        gate_failed: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuthDecision {
    pub accepted: bool,
    pub score: f64,
}

/// Accepts when the match score reaches `threshold`.
pub fn authenticate(
    candidate: &ResampledTrace,
    tset: &TemplateSet,
    threshold: f64,
    rotation_invariant: bool,
) -> Result<AuthDecision> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "threshold {threshold} must be positive"
        )));
    }
    let m = match_trace(candidate, tset, rotation_invariant)?;
    Ok(decide(m.score, threshold))
}

/// Threshold rule: accept iff `score >= threshold`.
pub fn decide(score: f64, threshold: f64) -> AuthDecision {
    AuthDecision {
        accepted: score >= threshold,
        score,
    }
}

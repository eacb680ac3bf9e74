//! Gesture recordings: raw multitouch traces and their resampled form.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::{Error, Result};

/// A 2D position in pixels, `[x, y]`.
pub type Point = [f64; 2];

/// Trials are numbered 1..=17 across the two sessions.
pub const MAX_TRIAL: u32 = 17;

/// One touch report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t_ms: f64,
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub fn new(t_ms: f64, x: f64, y: f64) -> Self {
        Self { t_ms, x, y }
    }
}

/// Timestamped positions of a single finger.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FingerStream {
    pub samples: Vec<Sample>,
}

impl FingerStream {
    pub fn new(samples: Vec<Sample>) -> Self {
        Self { samples }
    }

    /// Drops every sample whose timestamp equals the one before it.
    pub fn dedup_timestamps(&mut self) {
        self.samples.dedup_by(|next, prev| next.t_ms == prev.t_ms);
    }

    pub fn start(&self) -> Option<Point> {
        self.samples.first().map(|s| [s.x, s.y])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Screen {
    pub width: u32,
    pub height: u32,
}

/// Identity of a recording.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceMeta {
    pub gesture_id: String,
    pub subject_id: String,
    /// 1 or 2.
    pub session: u8,
    /// 1..=17.
    pub trial_index: u32,
}

impl TraceMeta {
    pub fn new(gesture_id: impl Into<String>, subject_id: impl Into<String>, session: u8, trial_index: u32) -> Self {
        Self {
            gesture_id: gesture_id.into(),
            subject_id: subject_id.into(),
            session,
            trial_index,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.session) {
            return Err(Error::InvalidField {
                field: "session",
                reason: format!("{} is not 1 or 2", self.session),
            });
        }
        if !(1..=MAX_TRIAL).contains(&self.trial_index) {
            return Err(Error::InvalidField {
                field: "trial",
                reason: format!("{} is outside 1..={MAX_TRIAL}", self.trial_index),
            });
        }
        Ok(())
    }
}

/// One recorded repetition of a gesture.
///
/// Construct through [`GestureTrace::new`], which removes duplicate
/// timestamps and checks the invariants: at least one finger, at least two
/// distinct strictly increasing timestamps per finger and every point on
/// screen. The finger count is fixed for the whole trace.
#[derive(Debug, Clone, PartialEq)]
pub struct GestureTrace {
    pub meta: TraceMeta,
    pub screen: Screen,
    pub nominal_rate_hz: f64,
    pub fingers: Vec<FingerStream>,
}

/// Distinct samples a finger needs to be kept in a [`GestureTrace`].
pub const MIN_TRACE_SAMPLES: usize = 2;

impl GestureTrace {
    pub fn new(meta: TraceMeta, screen: Screen, nominal_rate_hz: f64, mut fingers: Vec<FingerStream>) -> Result<Self> {
        for f in &mut fingers {
            f.dedup_timestamps();
        }
        let trace = Self {
            meta,
            screen,
            nominal_rate_hz,
            fingers,
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        self.meta.validate()?;
        if self.screen.width == 0 || self.screen.height == 0 {
            return Err(Error::InvalidField {
                field: "screen",
                reason: format!("{}x{} is empty", self.screen.width, self.screen.height),
            });
        }
        if !(self.nominal_rate_hz.is_finite() && self.nominal_rate_hz > 0.0) {
            return Err(Error::InvalidField {
                field: "rate_hz",
                reason: format!("{} is not a positive rate", self.nominal_rate_hz),
            });
        }
        if self.fingers.is_empty() {
            return Err(Error::NoFingers);
        }
        let (w, h) = (f64::from(self.screen.width), f64::from(self.screen.height));
        for (finger, stream) in self.fingers.iter().enumerate() {
            if stream.samples.len() < MIN_TRACE_SAMPLES {
                return Err(Error::TooFewSamples {
                    finger,
                    found: stream.samples.len(),
                    required: MIN_TRACE_SAMPLES,
                });
            }
            let mut prev: Option<f64> = None;
            for s in &stream.samples {
                if !(s.t_ms.is_finite() && s.x.is_finite() && s.y.is_finite()) {
                    return Err(Error::NonFinite("sample"));
                }
                if let Some(p) = prev {
                    if s.t_ms <= p {
                        return Err(Error::NonMonotonicTime {
                            finger,
                            t_ms: s.t_ms,
                            prev_ms: p,
                        });
                    }
                }
                prev = Some(s.t_ms);
                if !(0.0..=w).contains(&s.x) || !(0.0..=h).contains(&s.y) {
                    return Err(Error::OutOfBounds {
                        finger,
                        x: s.x,
                        y: s.y,
                        width: self.screen.width,
                        height: self.screen.height,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn finger_count(&self) -> usize {
        self.fingers.len()
    }
}

/// A trace on a uniform time grid with all fingers sharing the frame count.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledTrace {
    pub meta: TraceMeta,
    pub rate_hz: f64,
    /// `fingers[f][frame]`, canonical finger order once normalized.
    pub fingers: Vec<Vec<Point>>,
    pub duration_s: f64,
}

impl ResampledTrace {
    /// Wraps already uniform finger paths, checking that they are non-empty
    /// and of equal length.
    pub fn from_uniform(meta: TraceMeta, rate_hz: f64, fingers: Vec<Vec<Point>>) -> Result<Self> {
        if !(rate_hz.is_finite() && rate_hz > 0.0) {
            return Err(Error::InvalidParameter(format!("rate {rate_hz} Hz")));
        }
        let frames = fingers.first().map(Vec::len).ok_or(Error::NoFingers)?;
        if fingers.iter().any(|f| f.len() != frames) {
            return Err(Error::RaggedFingers);
        }
        if frames < 2 {
            return Err(Error::DegenerateGrid { frames });
        }
        if fingers.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("finger path"));
        }
        let duration_s = (frames - 1) as f64 / rate_hz;
        Ok(Self {
            meta,
            rate_hz,
            fingers,
            duration_s,
        })
    }

    pub fn finger_count(&self) -> usize {
        self.fingers.len()
    }

    pub fn frame_count(&self) -> usize {
        self.fingers.first().map_or(0, Vec::len)
    }

    pub fn starts(&self) -> Vec<Point> {
        self.fingers.iter().map(|f| f[0]).collect()
    }

    /// Applies `p -> scale * R(angle) * p + offset` to every point.
    pub fn transformed(&self, scale: f64, angle_rad: f64, offset: Point) -> Self {
        let (s, c) = angle_rad.sin_cos();
        let fingers = self
            .fingers
            .iter()
            .map(|f| {
                f.iter()
                    .map(|&[x, y]| [scale * (c * x - s * y) + offset[0], scale * (s * x + c * y) + offset[1]])
                    .collect()
            })
            .collect();
        Self {
            fingers,
            ..self.clone()
        }
    }
}

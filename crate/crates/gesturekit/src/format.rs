//! JSON documents exchanged with the capture UI and written by the CLI.
//!
//! Field names follow the wire schemas exactly. Each document converts to
//! and from its core type; conversion into a core type runs full
//! validation.

use gesturekit_core::recognizer::{NormalizedStroke, Template};
use gesturekit_core::{FingerStream, GestureTrace, MiResult, Point, Sample, Screen, TemplateSet, TraceMeta};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenDoc {
    pub w: u32,
    pub h: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleDoc {
    /// Milliseconds.
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// One recorded gesture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub gesture_id: String,
    pub subject_id: String,
    pub session: u8,
    pub trial: u32,
    pub screen: ScreenDoc,
    pub rate_hz: f64,
    pub fingers: Vec<Vec<SampleDoc>>,
    /// Redundant with `fingers.len()`; checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finger_count: Option<usize>,
}

impl TraceDoc {
    pub fn into_trace(self) -> Result<GestureTrace> {
        if let Some(n) = self.finger_count {
            if n != self.fingers.len() {
                return Err(Error::Invalid(format!(
                    "finger_count is {n} but {} finger streams are present",
                    self.fingers.len()
                )));
            }
        }
        let meta = TraceMeta::new(self.gesture_id, self.subject_id, self.session, self.trial);
        let screen = Screen {
            width: self.screen.w,
            height: self.screen.h,
        };
        let fingers = self
            .fingers
            .into_iter()
            .map(|f| FingerStream::new(f.into_iter().map(|s| Sample::new(s.t, s.x, s.y)).collect()))
            .collect();
        Ok(GestureTrace::new(meta, screen, self.rate_hz, fingers)?)
    }

    pub fn from_trace(trace: &GestureTrace) -> Self {
        Self {
            gesture_id: trace.meta.gesture_id.clone(),
            subject_id: trace.meta.subject_id.clone(),
            session: trace.meta.session,
            trial: trace.meta.trial_index,
            screen: ScreenDoc {
                w: trace.screen.width,
                h: trace.screen.height,
            },
            rate_hz: trace.nominal_rate_hz,
            fingers: trace
                .fingers
                .iter()
                .map(|f| {
                    f.samples
                        .iter()
                        .map(|s| SampleDoc {
                            t: s.t_ms,
                            x: s.x,
                            y: s.y,
                        })
                        .collect()
                })
                .collect(),
            finger_count: None,
        }
    }
}

/// Parses and validates one trace document.
pub fn parse_trace(json: &str) -> Result<GestureTrace> {
    serde_json::from_str::<TraceDoc>(json)?.into_trace()
}

pub fn trace_to_json(trace: &GestureTrace) -> String {
    serde_json::to_string(&TraceDoc::from_trace(trace)).expect("trace documents always serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub i: usize,
    pub n: usize,
    pub r: f64,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiDoc {
    pub total_bits: f64,
    pub retained_k: usize,
    pub components: Vec<ComponentDoc>,
}

impl From<&MiResult> for MiDoc {
    fn from(r: &MiResult) -> Self {
        Self {
            total_bits: r.total_bits,
            retained_k: r.retained_k,
            components: r
                .components
                .iter()
                .map(|c| ComponentDoc {
                    i: c.component_index,
                    n: c.n_effective,
                    r: c.pearson_r,
                    bits: c.bits,
                })
                .collect(),
        }
    }
}

/// `templates[rep][finger]` holds the normalized points of one stroke.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateSetDoc {
    pub gesture_id: String,
    pub finger_count: usize,
    pub templates: Vec<Vec<Vec<Point>>>,
}

impl From<&TemplateSet> for TemplateSetDoc {
    fn from(set: &TemplateSet) -> Self {
        Self {
            gesture_id: set.gesture_id.clone(),
            finger_count: set.finger_count,
            templates: set
                .templates
                .iter()
                .map(|t| t.strokes.iter().map(|s| s.points.clone()).collect())
                .collect(),
        }
    }
}

impl TemplateSetDoc {
    /// Rebuilds the set without a finger layout.
    pub fn into_set(self) -> Result<TemplateSet> {
        let n_points = self.templates.first().and_then(|t| t.first()).map(Vec::len);
        let templates = self
            .templates
            .into_iter()
            .map(|strokes| Template {
                strokes: strokes.into_iter().map(|points| NormalizedStroke { points }).collect(),
            })
            .collect::<Vec<_>>();
        if templates
            .iter()
            .flat_map(|t| &t.strokes)
            .any(|s| Some(s.points.len()) != n_points)
        {
            return Err(Error::Invalid("template strokes differ in point count".into()));
        }
        Ok(TemplateSet::new(self.gesture_id, self.finger_count, templates)?)
    }
}

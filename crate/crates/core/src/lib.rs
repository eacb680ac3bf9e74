//! Numerical core of gesturekit.
//!
//! Everything here is pure computation over in-memory traces: ingestion
//! validation and resampling ([`trajectory`], [`resample`],
//! [`finger_order`]), the mutual-information security metric ([`infocap`]
//! and its building blocks [`ar`], [`pca`], [`dtw`]), the multitouch
//! Protractor recognizer ([`recognizer`]), corpus-level evaluation
//! ([`evaluation`]) and a synthetic gesture generator ([`synth`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the HTTP service live in the `gesturekit` crate.

#![no_std]
// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod ar;
pub mod dtw;
mod error;
pub mod evaluation;
pub mod finger_order;
pub mod infocap;
pub mod linalg;
pub mod pca;
pub mod recognizer;
pub mod resample;
pub mod spline;
pub mod synth;
pub mod trajectory;

pub use error::{Error, Result};
pub use infocap::{MiConfig, MiResult, PairOutcome};
pub use recognizer::{MatchResult, NormalizedStroke, TemplateSet};
pub use trajectory::{FingerStream, GestureTrace, Point, ResampledTrace, Sample, Screen, TraceMeta};

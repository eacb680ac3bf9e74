//! Loading trace corpora from disk.
//!
//! A corpus is either a directory of trace files or a single file holding a
//! JSON array of traces. A bad trace is recorded as a failure and loading
//! continues with the rest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gesturekit_core::resample::{resample, DEFAULT_RATE_HZ};
use gesturekit_core::{GestureTrace, ResampledTrace};
use serde_json::Value;

use crate::format::TraceDoc;
use crate::{Error, Result};

/// A trace that could not be used, with where it came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LoadFailure {
    pub source: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct Corpus {
    pub traces: Vec<GestureTrace>,
    pub failures: Vec<LoadFailure>,
}

pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let meta = fs::metadata(path).map_err(Error::io(path))?;
    let mut corpus = Corpus::default();
    if meta.is_dir() {
        let mut files = Vec::new();
        for entry in fs::read_dir(path).map_err(Error::io(path))? {
            let p = entry.map_err(Error::io(path))?.path();
            if p.is_file() && p.extension().is_some_and(|e| e == "json") {
                files.push(p);
            }
        }
        files.sort();
        for f in files {
            load_file(&f, &mut corpus);
        }
    } else {
        load_file(path, &mut corpus);
    }
    Ok(corpus)
}

fn load_file(path: &Path, corpus: &mut Corpus) {
    let name = path.display().to_string();
    let value = fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|s| serde_json::from_str::<Value>(&s).map_err(|e| format!("malformed JSON: {e}")));
    match value {
        Err(message) => corpus.failures.push(LoadFailure { source: name, message }),
        Ok(Value::Array(items)) => {
            for (i, item) in items.into_iter().enumerate() {
                push_trace(format!("{name}[{i}]"), item, corpus);
            }
        }
        Ok(item) => push_trace(name, item, corpus),
    }
}

fn push_trace(source: String, value: Value, corpus: &mut Corpus) {
    let parsed = serde_json::from_value::<TraceDoc>(value)
        .map_err(Error::from)
        .and_then(TraceDoc::into_trace);
    match parsed {
        Ok(t) => corpus.traces.push(t),
        Err(e) => corpus.failures.push(LoadFailure {
            source,
            message: e.to_string(),
        }),
    }
}

/// Reads a file holding exactly one trace.
pub fn load_trace(path: &Path) -> Result<GestureTrace> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    serde_json::from_str::<TraceDoc>(&text)?.into_trace()
}

/// Resampled repetitions keyed by gesture id, each group in trial order.
pub fn group_by_gesture(traces: &[GestureTrace]) -> (BTreeMap<String, Vec<ResampledTrace>>, Vec<LoadFailure>) {
    let mut groups: BTreeMap<String, Vec<ResampledTrace>> = BTreeMap::new();
    let mut failures = Vec::new();
    for t in traces {
        match resample(t, DEFAULT_RATE_HZ) {
            Ok(r) => groups.entry(t.meta.gesture_id.clone()).or_default().push(r),
            Err(e) => failures.push(LoadFailure {
                source: format!("{} trial {}", t.meta.gesture_id, t.meta.trial_index),
                message: e.to_string(),
            }),
        }
    }
    for reps in groups.values_mut() {
        reps.sort_by(|a, b| a.meta.cmp(&b.meta));
    }
    (groups, failures)
}

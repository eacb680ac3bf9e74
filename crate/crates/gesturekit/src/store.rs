//! On-disk template sets.
//!
//! Each gesture owns `templates/<id>.jsonl`, an append-only log of template
//! set documents where the last line is current, and `templates/<id>.layout.json`
//! with the finger start layout of the reference repetition.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use gesturekit_core::{Point, TemplateSet};

use crate::format::TemplateSetDoc;
use crate::report::write_atomic;
use crate::{Error, Result};

pub const MAX_GESTURE_ID_LEN: usize = 64;

/// Gesture ids double as file names: ASCII letters, digits, `-` and `_`.
pub fn check_gesture_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id.len() <= MAX_GESTURE_ID_LEN
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "gesture_id {id:?} must be 1 to {MAX_GESTURE_ID_LEN} ASCII letters, digits, '-' or '_'"
        )))
    }
}

/// Template sets cached in memory, one writer at a time.
#[derive(Debug)]
pub struct TemplateStore {
    dir: PathBuf,
    sets: RwLock<HashMap<String, Arc<TemplateSet>>>,
    writer: Mutex<()>,
}

impl TemplateStore {
    /// Opens `data_dir`, creating it if needed, and loads every stored set.
    pub fn open(data_dir: &Path) -> Result<Self> {
        let dir = data_dir.join("templates");
        fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
        let mut sets = HashMap::new();
        for entry in fs::read_dir(&dir).map_err(Error::io(&dir))? {
            let path = entry.map_err(Error::io(&dir))?.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".jsonl"))
            else {
                continue;
            };
            let set = load_set(&dir, id)?;
            sets.insert(id.to_string(), Arc::new(set));
        }
        Ok(Self {
            dir,
            sets: RwLock::new(sets),
            writer: Mutex::new(()),
        })
    }

    pub fn get(&self, gesture_id: &str) -> Option<Arc<TemplateSet>> {
        self.sets.read().expect("store lock").get(gesture_id).cloned()
    }

    pub fn contains(&self, gesture_id: &str) -> bool {
        self.sets.read().expect("store lock").contains_key(gesture_id)
    }

    pub fn gesture_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sets.read().expect("store lock").keys().cloned().collect();
        ids.sort();
        ids
    }

    /// Persists `set` as the current version of its gesture.
    pub fn put(&self, set: TemplateSet) -> Result<()> {
        check_gesture_id(&set.gesture_id)?;
        set.validate()?;
        let _guard = self.writer.lock().expect("store writer");
        let id = set.gesture_id.clone();
        let layout_path = self.dir.join(format!("{id}.layout.json"));
        write_atomic(&layout_path, &serde_json::to_vec(&set.layout)?)?;
        let mut line = serde_json::to_vec(&TemplateSetDoc::from(&set))?;
        line.push(b'\n');
        let log = self.dir.join(format!("{id}.jsonl"));
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log)
            .map_err(Error::io(&log))?;
        f.write_all(&line).map_err(Error::io(&log))?;
        f.sync_data().map_err(Error::io(&log))?;
        self.sets.write().expect("store lock").insert(id, Arc::new(set));
        Ok(())
    }
}

fn load_set(dir: &Path, id: &str) -> Result<TemplateSet> {
    let log = dir.join(format!("{id}.jsonl"));
    let text = fs::read_to_string(&log).map_err(Error::io(&log))?;
    let last = text
        .lines()
        .rev()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Invalid(format!("{} holds no template set", log.display())))?;
    let mut set = serde_json::from_str::<TemplateSetDoc>(last)?.into_set()?;
    let layout_path = dir.join(format!("{id}.layout.json"));
    if layout_path.exists() {
        let text = fs::read_to_string(&layout_path).map_err(Error::io(&layout_path))?;
        set.layout = serde_json::from_str::<Vec<Point>>(&text)?;
        set.validate()?;
    }
    Ok(set)
}

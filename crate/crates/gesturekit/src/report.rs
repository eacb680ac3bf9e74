//! CSV and JSON report files.
//!
//! Every writer uses fixed file names inside an output directory and
//! replaces each file atomically, so two runs over the same inputs leave
//! byte-identical trees.
//!
//! Analysis (`write_analysis`):
//!
//! | file | columns |
//! |---|---|
//! | `summary.csv` | one [`SummaryRow`] per gesture |
//! | `mi_vs_repetition.csv` | `gesture_id,trial,group,mean_mi` |
//! | `duration_vs_repetition.csv` | `gesture_id,trial,group,duration_s` |
//! | `mi_histogram.csv` | `bin_start,bin_end,count` over per-gesture Generate means |
//! | `failures.csv` | `source,message` |
//! | `analysis.json` | all of the above |
//! | `gestures/<id>.json` | one full report per gesture |
//!
//! Template study (`write_roc`):
//!
//! | file | columns |
//! |---|---|
//! | `eer_by_templates.csv` | one [`EerRow`] per template count |
//! | `roc_points.csv` | `n_templates,threshold,tpr,fpr` |
//! | `roc.json` | both of the above |

use std::fs;
use std::io::Write;
use std::path::Path;

use gesturekit_core::evaluation::{GestureReport, RocPoint, TemplateCountRow};
use serde::Serialize;

use crate::corpus::LoadFailure;
use crate::{Error, Result};

/// Bin width of the Generate-MI histogram, in bits.
pub const HISTOGRAM_BIN_BITS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub gesture_id: String,
    pub finger_count: usize,
    pub mean_mi_generate: f64,
    pub mean_mi_generate_stable: Option<f64>,
    pub mean_mi_recall1: Option<f64>,
    pub mean_mi_recall2: Option<f64>,
    pub cross_mi: Option<f64>,
    pub memorability_ratio: Option<f64>,
    pub mean_duration_generate_s: f64,
    pub mean_duration_recall1_s: Option<f64>,
    pub mean_duration_recall2_s: Option<f64>,
    pub incomparable_pairs: usize,
}

impl From<&GestureReport> for SummaryRow {
    fn from(r: &GestureReport) -> Self {
        Self {
            gesture_id: r.gesture_id.clone(),
            finger_count: r.finger_count,
            mean_mi_generate: r.mean_mi_generate,
            mean_mi_generate_stable: r.mean_mi_generate_stable,
            mean_mi_recall1: r.mean_mi_recall1,
            mean_mi_recall2: r.mean_mi_recall2,
            cross_mi: r.cross_mi,
            memorability_ratio: r.memorability_ratio,
            mean_duration_generate_s: r.mean_duration_generate_s,
            mean_duration_recall1_s: r.mean_duration_recall1_s,
            mean_duration_recall2_s: r.mean_duration_recall2_s,
            incomparable_pairs: r.incomparable_pairs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitionRow {
    pub gesture_id: String,
    pub trial: u32,
    pub group: &'static str,
    pub mean_mi: Option<f64>,
    pub duration_s: f64,
    pub finger_count: usize,
}

#[derive(Serialize)]
struct MiRow<'a> {
    gesture_id: &'a str,
    trial: u32,
    group: &'static str,
    mean_mi: Option<f64>,
}

#[derive(Serialize)]
struct DurationRow<'a> {
    gesture_id: &'a str,
    trial: u32,
    group: &'static str,
    duration_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_start: f64,
    pub bin_end: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRow {
    pub source: String,
    pub message: String,
}

impl From<&LoadFailure> for FailureRow {
    fn from(f: &LoadFailure) -> Self {
        Self {
            source: f.source.clone(),
            message: f.message.clone(),
        }
    }
}

/// Full per-gesture report as written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GestureDoc {
    #[serde(flatten)]
    pub summary: SummaryRow,
    pub per_repetition: Vec<RepetitionRow>,
    pub generate_pair_bits: Vec<f64>,
}

impl From<&GestureReport> for GestureDoc {
    fn from(r: &GestureReport) -> Self {
        Self {
            summary: SummaryRow::from(r),
            per_repetition: r
                .per_repetition
                .iter()
                .map(|p| RepetitionRow {
                    gesture_id: r.gesture_id.clone(),
                    trial: p.trial,
                    group: p.group.label(),
                    mean_mi: p.mean_mi,
                    duration_s: p.duration_s,
                    finger_count: p.finger_count,
                })
                .collect(),
            generate_pair_bits: r.generate_pair_bits.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisDoc {
    pub gestures: Vec<GestureDoc>,
    pub histogram: Vec<HistogramBin>,
    pub failures: Vec<FailureRow>,
}

impl AnalysisDoc {
    pub fn new(reports: &[GestureReport], failures: &[LoadFailure]) -> Self {
        let means: Vec<f64> = reports.iter().map(|r| r.mean_mi_generate).collect();
        Self {
            gestures: reports.iter().map(GestureDoc::from).collect(),
            histogram: histogram(&means, HISTOGRAM_BIN_BITS),
            failures: failures.iter().map(FailureRow::from).collect(),
        }
    }
}

/// Fixed-width bins from zero up to the bin holding the largest value.
pub fn histogram(values: &[f64], width: f64) -> Vec<HistogramBin> {
    let max = values.iter().copied().fold(0.0f64, f64::max);
    let n_bins = ((max / width).floor() as usize + 1).max(1);
    let mut bins: Vec<HistogramBin> = (0..n_bins)
        .map(|i| HistogramBin {
            bin_start: i as f64 * width,
            bin_end: (i + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for &v in values {
        let i = ((v.max(0.0) / width).floor() as usize).min(n_bins - 1);
        bins[i].count += 1;
    }
    bins
}

pub fn write_analysis(dir: &Path, doc: &AnalysisDoc) -> Result<()> {
    let gestures_dir = dir.join("gestures");
    fs::create_dir_all(&gestures_dir).map_err(Error::io(&gestures_dir))?;

    write_csv(dir, "summary.csv", doc.gestures.iter().map(|g| &g.summary))?;
    let reps = || doc.gestures.iter().flat_map(|g| &g.per_repetition);
    write_csv(
        dir,
        "mi_vs_repetition.csv",
        reps().map(|r| MiRow {
            gesture_id: &r.gesture_id,
            trial: r.trial,
            group: r.group,
            mean_mi: r.mean_mi,
        }),
    )?;
    write_csv(
        dir,
        "duration_vs_repetition.csv",
        reps().map(|r| DurationRow {
            gesture_id: &r.gesture_id,
            trial: r.trial,
            group: r.group,
            duration_s: r.duration_s,
        }),
    )?;
    write_csv(dir, "mi_histogram.csv", doc.histogram.iter())?;
    write_csv(dir, "failures.csv", doc.failures.iter())?;
    write_json(&dir.join("analysis.json"), doc)?;
    for g in &doc.gestures {
        write_json(
            &gestures_dir.join(format!("{}.json", file_stem(&g.summary.gesture_id))),
            g,
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EerRow {
    pub n_templates: usize,
    pub eer: f64,
    pub eer_threshold: f64,
    pub n_genuine: usize,
    pub n_impostor: usize,
    pub genuine_gate_failures: usize,
    pub impostor_gate_failures: usize,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPointRow {
    pub n_templates: usize,
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocDoc {
    /// `recall1` or `recall2`.
    pub trial_set: String,
    pub rows: Vec<EerRow>,
    pub points: Vec<RocPointRow>,
    pub failures: Vec<FailureRow>,
}

impl RocDoc {
    pub fn new(trial_set: &str, rows: &[TemplateCountRow], failures: &[LoadFailure]) -> Self {
        let point = |n: usize, p: &RocPoint| RocPointRow {
            n_templates: n,
            threshold: p.threshold,
            tpr: p.tpr,
            fpr: p.fpr,
        };
        Self {
            trial_set: trial_set.to_string(),
            rows: rows
                .iter()
                .map(|r| EerRow {
                    n_templates: r.n_templates,
                    eer: r.eer,
                    eer_threshold: r.report.eer_threshold,
                    n_genuine: r.report.n_genuine,
                    n_impostor: r.report.n_impostor,
                    genuine_gate_failures: r.report.genuine_gate_failures,
                    impostor_gate_failures: r.report.impostor_gate_failures,
                    degenerate: r.report.degenerate,
                })
                .collect(),
            points: rows
                .iter()
                .flat_map(|r| r.report.points.iter().map(move |p| point(r.n_templates, p)))
                .collect(),
            failures: failures.iter().map(FailureRow::from).collect(),
        }
    }
}

pub fn write_roc(dir: &Path, doc: &RocDoc) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    write_csv(dir, "eer_by_templates.csv", doc.rows.iter())?;
    write_csv(dir, "roc_points.csv", doc.points.iter())?;
    write_json(&dir.join("roc.json"), doc)
}

/// Gesture ids reduced to characters that are safe in a file name.
pub fn file_stem(gesture_id: &str) -> String {
    gesture_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut empty = true;
    for row in rows {
        w.serialize(row)?;
        empty = false;
    }
    let mut bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    if empty {
        bytes = header_only(name).into_bytes();
    }
    write_atomic(&dir.join(name), &bytes)
}

// csv derives headers from the first row, so empty tables need them spelled out.
fn header_only(name: &str) -> String {
    let header = match name {
        "summary.csv" => {
            "gesture_id,finger_count,mean_mi_generate,mean_mi_generate_stable,mean_mi_recall1,mean_mi_recall2,\
             cross_mi,memorability_ratio,mean_duration_generate_s,mean_duration_recall1_s,mean_duration_recall2_s,\
             incomparable_pairs"
        }
        "mi_vs_repetition.csv" => "gesture_id,trial,group,mean_mi",
        "duration_vs_repetition.csv" => "gesture_id,trial,group,duration_s",
        "mi_histogram.csv" => "bin_start,bin_end,count",
        "failures.csv" => "source,message",
        "eer_by_templates.csv" => {
            "n_templates,eer,eer_threshold,n_genuine,n_impostor,genuine_gate_failures,impostor_gate_failures,degenerate"
        }
        "roc_points.csv" => "n_templates,threshold,tpr,fpr",
        _ => "",
    };
    format!("{header}\n")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(Error::io(dir))?;
    tmp.write_all(bytes).map_err(Error::io(path))?;
    tmp.persist(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

//! Corpus-level analysis: repetition groups, ROC sweeps and attack tables.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::finger_order::{apply_permutation, canonical_permutation};
use crate::infocap::{cross_group_mi, group_mean_mi, GroupMi, MiConfig};
use crate::recognizer::{match_trace, TemplateSet, DEFAULT_POINTS};
use crate::trajectory::ResampledTrace;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RepetitionGroup {
    Generate,
    Recall1,
    Recall2,
}

impl RepetitionGroup {
    pub const ALL: [RepetitionGroup; 3] = [Self::Generate, Self::Recall1, Self::Recall2];

    pub fn trial_range(self) -> RangeInclusive<u32> {
        match self {
            Self::Generate => 1..=10,
            Self::Recall1 => 11..=12,
            Self::Recall2 => 13..=17,
        }
    }

    pub fn of_trial(trial: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.trial_range().contains(&trial))
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Generate => "generate",
            Self::Recall1 => "recall1",
            Self::Recall2 => "recall2",
        }
    }
}

/// Generate repetitions treated as practised.
pub const STABLE_GENERATE: RangeInclusive<u32> = 6..=10;

/// One row of the per-repetition series.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionPoint {
    pub trial: u32,
    pub group: RepetitionGroup,
    /// Mean score against the Generate repetitions (other than itself).
    pub mean_mi: Option<f64>,
    pub duration_s: f64,
    pub finger_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GestureReport {
    pub gesture_id: String,
    pub finger_count: usize,
    pub mean_mi_generate: f64,
    pub mean_mi_generate_stable: Option<f64>,
    pub mean_mi_recall1: Option<f64>,
    pub mean_mi_recall2: Option<f64>,
    /// Mean over (Generate, Recall2) pairs.
    pub cross_mi: Option<f64>,
    pub memorability_ratio: Option<f64>,
    pub mean_duration_generate_s: f64,
    pub mean_duration_recall1_s: Option<f64>,
    pub mean_duration_recall2_s: Option<f64>,
    pub per_repetition: Vec<RepetitionPoint>,
    /// Every within-Generate pair score, for histograms.
    pub generate_pair_bits: Vec<f64>,
    /// Pairs skipped because the finger counts differ.
    pub incomparable_pairs: usize,
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Puts every trace whose finger count matches `reference` into the
/// reference finger order. Others are left as they are.
pub fn align_fingers_to(reference: &ResampledTrace, traces: &[ResampledTrace]) -> Result<Vec<ResampledTrace>> {
    let layout = reference.starts();
    traces
        .iter()
        .map(|t| {
            if t.finger_count() != reference.finger_count() || t.finger_count() == 1 {
                Ok(t.clone())
            } else {
                let perm = canonical_permutation(&layout, &t.starts())?;
                Ok(apply_permutation(t, &perm))
            }
        })
        .collect()
}

fn optional_group(result: Result<GroupMi>) -> Result<Option<GroupMi>> {
    match result {
        Ok(g) => Ok(Some(g)),
        Err(Error::AllIncomparable | Error::TooShort { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Group statistics for all repetitions of one gesture.
///
/// Traces are sorted by trial and put into the finger order of the first
/// one. Groups with fewer than two traces (or one, for cross-group values)
/// are reported as absent.
pub fn analyze_gesture(traces: &[ResampledTrace], config: &MiConfig) -> Result<GestureReport> {
    let mut sorted: Vec<ResampledTrace> = traces.to_vec();
    sorted.sort_by_key(|t| t.meta.trial_index);
    if let Some(w) = sorted
        .windows(2)
        .find(|w| w[0].meta.trial_index == w[1].meta.trial_index)
    {
        return Err(Error::InvalidParameter(alloc::format!(
            "trial {} appears twice",
            w[0].meta.trial_index
        )));
    }
    let first = sorted.first().ok_or(Error::MissingGroup("generate"))?.clone();
    let sorted = align_fingers_to(&first, &sorted)?;

    let group = |g: RepetitionGroup| -> Vec<ResampledTrace> {
        sorted
            .iter()
            .filter(|t| g.trial_range().contains(&t.meta.trial_index))
            .cloned()
            .collect()
    };
    let generate = group(RepetitionGroup::Generate);
    let recall1 = group(RepetitionGroup::Recall1);
    let recall2 = group(RepetitionGroup::Recall2);
    if generate.len() < 2 {
        return Err(Error::MissingGroup("generate"));
    }

    let gen_mi = group_mean_mi(&generate, config)?;
    let stable: Vec<ResampledTrace> = generate
        .iter()
        .filter(|t| STABLE_GENERATE.contains(&t.meta.trial_index))
        .cloned()
        .collect();
    let stable_mi = optional_group(group_mean_mi(&stable, config))?;
    let r1_mi = optional_group(group_mean_mi(&recall1, config))?;
    let r2_mi = optional_group(group_mean_mi(&recall2, config))?;
    let cross_r1 = optional_group(cross_group_mi(&generate, &recall1, config))?;
    let cross_r2 = optional_group(cross_group_mi(&generate, &recall2, config))?;

    let cross_mi = cross_r2.as_ref().map(|g| g.mean_bits);
    let memorability_ratio = cross_mi
        .filter(|_| gen_mi.mean_bits > 0.0)
        .map(|c| c / gen_mi.mean_bits);

    let mut per_repetition = Vec::with_capacity(sorted.len());
    for (idx, t) in generate.iter().enumerate() {
        per_repetition.push(RepetitionPoint {
            trial: t.meta.trial_index,
            group: RepetitionGroup::Generate,
            mean_mi: gen_mi.mean_for(idx, false),
            duration_s: t.duration_s,
            finger_count: t.finger_count(),
        });
    }
    for (g, traces, cross) in [
        (RepetitionGroup::Recall1, &recall1, &cross_r1),
        (RepetitionGroup::Recall2, &recall2, &cross_r2),
    ] {
        for (idx, t) in traces.iter().enumerate() {
            let mean_mi = cross.as_ref().and_then(|c| {
                mean(
                    c.pairs
                        .iter()
                        .filter(|p| p.b_index == idx)
                        .filter_map(|p| p.outcome.bits()),
                )
            });
            per_repetition.push(RepetitionPoint {
                trial: t.meta.trial_index,
                group: g,
                mean_mi,
                duration_s: t.duration_s,
                finger_count: t.finger_count(),
            });
        }
    }

    let incomparable_pairs = [
        Some(&gen_mi),
        r1_mi.as_ref(),
        r2_mi.as_ref(),
        cross_r1.as_ref(),
        cross_r2.as_ref(),
    ]
    .into_iter()
    .flatten()
    .map(|g| g.incomparable)
    .sum();

    Ok(GestureReport {
        gesture_id: first.meta.gesture_id.clone(),
        finger_count: first.finger_count(),
        mean_mi_generate: gen_mi.mean_bits,
        mean_mi_generate_stable: stable_mi.map(|g| g.mean_bits),
        mean_mi_recall1: r1_mi.map(|g| g.mean_bits),
        mean_mi_recall2: r2_mi.map(|g| g.mean_bits),
        cross_mi,
        memorability_ratio,
        mean_duration_generate_s: mean(generate.iter().map(|t| t.duration_s)).unwrap_or(0.0),
        mean_duration_recall1_s: mean(recall1.iter().map(|t| t.duration_s)),
        mean_duration_recall2_s: mean(recall2.iter().map(|t| t.duration_s)),
        per_repetition,
        generate_pair_bits: gen_mi.pairs.iter().filter_map(|p| p.outcome.bits()).collect(),
        incomparable_pairs,
    })
}

/// An authentication attempt: `trace` drawn as `true_gesture_id`, presented
/// as `claimed_gesture_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialLabel {
    pub claimed_gesture_id: String,
    pub true_gesture_id: String,
    pub trace: ResampledTrace,
}

impl TrialLabel {
    pub fn is_genuine(&self) -> bool {
        self.claimed_gesture_id == self.true_gesture_id
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocReport {
    /// Ascending threshold.
    pub points: Vec<RocPoint>,
    pub eer: f64,
    pub eer_threshold: f64,
    pub n_genuine: usize,
    pub n_impostor: usize,
    /// Every score was the same, so the curve carries no information.
    pub degenerate: bool,
    /// Genuine attempts scored 0 because the finger count was wrong.
    pub genuine_gate_failures: usize,
    pub impostor_gate_failures: usize,
}

/// Exact ROC for a set of genuine and impostor scores.
///
/// Thresholds are the distinct observed scores plus one value above the
/// largest. An attempt is accepted when its score reaches the threshold.
/// The EER is read where `fpr - (1 - tpr)` changes sign, interpolating
/// linearly between the two bracketing thresholds.
pub fn roc_from_scores(genuine: &[f64], impostor: &[f64]) -> Result<RocReport> {
    if genuine.is_empty() {
        return Err(Error::MissingGroup("genuine trials"));
    }
    if impostor.is_empty() {
        return Err(Error::MissingGroup("impostor trials"));
    }
    if genuine.iter().chain(impostor).any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("score"));
    }
    let mut g: Vec<f64> = genuine.to_vec();
    let mut im: Vec<f64> = impostor.to_vec();
    g.sort_by(f64::total_cmp);
    im.sort_by(f64::total_cmp);

    let mut thresholds: Vec<f64> = g.iter().chain(&im).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let degenerate = thresholds.len() == 1;
    let top = thresholds[thresholds.len() - 1];
    thresholds.push(top + 1.0);

    // Counts of scores >= t via the sorted lists.
    let at_least = |sorted: &[f64], t: f64| sorted.len() - sorted.partition_point(|&s| s < t);
    let points: Vec<RocPoint> = thresholds
        .iter()
        .map(|&t| RocPoint {
            threshold: t,
            tpr: at_least(&g, t) as f64 / g.len() as f64,
            fpr: at_least(&im, t) as f64 / im.len() as f64,
        })
        .collect();

    let d = |p: &RocPoint| p.fpr - (1.0 - p.tpr);
    let mut eer = 0.5;
    let mut eer_threshold = points[0].threshold;
    for (i, p) in points.iter().enumerate() {
        let di = d(p);
        if di <= 0.0 {
            if di == 0.0 || i == 0 {
                eer = p.fpr;
                eer_threshold = p.threshold;
            } else {
                let q = &points[i - 1];
                let dq = d(q);
                let f = dq / (dq - di);
                eer = q.fpr + f * (p.fpr - q.fpr);
                eer_threshold = q.threshold + f * (p.threshold - q.threshold);
            }
            break;
        }
    }

    Ok(RocReport {
        points,
        eer,
        eer_threshold,
        n_genuine: genuine.len(),
        n_impostor: impostor.len(),
        degenerate,
        genuine_gate_failures: 0,
        impostor_gate_failures: 0,
    })
}

/// Score of one attempt against its claimed gesture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredTrial {
    pub genuine: bool,
    pub score: f64,
    pub gate_failed: bool,
}

fn find_set<'a>(sets: &'a [TemplateSet], gesture_id: &str) -> Result<&'a TemplateSet> {
    sets.iter()
        .find(|s| s.gesture_id == gesture_id)
        .ok_or_else(|| Error::InvalidParameter(alloc::format!("no templates for gesture {gesture_id:?}")))
}

/// Keeps the first `n` templates of a set.
pub fn truncate_templates(set: &TemplateSet, n: usize) -> Result<TemplateSet> {
    if n == 0 || n > set.templates.len() {
        return Err(Error::TemplateCount(n));
    }
    let mut out = set.clone();
    out.templates.truncate(n);
    Ok(out)
}

pub fn score_trials(
    corpus: &[TrialLabel],
    template_sets: &[TemplateSet],
    rotation_invariant: bool,
) -> Result<Vec<ScoredTrial>> {
    corpus
        .iter()
        .map(|trial| {
            let set = find_set(template_sets, &trial.claimed_gesture_id)?;
            let m = match_trace(&trial.trace, set, rotation_invariant)?;
            Ok(ScoredTrial {
                genuine: trial.is_genuine(),
                score: m.score,
                gate_failed: m.gate_failed,
            })
        })
        .collect()
}

/// Scores every trial against the first `n_templates` templates of its
/// claimed gesture and sweeps the threshold.
pub fn roc_sweep(
    corpus: &[TrialLabel],
    template_sets: &[TemplateSet],
    n_templates: usize,
    rotation_invariant: bool,
) -> Result<RocReport> {
    let sets: Vec<TemplateSet> = template_sets
        .iter()
        .map(|s| truncate_templates(s, n_templates))
        .collect::<Result<_>>()?;
    let scored = score_trials(corpus, &sets, rotation_invariant)?;
    let genuine: Vec<f64> = scored.iter().filter(|s| s.genuine).map(|s| s.score).collect();
    let impostor: Vec<f64> = scored.iter().filter(|s| !s.genuine).map(|s| s.score).collect();
    let mut report = roc_from_scores(&genuine, &impostor)?;
    report.genuine_gate_failures = scored.iter().filter(|s| s.genuine && s.gate_failed).count();
    report.impostor_gate_failures = scored.iter().filter(|s| !s.genuine && s.gate_failed).count();
    Ok(report)
}

/// Which recall group supplies the authentication attempts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialSet {
    /// Same-session recall (trials 11 and 12).
    Recall1,
    /// Delayed recall (trials 13 to 17).
    Recall2,
}

impl TrialSet {
    pub fn group(self) -> RepetitionGroup {
        match self {
            Self::Recall1 => RepetitionGroup::Recall1,
            Self::Recall2 => RepetitionGroup::Recall2,
        }
    }
}

/// Every trace of `set` from every gesture, claimed as every gesture.
/// `gestures[g]` holds the repetitions of gesture `g`.
pub fn cross_claim_trials(gestures: &[Vec<ResampledTrace>], set: TrialSet) -> Vec<TrialLabel> {
    let ids: Vec<&str> = gestures
        .iter()
        .filter_map(|reps| reps.first().map(|t| t.meta.gesture_id.as_str()))
        .collect();
    let range = set.group().trial_range();
    let mut out = Vec::new();
    for reps in gestures {
        for t in reps.iter().filter(|t| range.contains(&t.meta.trial_index)) {
            for claimed in &ids {
                out.push(TrialLabel {
                    claimed_gesture_id: String::from(*claimed),
                    true_gesture_id: t.meta.gesture_id.clone(),
                    trace: t.clone(),
                });
            }
        }
    }
    out
}

/// Template set from the first `n` Generate repetitions, in trial order
/// and in the finger order of the first of them.
pub fn enroll_from_generate(reps: &[ResampledTrace], n: usize) -> Result<TemplateSet> {
    let mut gen: Vec<ResampledTrace> = reps
        .iter()
        .filter(|t| RepetitionGroup::Generate.trial_range().contains(&t.meta.trial_index))
        .cloned()
        .collect();
    gen.sort_by_key(|t| t.meta.trial_index);
    if gen.len() < n {
        return Err(Error::TooShort { len: gen.len(), min: n });
    }
    gen.truncate(n);
    let first = gen.first().ok_or(Error::EmptyTemplateSet)?.clone();
    let ordered = align_fingers_to(&first, &gen)?;
    TemplateSet::from_traces(first.meta.gesture_id.clone(), &ordered, DEFAULT_POINTS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateCountRow {
    pub n_templates: usize,
    pub eer: f64,
    pub report: RocReport,
}

/// ROC per template count, enrolling each gesture from its first
/// `n` Generate repetitions.
pub fn template_count_study(
    gestures: &[Vec<ResampledTrace>],
    counts: &[usize],
    set: TrialSet,
    rotation_invariant: bool,
) -> Result<Vec<TemplateCountRow>> {
    let trials = cross_claim_trials(gestures, set);
    counts
        .iter()
        .map(|&n| {
            let sets: Vec<TemplateSet> = gestures
                .iter()
                .map(|reps| enroll_from_generate(reps, n))
                .collect::<Result<_>>()?;
            let report = roc_sweep(&trials, &sets, n, rotation_invariant)?;
            Ok(TemplateCountRow {
                n_templates: n,
                eer: report.eer,
                report,
            })
        })
        .collect()
}

/// Best score of one participant in an attack trial.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackRow {
    pub participant: String,
    pub is_target: bool,
    pub scores: Vec<f64>,
    /// 0 when there were no attempts.
    pub best_score: f64,
    pub gate_failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub gesture_id: String,
    /// Target first, then attackers in input order.
    pub rows: Vec<AttackRow>,
}

impl AttackReport {
    /// A threshold accepting every target recall and rejecting every
    /// attacker's best attempt, if one exists.
    pub fn separating_threshold(&self) -> Option<f64> {
        let target_min = self
            .rows
            .iter()
            .filter(|r| r.is_target)
            .flat_map(|r| r.scores.iter().copied())
            .fold(f64::INFINITY, f64::min);
        let attacker_max = self
            .rows
            .iter()
            .filter(|r| !r.is_target)
            .map(|r| r.best_score)
            .fold(f64::NEG_INFINITY, f64::max);
        if !target_min.is_finite() {
            return None;
        }
        if attacker_max == f64::NEG_INFINITY {
            return Some(target_min);
        }
        (target_min > attacker_max).then_some(0.5 * (target_min + attacker_max))
    }
}

fn attack_row(
    participant: &str,
    is_target: bool,
    traces: &[ResampledTrace],
    set: &TemplateSet,
    rot: bool,
) -> Result<AttackRow> {
    let mut scores = Vec::with_capacity(traces.len());
    let mut gate_failures = 0;
    for t in traces {
        let m = match_trace(t, set, rot)?;
        gate_failures += usize::from(m.gate_failed);
        scores.push(m.score);
    }
    Ok(AttackRow {
        participant: String::from(participant),
        is_target,
        best_score: scores.iter().copied().fold(0.0, f64::max),
        scores,
        gate_failures,
    })
}

/// Scores the target's recalls and each attacker's attempts against the
/// target's templates.
pub fn attack_report(
    target_templates: &TemplateSet,
    target_recalls: &[ResampledTrace],
    attacker_trials: &[(String, Vec<ResampledTrace>)],
    rotation_invariant: bool,
) -> Result<AttackReport> {
    let mut rows = Vec::with_capacity(attacker_trials.len() + 1);
    rows.push(attack_row(
        "target",
        true,
        target_recalls,
        target_templates,
        rotation_invariant,
    )?);
    for (name, trials) in attacker_trials {
        rows.push(attack_row(name, false, trials, target_templates, rotation_invariant)?);
    }
    Ok(AttackReport {
        gesture_id: target_templates.gesture_id.clone(),
        rows,
    })
}

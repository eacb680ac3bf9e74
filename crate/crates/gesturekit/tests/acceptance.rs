//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gesturekit_core::dtw::align;
use gesturekit_core::evaluation::{
    analyze_gesture, attack_report, enroll_from_generate, roc_from_scores, template_count_study, TrialSet,
};
use gesturekit_core::infocap::{group_mean_mi, mutual_information};
use gesturekit_core::linalg::Matrix;
use gesturekit_core::recognizer::{authenticate, match_trace};
use gesturekit_core::resample::resample;
use gesturekit_core::synth::{
    corpus_families, correlated_ar2_pair, generate, white_noise_trace, FingerLayout, GestureFamily, NoiseModel,
    PathKind,
};
use gesturekit_core::{MiConfig, ResampledTrace, TemplateSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn reps(family: &GestureFamily, noise: NoiseModel, n: usize) -> Vec<ResampledTrace> {
    generate(family, &noise, n)
        .unwrap()
        .iter()
        .map(|t| resample(t, 60.0).unwrap())
        .collect()
}

fn bits(a: &ResampledTrace, b: &ResampledTrace) -> f64 {
    mutual_information(a, b, &MiConfig::default()).unwrap().bits().unwrap()
}

fn closed_form_bits(n: f64, rho: f64) -> f64 {
    -(n / 2.0) * (1.0 - rho * rho).log2() - std::f64::consts::LOG2_E / 2.0
}

fn mi_calibration() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for rho in [0.0, 0.3, 0.6, 0.9] {
        let mean = (0..100)
            .map(|seed| {
                let (a, b) = correlated_ar2_pair(rho, 400, seed).unwrap();
                bits(&a, &b)
            })
            .sum::<f64>()
            / 100.0;
        let target = closed_form_bits(400.0, rho);
        if rho == 0.0 {
            pass &= mean.abs() <= 3.0;
            parts.push(format!("rho=0: {mean:.2} vs 0 +/- 3"));
        } else {
            pass &= (mean - target).abs() <= 0.15 * target;
            parts.push(format!("rho={rho}: {mean:.2} vs {target:.2} +/- 15%"));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    outcome(pass, format!("{}; {:.2} s", parts.join(", "), elapsed.as_secs_f64()))
}

fn independence_null() -> Outcome {
    let mean = (0..100)
        .map(|seed| {
            let a = white_noise_trace("noise", 1, 200, 10.0, 2 * seed).unwrap();
            let b = white_noise_trace("noise", 2, 200, 10.0, 2 * seed + 1).unwrap();
            bits(&a, &b)
        })
        .sum::<f64>()
        / 100.0;
    outcome(mean.abs() <= 3.0, format!("mean {mean:.2} bits over 100 pairs"))
}

fn family_mean(kind: PathKind, seed: u64) -> f64 {
    let fam = GestureFamily::single("g", kind, 600.0, 3.0);
    group_mean_mi(&reps(&fam, NoiseModel::new(0.3, 0.1, seed), 10), &MiConfig::default())
        .unwrap()
        .mean_bits
}

fn qualitative_ordering() -> Outcome {
    let kinds = [
        PathKind::Zigzag { turns: 8 },
        PathKind::Signature { seed: 3 },
        PathKind::Circle,
        PathKind::Line,
    ];
    let mut strict = 0;
    let mut worst = String::new();
    for seed in 0..10 {
        let m: Vec<f64> = kinds.iter().map(|&k| family_mean(k, seed)).collect();
        if m.windows(2).all(|w| w[0] > w[1]) {
            strict += 1;
        } else if worst.is_empty() {
            worst = format!("; seed {seed}: {m:.1?}");
        }
    }
    outcome(
        strict == 10,
        format!("zigzag8 > signature > circle > line on {strict}/10 seeds{worst}"),
    )
}

fn generate_mean(fam: &GestureFamily, seed: u64) -> f64 {
    analyze_gesture(&reps(fam, NoiseModel::new(0.3, 0.1, seed), 10), &MiConfig::default())
        .unwrap()
        .mean_mi_generate
}

fn multifinger_collapse() -> Outcome {
    let kind = PathKind::Signature { seed: 3 };
    let single = GestureFamily::single("g", kind, 600.0, 3.0);
    let rigid3 = single.clone().with_layout(FingerLayout::Rigid {
        offsets: vec![[150.0, 0.0], [0.0, 150.0]],
    });
    let rigid2 = single.clone().with_layout(FingerLayout::Rigid {
        offsets: vec![[150.0, 0.0]],
    });
    let divergent = single.clone().with_layout(FingerLayout::Divergent {
        paths: vec![(PathKind::Signature { seed: 11 }, [150.0, 0.0])],
    });
    let (mut rigid_ratios, mut gains) = (Vec::new(), Vec::new());
    for seed in 0..5 {
        let one = generate_mean(&single, seed);
        rigid_ratios.push(generate_mean(&rigid3, seed) / one);
        gains.push(generate_mean(&divergent, seed) / generate_mean(&rigid2, seed));
    }
    let pass = rigid_ratios.iter().all(|r| (r - 1.0).abs() <= 0.2) && gains.iter().all(|g| *g >= 1.25);
    outcome(
        pass,
        format!("rigid3/single {rigid_ratios:.3?}; divergent2/rigid2 {gains:.2?} over 5 seeds"),
    )
}

fn invariance_suite() -> Outcome {
    let fam = GestureFamily::single("g", PathKind::Signature { seed: 4 }, 600.0, 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst_mi: f64 = 0.0;
    let mut worst_score: f64 = 0.0;
    for seed in 0..10 {
        let r = reps(&fam, NoiseModel::new(2.0, 0.1, seed).with_shape_sigma(40.0), 12);
        let set = TemplateSet::from_traces("g", &r[..10], 16).unwrap();
        let base_mi = bits(&r[10], &r[11]);
        let base_score = match_trace(&r[10], &set, true).unwrap().score;
        for _ in 0..5 {
            let scale = rng.random_range(0.2..5.0);
            let offset = [rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0)];
            let angle = rng.random_range(-3.1..3.1);
            let moved = r[10].transformed(scale, 0.0, offset);
            worst_mi = worst_mi.max(((bits(&moved, &r[11]) - base_mi) / base_mi).abs());
            let turned = r[10].transformed(scale, angle, offset);
            for candidate in [&moved, &turned] {
                let s = match_trace(candidate, &set, true).unwrap().score;
                worst_score = worst_score.max(((s - base_score) / base_score).abs());
            }
        }
    }
    outcome(
        worst_mi < 1e-6 && worst_score < 1e-6,
        format!("max relative change: MI {worst_mi:.1e}, score {worst_score:.1e} over 50 transforms"),
    )
}

fn frame_dist(a: &Matrix, b: &Matrix, i: usize, j: usize) -> f64 {
    a.row(i)
        .iter()
        .zip(b.row(j))
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Minimum over every monotone path with steps (1,0), (0,1), (1,1). Costs
/// are non-negative, so abandoning a partial path that already exceeds the
/// best complete one never loses the minimum.
fn exhaustive_dtw(a: &Matrix, b: &Matrix) -> f64 {
    fn walk(a: &Matrix, b: &Matrix, i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + frame_dist(a, b, i, j);
        if acc >= *best {
            return;
        }
        if i == a.rows() - 1 && j == b.rows() - 1 {
            *best = acc;
            return;
        }
        if i + 1 < a.rows() && j + 1 < b.rows() {
            walk(a, b, i + 1, j + 1, acc, best);
        }
        if i + 1 < a.rows() {
            walk(a, b, i + 1, j, acc, best);
        }
        if j + 1 < b.rows() {
            walk(a, b, i, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, 0, 0, 0.0, &mut best);
    best
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    Matrix::from_rows(rows, cols, data).unwrap()
}

fn dtw_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agree = 0;
    for _ in 0..200 {
        let (na, nb, k) = (
            rng.random_range(1..=12),
            rng.random_range(1..=12),
            rng.random_range(1..=3),
        );
        let a = random_matrix(&mut rng, na, k);
        let b = random_matrix(&mut rng, nb, k);
        let al = align(&a, &b).unwrap();
        let oracle = exhaustive_dtw(&a, &b);
        let path_cost: f64 = al.pairs.iter().map(|&(i, j)| frame_dist(&a, &b, i, j)).sum();
        let tol = 1e-9 * oracle.max(1.0);
        if (al.cost - oracle).abs() <= tol && (path_cost - oracle).abs() <= tol {
            agree += 1;
        }
    }
    outcome(
        agree == 200,
        format!("{agree}/200 random pairs up to 12x12 match exhaustive search"),
    )
}

fn roc_matches_confusion_counts(rng: &mut ChaCha8Rng) -> bool {
    let n_gen = rng.random_range(1..20);
    let scores: Vec<f64> = (0..20)
        .map(|_| (rng.random_range(0.0..10.0f64) * 2.0).round() / 2.0)
        .collect();
    let (g, i) = scores.split_at(n_gen);
    let report = roc_from_scores(g, i).unwrap();
    let thresholds_ok = report.points.iter().all(|p| {
        let tp = g.iter().filter(|&&s| s >= p.threshold).count();
        let fp = i.iter().filter(|&&s| s >= p.threshold).count();
        p.tpr == tp as f64 / g.len() as f64 && p.fpr == fp as f64 / i.len() as f64
    });
    let complete = scores.iter().chain([f64::INFINITY].iter()).all(|&t| {
        let tpr = g.iter().filter(|&&s| s >= t).count() as f64 / g.len() as f64;
        let fpr = i.iter().filter(|&&s| s >= t).count() as f64 / i.len() as f64;
        report.points.iter().any(|p| p.tpr == tpr && p.fpr == fpr)
    });
    thresholds_ok && complete
}

fn roc_corpus(seed: u64) -> Vec<Vec<ResampledTrace>> {
    corpus_families(10, seed, 600.0, 3.0)
        .iter()
        .enumerate()
        .map(|(i, f)| {
            reps(
                f,
                NoiseModel::new(2.0, 0.1, seed * 100 + i as u64).with_shape_sigma(80.0),
                17,
            )
        })
        .collect()
}

fn roc_oracle_and_trend() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let oracle = (0..50).filter(|_| roc_matches_confusion_counts(&mut rng)).count();
    let counts = [2, 4, 6, 8, 10];
    let mut mean = [0.0; 5];
    for seed in 0..5 {
        let rows = template_count_study(&roc_corpus(seed), &counts, TrialSet::Recall1, true).unwrap();
        for (m, r) in mean.iter_mut().zip(&rows) {
            *m += r.eer / 5.0;
        }
    }
    let trend = mean.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        oracle == 50 && trend,
        format!("{oracle}/50 corpora match confusion counts; mean EER over 5 corpora at 2..10 templates {mean:.4?}"),
    )
}

fn finger_count_gate() -> Outcome {
    let (mut trials, mut rejected) = (0, 0);
    let kinds = [
        PathKind::Circle,
        PathKind::Zigzag { turns: 5 },
        PathKind::Signature { seed: 2 },
    ];
    let family = |kind, fingers: usize| {
        let offsets = (1..fingers).map(|k| [0.0, 120.0 * k as f64]).collect();
        GestureFamily::single("g", kind, 600.0, 3.0).with_layout(FingerLayout::Rigid { offsets })
    };
    for (s, &kind) in kinds.iter().enumerate() {
        for enrolled in 1..=3 {
            let set = enroll_from_generate(
                &reps(&family(kind, enrolled), NoiseModel::new(2.0, 0.1, s as u64), 10),
                10,
            )
            .unwrap();
            for attempt in (1..=4).filter(|&f| f != enrolled) {
                for t in reps(&family(kind, attempt), NoiseModel::new(2.0, 0.1, 50 + s as u64), 10) {
                    trials += 1;
                    let m = match_trace(&t, &set, true).unwrap();
                    let d = authenticate(&t, &set, 1e-12, true).unwrap();
                    if m.score == 0.0 && m.gate_failed && !d.accepted {
                        rejected += 1;
                    }
                }
            }
        }
    }
    outcome(
        rejected == trials,
        format!("{rejected}/{trials} mismatched attempts scored 0 and rejected"),
    )
}

fn shoulder_surf() -> Outcome {
    let fam = GestureFamily::single("target", PathKind::Signature { seed: 5 }, 600.0, 3.0);
    let mut separated = 0;
    let mut margins = Vec::new();
    for seed in 0..10 {
        let target = reps(&fam, NoiseModel::new(2.0, 0.1, seed).with_shape_sigma(40.0), 17);
        let set = enroll_from_generate(&target, 10).unwrap();
        let attackers: Vec<(String, Vec<ResampledTrace>)> = (0..5)
            .map(|a| {
                let noise = NoiseModel::new(6.0, 0.1, 1000 + seed * 10 + a).with_shape_sigma(120.0);
                (format!("attacker{a}"), reps(&fam, noise, 5))
            })
            .collect();
        let report = attack_report(&set, &target[10..], &attackers, true).unwrap();
        let target_min = report.rows[0].scores.iter().copied().fold(f64::INFINITY, f64::min);
        let attacker_max = report.rows[1..].iter().map(|r| r.best_score).fold(0.0, f64::max);
        margins.push((target_min, attacker_max));
        if report.separating_threshold().is_some() {
            separated += 1;
        }
    }
    let (t, a) = margins
        .iter()
        .copied()
        .min_by(|x, y| (x.0 - x.1).total_cmp(&(y.0 - y.1)))
        .unwrap();
    outcome(
        separated == 10,
        format!("separable on {separated}/10 seeds; tightest seed: target recall min {t:.2} vs attacker best {a:.2}"),
    )
}

fn run_pipeline(dir: &Path) -> Result<Duration, String> {
    let bin = env!("CARGO_BIN_EXE_gesturekit");
    let start = Instant::now();
    let steps: [&[&str]; 3] = [
        &[
            "synth",
            "--gestures",
            "10",
            "--reps",
            "17",
            "--seed",
            "1",
            "--sigma",
            "2",
            "--shape-sigma",
            "80",
            "-o",
            "corpus",
        ],
        &["analyze", "corpus", "-o", "analysis"],
        &["roc", "corpus", "--templates", "2,4,6,8,10", "-o", "roc"],
    ];
    for args in steps {
        let out = Command::new(bin)
            .args(args)
            .current_dir(dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
    }
    Ok(start.elapsed())
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push((
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    files.sort();
    files
}

fn end_to_end() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ta, tb) = match (run_pipeline(a.path()), run_pipeline(b.path())) {
        (Ok(ta), Ok(tb)) => (ta, tb),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    let (fa, fb) = (tree(a.path()), tree(b.path()));
    let identical = fa == fb;
    let slowest = ta.max(tb);
    outcome(
        identical && slowest < Duration::from_secs(60),
        format!(
            "{} files, identical across runs: {identical}; slowest run {:.2} s",
            fa.len(),
            slowest.as_secs_f64()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("mi-calibration", mi_calibration),
        ("independence-null", independence_null),
        ("qualitative-ordering", qualitative_ordering),
        ("multifinger-collapse", multifinger_collapse),
        ("invariance", invariance_suite),
        ("dtw-oracle", dtw_oracle),
        ("roc-oracle-and-trend", roc_oracle_and_trend),
        ("finger-count-gate", finger_count_gate),
        ("shoulder-surf", shoulder_surf),
        ("end-to-end", end_to_end),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        failed += usize::from(!o.pass);
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

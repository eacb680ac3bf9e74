use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gesturekit::corpus::{group_by_gesture, load_corpus, load_trace, LoadFailure};
use gesturekit::format::{trace_to_json, MiDoc};
use gesturekit::report::{self, AnalysisDoc, RocDoc};
use gesturekit::{service, Config, Error, Result};
use gesturekit_core::evaluation::{analyze_gesture, template_count_study, TrialSet};
use gesturekit_core::infocap::mutual_information;
use gesturekit_core::resample::{resample, DEFAULT_RATE_HZ};
use gesturekit_core::synth::{corpus_families, generate, FingerLayout, GestureFamily, NoiseModel, PathKind};
use gesturekit_core::PairOutcome;

#[derive(Parser)]
#[command(
    name = "gesturekit",
    version,
    about = "Security and recognition analysis for multitouch gestures"
)]
struct Cli {
    /// TOML settings file shared with the service.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-gesture MI and duration reports for a corpus.
    Analyze {
        corpus: PathBuf,
        #[arg(short, long, default_value = "report")]
        out: PathBuf,
        /// Print the full report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Equal error rate for each enrollment size.
    Roc {
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10")]
        templates: Vec<usize>,
        /// Recall group used for authentication attempts.
        #[arg(long, value_enum, default_value_t = SetArg::Recall1)]
        set: SetArg,
        #[arg(short, long, default_value = "roc")]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write a synthetic corpus of trace files.
    Synth {
        /// Path shape of a single gesture. Ignored with --gestures.
        #[arg(long, value_enum, default_value_t = Family::Zigzag)]
        family: Family,
        /// Turns of a zigzag.
        #[arg(long, default_value_t = 8)]
        turns: usize,
        #[arg(long, default_value_t = 17)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
        /// Generate this many distinct gestures instead of one family.
        #[arg(long)]
        gestures: Option<usize>,
        /// Fingers moving rigidly together, 120 px apart.
        #[arg(long, default_value_t = 1)]
        fingers: usize,
        /// Per-sample positional noise in px.
        #[arg(long, default_value_t = 2.0)]
        sigma: f64,
        /// Tempo jitter as a fraction of the duration.
        #[arg(long, default_value_t = 0.1)]
        jitter: f64,
        /// Amplitude of smooth per-repetition shape deformation in px.
        #[arg(long, default_value_t = 0.0)]
        shape_sigma: f64,
        #[arg(long, default_value_t = 600.0)]
        scale: f64,
        /// Seconds per repetition.
        #[arg(long, default_value_t = 3.0)]
        duration: f64,
        /// Gesture id of a single family. Defaults to the family name.
        #[arg(long)]
        id: Option<String>,
    },
    /// Mutual information between two trace files.
    Mi {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    Recall1,
    Recall2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Line,
    Circle,
    Zigzag,
    Signature,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = Config::load_or_default(cli.config.as_deref())?;
    match cli.command {
        Command::Analyze { corpus, out, json } => analyze(&config, &corpus, &out, json),
        Command::Roc {
            corpus,
            templates,
            set,
            out,
            json,
        } => roc(&config, &corpus, &templates, set, &out, json),
        Command::Synth {
            family,
            turns,
            reps,
            seed,
            out,
            gestures,
            fingers,
            sigma,
            jitter,
            shape_sigma,
            scale,
            duration,
            id,
        } => {
            let noise = |seed| NoiseModel::new(sigma, jitter, seed).with_shape_sigma(shape_sigma);
            let families: Vec<(GestureFamily, NoiseModel)> = match gestures {
                Some(n) => corpus_families(n, seed, scale, duration)
                    .into_iter()
                    .enumerate()
                    .map(|(i, f)| (f, noise(seed * 100 + i as u64)))
                    .collect(),
                None => {
                    let kind = match family {
                        Family::Line => PathKind::Line,
                        Family::Circle => PathKind::Circle,
                        Family::Zigzag => PathKind::Zigzag { turns },
                        Family::Signature => PathKind::Signature { seed },
                    };
                    let id = id.unwrap_or_else(|| kind.name());
                    let mut f = GestureFamily::single(id, kind, scale, duration);
                    if fingers > 1 {
                        let offsets = (1..fingers).map(|k| [120.0 * k as f64, 0.0]).collect();
                        f = f.with_layout(FingerLayout::Rigid { offsets });
                    }
                    vec![(f, noise(seed))]
                }
            };
            synth(&families, reps, &out)
        }
        Command::Mi { a, b, json } => mi(&config, &a, &b, json),
        Command::Serve { port, host } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
                )
                .init();
            let addr = SocketAddr::new(host, port.unwrap_or(config.port));
            tokio::runtime::Runtime::new()
                .map_err(|e| Error::Invalid(format!("cannot start the async runtime: {e}")))?
                .block_on(service::serve(config, addr))
        }
    }
}

fn report_failures(failures: &[LoadFailure]) {
    for f in failures {
        eprintln!("skipped {}: {}", f.source, f.message);
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.2}"))
}

fn analyze(config: &Config, corpus: &Path, out: &Path, json: bool) -> Result<()> {
    let loaded = load_corpus(corpus)?;
    let (groups, mut failures) = group_by_gesture(&loaded.traces);
    failures.splice(0..0, loaded.failures);
    let mi_config = config.mi_config();
    let mut reports = Vec::new();
    for (id, reps) in &groups {
        match analyze_gesture(reps, &mi_config) {
            Ok(r) => reports.push(r),
            Err(e) => failures.push(LoadFailure {
                source: id.clone(),
                message: e.to_string(),
            }),
        }
    }
    report_failures(&failures);
    if reports.is_empty() {
        return Err(Error::Invalid(format!(
            "no gesture in {} could be analyzed",
            corpus.display()
        )));
    }
    let doc = AnalysisDoc::new(&reports, &failures);
    report::write_analysis(out, &doc)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&doc)?);
        return Ok(());
    }
    println!(
        "{:<20} {:>7} {:>10} {:>9} {:>9} {:>9} {:>7}",
        "gesture", "fingers", "generate", "recall1", "recall2", "cross", "ratio"
    );
    for r in &reports {
        println!(
            "{:<20} {:>7} {:>10.2} {:>9} {:>9} {:>9} {:>7}",
            r.gesture_id,
            r.finger_count,
            r.mean_mi_generate,
            fmt_opt(r.mean_mi_recall1),
            fmt_opt(r.mean_mi_recall2),
            fmt_opt(r.cross_mi),
            fmt_opt(r.memorability_ratio)
        );
    }
    let mean = reports.iter().map(|r| r.mean_mi_generate).sum::<f64>() / reports.len() as f64;
    println!(
        "{} gestures, mean Generate MI {mean:.2} bits; reports in {}",
        reports.len(),
        out.display()
    );
    Ok(())
}

fn roc(config: &Config, corpus: &Path, templates: &[usize], set: SetArg, out: &Path, json: bool) -> Result<()> {
    let loaded = load_corpus(corpus)?;
    let (groups, mut failures) = group_by_gesture(&loaded.traces);
    failures.splice(0..0, loaded.failures);
    report_failures(&failures);
    let gestures: Vec<_> = groups.into_values().collect();
    let (trial_set, label) = match set {
        SetArg::Recall1 => (TrialSet::Recall1, "recall1"),
        SetArg::Recall2 => (TrialSet::Recall2, "recall2"),
    };
    let rows = template_count_study(&gestures, templates, trial_set, config.rotation_invariant)?;
    let doc = RocDoc::new(label, &rows, &failures);
    report::write_roc(out, &doc)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&doc)?);
        return Ok(());
    }
    println!(
        "{:>9} {:>8} {:>10} {:>8} {:>9}",
        "templates", "eer %", "threshold", "genuine", "impostor"
    );
    for r in &doc.rows {
        println!(
            "{:>9} {:>8.2} {:>10.3} {:>8} {:>9}",
            r.n_templates,
            100.0 * r.eer,
            r.eer_threshold,
            r.n_genuine,
            r.n_impostor
        );
    }
    Ok(())
}

fn synth(families: &[(GestureFamily, NoiseModel)], reps: usize, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut written = 0;
    for (family, noise) in families {
        for t in generate(family, noise, reps)? {
            let name = format!(
                "{}_t{:02}.json",
                report::file_stem(&t.meta.gesture_id),
                t.meta.trial_index
            );
            let mut bytes = trace_to_json(&t).into_bytes();
            bytes.push(b'\n');
            report::write_atomic(&out.join(name), &bytes)?;
            written += 1;
        }
    }
    println!("wrote {written} traces to {}", out.display());
    Ok(())
}

fn mi(config: &Config, a: &Path, b: &Path, json: bool) -> Result<()> {
    let a = resample(&load_trace(a)?, DEFAULT_RATE_HZ)?;
    let b = resample(&load_trace(b)?, DEFAULT_RATE_HZ)?;
    let r = match mutual_information(&a, &b, &config.mi_config())? {
        PairOutcome::Estimated(r) => r,
        PairOutcome::Incomparable { fingers_a, fingers_b } => {
            return Err(Error::Invalid(format!(
                "incomparable traces: {fingers_a} fingers vs {fingers_b}"
            )))
        }
    };
    let doc = MiDoc::from(&r);
    if json {
        println!("{}", serde_json::to_string(&doc)?);
    } else {
        println!("total {:.3} bits over {} components", doc.total_bits, doc.retained_k);
        for c in &doc.components {
            println!("  component {}: n={} r={:.4} bits={:.3}", c.i, c.n, c.r, c.bits);
        }
    }
    Ok(())
}

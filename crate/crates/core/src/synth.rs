//! Synthetic gesture corpora with known structure.
//!
//! Every repetition follows the family's ideal path with a minimum-jerk
//! progress profile. Per repetition the generator draws a duration scale,
//! a smooth monotone time warp, an optional smooth shape deformation and
//! white positional noise on every touch report. Touch reports arrive at
//! roughly 200 Hz with ±30% interval jitter.
//!
//! The generator is ChaCha8 seeded with `NoiseModel::seed`, so a corpus is
//! reproducible across platforms.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::trajectory::{FingerStream, GestureTrace, Point, ResampledTrace, Sample, Screen, TraceMeta, MAX_TRIAL};
use crate::{Error, Result};

pub const SCREEN: Screen = Screen {
    width: 2560,
    height: 1600,
};

/// Mean interval between touch reports.
pub const REPORT_INTERVAL_MS: f64 = 5.0;
const REPORT_JITTER: f64 = 0.3;
const DENSE_POINTS: usize = 4096;
pub const SUBJECT_ID: &str = "synth";

/// Shape of an ideal path, defined in a unit box centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Line,
    Circle,
    Zigzag {
        turns: usize,
    },
    /// Smooth random curve through 8 to 14 control points whose turn
    /// direction alternates.
    Signature {
        seed: u64,
    },
}

impl PathKind {
    pub fn name(&self) -> String {
        match self {
            PathKind::Line => "line".into(),
            PathKind::Circle => "circle".into(),
            PathKind::Zigzag { turns } => format!("zigzag{turns}"),
            PathKind::Signature { seed } => format!("signature{seed}"),
        }
    }

    fn polyline(&self) -> Result<Vec<Point>> {
        let pts: Vec<Point> = match *self {
            PathKind::Line => {
                let (s, c) = 0.35f64.sin_cos();
                vec_map(DENSE_POINTS, |u| [c * (u - 0.5), s * (u - 0.5)])
            }
            PathKind::Circle => vec_map(DENSE_POINTS, |u| {
                let a = PI / 2.0 + 2.0 * PI * u;
                [0.5 * a.cos(), -0.5 * a.sin()]
            }),
            PathKind::Zigzag { turns } => {
                if turns == 0 {
                    return Err(Error::InvalidParameter("zigzag needs at least one turn".into()));
                }
                let segments = turns + 1;
                (0..=segments)
                    .map(|k| {
                        let y = if k % 2 == 0 { 0.5 } else { -0.5 };
                        [k as f64 / segments as f64 - 0.5, y]
                    })
                    .collect()
            }
            PathKind::Signature { seed } => signature_curve(seed),
        };
        Ok(pts)
    }
}

fn vec_map(n: usize, f: impl Fn(f64) -> Point) -> Vec<Point> {
    (0..n).map(|i| f(i as f64 / (n - 1) as f64)).collect()
}

fn signature_curve(seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(8..=14usize);
    let mut ctrl = Vec::with_capacity(n);
    for k in 0..n {
        let x = k as f64 / (n - 1) as f64 - 0.5 + rng.random_range(-0.3..0.3) / n as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let y = sign * rng.random_range(0.15..0.5);
        ctrl.push([x, y]);
    }
    // Uniform Catmull-Rom, end points repeated.
    let per_segment = DENSE_POINTS / (n - 1);
    let mut out = Vec::with_capacity(per_segment * (n - 1) + 1);
    for i in 0..n - 1 {
        let p0 = ctrl[i.saturating_sub(1)];
        let p1 = ctrl[i];
        let p2 = ctrl[i + 1];
        let p3 = ctrl[(i + 2).min(n - 1)];
        for s in 0..per_segment {
            let t = s as f64 / per_segment as f64;
            out.push(catmull_rom(p0, p1, p2, p3, t));
        }
    }
    out.push(ctrl[n - 1]);
    out
}

fn catmull_rom(p0: Point, p1: Point, p2: Point, p3: Point, t: f64) -> Point {
    let (t2, t3) = (t * t, t * t * t);
    let f = |a: f64, b: f64, c: f64, d: f64| {
        0.5 * (2.0 * b + (c - a) * t + (2.0 * a - 5.0 * b + 4.0 * c - d) * t2 + (3.0 * b - a - 3.0 * c + d) * t3)
    };
    [f(p0[0], p1[0], p2[0], p3[0]), f(p0[1], p1[1], p2[1], p3[1])]
}

/// A polyline that can be sampled by arc-length fraction.
#[derive(Debug, Clone)]
struct ArcPath {
    points: Vec<Point>,
    cumulative: Vec<f64>,
}

impl ArcPath {
    fn new(points: Vec<Point>) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(points.len());
        let mut total = 0.0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                let q = points[i - 1];
                total += (p[0] - q[0]).hypot(p[1] - q[1]);
            }
            cumulative.push(total);
        }
        if points.len() < 2 || !(total > 0.0) {
            return Err(Error::ZeroLengthStroke);
        }
        Ok(Self { points, cumulative })
    }

    fn at(&self, fraction: f64) -> Point {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let target = fraction.clamp(0.0, 1.0) * total;
        let i = self
            .cumulative
            .partition_point(|&c| c < target)
            .clamp(1, self.points.len() - 1);
        let (l0, l1) = (self.cumulative[i - 1], self.cumulative[i]);
        let f = if l1 > l0 { (target - l0) / (l1 - l0) } else { 0.0 };
        let (p, q) = (self.points[i - 1], self.points[i]);
        [p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])]
    }
}

/// How the fingers of a gesture relate to the primary path.
#[derive(Debug, Clone, PartialEq)]
pub enum FingerLayout {
    Single,
    /// Extra fingers follow the primary path at fixed pixel offsets and
    /// share its noise.
    Rigid {
        offsets: Vec<Point>,
    },
    /// A second finger mirrors the primary path about the vertical axis.
    Mirrored,
    /// Extra fingers draw their own path (unit shape, pixel offset of the
    /// centre) with independent noise.
    Divergent {
        paths: Vec<(PathKind, Point)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GestureFamily {
    pub gesture_id: String,
    pub kind: PathKind,
    pub layout: FingerLayout,
    /// Side of the unit box in pixels.
    pub scale_px: f64,
    pub duration_s: f64,
}

impl GestureFamily {
    pub fn single(gesture_id: impl Into<String>, kind: PathKind, scale_px: f64, duration_s: f64) -> Self {
        Self {
            gesture_id: gesture_id.into(),
            kind,
            layout: FingerLayout::Single,
            scale_px,
            duration_s,
        }
    }

    pub fn with_layout(mut self, layout: FingerLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn finger_count(&self) -> usize {
        match &self.layout {
            FingerLayout::Single => 1,
            FingerLayout::Rigid { offsets } => 1 + offsets.len(),
            FingerLayout::Mirrored => 2,
            FingerLayout::Divergent { paths } => 1 + paths.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub positional_sigma_px: f64,
    /// Bound on the relative change of duration and of local tempo.
    pub tempo_jitter_fraction: f64,
    /// Amplitude of a smooth per-repetition deformation of the path.
    /// Zero leaves the shape untouched.
    pub shape_sigma_px: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(positional_sigma_px: f64, tempo_jitter_fraction: f64, seed: u64) -> Self {
        Self {
            positional_sigma_px,
            tempo_jitter_fraction,
            shape_sigma_px: 0.0,
            seed,
        }
    }

    pub fn with_shape_sigma(mut self, shape_sigma_px: f64) -> Self {
        self.shape_sigma_px = shape_sigma_px;
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = self.positional_sigma_px.is_finite()
            && self.positional_sigma_px >= 0.0
            && self.shape_sigma_px.is_finite()
            && self.shape_sigma_px >= 0.0
            && (0.0..0.5).contains(&self.tempo_jitter_fraction);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("noise model {self:?}")))
        }
    }
}

/// One finger's geometry in pixels.
struct FingerPlan {
    path: ArcPath,
    centre: Point,
    mirrored: bool,
    /// Index of the finger whose noise this one reuses.
    noise_source: usize,
}

fn min_jerk(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

fn plan(family: &GestureFamily) -> Result<Vec<FingerPlan>> {
    if !(family.scale_px.is_finite() && family.scale_px > 0.0) {
        return Err(Error::InvalidParameter(format!("scale {} px", family.scale_px)));
    }
    if !(family.duration_s.is_finite() && family.duration_s > 0.05) {
        return Err(Error::InvalidParameter(format!("duration {} s", family.duration_s)));
    }
    let s = family.scale_px;
    let scaled = |kind: PathKind| -> Result<ArcPath> {
        ArcPath::new(kind.polyline()?.into_iter().map(|p| [p[0] * s, p[1] * s]).collect())
    };
    let centre = [f64::from(SCREEN.width) / 2.0, f64::from(SCREEN.height) / 2.0];
    let primary = || -> Result<FingerPlan> {
        Ok(FingerPlan {
            path: scaled(family.kind)?,
            centre,
            mirrored: false,
            noise_source: 0,
        })
    };
    let mut fingers = vec![primary()?];
    match &family.layout {
        FingerLayout::Single => {}
        FingerLayout::Rigid { offsets } => {
            for off in offsets {
                fingers.push(FingerPlan {
                    centre: [centre[0] + off[0], centre[1] + off[1]],
                    ..primary()?
                });
            }
        }
        FingerLayout::Mirrored => fingers.push(FingerPlan {
            mirrored: true,
            ..primary()?
        }),
        FingerLayout::Divergent { paths } => {
            for (k, (kind, off)) in paths.iter().enumerate() {
                fingers.push(FingerPlan {
                    path: scaled(*kind)?,
                    centre: [centre[0] + off[0], centre[1] + off[1]],
                    mirrored: false,
                    noise_source: k + 1,
                });
            }
        }
    }
    for f in &fingers {
        let (w, h) = (f64::from(SCREEN.width), f64::from(SCREEN.height));
        let reach = f
            .path
            .points
            .iter()
            .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
        let margin = 16.0;
        if f.centre[0] - reach < margin
            || f.centre[0] + reach > w - margin
            || f.centre[1] - reach < margin
            || f.centre[1] + reach > h - margin
        {
            return Err(Error::InvalidParameter(format!(
                "gesture {} does not fit on a {}x{} screen",
                family.gesture_id, SCREEN.width, SCREEN.height
            )));
        }
    }
    Ok(fingers)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Smooth displacement of the path, a few low sine harmonics per axis.
struct Deformation {
    coeffs: [[(f64, f64); 3]; 2],
}

impl Deformation {
    fn draw(rng: &mut ChaCha8Rng, sigma: f64) -> Self {
        let mut coeffs = [[(0.0, 0.0); 3]; 2];
        for axis in &mut coeffs {
            for (k, c) in axis.iter_mut().enumerate() {
                *c = (sigma * normal(rng) / (k + 1) as f64, rng.random_range(0.0..2.0 * PI));
            }
        }
        Self { coeffs }
    }

    fn at(&self, u: f64) -> Point {
        let eval = |axis: &[(f64, f64); 3]| {
            axis.iter()
                .enumerate()
                .map(|(k, &(a, phase))| a * ((k + 1) as f64 * PI * u + phase).sin())
                .sum::<f64>()
        };
        [eval(&self.coeffs[0]), eval(&self.coeffs[1])]
    }
}

/// Generates `n_reps` repetitions (trials 1..=n_reps; trials after 12 fall
/// in session 2).
pub fn generate(family: &GestureFamily, noise: &NoiseModel, n_reps: usize) -> Result<Vec<GestureTrace>> {
    noise.validate()?;
    if n_reps == 0 || n_reps > MAX_TRIAL as usize {
        return Err(Error::InvalidParameter(format!(
            "{n_reps} repetitions, expected 1..={MAX_TRIAL}"
        )));
    }
    let fingers = plan(family)?;
    // Timing draws come from stream 0 and the noise of finger `k` from
    // stream `k + 1`, so adding fingers leaves the first finger unchanged.
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut finger_rngs: Vec<ChaCha8Rng> = (0..fingers.len())
        .map(|k| {
            let mut r = ChaCha8Rng::seed_from_u64(noise.seed);
            r.set_stream(k as u64 + 1);
            r
        })
        .collect();
    let (w, h) = (f64::from(SCREEN.width), f64::from(SCREEN.height));
    let j = noise.tempo_jitter_fraction;

    let mut out = Vec::with_capacity(n_reps);
    for rep in 1..=n_reps {
        let duration_ms = 1000.0 * family.duration_s * (1.0 + j * rng.random_range(-1.0..=1.0));
        // Derivative of the warp stays within 1 ± j, so it is monotone.
        let warp = j * rng.random_range(-1.0..=1.0) / PI;

        let mut times = vec![0.0];
        loop {
            let step = REPORT_INTERVAL_MS * (1.0 + REPORT_JITTER * rng.random_range(-1.0..=1.0));
            let next = times[times.len() - 1] + step;
            if next >= duration_ms - 0.5 * REPORT_INTERVAL_MS {
                times.push(duration_ms);
                break;
            }
            times.push(next);
        }

        let sigma = noise.positional_sigma_px;
        let mut deformations = Vec::with_capacity(fingers.len());
        let mut noise_draws: Vec<Vec<Point>> = Vec::with_capacity(fingers.len());
        for r in &mut finger_rngs {
            deformations.push(Deformation::draw(r, noise.shape_sigma_px));
            noise_draws.push(times.iter().map(|_| [sigma * normal(r), sigma * normal(r)]).collect());
        }

        let streams = fingers
            .iter()
            .map(|f| {
                let src = f.noise_source;
                let samples = times
                    .iter()
                    .zip(&noise_draws[src])
                    .map(|(&t, e)| {
                        let tau = t / duration_ms;
                        let u = min_jerk(tau + warp * (PI * tau).sin());
                        let p = f.path.at(u);
                        let d = deformations[src].at(u);
                        let (mut dx, ex) = (p[0] + d[0], e[0]);
                        if f.mirrored {
                            dx = -dx;
                        }
                        let x = (f.centre[0] + dx + if f.mirrored { -ex } else { ex }).clamp(0.0, w);
                        let y = (f.centre[1] + p[1] + d[1] + e[1]).clamp(0.0, h);
                        Sample::new(t, x, y)
                    })
                    .collect();
                FingerStream::new(samples)
            })
            .collect();

        let session = if rep <= 12 { 1 } else { 2 };
        let meta = TraceMeta::new(family.gesture_id.clone(), SUBJECT_ID, session, rep as u32);
        out.push(GestureTrace::new(meta, SCREEN, 1000.0 / REPORT_INTERVAL_MS, streams)?);
    }
    Ok(out)
}

/// A varied set of distinct single-finger gestures for corpus-level
/// experiments: one line, one circle, then zigzags with 3, 4, 5, ... turns
/// alternating with signature-like curves.
pub fn corpus_families(count: usize, seed: u64, scale_px: f64, duration_s: f64) -> Vec<GestureFamily> {
    (0..count)
        .map(|i| {
            let kind = match i {
                0 => PathKind::Line,
                1 => PathKind::Circle,
                _ if i % 2 == 0 => PathKind::Zigzag { turns: 3 + (i - 2) / 2 },
                _ => PathKind::Signature {
                    seed: seed.wrapping_mul(1000).wrapping_add(i as u64),
                },
            };
            GestureFamily::single(format!("g{:02}-{}", i + 1, kind.name()), kind, scale_px, duration_s)
        })
        .collect()
}

/// Single-finger trace of independent Gaussian positions around a point.
pub fn white_noise_trace(
    gesture_id: &str,
    trial: u32,
    n_frames: usize,
    sigma_px: f64,
    seed: u64,
) -> Result<ResampledTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let path = (0..n_frames)
        .map(|_| [500.0 + sigma_px * normal(&mut rng), 500.0 + sigma_px * normal(&mut rng)])
        .collect();
    ResampledTrace::from_uniform(TraceMeta::new(gesture_id, SUBJECT_ID, 1, trial), 60.0, vec![path])
}

/// Two single-finger traces that are exact AR(2) processes whose
/// innovations are standard normal with correlation `rho`.
///
/// Each path is `x_t = 0.5·c + 1.5·x_{t-1} - 0.5·x_{t-2} + e_t`: a ramp of
/// slope `c` plus an integrated AR(1) wander, with `y = 0.5·x` so a single
/// principal component carries everything. The ramp is steep enough that
/// any sensible alignment is the diagonal.
pub fn correlated_ar2_pair(rho: f64, n_frames: usize, seed: u64) -> Result<(ResampledTrace, ResampledTrace)> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("correlation {rho}")));
    }
    const SLOPE: f64 = 1000.0;
    const BURN_IN: usize = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut xa, mut xb) = (vec![0.0, SLOPE], vec![0.0, SLOPE]);
    for _ in 0..n_frames + BURN_IN {
        let (z1, z2) = (normal(&mut rng), normal(&mut rng));
        let ea = z1;
        let eb = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
        for (x, e) in [(&mut xa, ea), (&mut xb, eb)] {
            let t = x.len();
            x.push(0.5 * SLOPE + 1.5 * x[t - 1] - 0.5 * x[t - 2] + e);
        }
    }
    let trace = |x: &[f64], trial: u32| {
        let path = x[x.len() - n_frames..].iter().map(|&v| [v, 0.5 * v]).collect();
        ResampledTrace::from_uniform(TraceMeta::new("ar2", SUBJECT_ID, 1, trial), 60.0, vec![path])
    };
    Ok((trace(&xa, 1)?, trace(&xb, 2)?))
}

//! Resampling and finger-order properties.

use std::f64::consts::PI;

use gesturekit_core::finger_order::{canonical_permutation, normalize_finger_order};
use gesturekit_core::resample::resample;
use gesturekit_core::{FingerStream, GestureTrace, ResampledTrace, Sample, Screen, TraceMeta};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SCREEN: Screen = Screen {
    width: 2000,
    height: 2000,
};

/// Timestamps at ~200 Hz with ±30% jitter over `duration_ms`.
fn jittered_times(rng: &mut ChaCha8Rng, duration_ms: f64) -> Vec<f64> {
    let mut t = vec![0.0];
    while t[t.len() - 1] < duration_ms {
        let next = t[t.len() - 1] + 5.0 * (1.0 + rng.random_range(-0.3..0.3));
        t.push(next);
    }
    t
}

fn tone_trace(times: &[f64], freq_hz: f64, amp: f64) -> GestureTrace {
    let samples = times
        .iter()
        .map(|&t| Sample::new(t, 1000.0 + amp * (2.0 * PI * freq_hz * t / 1000.0).sin(), 1000.0))
        .collect();
    GestureTrace::new(
        TraceMeta::new("tone", "s", 1, 1),
        SCREEN,
        200.0,
        vec![FingerStream::new(samples)],
    )
    .unwrap()
}

#[test]
fn one_hertz_sinusoid_is_reproduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let times = jittered_times(&mut rng, 3000.0);
    let amp = 300.0;
    let out = resample(&tone_trace(&times, 1.0, amp), 60.0).unwrap();
    let worst = out.fingers[0]
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let t = k as f64 / 60.0;
            (p[0] - (1000.0 + amp * (2.0 * PI * t).sin())).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-3 * amp, "max error {worst}");
}

#[test]
fn three_seconds_give_181_frames() {
    let times: Vec<f64> = (0..=600).map(|k| k as f64 * 5.0).collect();
    let out = resample(&tone_trace(&times, 1.0, 10.0), 60.0).unwrap();
    assert_eq!(out.frame_count(), 181);
    assert!((out.duration_s - 3.0).abs() < 1e-12);
}

#[test]
fn uniform_sixty_hertz_input_is_a_fixed_point() {
    let times: Vec<f64> = (0..120).map(|k| k as f64 * 1000.0 / 60.0).collect();
    let trace = tone_trace(&times, 2.0, 200.0);
    let out = resample(&trace, 60.0).unwrap();
    assert_eq!(out.frame_count(), 120);
    for (p, s) in out.fingers[0].iter().zip(&trace.fingers[0].samples) {
        assert!((p[0] - s.x).abs() < 1e-9 * 400.0);
    }
}

fn mean_square(trace: &ResampledTrace) -> f64 {
    let xs: Vec<f64> = trace.fingers[0].iter().map(|p| p[0]).collect();
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
}

#[test]
fn fast_tone_loses_more_energy_than_slow_tone() {
    let mut ratios = Vec::new();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times = jittered_times(&mut rng, 3000.0);
        let slow = mean_square(&resample(&tone_trace(&times, 5.0, 100.0), 60.0).unwrap());
        let fast = mean_square(&resample(&tone_trace(&times, 25.0, 100.0), 60.0).unwrap());
        ratios.push(fast / slow);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    eprintln!("25 Hz / 5 Hz energy ratio: mean {mean:.4}, per seed {ratios:.4?}");
    assert!(ratios.iter().all(|r| *r < 1.0));
}

fn two_finger(starts: [[f64; 2]; 2], trial: u32) -> ResampledTrace {
    let fingers = starts
        .iter()
        .map(|s| {
            (0..30)
                .map(|k| [s[0] + 4.0 * k as f64, s[1] + 2.0 * k as f64])
                .collect()
        })
        .collect();
    ResampledTrace::from_uniform(TraceMeta::new("g", "s", 1, trial), 60.0, fingers).unwrap()
}

fn brute_force_perm(reference: &[[f64; 2]], starts: &[[f64; 2]]) -> Vec<usize> {
    let d = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let cost = |p: &[usize]| {
        p.iter()
            .enumerate()
            .map(|(k, &i)| d(reference[k], starts[i]))
            .sum::<f64>()
    };
    if cost(&[1, 0]) < cost(&[0, 1]) {
        vec![1, 0]
    } else {
        vec![0, 1]
    }
}

#[test]
fn one_swapped_trace_out_of_three_is_fixed() {
    let a = [[500.0, 500.0], [800.0, 500.0]];
    let traces = vec![
        two_finger(a, 1),
        two_finger([[510.0, 495.0], [795.0, 507.0]], 2),
        two_finger([[805.0, 490.0], [497.0, 512.0]], 3),
    ];
    let out = normalize_finger_order(&traces).unwrap();
    let mut changed = 0;
    for (before, after) in traces.iter().zip(&out) {
        let perm = brute_force_perm(&traces[0].starts(), &before.starts());
        assert_eq!(
            perm,
            canonical_permutation(&traces[0].starts(), &before.starts()).unwrap()
        );
        if perm != [0, 1] {
            changed += 1;
            assert_eq!(after.fingers[0], before.fingers[1]);
            assert_eq!(after.fingers[1], before.fingers[0]);
        } else {
            assert_eq!(after, before);
        }
    }
    assert_eq!(changed, 1);
    assert_eq!(normalize_finger_order(&out).unwrap(), out);
}

proptest! {
    #[test]
    fn shuffled_fingers_are_restored(perm_seed in 0u64..1000, fingers in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        let paths: Vec<Vec<[f64; 2]>> = (0..fingers)
            .map(|f| (0..20).map(|k| [200.0 * f as f64 + k as f64, 300.0 + rng.random_range(-5.0..5.0)]).collect())
            .collect();
        let reference = ResampledTrace::from_uniform(TraceMeta::new("g", "s", 1, 1), 60.0, paths.clone()).unwrap();
        let mut order: Vec<usize> = (0..fingers).collect();
        for i in (1..fingers).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let shuffled: Vec<_> = order.iter().map(|&i| paths[i].clone()).collect();
        let other = ResampledTrace::from_uniform(TraceMeta::new("g", "s", 1, 2), 60.0, shuffled).unwrap();
        let out = normalize_finger_order(&[reference.clone(), other]).unwrap();
        prop_assert_eq!(&out[1].fingers, &reference.fingers);
        prop_assert_eq!(normalize_finger_order(&out).unwrap(), out);
    }

    #[test]
    fn frame_count_follows_duration(duration_ms in 100.0f64..5000.0, seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times = jittered_times(&mut rng, duration_ms);
        let span = times[times.len() - 1] / 1000.0;
        let out = resample(&tone_trace(&times, 1.0, 10.0), 60.0).unwrap();
        prop_assert_eq!(out.frame_count(), (span * 60.0 + 1e-9).floor() as usize + 1);
    }
}

//! Consistent finger numbering across repetitions.
//!
//! Touchscreens number fingers in the order they land, so a user who puts
//! fingers down in a different order produces a permuted trace. Fingers are
//! matched to a reference layout by their starting coordinates.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::trajectory::{Point, ResampledTrace};
use crate::{Error, Result};

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Returns `perm` such that finger `k` of the reordered trace is input
/// finger `perm[k]`, minimising the summed distance between
/// `starts[perm[k]]` and `reference[k]`.
///
/// Among equal-cost assignments the lexicographically smallest permutation
/// wins, which favours the lowest original index and leaves an already
/// ordered trace untouched.
pub fn canonical_permutation(reference: &[Point], starts: &[Point]) -> Result<Vec<usize>> {
    if reference.len() != starts.len() {
        return Err(Error::FingerCountMismatch {
            expected: reference.len(),
            found: starts.len(),
        });
    }
    let n = starts.len();
    let cost: Vec<Vec<f64>> = reference
        .iter()
        .map(|&r| starts.iter().map(|&s| dist(r, s)).collect())
        .collect();

    struct Search<'a> {
        cost: &'a [Vec<f64>],
        used: Vec<bool>,
        current: Vec<usize>,
        best: Vec<usize>,
        best_cost: f64,
    }

    impl Search<'_> {
        fn visit(&mut self, slot: usize, acc: f64) {
            if acc >= self.best_cost {
                return;
            }
            if slot == self.cost.len() {
                self.best_cost = acc;
                self.best.clone_from(&self.current);
                return;
            }
            for finger in 0..self.cost.len() {
                if !self.used[finger] {
                    self.used[finger] = true;
                    self.current.push(finger);
                    self.visit(slot + 1, acc + self.cost[slot][finger]);
                    self.current.pop();
                    self.used[finger] = false;
                }
            }
        }
    }

    let mut search = Search {
        cost: &cost,
        used: vec![false; n],
        current: Vec::with_capacity(n),
        best: (0..n).collect(),
        best_cost: f64::INFINITY,
    };
    search.visit(0, 0.0);
    Ok(search.best)
}

/// Reorders the fingers of `trace` according to `perm`.
pub fn apply_permutation(trace: &ResampledTrace, perm: &[usize]) -> ResampledTrace {
    ResampledTrace {
        fingers: perm.iter().map(|&i| trace.fingers[i].clone()).collect(),
        ..trace.clone()
    }
}

/// Puts the fingers of every trace in the order of the first trace.
///
/// Only finger order changes; samples are untouched. All traces must have
/// the same finger count.
pub fn normalize_finger_order(traces: &[ResampledTrace]) -> Result<Vec<ResampledTrace>> {
    let Some(first) = traces.first() else {
        return Ok(Vec::new());
    };
    let reference = first.starts();
    traces
        .iter()
        .map(|t| {
            let perm = canonical_permutation(&reference, &t.starts())?;
            Ok(apply_permutation(t, &perm))
        })
        .collect()
}

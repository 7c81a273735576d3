//! Shared test oracles, independent of the implementation paths they check.

#![allow(dead_code)]

use actisleep_core::models::{Model, ModelSpec};
use actisleep_core::nn::cross_entropy;
use actisleep_core::segmentation::{Quality, SegmentationConfig, SleepPeriod};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-6;
pub const GRAD_TOL: f64 = 1e-4;

/// Relative error with an absolute floor: tiny true gradients are compared
/// at the floor scale so finite-difference roundoff does not dominate.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-4)
}

/// Central finite differences of `loss` over every coordinate reachable
/// through `read`/`write` on `state`, compared against `analytic`; returns
/// the max relative error.
pub fn check_against_fd<S>(
    state: &mut S,
    analytic: &[f64],
    read: impl Fn(&S, usize) -> f64,
    write: impl Fn(&mut S, usize, f64),
    loss: impl Fn(&S) -> f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let x0 = read(state, i);
        write(state, i, x0 + FD_STEP);
        let up = loss(state);
        write(state, i, x0 - FD_STEP);
        let down = loss(state);
        write(state, i, x0);
        let numeric = (up - down) / (2.0 * FD_STEP);
        worst = worst.max(rel_err(a, numeric));
    }
    worst
}

/// End-to-end gradient check of one model on one example through the
/// cross-entropy loss. Returns the max relative error over all parameters.
pub fn model_grad_max_err(spec: &ModelSpec, model: &mut Model, input: &[f64], label: f64) -> f64 {
    let _ = spec;
    let mut rng = actisleep_core::rng::stream(0, "unused", 0);
    let fwd = model.forward_train(input, &mut rng).unwrap();
    let grads = model.backward(input, &fwd, label).unwrap();

    let mut worst: f64 = 0.0;
    let n_tensors = grads.0.len();
    for ti in 0..n_tensors {
        let len = grads.0[ti].len();
        for j in 0..len {
            let x0 = model.param_tensors()[ti].1.data()[j];
            model.param_tensors_mut()[ti].1.data_mut()[j] = x0 + FD_STEP;
            let up = cross_entropy(model.predict(input).unwrap(), label).0;
            model.param_tensors_mut()[ti].1.data_mut()[j] = x0 - FD_STEP;
            let down = cross_entropy(model.predict(input).unwrap(), label).0;
            model.param_tensors_mut()[ti].1.data_mut()[j] = x0;
            let numeric = (up - down) / (2.0 * FD_STEP);
            worst = worst.max(rel_err(grads.0[ti].data()[j], numeric));
        }
    }
    worst
}

/// Brute-force sleep-period scanner: tests every minute index against the
/// textual rules with literal loops. Kept deliberately separate from the
/// library's run-based implementation.
pub fn oracle_periods(totals: &[u64], cfg: &SegmentationConfig) -> Vec<SleepPeriod> {
    let n = totals.len();
    let cand = |t: usize| totals[t] <= cfg.sleep_count_threshold;
    let sed = |t: usize| totals[t] < cfg.sedentary_cutpoint;

    // a qualifying sleep run (>= onset_run_min candidates) begins at t
    let qual_start = |t: usize| -> bool {
        if t + cfg.onset_run_min > n {
            return false;
        }
        if t > 0 && cand(t - 1) {
            return false;
        }
        (t..t + cfg.onset_run_min).all(cand)
    };
    // a run of >= awakening_run_min candidates ends at e
    let qual_end = |e: usize| -> bool {
        if !cand(e) {
            return false;
        }
        if e + 1 < n && cand(e + 1) {
            return false;
        }
        let mut len = 0usize;
        let mut i = e as isize;
        while i >= 0 && cand(i as usize) {
            len += 1;
            i -= 1;
        }
        len >= cfg.awakening_run_min
    };
    // the 30 minutes after e exist, contain activity, and no new qualifying
    // sleep run begins inside them
    let window_ok = |e: usize| -> bool {
        let w = cfg.post_awakening_activity_min;
        if e + w > n - 1 {
            return false;
        }
        let any_active = (e + 1..=e + w).any(|t| !cand(t));
        let new_run = (e + 1..=e + w).any(qual_start);
        any_active && !new_run
    };

    let mut periods = Vec::new();
    let mut t = 0usize;
    while t < n {
        if !qual_start(t) {
            t += 1;
            continue;
        }
        let mut awakening = None;
        for e in t..n {
            if qual_end(e) && window_ok(e) {
                awakening = Some(e);
                break;
            }
        }
        let Some(e) = awakening else {
            break;
        };
        let mut bedtime = t;
        while bedtime > 0 && sed(bedtime - 1) {
            bedtime -= 1;
        }
        let mut waso = 0usize;
        let mut run = 0usize;
        for i in t + 1..e {
            if !cand(i) {
                run += 1;
            } else {
                if run > cfg.waso_run_min {
                    waso += run;
                }
                run = 0;
            }
        }
        if run > cfg.waso_run_min {
            waso += run;
        }
        let length = e - t + 1;
        let latency = t - bedtime;
        let efficiency = (length as f64 - waso as f64) / (length as f64 + latency as f64);
        periods.push(SleepPeriod {
            bedtime,
            onset: t,
            awakening: e,
            waso_min: waso,
            latency_min: latency,
            efficiency,
            label: if efficiency > 0.85 {
                Quality::Good
            } else {
                Quality::Poor
            },
        });
        t = e + 1;
    }
    periods
}

/// Random minute totals exercising the boundary lengths of the rules: zero
/// runs around 14/15/16, wake runs around 5/6, activity windows around
/// 29/30/31.
pub fn random_totals(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<u64> {
    let target = rng.random_range(40..=max_len);
    let mut totals = Vec::with_capacity(target);
    let boundary_lens: [usize; 9] = [5, 6, 14, 15, 16, 29, 30, 31, 1];
    while totals.len() < target {
        let kind = rng.random_range(0..10);
        let len = if rng.random::<f64>() < 0.4 {
            boundary_lens[rng.random_range(0..boundary_lens.len())]
        } else {
            rng.random_range(1..=60)
        };
        let len = len.min(target - totals.len());
        match kind {
            // zero-count (sleep candidate) runs
            0..=3 => totals.extend(std::iter::repeat_n(0u64, len)),
            // sedentary but awake
            4..=5 => {
                for _ in 0..len {
                    totals.push(rng.random_range(1..100));
                }
            }
            // active
            _ => {
                for _ in 0..len {
                    totals.push(rng.random_range(100..3000));
                }
            }
        }
    }
    totals
}

/// AUC by exhaustive pairwise concordance: ties count one half.
pub fn concordance_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let pos: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(&s, _)| s)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| !l)
        .map(|(&s, _)| s)
        .collect();
    let mut total = 0.0;
    for &p in &pos {
        for &q in &neg {
            total += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    total / (pos.len() as f64 * neg.len() as f64)
}

/// Builds a minute-resolution series from totals (all movement on one axis).
pub fn series_from_totals(totals: &[u64]) -> actisleep_core::ingest::EpochSeries {
    use actisleep_core::ingest::{Epoch, EpochSeries};
    use chrono::{TimeZone, Utc};
    let start = Utc.with_ymd_and_hms(2017, 3, 1, 0, 0, 0).unwrap();
    EpochSeries {
        subject_id: "oracle".into(),
        epoch_length_s: 60,
        epochs: totals
            .iter()
            .enumerate()
            .map(|(i, &t)| Epoch {
                timestamp: start + chrono::Duration::minutes(i as i64),
                axis_counts: [t as u32, 0, 0],
                vertical: t as u32,
                imputed: false,
            })
            .collect(),
    }
}

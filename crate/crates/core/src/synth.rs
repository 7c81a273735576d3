//! Synthetic actigraphy cohorts with a planted activity-to-quality signal.
//!
//! Each subject-day is a daytime activity block drawn from intensity
//! archetypes, an active guard minute, a sedentary lead-in, and a night
//! block built to land on the intended side of the 0.85 efficiency
//! threshold with margin (Good nights reach at least 0.88, Poor nights stay
//! at or below 0.82). Night wake runs use lengths of 6-20 minutes alongside
//! short 1-5 minute runs so the "more than 5 consecutive minutes" WASO rule
//! is exercised on both sides. The generator emits its own ground truth, so
//! segmentation can be checked boundary by boundary.
//!
//! The planted signal drives the probability of a Good night from the day's
//! realized intensity fractions: `sigmoid((a*moderate + b*vigorous -
//! c*sedentary^2 + d) / noise_level)`, with the quadratic sedentary term
//! making the nonlinear variant not linearly separable in the four
//! fractions. Two nuisances decouple the label from the raw count total: a
//! per-day within-bin count bias and a varying day length.

use crate::dataset::DEFAULT_CUTPOINTS;
use crate::error::{Error, Result};
use crate::ingest::{Epoch, EpochSeries};
use crate::nn::activation::sigmoid;
use crate::rng::stream;
use crate::segmentation::{label_from_efficiency, sleep_efficiency, Quality, SleepPeriod};
use chrono::{DateTime, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Linear,
    Nonlinear,
    None,
}

impl std::str::FromStr for SignalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(SignalKind::Linear),
            "nonlinear" => Ok(SignalKind::Nonlinear),
            "none" => Ok(SignalKind::None),
            other => Err(Error::invalid(format!("unknown signal kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CohortSpec {
    pub n_subjects: usize,
    pub days: usize,
    pub seed: u64,
    pub signal: SignalKind,
    pub noise_level: f64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec {
            n_subjects: 92,
            days: 7,
            seed: 0,
            signal: SignalKind::Nonlinear,
            noise_level: 0.35,
        }
    }
}

impl CohortSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_subjects < 3 {
            return Err(Error::invalid("cohort needs at least 3 subjects"));
        }
        if self.days < 1 {
            return Err(Error::invalid("cohort needs at least 1 day"));
        }
        if self.noise_level < 0.0 || !self.noise_level.is_finite() {
            return Err(Error::invalid("noise level must be a non-negative real"));
        }
        Ok(())
    }
}

/// A ground-truth sleep period with its subject.
#[derive(Clone, Debug)]
pub struct LabeledPeriod {
    pub subject_id: String,
    pub period: SleepPeriod,
}

pub struct Cohort {
    pub series: Vec<EpochSeries>,
    pub truth: Vec<LabeledPeriod>,
}

// planted-signal coefficients (a, b, c, d)
const SIG_MODERATE: f64 = 18.0;
const SIG_VIGOROUS: f64 = 24.0;
const SIG_SEDENTARY: f64 = 4.0;
const SIG_OFFSET: f64 = -1.6;

/// count draw ranges per intensity bin (vertical axis, counts/min); daytime
/// sedentary minutes start at 5 so only true sleep minutes are zero, and
/// moderate/vigorous draws sit low in their bins so a raw count total does
/// not give the labels away
const BIN_LO: [u32; 4] = [5, 100, 760, 2020];
const BIN_HI: [u32; 4] = [99, 759, 1100, 2400];

fn epoch_at(base: DateTime<Utc>, minute: usize, vertical: u32) -> Epoch {
    let side = vertical / 4;
    Epoch {
        timestamp: base + chrono::Duration::minutes(minute as i64),
        axis_counts: [side, vertical, side],
        vertical,
        imputed: false,
    }
}

/// A minute count inside a bin, pulled toward the day's within-bin bias.
fn bin_count(rng: &mut ChaCha8Rng, bin: usize, day_bias: f64) -> u32 {
    let lo = f64::from(BIN_LO[bin]);
    let hi = f64::from(BIN_HI[bin]);
    let center = lo + (hi - lo) * day_bias;
    let jitter = (rng.random::<f64>() - 0.5) * 0.5 * (hi - lo);
    (center + jitter).clamp(lo, hi).round() as u32
}

struct DayMixture {
    weights: [f64; 4],
}

/// Day mixture: the moderate+vigorous share follows the subject's fitness,
/// the light share is an independent nuisance, sedentary takes the rest.
fn day_mixture(rng: &mut ChaCha8Rng, fitness: f64) -> DayMixture {
    let phi = (fitness + (rng.random::<f64>() - 0.5) * 0.3).clamp(0.0, 1.0);
    let mv = 0.04 + 0.26 * phi;
    let moderate = mv * 0.6;
    let vigorous = mv * 0.4;
    // anti-correlated light share keeps the raw count total flat across
    // fitness levels
    let light = (0.60 - 1.5 * mv + rng.random_range(-0.10..0.10)).clamp(0.05, 0.68);
    let sedentary = (1.0 - mv - light).max(0.05);
    let total = sedentary + light + moderate + vigorous;
    DayMixture {
        weights: [
            sedentary / total,
            light / total,
            moderate / total,
            vigorous / total,
        ],
    }
}

fn pick_bin(rng: &mut ChaCha8Rng, mix: &DayMixture) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in mix.weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    3
}

/// Daytime awake minutes in activity bouts of 3-15 minutes.
fn day_awake_minutes(rng: &mut ChaCha8Rng, len: usize, mix: &DayMixture, day_bias: f64) -> Vec<u32> {
    let mut minutes = Vec::with_capacity(len);
    while minutes.len() < len {
        let bin = pick_bin(rng, mix);
        let bout = rng.random_range(3..=15).min(len - minutes.len());
        for _ in 0..bout {
            minutes.push(bin_count(rng, bin, day_bias));
        }
    }
    minutes
}

/// Realized intensity fractions of the emitted awake minutes, binned with
/// the same default cutpoints the dataset module uses.
fn realized_fractions(minutes: &[u32]) -> [f64; 4] {
    let mut bins = [0usize; 4];
    for &v in minutes {
        let c = f64::from(v);
        let bin = if c < DEFAULT_CUTPOINTS[0] {
            0
        } else if c < DEFAULT_CUTPOINTS[1] {
            1
        } else if c < DEFAULT_CUTPOINTS[2] {
            2
        } else {
            3
        };
        bins[bin] += 1;
    }
    let n = minutes.len() as f64;
    [
        bins[0] as f64 / n,
        bins[1] as f64 / n,
        bins[2] as f64 / n,
        bins[3] as f64 / n,
    ]
}

fn margin(signal: SignalKind, fractions: [f64; 4]) -> f64 {
    let [sedentary, _light, moderate, vigorous] = fractions;
    match signal {
        SignalKind::Nonlinear => {
            SIG_MODERATE * moderate + SIG_VIGOROUS * vigorous - SIG_SEDENTARY * sedentary * sedentary
                + SIG_OFFSET
        }
        SignalKind::Linear => {
            SIG_MODERATE * moderate + SIG_VIGOROUS * vigorous - 6.0 * sedentary + 1.6
        }
        SignalKind::None => 0.0,
    }
}

fn draw_label(rng: &mut ChaCha8Rng, signal: SignalKind, m: f64, noise_level: f64) -> Quality {
    let p_good = match signal {
        SignalKind::None => 0.5,
        _ if noise_level == 0.0 => {
            if m > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        _ => sigmoid(m / noise_level),
    };
    if rng.random::<f64>() < p_good {
        Quality::Good
    } else {
        Quality::Poor
    }
}

struct NightPlan {
    /// sleep segments (each >= 15 min) interleaved with wake runs
    sleep_segments: Vec<usize>,
    wake_runs: Vec<usize>,
    latency: usize,
    counted_waso: usize,
    efficiency: f64,
}

/// Wake-run lengths of 6-20 minutes summing exactly to `total`.
fn long_wake_runs(total: usize) -> Vec<usize> {
    if total == 0 {
        return Vec::new();
    }
    let n = (total.div_ceil(20)).max((total as f64 / 13.0).round() as usize).max(1);
    let n = n.min(total / 6).max(1);
    let base = total / n;
    let extra = total % n;
    (0..n).map(|i| base + usize::from(i < extra)).collect()
}

fn plan_night(rng: &mut ChaCha8Rng, label: Quality) -> NightPlan {
    let latency = rng.random_range(8..=25);
    let sleep_total: usize = rng.random_range(420..=520);

    // short runs (1-5 min) never count toward WASO; both night kinds get some
    let n_short = rng.random_range(0..=2);
    let short_runs: Vec<usize> = (0..n_short).map(|_| rng.random_range(1..=5)).collect();
    let short_sum: usize = short_runs.iter().sum();

    let counted_waso = match label {
        Quality::Good => {
            // at most one long run, kept small enough for efficiency >= 0.88
            if rng.random::<f64>() < 0.35 {
                rng.random_range(6..=12)
            } else {
                0
            }
        }
        Quality::Poor => {
            // solve (sleep_total + short_sum) / (len + latency) <= 0.82
            let x = (sleep_total + short_sum) as f64;
            let needed = (0.18 * x / 0.82 - latency as f64).ceil().max(6.0) as usize;
            needed + rng.random_range(10..=30)
        }
    };

    let mut wake_runs = long_wake_runs(counted_waso);
    wake_runs.extend(short_runs);
    wake_runs.shuffle(rng);

    // one more sleep segment than wake runs, each at least 15 minutes
    let n_segments = wake_runs.len() + 1;
    let mut sleep_segments = vec![15usize; n_segments];
    let mut remaining = sleep_total - 15 * n_segments;
    while remaining > 0 {
        let i = rng.random_range(0..n_segments);
        let take = remaining.min(rng.random_range(10..=60));
        sleep_segments[i] += take;
        remaining -= take;
    }

    let length = sleep_total + wake_runs.iter().sum::<usize>();
    let efficiency = sleep_efficiency(length, counted_waso, latency);
    match label {
        Quality::Good => debug_assert!(efficiency >= 0.88, "good night at {efficiency}"),
        Quality::Poor => debug_assert!(efficiency <= 0.82, "poor night at {efficiency}"),
    }
    NightPlan {
        sleep_segments,
        wake_runs,
        latency,
        counted_waso,
        efficiency,
    }
}

/// Generates the cohort with its ground-truth periods and labels.
pub fn generate(spec: &CohortSpec) -> Result<Cohort> {
    spec.validate()?;
    let base = Utc.with_ymd_and_hms(2017, 3, 1, 0, 0, 0).unwrap();
    let mut series = Vec::with_capacity(spec.n_subjects);
    let mut truth = Vec::new();

    for subject_idx in 0..spec.n_subjects {
        let subject_id = format!("s{subject_idx:03}");
        let mut rng = stream(spec.seed, "subject", subject_idx as u64);
        let fitness: f64 = rng.random();

        let mut epochs: Vec<Epoch> = Vec::new();
        let push = |epochs: &mut Vec<Epoch>, vertical: u32| {
            let minute = epochs.len();
            epochs.push(epoch_at(base, minute, vertical));
        };

        for _day in 0..spec.days {
            // daytime activity
            let day_len = rng.random_range(600..=900);
            let day_bias = rng.random_range(0.05..0.95);
            let mix = day_mixture(&mut rng, fitness);
            let mut awake = day_awake_minutes(&mut rng, day_len, &mix, day_bias);
            // guard minute: clearly non-sedentary so the bedtime backscan
            // stops exactly at the lead-in
            awake.push(rng.random_range(300..=1200));

            let fractions = realized_fractions(&awake);
            let label = draw_label(&mut rng, spec.signal, margin(spec.signal, fractions), spec.noise_level);
            let plan = plan_night(&mut rng, label);

            for v in awake {
                push(&mut epochs, v);
            }
            let bedtime = epochs.len();
            for _ in 0..plan.latency {
                push(&mut epochs, rng.random_range(10..=60));
            }
            let onset = epochs.len();
            for (i, &segment) in plan.sleep_segments.iter().enumerate() {
                for _ in 0..segment {
                    push(&mut epochs, 0);
                }
                if i < plan.wake_runs.len() {
                    for _ in 0..plan.wake_runs[i] {
                        push(&mut epochs, rng.random_range(120..=900));
                    }
                }
            }
            let awakening = epochs.len() - 1;

            truth.push(LabeledPeriod {
                subject_id: subject_id.clone(),
                period: SleepPeriod {
                    bedtime,
                    onset,
                    awakening,
                    waso_min: plan.counted_waso,
                    latency_min: plan.latency,
                    efficiency: plan.efficiency,
                    label: label_from_efficiency(plan.efficiency),
                },
            });
        }

        // trailing morning so the last awakening rule can fire
        for _ in 0..45 {
            push(&mut epochs, rng.random_range(150..=2500));
        }

        let s = EpochSeries {
            subject_id,
            epoch_length_s: 60,
            epochs,
        };
        debug_assert!(s.validate().is_ok());
        series.push(s);
    }

    Ok(Cohort { series, truth })
}

/// Writes ground-truth periods in the same CSV schema the `segment`
/// subcommand emits.
pub fn write_truth_csv(truth: &[LabeledPeriod], writer: impl std::io::Write) -> Result<()> {
    crate::segmentation::write_periods_csv(
        truth.iter().map(|t| (t.subject_id.as_str(), &t.period)),
        writer,
    )
}

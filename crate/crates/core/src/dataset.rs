//! Supervised records and input representations.
//!
//! Each record pairs one awake segment (the minutes between a sleep
//! awakening and the next inferred bedtime) with the quality label of the
//! sleep period that follows it. Records feed the models through one of
//! three representations: the raw padded minute sequence, a pseudo-sequence
//! of merged time slots, or the 4-bin activity-intensity fractions.
//!
//! Splitting is by subject so no subject leaks across partitions, and class
//! rebalancing with SMOTE touches the training partition only.

use crate::error::{Error, Result};
use crate::ingest::{vertical_series, EpochSeries};
use crate::segmentation::{Quality, SleepPeriod};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::io::{Read, Write};

pub const DEFAULT_CUTPOINTS: [f64; 3] = [100.0, 760.0, 2020.0];
pub const DEFAULT_SMOTE_K: usize = 5;
/// Raw counts are divided by this before entering a model, keeping
/// activations at a trainable scale. Intensity fractions are unaffected.
pub const DEFAULT_COUNT_SCALE: f64 = 1000.0;

/// One awake segment and the label of the night that followed it.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingRecord {
    pub subject_id: String,
    /// Per-minute vertical counts of the awake segment, in raw count units.
    pub awake: Vec<f64>,
    pub label: Quality,
}

/// Builds one record per (awake gap, following sleep period) pair. The gap
/// runs from the previous awakening + 1 (or the series start) to the
/// following period's bedtime - 1; periods with no preceding awake minutes
/// produce no record.
pub fn build_records(series: &EpochSeries, periods: &[SleepPeriod]) -> Vec<TrainingRecord> {
    let vertical = vertical_series(series);
    let mut records = Vec::new();
    let mut prev_awakening: Option<usize> = None;
    for period in periods {
        let gap_start = prev_awakening.map_or(0, |a| a + 1);
        if period.bedtime > gap_start {
            records.push(TrainingRecord {
                subject_id: series.subject_id.clone(),
                awake: vertical[gap_start..period.bedtime].to_vec(),
                label: period.label,
            });
        }
        prev_awakening = Some(period.awakening);
    }
    records
}

/// A sequence re-shaped into slots of `slot_width` consecutive minutes, the
/// trailing slot zero-padded.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoSequence {
    pub steps: Vec<Vec<f64>>,
    pub slot_width: usize,
    pub original_len: usize,
}

/// Merges consecutive non-overlapping blocks of `slot_width` minutes into
/// one step each; `slot_width == 1` reproduces the original sequence as
/// singleton steps.
pub fn make_pseudo_sequence(awake: &[f64], slot_width: usize) -> Result<PseudoSequence> {
    if slot_width < 1 {
        return Err(Error::invalid("slot width must be at least 1"));
    }
    let mut steps = Vec::with_capacity(awake.len().div_ceil(slot_width));
    for chunk in awake.chunks(slot_width) {
        let mut step = chunk.to_vec();
        step.resize(slot_width, 0.0);
        steps.push(step);
    }
    Ok(PseudoSequence {
        steps,
        slot_width,
        original_len: awake.len(),
    })
}

/// Pads with trailing zeros up to `target_len`; longer sequences are
/// truncated from the end with a warning.
pub fn pad_to_fixed_length(seq: &[f64], target_len: usize) -> Result<Vec<f64>> {
    if target_len == 0 {
        return Err(Error::invalid("target length must be positive"));
    }
    let mut out = seq.to_vec();
    if out.len() > target_len {
        log::warn!(
            "truncating sequence of {} minutes to fixed length {target_len}",
            out.len()
        );
        out.truncate(target_len);
    } else {
        out.resize(target_len, 0.0);
    }
    Ok(out)
}

/// Fractions of awake time spent in the four activity-intensity levels.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityFeatures {
    /// sedentary, light, moderate, vigorous; non-negative, summing to 1.
    pub fractions: [f64; 4],
    pub cutpoints: [f64; 3],
}

/// Bins each minute by its count: `< c1` sedentary, `[c1, c2)` light,
/// `[c2, c3)` moderate, `>= c3` vigorous.
pub fn intensity_features(awake: &[f64], cutpoints: [f64; 3]) -> Result<IntensityFeatures> {
    if !(cutpoints[0] < cutpoints[1] && cutpoints[1] < cutpoints[2]) {
        return Err(Error::invalid(format!(
            "cutpoints must be strictly increasing, got {cutpoints:?}"
        )));
    }
    if awake.is_empty() {
        return Err(Error::invalid("cannot bin an empty awake segment"));
    }
    let mut bins = [0usize; 4];
    for &count in awake {
        let bin = if count < cutpoints[0] {
            0
        } else if count < cutpoints[1] {
            1
        } else if count < cutpoints[2] {
            2
        } else {
            3
        };
        bins[bin] += 1;
    }
    let n = awake.len() as f64;
    Ok(IntensityFeatures {
        fractions: [
            bins[0] as f64 / n,
            bins[1] as f64 / n,
            bins[2] as f64 / n,
            bins[3] as f64 / n,
        ],
        cutpoints,
    })
}

/// Subject-disjoint partitions with a 70/15/15 target split.
#[derive(Clone, Debug)]
pub struct DatasetSplit {
    pub train: Vec<TrainingRecord>,
    pub validation: Vec<TrainingRecord>,
    pub test: Vec<TrainingRecord>,
    pub seed: u64,
}

const SPLIT_RATIOS: [f64; 3] = [0.70, 0.15, 0.15];

/// Partition sizes for `n` subjects by largest-remainder rounding of the
/// 70/15/15 ratios; remainder ties resolve in train, validation, test order.
pub fn split_sizes(n: usize) -> [usize; 3] {
    let mut sizes = [0usize; 3];
    let mut remainders = [0f64; 3];
    for i in 0..3 {
        let quota = SPLIT_RATIOS[i] * n as f64;
        sizes[i] = quota.floor() as usize;
        remainders[i] = quota - quota.floor();
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| remainders[b].partial_cmp(&remainders[a]).unwrap().then(a.cmp(&b)));
    let mut deficit = n - sizes.iter().sum::<usize>();
    for &i in &order {
        if deficit == 0 {
            break;
        }
        sizes[i] += 1;
        deficit -= 1;
    }
    sizes
}

/// Shuffles the distinct subjects deterministically by seed and assigns each
/// subject's records wholesale to one partition.
pub fn subject_split(records: Vec<TrainingRecord>, seed: u64) -> Result<DatasetSplit> {
    let subjects: BTreeSet<&str> = records.iter().map(|r| r.subject_id.as_str()).collect();
    if subjects.len() < 3 {
        return Err(Error::invalid(format!(
            "subject split needs at least 3 distinct subjects, got {}",
            subjects.len()
        )));
    }
    let mut subjects: Vec<String> = subjects.into_iter().map(String::from).collect();
    let mut rng = crate::rng::stream(seed, "subject-split", 0);
    subjects.shuffle(&mut rng);

    let sizes = split_sizes(subjects.len());
    let assignment = |subject: &str| -> usize {
        let pos = subjects.iter().position(|s| s == subject).unwrap();
        if pos < sizes[0] {
            0
        } else if pos < sizes[0] + sizes[1] {
            1
        } else {
            2
        }
    };

    let mut split = DatasetSplit {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        seed,
    };
    for record in records {
        match assignment(&record.subject_id) {
            0 => split.train.push(record),
            1 => split.validation.push(record),
            _ => split.test.push(record),
        }
    }
    Ok(split)
}

fn check_same_dim(points: &[Vec<f64>]) -> Result<usize> {
    let dim = points.first().map_or(0, Vec::len);
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::invalid("SMOTE points must share one positive dimension"));
    }
    Ok(dim)
}

/// Indices of the k nearest neighbors of each point among the others,
/// Euclidean distance, ties broken by lower index.
fn k_nearest(points: &[Vec<f64>], k: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut neighbors = Vec::with_capacity(n);
    for i in 0..n {
        let mut dist: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let d2: f64 = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2, j)
            })
            .collect();
        dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        neighbors.push(dist.into_iter().take(k).map(|(_, j)| j).collect());
    }
    neighbors
}

fn smote_with_amounts(
    minority: &[Vec<f64>],
    k: usize,
    amounts: &[usize],
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    check_same_dim(minority)?;
    if k < 1 {
        return Err(Error::invalid("SMOTE needs k >= 1"));
    }
    if k >= minority.len() {
        return Err(Error::invalid(format!(
            "SMOTE needs more minority points ({}) than neighbors k ({k})",
            minority.len()
        )));
    }
    let neighbors = k_nearest(minority, k);
    let mut rng = crate::rng::stream(seed, "smote", 0);
    let mut synthetic = Vec::with_capacity(amounts.iter().sum());
    for (i, (point, &amount)) in minority.iter().zip(amounts).enumerate() {
        for _ in 0..amount {
            let nn = &minority[neighbors[i][rng.random_range(0..k)]];
            let lambda: f64 = rng.random();
            synthetic.push(
                point
                    .iter()
                    .zip(nn)
                    .map(|(&x, &x_nn)| x + lambda * (x_nn - x))
                    .collect(),
            );
        }
    }
    Ok(synthetic)
}

/// Classic SMOTE: each minority point spawns `amount` synthetic points, each
/// placed uniformly on the segment toward one of its `k` nearest minority
/// neighbors. Draw order is sequential, so output is deterministic per seed.
pub fn smote(minority: &[Vec<f64>], k: usize, amount: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    smote_with_amounts(minority, k, &vec![amount; minority.len()], seed)
}

/// Oversamples the minority class in place until the class counts are equal.
/// Returns how many synthetic points were added. `k` is clamped to the
/// available minority size.
pub fn balance_with_smote(
    inputs: &mut Vec<Vec<f64>>,
    labels: &mut Vec<f64>,
    k: usize,
    seed: u64,
) -> Result<usize> {
    if inputs.len() != labels.len() {
        return Err(Error::shape("inputs and labels must align"));
    }
    let positives = labels.iter().filter(|&&y| y > 0.5).count();
    let negatives = labels.len() - positives;
    if positives == negatives {
        return Ok(0);
    }
    let minority_label = if positives < negatives { 1.0 } else { 0.0 };
    let minority: Vec<Vec<f64>> = inputs
        .iter()
        .zip(labels.iter())
        .filter(|(_, &y)| (y > 0.5) == (minority_label > 0.5))
        .map(|(x, _)| x.clone())
        .collect();
    if minority.len() < 2 {
        return Err(Error::invalid(
            "cannot rebalance: minority class has fewer than 2 samples",
        ));
    }
    let k_eff = k.min(minority.len() - 1).max(1);
    let need = positives.abs_diff(negatives);
    let base = need / minority.len();
    let extra = need % minority.len();
    let amounts: Vec<usize> = (0..minority.len())
        .map(|i| base + usize::from(i < extra))
        .collect();
    let synthetic = smote_with_amounts(&minority, k_eff, &amounts, seed)?;
    for point in synthetic {
        inputs.push(point);
        labels.push(minority_label);
    }
    Ok(need)
}

/// The three input representations a model can consume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputRepr {
    Intensity4,
    RawPadded,
    PseudoSeq,
}

impl std::fmt::Display for InputRepr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InputRepr::Intensity4 => "intensity4",
            InputRepr::RawPadded => "raw_padded",
            InputRepr::PseudoSeq => "pseudo_seq",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for InputRepr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "intensity4" | "intensity" => Ok(InputRepr::Intensity4),
            "raw_padded" | "raw" => Ok(InputRepr::RawPadded),
            "pseudo_seq" | "pseudo" => Ok(InputRepr::PseudoSeq),
            other => Err(Error::invalid(format!("unknown representation `{other}`"))),
        }
    }
}

/// How to turn a [`TrainingRecord`] into a fixed-length feature vector.
#[derive(Clone, Debug)]
pub struct ReprConfig {
    pub kind: InputRepr,
    /// Fixed sequence length for the padded representations.
    pub target_len: usize,
    /// Slot width S for pseudo-sequences.
    pub slot_width: usize,
    pub cutpoints: [f64; 3],
    pub count_scale: f64,
}

impl ReprConfig {
    pub fn new(kind: InputRepr, target_len: usize, slot_width: usize) -> Self {
        ReprConfig {
            kind,
            target_len,
            slot_width,
            cutpoints: DEFAULT_CUTPOINTS,
            count_scale: DEFAULT_COUNT_SCALE,
        }
    }

    /// The default fixed length: the maximum awake length in the training
    /// partition.
    pub fn max_awake_len(records: &[TrainingRecord]) -> usize {
        records.iter().map(|r| r.awake.len()).max().unwrap_or(1).max(1)
    }

    /// Length of the vectors produced by [`ReprConfig::vectorize`].
    pub fn input_len(&self) -> usize {
        match self.kind {
            InputRepr::Intensity4 => 4,
            InputRepr::RawPadded => self.target_len,
            InputRepr::PseudoSeq => self.target_len.div_ceil(self.slot_width) * self.slot_width,
        }
    }

    pub fn vectorize(&self, record: &TrainingRecord) -> Result<Vec<f64>> {
        match self.kind {
            InputRepr::Intensity4 => {
                Ok(intensity_features(&record.awake, self.cutpoints)?.fractions.to_vec())
            }
            InputRepr::RawPadded => {
                let mut v = pad_to_fixed_length(&record.awake, self.target_len)?;
                for x in &mut v {
                    *x /= self.count_scale;
                }
                Ok(v)
            }
            InputRepr::PseudoSeq => {
                let mut v = pad_to_fixed_length(&record.awake, self.target_len)?;
                v.resize(self.input_len(), 0.0);
                for x in &mut v {
                    *x /= self.count_scale;
                }
                Ok(v)
            }
        }
    }
}

/// SMOTE settings for training-partition rebalancing.
#[derive(Clone, Copy, Debug)]
pub struct SmoteParams {
    pub k: usize,
    pub seed: u64,
}

/// Vectorized partitions ready for the training loop.
#[derive(Clone, Debug)]
pub struct PreparedData {
    pub train_inputs: Vec<Vec<f64>>,
    pub train_labels: Vec<f64>,
    pub val_inputs: Vec<Vec<f64>>,
    pub val_labels: Vec<f64>,
    pub test_inputs: Vec<Vec<f64>>,
    pub test_labels: Vec<f64>,
    pub input_len: usize,
}

fn vectorize_partition(records: &[TrainingRecord], repr: &ReprConfig) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut inputs = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(records.len());
    for r in records {
        inputs.push(repr.vectorize(r)?);
        labels.push(r.label.as_f64());
    }
    Ok((inputs, labels))
}

/// Vectorizes all three partitions and, when requested, rebalances the
/// training partition with SMOTE. Validation and test are never touched.
pub fn prepare(split: &DatasetSplit, repr: &ReprConfig, smote_params: Option<SmoteParams>) -> Result<PreparedData> {
    let (mut train_inputs, mut train_labels) = vectorize_partition(&split.train, repr)?;
    let (val_inputs, val_labels) = vectorize_partition(&split.validation, repr)?;
    let (test_inputs, test_labels) = vectorize_partition(&split.test, repr)?;
    if let Some(params) = smote_params {
        balance_with_smote(&mut train_inputs, &mut train_labels, params.k, params.seed)?;
    }
    Ok(PreparedData {
        train_inputs,
        train_labels,
        val_inputs,
        val_labels,
        test_inputs,
        test_labels,
        input_len: repr.input_len(),
    })
}

/// Writes one partition as CSV rows `subject_id,label,len,v1,...,vlen`.
pub fn write_partition_csv(records: &[TrainingRecord], writer: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    for r in records {
        let mut row = vec![
            r.subject_id.clone(),
            format!("{}", r.label.as_f64() as i64),
            r.awake.len().to_string(),
        ];
        row.extend(r.awake.iter().map(|v| format!("{v}")));
        w.write_record(&row).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a partition written by [`write_partition_csv`].
pub fn read_partition_csv(reader: impl Read) -> Result<Vec<TrainingRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = Vec::new();
    for row in r.records() {
        let record = row.map_err(|e| {
            let line = e.position().map_or(0, csv::Position::line);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, csv::Position::line);
        if record.len() < 3 {
            return Err(Error::parse(line, "expected subject_id,label,len,..."));
        }
        let label = match record[1].trim() {
            "1" => Quality::Good,
            "0" => Quality::Poor,
            other => return Err(Error::parse(line, format!("bad label `{other}`"))),
        };
        let len: usize = record[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("bad length `{}`", &record[2])))?;
        if record.len() != 3 + len {
            return Err(Error::parse(
                line,
                format!("row declares {len} values but carries {}", record.len() - 3),
            ));
        }
        let mut awake = Vec::with_capacity(len);
        for i in 0..len {
            let v: f64 = record[3 + i]
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("bad count `{}`", &record[3 + i])))?;
            if v < 0.0 {
                return Err(Error::parse(line, format!("negative count {v}")));
            }
            awake.push(v);
        }
        records.push(TrainingRecord {
            subject_id: record[0].to_string(),
            awake,
            label,
        });
    }
    Ok(records)
}

//! Parsing and minute aggregation of raw accelerometer epoch files.
//!
//! Input is CSV with header `subject_id,timestamp_iso8601,axis_x,axis_y,axis_z`
//! (timestamps must carry an explicit UTC offset). Counts are integers at
//! parse time; they are promoted to floating point only at the dataset
//! boundary.

use crate::error::{Error, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Read, Write};

/// Which accelerometer axis carries the designated "vertical" magnitude.
/// Device-specific; the original study never states it, so it is
/// configuration (default `Y`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerticalAxis {
    X,
    Y,
    Z,
}

impl VerticalAxis {
    fn index(self) -> usize {
        match self {
            VerticalAxis::X => 0,
            VerticalAxis::Y => 1,
            VerticalAxis::Z => 2,
        }
    }
}

impl Default for VerticalAxis {
    fn default() -> Self {
        VerticalAxis::Y
    }
}

impl std::str::FromStr for VerticalAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(VerticalAxis::X),
            "y" | "Y" => Ok(VerticalAxis::Y),
            "z" | "Z" => Ok(VerticalAxis::Z),
            other => Err(Error::invalid(format!("unknown vertical axis `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct IngestConfig {
    pub vertical_axis: VerticalAxis,
    /// Runs of missing epochs up to this many minutes are filled with
    /// zero-count epochs flagged `imputed`; longer gaps split the series.
    pub gap_limit_min: u32,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            vertical_axis: VerticalAxis::default(),
            gap_limit_min: 5,
        }
    }
}

/// One accelerometer epoch: a timestamp plus three non-negative axis counts
/// and the designated vertical count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Epoch {
    pub timestamp: DateTime<Utc>,
    pub axis_counts: [u32; 3],
    pub vertical: u32,
    /// True for gap-filled zero epochs.
    pub imputed: bool,
}

impl Epoch {
    /// Total movement across all three axes.
    pub fn total(&self) -> u64 {
        self.axis_counts.iter().map(|&c| u64::from(c)).sum()
    }
}

/// A contiguous block of epochs for one subject: consecutive timestamps
/// differ by exactly `epoch_length_s` and the block is non-empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpochSeries {
    pub subject_id: String,
    pub epoch_length_s: u32,
    pub epochs: Vec<Epoch>,
}

impl EpochSeries {
    pub fn start(&self) -> DateTime<Utc> {
        self.epochs[0].timestamp
    }

    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    /// Checks the series invariants: non-empty, strictly increasing
    /// timestamps spaced exactly `epoch_length_s` apart.
    pub fn validate(&self) -> Result<()> {
        if self.epochs.is_empty() {
            return Err(Error::invalid(format!("series {} is empty", self.subject_id)));
        }
        for pair in self.epochs.windows(2) {
            let delta = (pair[1].timestamp - pair[0].timestamp).num_seconds();
            if delta != i64::from(self.epoch_length_s) {
                return Err(Error::invalid(format!(
                    "series {}: epochs at {} and {} are {delta}s apart, expected {}s",
                    self.subject_id, pair[0].timestamp, pair[1].timestamp, self.epoch_length_s
                )));
            }
        }
        Ok(())
    }
}

const HEADER: [&str; 5] = ["subject_id", "timestamp_iso8601", "axis_x", "axis_y", "axis_z"];

fn parse_count(field: &str, name: &str, line: u64) -> Result<u32> {
    field.trim().parse::<u32>().map_err(|_| {
        Error::parse(
            line,
            format!("{name} count `{field}` is not a non-negative integer"),
        )
    })
}

/// Parses the epoch CSV schema into per-subject series.
///
/// Rows may arrive in any order; each subject's epochs are sorted by
/// timestamp. Duplicate (subject, timestamp) pairs, negative counts and
/// malformed rows are rejected with their line number. Small gaps are filled
/// with imputed zero epochs; gaps longer than the configured limit split a
/// subject into separate contiguous series.
pub fn parse_epoch_csv(reader: impl Read, cfg: &IngestConfig) -> Result<Vec<EpochSeries>> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    {
        let headers = csv_reader
            .headers()
            .map_err(|e| Error::parse(1, e.to_string()))?;
        let got: Vec<&str> = headers.iter().map(str::trim).collect();
        if got != HEADER {
            return Err(Error::parse(
                1,
                format!("expected header {:?}, got {:?}", HEADER.join(","), got.join(",")),
            ));
        }
    }

    // subject -> (timestamp, counts, source line)
    let mut by_subject: BTreeMap<String, Vec<(DateTime<Utc>, [u32; 3], u64)>> = BTreeMap::new();
    for row in csv_reader.records() {
        let record = row.map_err(|e| {
            let line = e.position().map_or(0, csv::Position::line);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, csv::Position::line);
        if record.len() != 5 {
            return Err(Error::parse(line, format!("expected 5 fields, got {}", record.len())));
        }
        let subject = record[0].trim();
        if subject.is_empty() {
            return Err(Error::parse(line, "empty subject_id"));
        }
        let ts = DateTime::parse_from_rfc3339(record[1].trim())
            .map_err(|e| Error::parse(line, format!("bad timestamp `{}`: {e}", &record[1])))?
            .with_timezone(&Utc);
        let counts = [
            parse_count(&record[2], "axis_x", line)?,
            parse_count(&record[3], "axis_y", line)?,
            parse_count(&record[4], "axis_z", line)?,
        ];
        by_subject.entry(subject.to_string()).or_default().push((ts, counts, line));
    }

    let mut out = Vec::new();
    for (subject, mut rows) in by_subject {
        rows.sort_by_key(|(ts, _, line)| (*ts, *line));
        for pair in rows.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::parse(
                    pair[1].2,
                    format!("duplicate timestamp {} for subject {subject}", pair[0].0),
                ));
            }
        }

        // epoch length: the smallest spacing; every spacing must be a
        // multiple of it, otherwise the file is irregular
        let epoch_len = if rows.len() == 1 {
            60
        } else {
            rows.windows(2)
                .map(|p| (p[1].0 - p[0].0).num_seconds())
                .min()
                .unwrap() as u32
        };
        for pair in rows.windows(2) {
            let delta = (pair[1].0 - pair[0].0).num_seconds();
            if delta % i64::from(epoch_len) != 0 {
                return Err(Error::parse(
                    pair[1].2,
                    format!(
                        "irregular epoch spacing for subject {subject}: {delta}s is not a multiple of {epoch_len}s"
                    ),
                ));
            }
        }

        let gap_limit_s = i64::from(cfg.gap_limit_min) * 60;
        let axis = cfg.vertical_axis.index();
        let mut blocks: Vec<Vec<Epoch>> = vec![Vec::new()];
        let mut prev_ts: Option<DateTime<Utc>> = None;
        for (ts, counts, _) in rows {
            if let Some(prev) = prev_ts {
                let missing_s = (ts - prev).num_seconds() - i64::from(epoch_len);
                if missing_s > gap_limit_s {
                    blocks.push(Vec::new());
                } else if missing_s > 0 {
                    let block = blocks.last_mut().unwrap();
                    let n_missing = missing_s / i64::from(epoch_len);
                    for k in 1..=n_missing {
                        block.push(Epoch {
                            timestamp: prev + chrono::Duration::seconds(k * i64::from(epoch_len)),
                            axis_counts: [0, 0, 0],
                            vertical: 0,
                            imputed: true,
                        });
                    }
                }
            }
            blocks.last_mut().unwrap().push(Epoch {
                timestamp: ts,
                axis_counts: counts,
                vertical: counts[axis],
                imputed: false,
            });
            prev_ts = Some(ts);
        }

        for epochs in blocks {
            if epochs.is_empty() {
                continue;
            }
            let series = EpochSeries {
                subject_id: subject.clone(),
                epoch_length_s: epoch_len,
                epochs,
            };
            debug_assert!(series.validate().is_ok());
            out.push(series);
        }
    }
    Ok(out)
}

/// Writes series back out in the ingest CSV schema.
pub fn write_epoch_csv(series: &[&EpochSeries], writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER).map_err(|e| Error::Format(e.to_string()))?;
    for s in series {
        for e in &s.epochs {
            w.write_record([
                s.subject_id.as_str(),
                &e.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
                &e.axis_counts[0].to_string(),
                &e.axis_counts[1].to_string(),
                &e.axis_counts[2].to_string(),
            ])
            .map_err(|e| Error::Format(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Sums sub-minute epochs into minute epochs, per axis. A series already at
/// minute resolution is returned unchanged.
pub fn aggregate_to_minutes(series: &EpochSeries) -> Result<EpochSeries> {
    if series.epochs.is_empty() {
        return Err(Error::invalid("cannot aggregate an empty series"));
    }
    if series.epoch_length_s == 60 {
        return Ok(series.clone());
    }
    if series.epoch_length_s == 0 || 60 % series.epoch_length_s != 0 {
        return Err(Error::invalid(format!(
            "epoch length {}s does not divide one minute",
            series.epoch_length_s
        )));
    }
    let per_minute = (60 / series.epoch_length_s) as usize;
    let mut epochs = Vec::with_capacity(series.epochs.len().div_ceil(per_minute));
    for chunk in series.epochs.chunks(per_minute) {
        let mut counts = [0u32; 3];
        let mut vertical = 0u32;
        let mut imputed = false;
        for e in chunk {
            for (acc, &c) in counts.iter_mut().zip(&e.axis_counts) {
                *acc += c;
            }
            vertical += e.vertical;
            imputed |= e.imputed;
        }
        epochs.push(Epoch {
            timestamp: chunk[0].timestamp,
            axis_counts: counts,
            vertical,
            imputed,
        });
    }
    Ok(EpochSeries {
        subject_id: series.subject_id.clone(),
        epoch_length_s: 60,
        epochs,
    })
}

/// The per-minute vertical counts of a minute-resolution series, promoted to
/// floating point.
pub fn vertical_series(series: &EpochSeries) -> Vec<f64> {
    series.epochs.iter().map(|e| f64::from(e.vertical)).collect()
}

//! Sleep-period detection and sleep-efficiency scoring.
//!
//! Works on minute-resolution series. A minute is a *sleep candidate* when
//! its total triaxial count is at or below `sleep_count_threshold` (default
//! 0: no movement on any axis), and *sedentary* when the total is strictly
//! below `sedentary_cutpoint`.
//!
//! Boundaries follow the 15/30 rule: sleep onset is the first minute of a
//! run of at least `onset_run_min` consecutive sleep-candidate minutes;
//! sleep awakening is the last minute of the final such run that is followed
//! by `post_awakening_activity_min` minutes in which activity occurs — read
//! as: the window contains at least one non-candidate minute and no new
//! qualifying sleep run begins inside it. Two qualifying runs whose gap does
//! not satisfy the awakening rule belong to the same sleep period. A run
//! whose follow-up window extends past the end of the series cannot be
//! confirmed as an awakening, so a recording that stops mid-sleep yields no
//! period for that final block.

use crate::error::{Error, Result};
use crate::ingest::EpochSeries;
use serde::{Deserialize, Serialize};

/// Night quality label: Good iff sleep efficiency exceeds 0.85.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quality {
    Good,
    Poor,
}

impl Quality {
    /// Numeric encoding used for training: Good is the positive class.
    pub fn as_f64(self) -> f64 {
        match self {
            Quality::Good => 1.0,
            Quality::Poor => 0.0,
        }
    }
}

impl std::fmt::Display for Quality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quality::Good => write!(f, "Good"),
            Quality::Poor => write!(f, "Poor"),
        }
    }
}

impl std::str::FromStr for Quality {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Good" | "good" | "1" => Ok(Quality::Good),
            "Poor" | "poor" | "0" => Ok(Quality::Poor),
            other => Err(Error::invalid(format!("unknown quality label `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentationConfig {
    /// Counts per minute at or below which a minute is a sleep candidate.
    pub sleep_count_threshold: u64,
    /// Counts per minute strictly below which a minute is sedentary.
    pub sedentary_cutpoint: u64,
    pub onset_run_min: usize,
    pub awakening_run_min: usize,
    pub post_awakening_activity_min: usize,
    /// Wake runs inside a sleep period count toward WASO only when strictly
    /// longer than this many minutes.
    pub waso_run_min: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            sleep_count_threshold: 0,
            sedentary_cutpoint: 100,
            onset_run_min: 15,
            awakening_run_min: 15,
            post_awakening_activity_min: 30,
            waso_run_min: 5,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.onset_run_min == 0
            || self.awakening_run_min == 0
            || self.post_awakening_activity_min == 0
            || self.waso_run_min == 0
        {
            return Err(Error::invalid("segmentation run lengths must be positive"));
        }
        if self.sleep_count_threshold > self.sedentary_cutpoint {
            return Err(Error::invalid(
                "sleep_count_threshold must not exceed sedentary_cutpoint",
            ));
        }
        Ok(())
    }
}

/// One detected sleep period. All indices are 0-based minutes into the
/// series; `onset` and `awakening` are inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SleepPeriod {
    pub bedtime: usize,
    pub onset: usize,
    pub awakening: usize,
    pub waso_min: usize,
    pub latency_min: usize,
    pub efficiency: f64,
    pub label: Quality,
}

impl SleepPeriod {
    /// Minutes from onset to awakening, inclusive.
    pub fn length_min(&self) -> usize {
        self.awakening - self.onset + 1
    }
}

fn minute_totals(series: &EpochSeries) -> Result<Vec<u64>> {
    if series.epoch_length_s != 60 {
        return Err(Error::invalid(format!(
            "segmentation requires minute resolution, got {}s epochs",
            series.epoch_length_s
        )));
    }
    Ok(series.epochs.iter().map(|e| e.total()).collect())
}

fn is_candidate(total: u64, cfg: &SegmentationConfig) -> bool {
    total <= cfg.sleep_count_threshold
}

fn is_sedentary(total: u64, cfg: &SegmentationConfig) -> bool {
    total < cfg.sedentary_cutpoint
}

/// Maximal runs of consecutive sleep-candidate minutes, as inclusive
/// (start, end) pairs.
fn candidate_runs(candidate: &[bool]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &c) in candidate.iter().enumerate() {
        match (c, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, candidate.len() - 1));
    }
    runs
}

/// The awakening rule for a run ending at `end`: the following window of
/// `post_awakening_activity_min` minutes must exist in full, contain at
/// least one non-candidate minute, and contain no start of a new qualifying
/// sleep run.
fn awakening_window_ok(
    candidate: &[bool],
    runs: &[(usize, usize)],
    end: usize,
    cfg: &SegmentationConfig,
) -> bool {
    let window_end = end + cfg.post_awakening_activity_min;
    if window_end > candidate.len() - 1 {
        return false;
    }
    let has_activity = candidate[end + 1..=window_end].iter().any(|&c| !c);
    if !has_activity {
        return false;
    }
    !runs.iter().any(|&(s, e)| {
        s > end && s <= window_end && e - s + 1 >= cfg.onset_run_min
    })
}

/// Detects all sleep periods in a minute-resolution series, in order.
/// A series with no qualifying run yields an empty list.
pub fn detect_sleep_periods(series: &EpochSeries, cfg: &SegmentationConfig) -> Result<Vec<SleepPeriod>> {
    cfg.validate()?;
    let totals = minute_totals(series)?;
    let candidate: Vec<bool> = totals.iter().map(|&t| is_candidate(t, cfg)).collect();
    let runs = candidate_runs(&candidate);

    let mut periods = Vec::new();
    let mut open_onset: Option<usize> = None;
    for &(start, end) in &runs {
        let len = end - start + 1;
        if open_onset.is_none() {
            if len >= cfg.onset_run_min {
                open_onset = Some(start);
            } else {
                continue;
            }
        }
        if len >= cfg.awakening_run_min && awakening_window_ok(&candidate, &runs, end, cfg) {
            let onset = open_onset.take().unwrap();
            let bedtime = bedtime_from_totals(&totals, onset, cfg);
            let waso_min = waso_from_totals(&totals, onset, end, cfg);
            let latency_min = onset - bedtime;
            let length = end - onset + 1;
            let efficiency = sleep_efficiency(length, waso_min, latency_min);
            periods.push(SleepPeriod {
                bedtime,
                onset,
                awakening: end,
                waso_min,
                latency_min,
                efficiency,
                label: label_from_efficiency(efficiency),
            });
        }
    }
    Ok(periods)
}

fn bedtime_from_totals(totals: &[u64], onset: usize, cfg: &SegmentationConfig) -> usize {
    let mut first = onset;
    while first > 0 && is_sedentary(totals[first - 1], cfg) {
        first -= 1;
    }
    first
}

/// First minute of the maximal sedentary run immediately preceding and
/// adjacent to `candidate_onset`; the onset itself when no sedentary minute
/// precedes it.
pub fn infer_bedtime(series: &EpochSeries, candidate_onset: usize, cfg: &SegmentationConfig) -> Result<usize> {
    let totals = minute_totals(series)?;
    if candidate_onset >= totals.len() {
        return Err(Error::invalid(format!(
            "onset {candidate_onset} is outside the series of {} minutes",
            totals.len()
        )));
    }
    Ok(bedtime_from_totals(&totals, candidate_onset, cfg))
}

fn waso_from_totals(totals: &[u64], onset: usize, awakening: usize, cfg: &SegmentationConfig) -> usize {
    if awakening <= onset + 1 {
        return 0;
    }
    let mut waso = 0;
    let mut run = 0;
    // wake runs strictly inside (onset, awakening)
    for &t in &totals[onset + 1..awakening] {
        if !is_candidate(t, cfg) {
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
    waso
}

/// Total minutes of wakefulness runs longer than `waso_run_min` strictly
/// between onset and awakening.
pub fn compute_waso(series: &EpochSeries, onset: usize, awakening: usize, cfg: &SegmentationConfig) -> Result<usize> {
    let totals = minute_totals(series)?;
    if awakening >= totals.len() || onset > awakening {
        return Err(Error::invalid("period bounds outside the series"));
    }
    Ok(waso_from_totals(&totals, onset, awakening, cfg))
}

/// Sedentary lead-in between bedtime and onset.
pub fn compute_latency(period: &SleepPeriod) -> usize {
    period.onset - period.bedtime
}

/// Eq. for sleep efficiency: `(len - WASO) / (len + latency)` where `len` is
/// the inclusive onset-to-awakening length in minutes.
pub fn sleep_efficiency(length_min: usize, waso_min: usize, latency_min: usize) -> f64 {
    (length_min as f64 - waso_min as f64) / (length_min as f64 + latency_min as f64)
}

/// Good iff efficiency is strictly greater than 0.85.
pub fn label_from_efficiency(efficiency: f64) -> Quality {
    if efficiency > 0.85 {
        Quality::Good
    } else {
        Quality::Poor
    }
}

pub const PERIOD_CSV_HEADER: &str =
    "subject_id,bedtime,onset,awakening,waso_min,latency_min,efficiency,label";

/// Writes one CSV row per period: the `segment` subcommand format.
pub fn write_periods_csv<'a, W: std::io::Write>(
    rows: impl Iterator<Item = (&'a str, &'a SleepPeriod)>,
    mut writer: W,
) -> Result<()> {
    writeln!(writer, "{PERIOD_CSV_HEADER}")?;
    for (subject, p) in rows {
        writeln!(
            writer,
            "{subject},{},{},{},{},{},{},{}",
            p.bedtime, p.onset, p.awakening, p.waso_min, p.latency_min, p.efficiency, p.label
        )?;
    }
    Ok(())
}

/// Reads a periods CSV written by [`write_periods_csv`].
pub fn read_periods_csv(reader: impl std::io::Read) -> Result<Vec<(String, SleepPeriod)>> {
    let mut text = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut text)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == PERIOD_CSV_HEADER => {}
        _ => return Err(Error::parse(1, format!("expected header `{PERIOD_CSV_HEADER}`"))),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line_no = idx as u64 + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::parse(line_no, format!("expected 8 fields, got {}", fields.len())));
        }
        let num = |i: usize| -> Result<usize> {
            fields[i]
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad integer `{}`", fields[i])))
        };
        let efficiency: f64 = fields[6]
            .trim()
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad efficiency `{}`", fields[6])))?;
        out.push((
            fields[0].to_string(),
            SleepPeriod {
                bedtime: num(1)?,
                onset: num(2)?,
                awakening: num(3)?,
                waso_min: num(4)?,
                latency_min: num(5)?,
                efficiency,
                label: fields[7].trim().parse()?,
            },
        ));
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ingest::{Epoch, EpochSeries};
    use chrono::{TimeZone, Utc};

    /// Minute series whose per-minute totals are the given values.
    pub(crate) fn minute_series(totals: &[u32]) -> EpochSeries {
        let start = Utc.with_ymd_and_hms(2017, 3, 1, 0, 0, 0).unwrap();
        EpochSeries {
            subject_id: "t".into(),
            epoch_length_s: 60,
            epochs: totals
                .iter()
                .enumerate()
                .map(|(i, &t)| Epoch {
                    timestamp: start + chrono::Duration::minutes(i as i64),
                    axis_counts: [t, 0, 0],
                    vertical: t,
                    imputed: false,
                })
                .collect(),
        }
    }

    fn cfg() -> SegmentationConfig {
        SegmentationConfig::default()
    }

    #[test]
    fn single_night_with_sedentary_lead_in() {
        // 120 sedentary minutes, 480 zero-count minutes, 60 active minutes
        let mut totals = vec![50u32; 120];
        totals.extend(vec![0u32; 480]);
        totals.extend(vec![500u32; 60]);
        let series = minute_series(&totals);
        let periods = detect_sleep_periods(&series, &cfg()).unwrap();
        assert_eq!(periods.len(), 1);
        let p = &periods[0];
        assert_eq!(p.onset, 120);
        assert_eq!(p.awakening, 599);
        assert_eq!(p.bedtime, 0);
        assert_eq!(p.latency_min, 120);
        assert_eq!(p.waso_min, 0);
    }

    #[test]
    fn all_active_series_has_no_period() {
        let series = minute_series(&vec![300u32; 600]);
        assert!(detect_sleep_periods(&series, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn two_nights_give_two_ordered_periods() {
        let mut totals = vec![40u32; 30];
        totals.extend(vec![0u32; 400]); // night 1
        totals.extend(vec![600u32; 700]); // full active day
        totals.extend(vec![40u32; 20]);
        totals.extend(vec![0u32; 450]); // night 2
        totals.extend(vec![600u32; 60]);
        let series = minute_series(&totals);
        let periods = detect_sleep_periods(&series, &cfg()).unwrap();
        assert_eq!(periods.len(), 2);
        assert!(periods[0].awakening < periods[1].onset);
        assert_eq!(periods[0].onset, 30);
        assert_eq!(periods[1].onset, 30 + 400 + 700 + 20);
    }

    #[test]
    fn short_sleep_run_never_opens_a_period() {
        let mut totals = vec![500u32; 50];
        totals.extend(vec![0u32; 14]); // one minute short of qualifying
        totals.extend(vec![500u32; 50]);
        let series = minute_series(&totals);
        assert!(detect_sleep_periods(&series, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn recording_ending_mid_sleep_yields_no_period() {
        let mut totals = vec![500u32; 50];
        totals.extend(vec![0u32; 200]); // series ends while asleep
        let series = minute_series(&totals);
        assert!(detect_sleep_periods(&series, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn nearby_sleep_runs_merge_into_one_period() {
        // two 100-minute sleep runs separated by 10 wake minutes: the second
        // run starts inside the 30-minute window, so no awakening between them
        let mut totals = vec![500u32; 40];
        totals.extend(vec![0u32; 100]);
        totals.extend(vec![400u32; 10]);
        totals.extend(vec![0u32; 100]);
        totals.extend(vec![500u32; 60]);
        let series = minute_series(&totals);
        let periods = detect_sleep_periods(&series, &cfg()).unwrap();
        assert_eq!(periods.len(), 1);
        assert_eq!(periods[0].onset, 40);
        assert_eq!(periods[0].awakening, 40 + 100 + 10 + 100 - 1);
        assert_eq!(periods[0].waso_min, 10);
    }

    #[test]
    fn bedtime_walks_back_over_the_sedentary_run() {
        // active prefix, 10 sedentary minutes, onset at t=50
        let mut totals = vec![800u32; 40];
        totals.extend(vec![50u32; 10]);
        totals.extend(vec![0u32; 300]);
        totals.extend(vec![800u32; 40]);
        let series = minute_series(&totals);
        assert_eq!(infer_bedtime(&series, 50, &cfg()).unwrap(), 40);
    }

    #[test]
    fn bedtime_equals_onset_when_preceding_minute_is_active() {
        let mut totals = vec![800u32; 50];
        totals.extend(vec![0u32; 300]);
        totals.extend(vec![800u32; 40]);
        let series = minute_series(&totals);
        assert_eq!(infer_bedtime(&series, 50, &cfg()).unwrap(), 50);
    }

    #[test]
    fn fully_sedentary_prefix_gives_bedtime_zero() {
        let mut totals = vec![20u32; 50];
        totals.extend(vec![0u32; 300]);
        totals.extend(vec![800u32; 40]);
        let series = minute_series(&totals);
        assert_eq!(infer_bedtime(&series, 50, &cfg()).unwrap(), 0);
    }

    #[test]
    fn bedtime_out_of_range_is_an_error() {
        let series = minute_series(&[0u32; 10]);
        assert!(infer_bedtime(&series, 10, &cfg()).is_err());
    }

    #[test]
    fn waso_counts_only_runs_longer_than_five_minutes() {
        // sleep with a 7-minute and a 3-minute wake run inside
        let mut totals = vec![0u32; 100];
        totals.extend(vec![400u32; 7]);
        totals.extend(vec![0u32; 100]);
        totals.extend(vec![400u32; 3]);
        totals.extend(vec![0u32; 100]);
        let series = minute_series(&totals);
        let waso = compute_waso(&series, 0, totals.len() - 1, &cfg()).unwrap();
        assert_eq!(waso, 7);
    }

    #[test]
    fn waso_of_uninterrupted_sleep_is_zero() {
        let series = minute_series(&[0u32; 200]);
        assert_eq!(compute_waso(&series, 0, 199, &cfg()).unwrap(), 0);
    }

    #[test]
    fn exactly_five_minute_runs_do_not_count() {
        let mut totals = vec![0u32; 50];
        totals.extend(vec![400u32; 5]);
        totals.extend(vec![0u32; 50]);
        totals.extend(vec![400u32; 6]);
        totals.extend(vec![0u32; 50]);
        let series = minute_series(&totals);
        assert_eq!(compute_waso(&series, 0, totals.len() - 1, &cfg()).unwrap(), 6);
    }

    #[test]
    fn latency_is_onset_minus_bedtime() {
        let p = SleepPeriod {
            bedtime: 40,
            onset: 50,
            awakening: 500,
            waso_min: 0,
            latency_min: 10,
            efficiency: 1.0,
            label: Quality::Good,
        };
        assert_eq!(compute_latency(&p), 10);
    }

    #[test]
    fn efficiency_matches_the_stated_arithmetic() {
        let eff = sleep_efficiency(480, 20, 10);
        assert!((eff - 460.0 / 490.0).abs() < 1e-12);
        assert_eq!(label_from_efficiency(eff), Quality::Good);

        let eff = sleep_efficiency(480, 100, 60);
        assert!((eff - 380.0 / 540.0).abs() < 1e-12);
        assert_eq!(label_from_efficiency(eff), Quality::Poor);

        assert_eq!(sleep_efficiency(480, 0, 0), 1.0);
    }

    #[test]
    fn boundary_efficiency_is_poor() {
        assert_eq!(label_from_efficiency(0.85), Quality::Poor);
        assert_eq!(label_from_efficiency(0.8500001), Quality::Good);
    }

    #[test]
    fn detected_periods_start_with_fifteen_candidates() {
        let mut totals = vec![77u32; 33];
        totals.extend(vec![0u32; 120]);
        totals.extend(vec![900u32; 45]);
        let series = minute_series(&totals);
        let periods = detect_sleep_periods(&series, &cfg()).unwrap();
        assert_eq!(periods.len(), 1);
        let p = &periods[0];
        for m in p.onset..p.onset + 15 {
            assert_eq!(series.epochs[m].total(), 0);
        }
        assert!(p.efficiency >= 0.0 && p.efficiency <= 1.0);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut bad = cfg();
        bad.sleep_count_threshold = 500;
        bad.sedentary_cutpoint = 100;
        let series = minute_series(&[0u32; 10]);
        assert!(detect_sleep_periods(&series, &bad).is_err());
    }
}

//! Randomized equality between the run-based detector and the brute-force
//! index-by-index scanner, plus structural properties.

mod common;

use actisleep_core::rng::stream;
use actisleep_core::segmentation::{detect_sleep_periods, SegmentationConfig};
use common::{oracle_periods, random_totals, series_from_totals};
use rand::Rng;

#[test]
fn detector_matches_brute_force_scanner_on_random_series() {
    let cfg = SegmentationConfig::default();
    let mut rng = stream(500, "seg-oracle", 0);
    let mut non_empty = 0usize;
    for trial in 0..300 {
        let totals = random_totals(&mut rng, 2000);
        let series = series_from_totals(&totals);
        let got = detect_sleep_periods(&series, &cfg).unwrap();
        let want = oracle_periods(&totals, &cfg);
        assert_eq!(got, want, "trial {trial} (len {})", totals.len());
        non_empty += usize::from(!got.is_empty());
    }
    // the generator must actually exercise detection
    assert!(non_empty > 100, "only {non_empty} series produced periods");
}

#[test]
fn detector_matches_scanner_under_varied_configs() {
    let mut rng = stream(501, "seg-oracle-cfg", 0);
    for trial in 0..100 {
        let cfg = SegmentationConfig {
            sleep_count_threshold: [0, 0, 0, 20][trial % 4],
            sedentary_cutpoint: [100, 100, 250, 100][trial % 4],
            onset_run_min: [15, 10, 15, 20][trial % 4],
            awakening_run_min: [15, 10, 20, 15][trial % 4],
            post_awakening_activity_min: [30, 20, 30, 45][trial % 4],
            waso_run_min: [5, 3, 5, 8][trial % 4],
        };
        let totals = random_totals(&mut rng, 1500);
        let series = series_from_totals(&totals);
        let got = detect_sleep_periods(&series, &cfg).unwrap();
        let want = oracle_periods(&totals, &cfg);
        assert_eq!(got, want, "trial {trial}");
    }
}

#[test]
fn every_period_opens_with_fifteen_candidates() {
    let cfg = SegmentationConfig::default();
    let mut rng = stream(502, "seg-onset", 0);
    for _ in 0..200 {
        let totals = random_totals(&mut rng, 1200);
        let series = series_from_totals(&totals);
        for p in detect_sleep_periods(&series, &cfg).unwrap() {
            for m in p.onset..p.onset + cfg.onset_run_min {
                assert!(totals[m] <= cfg.sleep_count_threshold);
            }
            assert!(p.efficiency >= 0.0 && p.efficiency <= 1.0);
            assert!(p.bedtime <= p.onset && p.onset < p.awakening);
            assert!(p.waso_min <= p.awakening - p.onset + 1);
        }
    }
}

#[test]
fn periods_never_overlap_and_stay_ordered() {
    let cfg = SegmentationConfig::default();
    let mut rng = stream(503, "seg-order", 0);
    for _ in 0..200 {
        let totals = random_totals(&mut rng, 3000);
        let series = series_from_totals(&totals);
        let periods = detect_sleep_periods(&series, &cfg).unwrap();
        for pair in periods.windows(2) {
            assert!(pair[0].awakening < pair[1].onset);
        }
    }
}

#[test]
fn shifting_timestamps_leaves_minute_boundaries_fixed() {
    // boundaries are minute indices into the series, so a pure time shift of
    // the series start moves every absolute boundary time by the same amount
    use actisleep_core::ingest::{Epoch, EpochSeries};
    use chrono::{Duration, TimeZone, Utc};

    let cfg = SegmentationConfig::default();
    let mut rng = stream(504, "seg-shift", 0);
    let totals = random_totals(&mut rng, 2000);
    let series = series_from_totals(&totals);
    let baseline = detect_sleep_periods(&series, &cfg).unwrap();

    let shift = Duration::hours(rng.random_range(1..240));
    let start = Utc.with_ymd_and_hms(2017, 3, 1, 0, 0, 0).unwrap() + shift;
    let shifted = EpochSeries {
        subject_id: series.subject_id.clone(),
        epoch_length_s: 60,
        epochs: series
            .epochs
            .iter()
            .enumerate()
            .map(|(i, e)| Epoch {
                timestamp: start + Duration::minutes(i as i64),
                ..e.clone()
            })
            .collect(),
    };
    let moved = detect_sleep_periods(&shifted, &cfg).unwrap();
    assert_eq!(baseline, moved);
}

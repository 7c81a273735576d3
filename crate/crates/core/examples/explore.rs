// Scratch experiment: planted-signal learnability across the five
// architectures. Used to tune the synthetic generator.

use actisleep_core::dataset::{prepare, subject_split, DatasetSplit, InputRepr, ReprConfig, SmoteParams};
use actisleep_core::eval::roc_curve;
use actisleep_core::models::{ArchSpec, InitScheme, ModelSpec};
use actisleep_core::segmentation::{detect_sleep_periods, Quality, SegmentationConfig};
use actisleep_core::synth::{generate, CohortSpec, SignalKind};
use actisleep_core::train::{score_all, train, TrainConfig};
use std::time::Instant;

fn build_split(seed: u64, signal: SignalKind, n_subjects: usize, days: usize) -> DatasetSplit {
    let spec = CohortSpec {
        n_subjects,
        days,
        seed,
        signal,
        noise_level: 0.35,
    };
    let cohort = generate(&spec).unwrap();
    let seg = SegmentationConfig::default();
    let mut records = Vec::new();
    for s in &cohort.series {
        let periods = detect_sleep_periods(s, &seg).unwrap();
        records.extend(actisleep_core::dataset::build_records(s, &periods));
    }
    let good = records.iter().filter(|r| r.label == Quality::Good).count();
    eprintln!(
        "records: {} ({} good / {} poor)",
        records.len(),
        good,
        records.len() - good
    );
    subject_split(records, seed).unwrap()
}

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7u64);
    let signal = match std::env::args().nth(2).as_deref() {
        Some("none") => SignalKind::None,
        Some("linear") => SignalKind::Linear,
        _ => SignalKind::Nonlinear,
    };
    let split = build_split(seed, signal, 92, 7);
    let max_len = ReprConfig::max_awake_len(&split.train);
    eprintln!(
        "split: {} train / {} val / {} test, max awake {}",
        split.train.len(),
        split.validation.len(),
        split.test.len(),
        max_len
    );

    let smote = Some(SmoteParams { k: 5, seed });
    let raw = ReprConfig::new(InputRepr::RawPadded, max_len, 1);
    let pseudo = ReprConfig::new(InputRepr::PseudoSeq, max_len, 100);

    let archs: Vec<(ModelSpec, &ReprConfig)> = vec![
        (
            ModelSpec {
                arch: ArchSpec::Lr,
                input_repr: InputRepr::RawPadded,
                input_len: max_len,
                slot_width: 1,
                dropout: 0.0,
                minibatch: 10,
            },
            &raw,
        ),
        (
            ModelSpec {
                arch: ArchSpec::Mlp { hidden: 15 },
                input_repr: InputRepr::RawPadded,
                input_len: max_len,
                slot_width: 1,
                dropout: 0.1,
                minibatch: 10,
            },
            &raw,
        ),
        (
            ModelSpec {
                arch: ArchSpec::Cnn { filters: 25, filter_len: 5, pool_len: 4 },
                input_repr: InputRepr::RawPadded,
                input_len: max_len,
                slot_width: 1,
                dropout: 0.0,
                minibatch: 10,
            },
            &raw,
        ),
        (
            ModelSpec {
                arch: ArchSpec::Rnn { hidden: 50 },
                input_repr: InputRepr::PseudoSeq,
                input_len: max_len.div_ceil(100) * 100,
                slot_width: 100,
                dropout: 0.1,
                minibatch: 10,
            },
            &pseudo,
        ),
        (
            ModelSpec {
                arch: ArchSpec::Lstm { hidden: 50, hard_tanh: false },
                input_repr: InputRepr::PseudoSeq,
                input_len: max_len.div_ceil(100) * 100,
                slot_width: 100,
                dropout: 0.1,
                minibatch: 10,
            },
            &pseudo,
        ),
    ];

    let total = Instant::now();
    for (spec, repr) in archs {
        let t0 = Instant::now();
        let data = prepare(&split, repr, smote).unwrap();
        let cfg = TrainConfig {
            max_epochs: 50,
            patience: 8,
            seed,
            init: InitScheme::SmallUniform,
            ..TrainConfig::default()
        };
        match train(&spec, &data, &cfg) {
            Ok(outcome) => {
                let scores = score_all(&outcome.model, &data.test_inputs).unwrap();
                let labels: Vec<bool> = data.test_labels.iter().map(|&y| y > 0.5).collect();
                let (_, auc) = roc_curve(&scores, &labels).unwrap();
                println!(
                    "{:5}  auc {:.4}  best_epoch {:2}  epochs {:2}  {:5.1?}",
                    spec.arch.name(),
                    auc,
                    outcome.best_epoch,
                    outcome.history.len(),
                    t0.elapsed()
                );
            }
            Err(e) => println!("{:5}  FAILED: {e}", spec.arch.name()),
        }
    }
    eprintln!("total {:?}", total.elapsed());
}

// temporary probe: CNN epoch dynamics
use actisleep_core::dataset::{prepare, subject_split, InputRepr, ReprConfig, SmoteParams};
use actisleep_core::eval::roc_curve;
use actisleep_core::models::{ArchSpec, InitScheme, Model, ModelSpec};
use actisleep_core::segmentation::{detect_sleep_periods, SegmentationConfig};
use actisleep_core::synth::{generate, CohortSpec, SignalKind};
use actisleep_core::train::{score_all, train, TrainConfig};

fn main() {
    let seed = 7u64;
    let cohort = generate(&CohortSpec { seed, ..CohortSpec::default() }).unwrap();
    let seg = SegmentationConfig::default();
    let mut records = Vec::new();
    for s in &cohort.series {
        let periods = detect_sleep_periods(s, &seg).unwrap();
        records.extend(actisleep_core::dataset::build_records(s, &periods));
    }
    let split = subject_split(records, seed).unwrap();
    let max_len = ReprConfig::max_awake_len(&split.train);
    let raw = ReprConfig::new(InputRepr::RawPadded, max_len, 1);
    let data = prepare(&split, &raw, Some(SmoteParams { k: 5, seed })).unwrap();
    let data_nosmote = prepare(&split, &raw, None).unwrap();

    for (smote_on, dr, lr, mb) in [
        (false, 0.0, 0.001, 10),
        (false, 0.2, 0.001, 10),
        (false, 0.4, 0.001, 10),
        (true, 0.4, 0.001, 10),
        (false, 0.2, 0.002, 5),
    ] {
        let data = if smote_on { &data } else { &data_nosmote };
        let spec = ModelSpec {
            arch: ArchSpec::Cnn { filters: 25, filter_len: 5, pool_len: 4 },
            input_repr: InputRepr::RawPadded,
            input_len: max_len,
            slot_width: 1,
            dropout: dr,
            minibatch: mb,
        };
        let mut cfg = TrainConfig {
            max_epochs: 30,
            patience: 30,
            seed,
            init: InitScheme::SmallUniform,
            ..TrainConfig::default()
        };
        cfg.optimizer.learning_rate = lr;
        let outcome = train(&spec, data, &cfg).unwrap();
        print!("smote={smote_on} dr={dr} lr={lr} mb={mb}: ");
        let labels: Vec<bool> = data.test_labels.iter().map(|&y| y > 0.5).collect();
        let scores = score_all(&outcome.model, &data.test_inputs).unwrap();
        let (_, test_auc) = roc_curve(&scores, &labels).unwrap();
        println!("best_epoch={} test_auc={:.4}", outcome.best_epoch, test_auc);
        let vl: Vec<String> = outcome.history.iter().map(|e| format!("{:.0}", e.val_loss)).collect();
        println!("  val_loss: {}", vl.join(" "));
        // val AUC per... recompute by retraining not possible; print train loss too
        let tl: Vec<String> = outcome.history.iter().map(|e| format!("{:.0}", e.train_loss)).collect();
        println!("  trn_loss: {}", tl.join(" "));
    }
    let _ = Model::build; // silence unused import if any
}

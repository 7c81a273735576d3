//! Confusion-matrix metrics, ROC curves and AUC.
//!
//! Good is the positive class throughout, so sensitivity equals the recall
//! of Good and specificity is the true-negative rate of Poor. The ROC sweep
//! groups tied scores into a single threshold step; with that convention the
//! trapezoidal area equals the pairwise concordance probability
//! `P(score+ > score-) + 0.5 P(tie)` exactly.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

/// Standard 2x2 counts at the given decision threshold; a score at or above
/// the threshold predicts Good.
pub fn confusion(scores: &[f64], labels: &[bool], threshold: f64) -> Result<ConfusionCounts> {
    if scores.len() != labels.len() {
        return Err(Error::shape(format!(
            "scores ({}) and labels ({}) must align",
            scores.len(),
            labels.len()
        )));
    }
    if scores.is_empty() {
        return Err(Error::invalid("cannot evaluate an empty score set"));
    }
    let mut c = ConfusionCounts {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&score, &label) in scores.iter().zip(labels) {
        match (score >= threshold, label) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// ROC curve points and trapezoidal AUC.
///
/// Thresholds sweep from above the maximum score (everything predicted
/// Poor, the (0,0) corner) down through each distinct score; the lowest
/// threshold predicts everything Good, so (1,1) always appears. For `k`
/// distinct scores the curve has `k + 1` points.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<(Vec<(f64, f64)>, f64)> {
    if scores.len() != labels.len() {
        return Err(Error::shape("scores and labels must align"));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::invalid(
            "ROC needs both classes present in the labels",
        ));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores must not contain NaN"));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut points = vec![(0.0, 0.0)];
    let mut auc = 0.0;
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_fpr, mut prev_tpr) = (0.0f64, 0.0f64);
    let mut i = 0;
    while i < order.len() {
        // consume the whole group of tied scores as one threshold step
        let score = scores[order[i]];
        while i < order.len() && scores[order[i]] == score {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let fpr = fp as f64 / negatives as f64;
        let tpr = tp as f64 / positives as f64;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        points.push((fpr, tpr));
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    Ok((points, auc))
}

/// Everything reported for one model evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub counts: ConfusionCounts,
    pub au_roc: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub roc_points: Vec<(f64, f64)>,
}

/// Computes all metrics at the given threshold (0.5 for probabilities).
pub fn evaluate(scores: &[f64], labels: &[bool], threshold: f64) -> Result<EvalReport> {
    let counts = confusion(scores, labels, threshold)?;
    let (roc_points, au_roc) = roc_curve(scores, labels)?;
    let precision = ratio(counts.tp, counts.tp + counts.fp);
    let recall = ratio(counts.tp, counts.tp + counts.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(EvalReport {
        counts,
        au_roc,
        f1,
        precision,
        recall,
        accuracy: ratio(counts.tp + counts.tn, scores.len()),
        sensitivity: recall,
        specificity: ratio(counts.tn, counts.tn + counts.fp),
        roc_points,
    })
}

const METRICS_HEADER: &str = "au_roc,f1,precision,recall,accuracy,sensitivity,specificity";

/// Writes the metrics row (column order follows the results tables: AU-ROC,
/// F1, Precision, Recall, Accuracy, then Sensitivity and Specificity).
pub fn write_metrics_csv(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{METRICS_HEADER}")?;
    writeln!(
        f,
        "{},{},{},{},{},{},{}",
        report.au_roc,
        report.f1,
        report.precision,
        report.recall,
        report.accuracy,
        report.sensitivity,
        report.specificity
    )?;
    Ok(())
}

/// Reads back a metrics CSV written by [`write_metrics_csv`].
pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<[f64; 7]> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty metrics file".into()))?;
    if header != METRICS_HEADER {
        return Err(Error::Format(format!("unexpected metrics header `{header}`")));
    }
    let row = lines.next().ok_or_else(|| Error::Format("missing metrics row".into()))?;
    let values: Vec<f64> = row
        .split(',')
        .map(|v| v.parse().map_err(|_| Error::Format(format!("bad metric value `{v}`"))))
        .collect::<Result<_>>()?;
    values
        .try_into()
        .map_err(|_| Error::Format("metrics row must carry 7 values".into()))
}

/// Writes ROC points as `fpr,tpr` rows.
pub fn write_roc_csv(points: &[(f64, f64)], path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "fpr,tpr")?;
    for (fpr, tpr) in points {
        writeln!(f, "{fpr},{tpr}")?;
    }
    Ok(())
}

/// Renders the ROC curve as a small standalone SVG.
pub fn write_roc_svg(points: &[(f64, f64)], path: impl AsRef<Path>) -> Result<()> {
    let size = 440.0;
    let margin = 40.0;
    let scale = size - 2.0 * margin;
    let map = |x: f64, y: f64| (margin + x * scale, size - margin - y * scale);
    let mut poly = String::new();
    for &(fpr, tpr) in points {
        let (px, py) = map(fpr, tpr);
        poly.push_str(&format!("{px:.2},{py:.2} "));
    }
    let (dx0, dy0) = map(0.0, 0.0);
    let (dx1, dy1) = map(1.0, 1.0);
    let svg = format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n",
            "<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n",
            "<line x1=\"{dx0}\" y1=\"{dy0}\" x2=\"{dx1}\" y2=\"{dy1}\" stroke=\"#bbbbbb\" stroke-dasharray=\"4\"/>\n",
            "<polyline points=\"{pts}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
            "<text x=\"{tx}\" y=\"{ty}\" font-size=\"13\" fill=\"#333333\">ROC curve</text>\n",
            "</svg>\n"
        ),
        s = size,
        dx0 = dx0,
        dy0 = dy0,
        dx1 = dx1,
        dy1 = dy1,
        pts = poly.trim_end(),
        tx = margin,
        ty = margin - 12.0,
    );
    std::fs::write(path, svg)?;
    Ok(())
}

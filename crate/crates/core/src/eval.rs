//! Dataset splitting, confusion-matrix metrics, ROC/PR curves and
//! feature histograms. Infected is the positive class everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{shuffled_indices_by_class, Label, Sample};
use crate::error::{Error, Result};
use crate::features::{FEATURE_COUNT, FEATURE_NAMES};
use crate::rng::{stream, TAG_SPLIT};

/// Counts with infected as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tnc: usize,
    pub fpc: usize,
    pub fnc: usize,
    pub tpc: usize,
}

impl ConfusionMatrix {
    pub fn new(tnc: usize, fpc: usize, fnc: usize, tpc: usize) -> Self {
        Self { tnc, fpc, fnc, tpc }
    }

    pub fn total(&self) -> usize {
        self.tnc + self.fpc + self.fnc + self.tpc
    }

    pub fn accuracy(&self) -> f64 {
        (self.tnc + self.tpc) as f64 / self.total() as f64
    }
}

/// Precision/recall/F1 derived from a confusion matrix. When a
/// denominator vanishes the value is reported as 0 and `degenerate`
/// is set instead of erroring, so batch evaluation never aborts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub degenerate: bool,
    pub confusion: ConfusionMatrix,
}

/// Builds a confusion matrix from aligned prediction/truth lists.
pub fn confusion(predicted: &[Label], truth: &[Label]) -> Result<ConfusionMatrix> {
    if predicted.len() != truth.len() {
        return Err(Error::invalid(format!(
            "prediction list has {} entries but truth has {}",
            predicted.len(),
            truth.len()
        )));
    }
    let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
    for (p, t) in predicted.iter().zip(truth) {
        match (p, t) {
            (Label::Infected, Label::Infected) => cm.tpc += 1,
            (Label::Infected, Label::Uninfected) => cm.fpc += 1,
            (Label::Uninfected, Label::Infected) => cm.fnc += 1,
            (Label::Uninfected, Label::Uninfected) => cm.tnc += 1,
        }
    }
    Ok(cm)
}

/// Precision, recall and F1 for the infected class.
pub fn metrics(cm: ConfusionMatrix) -> MetricsReport {
    let mut degenerate = false;
    let precision = if cm.tpc + cm.fpc > 0 {
        cm.tpc as f64 / (cm.tpc + cm.fpc) as f64
    } else {
        degenerate = true;
        0.0
    };
    let recall = if cm.tpc + cm.fnc > 0 {
        cm.tpc as f64 / (cm.tpc + cm.fnc) as f64
    } else {
        degenerate = true;
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    MetricsReport { precision, recall, f1, degenerate, confusion: cm }
}

/// Stratified shuffle split. Each class contributes round(fraction * n)
/// samples to the test side.
pub fn split_dataset(
    samples: &[Sample],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<Sample>, Vec<Sample>)> {
    if !(0.0 < test_fraction && test_fraction < 1.0) {
        return Err(Error::invalid("test fraction must lie strictly between 0 and 1"));
    }
    let mut rng = stream(seed, TAG_SPLIT, 0);
    let groups = shuffled_indices_by_class(samples, &mut rng);
    for group in &groups {
        if group.len() < 5 {
            return Err(Error::invalid(format!(
                "need at least 5 samples per class, got {}",
                group.len()
            )));
        }
    }
    let mut test_idx = Vec::new();
    let mut train_idx = Vec::new();
    for group in &groups {
        let k = (test_fraction * group.len() as f64).round() as usize;
        test_idx.extend_from_slice(&group[..k]);
        train_idx.extend_from_slice(&group[k..]);
    }
    test_idx.sort_unstable();
    train_idx.sort_unstable();
    let take = |idx: &[usize]| idx.iter().map(|&i| samples[i]).collect();
    Ok((take(&train_idx), take(&test_idx)))
}

/// What a curve plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    /// x = false positive rate, y = true positive rate.
    Roc,
    /// x = recall, y = precision.
    Pr,
    /// x = precision, y = recall, indexed by threshold.
    PrVsThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
}

/// The three curves plus the area under the ROC.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalCurves {
    pub roc: CurveSeries,
    pub pr: CurveSeries,
    pub pr_vs_threshold: CurveSeries,
    pub auc: f64,
}

/// Sweeps thresholds over the distinct scores (descending) plus
/// sentinels just above 1 and at 0, classifying `proba >= threshold`
/// as infected.
pub fn curves(probas: &[f64], truth: &[Label]) -> Result<EvalCurves> {
    if probas.len() != truth.len() {
        return Err(Error::invalid("probability and truth lists differ in length"));
    }
    if probas.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::invalid("probabilities must lie in [0, 1]"));
    }
    let positives = truth.iter().filter(|t| **t == Label::Infected).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::invalid("curves need both classes in the truth labels"));
    }

    let mut thresholds: Vec<f64> = probas.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    thresholds.insert(0, 1.0 + f64::EPSILON);
    if *thresholds.last().unwrap() != 0.0 {
        thresholds.push(0.0);
    }

    let mut roc = Vec::with_capacity(thresholds.len());
    let mut pr = Vec::with_capacity(thresholds.len());
    let mut pr_thr = Vec::with_capacity(thresholds.len());
    for &t in &thresholds {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for (p, label) in probas.iter().zip(truth) {
            if *p >= t {
                match label {
                    Label::Infected => tp += 1,
                    Label::Uninfected => fp += 1,
                }
            }
        }
        let tpr = tp as f64 / positives as f64;
        let fpr = fp as f64 / negatives as f64;
        // With no predicted positives precision defaults to 1, the usual
        // PR-curve convention for the left endpoint.
        let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 1.0 };
        roc.push(CurvePoint { x: fpr, y: tpr, threshold: t });
        pr.push(CurvePoint { x: tpr, y: precision, threshold: t });
        pr_thr.push(CurvePoint { x: precision, y: tpr, threshold: t });
    }

    let auc = roc
        .windows(2)
        .map(|w| (w[1].x - w[0].x) * (w[0].y + w[1].y) / 2.0)
        .sum();

    Ok(EvalCurves {
        roc: CurveSeries { kind: CurveKind::Roc, points: roc },
        pr: CurveSeries { kind: CurveKind::Pr, points: pr },
        pr_vs_threshold: CurveSeries { kind: CurveKind::PrVsThreshold, points: pr_thr },
        auc,
    })
}

/// Per-class histogram of one feature over shared equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureHistogram {
    pub feature: String,
    pub lo: f64,
    pub hi: f64,
    /// counts[class][bin], class indexed by [`Label::index`].
    pub counts: [Vec<usize>; 2],
}

/// Equal-width histograms spanning the pooled per-feature min..max.
pub fn feature_histograms(samples: &[Sample], bins: usize) -> Result<Vec<FeatureHistogram>> {
    if bins < 2 {
        return Err(Error::invalid("histograms need at least 2 bins"));
    }
    if samples.is_empty() {
        return Err(Error::invalid("histograms of an empty dataset"));
    }
    let mut out = Vec::with_capacity(FEATURE_COUNT);
    for (f, name) in FEATURE_NAMES.iter().enumerate() {
        let values: Vec<f64> = samples.iter().map(|s| s.values()[f]).collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        let mut counts = [vec![0usize; bins], vec![0usize; bins]];
        for (s, v) in samples.iter().zip(&values) {
            let bin = if width > 0.0 {
                (((v - lo) / width) as usize).min(bins - 1)
            } else {
                0
            };
            counts[s.label.index()][bin] += 1;
        }
        out.push(FeatureHistogram { feature: name.to_string(), lo, hi, counts });
    }
    Ok(out)
}

/// Writes a curve as CSV. Column names follow the curve kind; the file
/// doubles as a gnuplot data file (two columns plus the threshold).
pub fn write_curve_csv(series: &CurveSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    let header: [&str; 3] = match series.kind {
        CurveKind::Roc => ["fpr", "tpr", "threshold"],
        CurveKind::Pr => ["recall", "precision", "threshold"],
        CurveKind::PrVsThreshold => ["threshold", "precision", "recall"],
    };
    w.write_record(header).map_err(|e| Error::format(e.to_string()))?;
    for p in &series.points {
        let row = match series.kind {
            CurveKind::PrVsThreshold => [p.threshold, p.x, p.y],
            _ => [p.x, p.y, p.threshold],
        };
        w.write_record(row.map(|v| v.to_string()))
            .map_err(|e| Error::format(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes histograms as CSV: feature,class,bin,lo,hi,count.
pub fn write_histograms_csv(
    histograms: &[FeatureHistogram],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    w.write_record(["feature", "class", "bin", "bin_lo", "bin_hi", "count"])
        .map_err(|e| Error::format(e.to_string()))?;
    for h in histograms {
        let bins = h.counts[0].len();
        let width = (h.hi - h.lo) / bins as f64;
        for (class_idx, label) in [Label::Uninfected, Label::Infected].iter().enumerate() {
            for bin in 0..bins {
                let lo = h.lo + width * bin as f64;
                let hi = if bin + 1 == bins { h.hi } else { h.lo + width * (bin + 1) as f64 };
                w.write_record([
                    h.feature.clone(),
                    label.as_str().to_string(),
                    bin.to_string(),
                    lo.to_string(),
                    hi.to_string(),
                    h.counts[class_idx][bin].to_string(),
                ])
                .map_err(|e| Error::format(e.to_string()))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

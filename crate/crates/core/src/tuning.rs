//! Grid search over stratified k-fold cross-validation, scored by the
//! infected-class F1 of a forest fit per fold.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::dataset::{shuffled_indices_by_class, Sample};
use crate::error::{Error, Result};
use crate::eval::{confusion, metrics};
use crate::forest::{forest_train, ForestParams};
use crate::rng::{derive, stream, TAG_CV, TAG_SPLIT};

/// The hyperparameter grid. Defaults cover the ensemble sizes worth
/// distinguishing at this feature count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperparamGrid {
    pub n_estimators: Vec<usize>,
    pub max_depths: Vec<Option<usize>>,
    pub min_leafs: Vec<usize>,
    pub folds: usize,
}

impl Default for HyperparamGrid {
    fn default() -> Self {
        Self {
            n_estimators: vec![5, 10, 25, 50, 100],
            max_depths: vec![None, Some(4), Some(8), Some(16)],
            min_leafs: vec![1, 5],
            folds: 5,
        }
    }
}

impl HyperparamGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_estimators.is_empty() || self.max_depths.is_empty() || self.min_leafs.is_empty() {
            return Err(Error::invalid("grid axes must be non-empty"));
        }
        if self.folds < 2 {
            return Err(Error::invalid("cross-validation needs at least 2 folds"));
        }
        Ok(())
    }

    /// Grid points in axis-nested order.
    pub fn points(&self) -> Vec<(usize, Option<usize>, usize)> {
        let mut out = Vec::new();
        for &n in &self.n_estimators {
            for &d in &self.max_depths {
                for &m in &self.min_leafs {
                    out.push((n, d, m));
                }
            }
        }
        out
    }
}

/// One row of the cross-validation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRecord {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub mean_f1: f64,
    pub std_f1: f64,
    /// Per-fold scores the summary statistics were computed from.
    pub fold_scores: Vec<f64>,
}

/// Stratified fold assignment: per-class shuffled indices are dealt
/// round-robin, so every sample lands in exactly one validation fold
/// and fold class ratios stay within one sample of the global ratio.
pub fn stratified_folds(
    samples: &[Sample],
    folds: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<usize>>> {
    let groups = shuffled_indices_by_class(samples, rng);
    for group in &groups {
        if group.len() < folds {
            return Err(Error::invalid(format!(
                "a class has {} samples, fewer than {folds} folds",
                group.len()
            )));
        }
    }
    let mut assignments = vec![Vec::new(); folds];
    for group in &groups {
        for (i, &idx) in group.iter().enumerate() {
            assignments[i % folds].push(idx);
        }
    }
    for fold in &mut assignments {
        fold.sort_unstable();
    }
    Ok(assignments)
}

/// Runs the full grid, returning the winning forest parameters (seeded
/// with `seed`) and the complete table. Ties on mean F1 break toward
/// fewer estimators, then shallower depth, then smaller leaves.
pub fn grid_search_cv(
    samples: &[Sample],
    grid: &HyperparamGrid,
    seed: u64,
) -> Result<(ForestParams, Vec<CvRecord>)> {
    grid.validate()?;
    let mut fold_rng = stream(seed, TAG_SPLIT, 1);
    let folds = stratified_folds(samples, grid.folds, &mut fold_rng)?;

    let splits: Vec<(Vec<Sample>, Vec<Sample>)> = folds
        .iter()
        .map(|validation| {
            let in_validation: std::collections::HashSet<usize> =
                validation.iter().copied().collect();
            let train: Vec<Sample> = (0..samples.len())
                .filter(|i| !in_validation.contains(i))
                .map(|i| samples[i])
                .collect();
            let val: Vec<Sample> = validation.iter().map(|&i| samples[i]).collect();
            (train, val)
        })
        .collect();

    let points = grid.points();
    let records: Result<Vec<CvRecord>> = points
        .par_iter()
        .enumerate()
        .map(|(point_idx, &(n_estimators, max_depth, min_leaf))| {
            let mut fold_scores = Vec::with_capacity(splits.len());
            for (fold_idx, (train, val)) in splits.iter().enumerate() {
                let params = ForestParams {
                    n_estimators,
                    max_depth,
                    min_leaf,
                    seed: derive(seed, TAG_CV, (point_idx * splits.len() + fold_idx) as u64),
                    ..ForestParams::default()
                };
                let model = forest_train(train, &params)?;
                let predicted: Vec<_> = val.iter().map(|s| model.predict(&s.values())).collect();
                let truth: Vec<_> = val.iter().map(|s| s.label).collect();
                fold_scores.push(metrics(confusion(&predicted, &truth)?).f1);
            }
            let mean = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
            let var = fold_scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
                / fold_scores.len() as f64;
            Ok(CvRecord {
                n_estimators,
                max_depth,
                min_leaf,
                mean_f1: mean,
                std_f1: var.sqrt(),
                fold_scores,
            })
        })
        .collect();
    let records = records?;

    let best = records
        .iter()
        .min_by(|a, b| {
            let depth_rank = |d: Option<usize>| d.unwrap_or(usize::MAX);
            // min_by on (negated) score order: larger mean_f1 first.
            b.mean_f1
                .partial_cmp(&a.mean_f1)
                .unwrap()
                .then(a.n_estimators.cmp(&b.n_estimators))
                .then(depth_rank(a.max_depth).cmp(&depth_rank(b.max_depth)))
                .then(a.min_leaf.cmp(&b.min_leaf))
        })
        .expect("grid is non-empty");

    let winner = ForestParams {
        n_estimators: best.n_estimators,
        max_depth: best.max_depth,
        min_leaf: best.min_leaf,
        seed,
        ..ForestParams::default()
    };
    Ok((winner, records))
}

/// Writes the table as CSV: n_estimators,max_depth,min_leaf,mean_f1,std_f1.
pub fn write_cv_table(records: &[CvRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    w.write_record(["n_estimators", "max_depth", "min_leaf", "mean_f1", "std_f1"])
        .map_err(|e| Error::format(e.to_string()))?;
    for r in records {
        let depth = r.max_depth.map_or_else(|| "unbounded".to_string(), |d| d.to_string());
        w.write_record([
            r.n_estimators.to_string(),
            depth,
            r.min_leaf.to_string(),
            r.mean_f1.to_string(),
            r.std_f1.to_string(),
        ])
        .map_err(|e| Error::format(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

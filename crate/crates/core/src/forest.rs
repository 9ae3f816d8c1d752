//! Random forest: bootstrap-trained decision trees voting by averaged
//! leaf probabilities.
//!
//! Each tree owns a generator derived from the forest seed and the tree
//! index, so training parallelizes across trees without affecting the
//! result.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, Sample};
use crate::error::{Error, Result};
use crate::features::FEATURE_COUNT;
use crate::rng::{stream, TAG_TREE};
use crate::tree::{train_tree, DecisionTree, Node, TreeConfig};

/// Forest hyperparameters. `features_per_split` defaults to
/// floor(sqrt(4)) = 2, the conventional classification choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub features_per_split: usize,
    pub seed: u64,
    /// Bootstrap resampling; disabled only by tests that need a forest
    /// to degenerate into a plain tree.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_estimators: 25,
            max_depth: None,
            min_leaf: 1,
            features_per_split: 2,
            seed: 0,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    fn tree_config(&self) -> TreeConfig {
        TreeConfig {
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            features_per_split: self.features_per_split,
        }
    }
}

/// A trained ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub params: ForestParams,
}

/// Generator owned by tree `index` of a forest seeded with `seed`.
/// Exposed so tests can reproduce a single tree's stream.
pub fn tree_stream(seed: u64, index: u64) -> ChaCha8Rng {
    stream(seed, TAG_TREE, index)
}

/// Trains `params.n_estimators` trees, each on a bootstrap resample of
/// the input drawn from its own deterministic stream.
pub fn forest_train(samples: &[Sample], params: &ForestParams) -> Result<RandomForest> {
    if samples.len() < 2 {
        return Err(Error::invalid("forest training needs at least 2 samples"));
    }
    if params.n_estimators == 0 {
        return Err(Error::invalid("n_estimators must be at least 1"));
    }
    params.tree_config().validate()?;

    let trees: Result<Vec<DecisionTree>> = (0..params.n_estimators)
        .into_par_iter()
        .map(|index| {
            let mut rng = tree_stream(params.seed, index as u64);
            if params.bootstrap {
                let resampled: Vec<Sample> = (0..samples.len())
                    .map(|_| samples[rng.random_range(0..samples.len())])
                    .collect();
                train_tree(&resampled, &params.tree_config(), &mut rng)
            } else {
                train_tree(samples, &params.tree_config(), &mut rng)
            }
        })
        .collect();
    Ok(RandomForest { trees: trees?, params: *params })
}

impl RandomForest {
    /// Mean over trees of each tree's leaf infected-class fraction.
    pub fn predict_proba(&self, x: &[f64; 4]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_proba(x)).sum();
        sum / self.trees.len() as f64
    }

    /// Hard label; the 0.5 tie breaks toward infected so borderline
    /// cells are flagged rather than missed.
    pub fn predict(&self, x: &[f64; 4]) -> Label {
        if self.predict_proba(x) >= 0.5 {
            Label::Infected
        } else {
            Label::Uninfected
        }
    }

    /// Mean decrease in Gini impurity per feature, weighted by node
    /// sample fraction, averaged over trees and normalized to sum to 1.
    pub fn feature_importance(&self) -> Result<[f64; FEATURE_COUNT]> {
        if self.trees.is_empty() {
            return Err(Error::invalid("feature importance of an empty forest"));
        }
        let mut totals = [0.0; FEATURE_COUNT];
        for tree in &self.trees {
            let root_n = match &tree.nodes[0] {
                Node::Split { n, .. } => *n,
                Node::Leaf { class_counts } => class_counts[0] + class_counts[1],
            };
            if root_n == 0 {
                continue;
            }
            for node in &tree.nodes {
                if let Node::Split { feature, n, gain, .. } = node {
                    totals[*feature] += (*n as f64 / root_n as f64) * gain;
                }
            }
        }
        for t in &mut totals {
            *t /= self.trees.len() as f64;
        }
        let sum: f64 = totals.iter().sum();
        if sum <= 0.0 {
            return Err(Error::invalid(
                "feature importance undefined: the forest contains no splits",
            ));
        }
        for t in &mut totals {
            *t /= sum;
        }
        Ok(totals)
    }
}

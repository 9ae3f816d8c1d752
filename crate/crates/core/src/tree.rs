//! CART-style binary decision tree with Gini impurity.
//!
//! Splits are greedy: at each node a random subset of the features is
//! considered, candidate thresholds are midpoints between consecutive
//! distinct sorted values, and the split minimizing weighted Gini
//! impurity is accepted only when it strictly decreases impurity.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::features::FEATURE_COUNT;

/// Stopping and sampling knobs for one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Maximum depth; `None` grows until purity or `min_leaf`.
    pub max_depth: Option<usize>,
    /// A split must leave at least this many samples on each side.
    pub min_leaf: usize,
    /// Features examined per node, between 1 and [`FEATURE_COUNT`].
    pub features_per_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { max_depth: None, min_leaf: 1, features_per_split: FEATURE_COUNT }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::invalid("min_leaf must be at least 1"));
        }
        if !(1..=FEATURE_COUNT).contains(&self.features_per_split) {
            return Err(Error::invalid(format!(
                "features_per_split must be in 1..={FEATURE_COUNT}"
            )));
        }
        Ok(())
    }
}

/// Flat node arena entry. `class_counts` is indexed by [`crate::dataset::Label::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Samples that reached this node.
        n: usize,
        /// Gini impurity removed by this split.
        gain: f64,
    },
    Leaf {
        class_counts: [usize; 2],
    },
}

/// A trained tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub config: TreeConfig,
}

/// Gini impurity of a two-class count pair: 1 - p0^2 - p1^2.
pub fn gini(class_counts: [usize; 2]) -> f64 {
    let n = (class_counts[0] + class_counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = class_counts[0] as f64 / n;
    let p1 = class_counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    weighted_impurity: f64,
}

/// Trains a tree on the given samples. The generator drives only the
/// per-node feature subsampling, so with `features_per_split` equal to
/// [`FEATURE_COUNT`] training is fully deterministic in the data.
pub fn train_tree(
    samples: &[Sample],
    config: &TreeConfig,
    rng: &mut ChaCha8Rng,
) -> Result<DecisionTree> {
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::invalid("cannot train a tree on an empty sample list"));
    }
    let mut builder = TreeBuilder { samples, config, rng, nodes: Vec::new() };
    let indices: Vec<usize> = (0..samples.len()).collect();
    builder.grow(indices, 0);
    Ok(DecisionTree { nodes: builder.nodes, config: *config })
}

struct TreeBuilder<'a> {
    samples: &'a [Sample],
    config: &'a TreeConfig,
    rng: &'a mut ChaCha8Rng,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    fn class_counts(&self, indices: &[usize]) -> [usize; 2] {
        let mut counts = [0usize; 2];
        for &i in indices {
            counts[self.samples[i].label.index()] += 1;
        }
        counts
    }

    /// Grows the subtree for `indices`, returning its arena slot.
    fn grow(&mut self, indices: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_counts(&indices);
        let node_impurity = gini(counts);

        let depth_allows = self.config.max_depth.is_none_or(|d| depth < d);
        let splittable = node_impurity > 0.0
            && depth_allows
            && indices.len() >= 2 * self.config.min_leaf
            && indices.len() >= 2;

        let best = if splittable { self.best_split(&indices, node_impurity) } else { None };
        let Some(best) = best else {
            let slot = self.nodes.len();
            self.nodes.push(Node::Leaf { class_counts: counts });
            return slot;
        };

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| self.samples[i].values()[best.feature] <= best.threshold);

        // Reserve the slot so children land after their parent.
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { class_counts: counts });
        let n = indices.len();
        let left = self.grow(left_idx, depth + 1);
        let right = self.grow(right_idx, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
            n,
            gain: node_impurity - best.weighted_impurity,
        };
        slot
    }

    /// Scans the sampled features for the impurity-minimizing split.
    /// Features are visited in ascending index order and thresholds in
    /// ascending value order; only strict improvements are kept, so
    /// ties resolve to the first candidate deterministically.
    fn best_split(&mut self, indices: &[usize], node_impurity: f64) -> Option<BestSplit> {
        let mut features =
            rand::seq::index::sample(self.rng, FEATURE_COUNT, self.config.features_per_split)
                .into_vec();
        features.sort_unstable();

        let n = indices.len();
        let total = self.class_counts(indices);
        let min_leaf = self.config.min_leaf;
        let mut best: Option<BestSplit> = None;

        for feature in features {
            let mut order: Vec<usize> = indices.to_vec();
            order.sort_by(|&a, &b| {
                self.samples[a].values()[feature]
                    .partial_cmp(&self.samples[b].values()[feature])
                    .expect("feature values are finite")
            });

            let mut left = [0usize; 2];
            for window in 0..n - 1 {
                let sample = &self.samples[order[window]];
                left[sample.label.index()] += 1;

                let value = sample.values()[feature];
                let next = self.samples[order[window + 1]].values()[feature];
                if value == next {
                    continue;
                }
                let n_left = window + 1;
                let n_right = n - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let right = [total[0] - left[0], total[1] - left[1]];
                let weighted = (n_left as f64 * gini(left) + n_right as f64 * gini(right))
                    / n as f64;
                let improves = weighted < node_impurity
                    && best.as_ref().is_none_or(|b| weighted < b.weighted_impurity);
                if improves {
                    best = Some(BestSplit {
                        feature,
                        threshold: (value + next) / 2.0,
                        weighted_impurity: weighted,
                    });
                }
            }
        }
        best
    }
}

impl DecisionTree {
    /// Fraction of infected training samples in the leaf `x` reaches.
    pub fn predict_proba(&self, x: &[f64; 4]) -> f64 {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                Node::Split { feature, threshold, left, right, .. } => {
                    node = if x[*feature] <= *threshold { *left } else { *right };
                }
                Node::Leaf { class_counts } => {
                    let n = class_counts[0] + class_counts[1];
                    return if n == 0 { 0.5 } else { class_counts[1] as f64 / n as f64 };
                }
            }
        }
    }

    /// Number of split nodes.
    pub fn split_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    /// Length of the longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

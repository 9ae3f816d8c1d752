//! Labeled samples and stratified index shuffling shared by the
//! split, fold and training code.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::features::FeatureVector;

/// Binary class label; `Infected` is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Label {
    Uninfected,
    Infected,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Infected => "infected",
            Label::Uninfected => "uninfected",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "infected" => Some(Label::Infected),
            "uninfected" => Some(Label::Uninfected),
            _ => None,
        }
    }

    /// 0 for uninfected, 1 for infected; indexes class-count arrays.
    pub fn index(self) -> usize {
        match self {
            Label::Uninfected => 0,
            Label::Infected => 1,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One labeled observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub features: FeatureVector,
    pub label: Label,
}

impl Sample {
    pub fn new(features: FeatureVector, label: Label) -> Self {
        Self { features, label }
    }

    pub fn values(&self) -> [f64; 4] {
        self.features.to_array()
    }
}

/// Sample indices grouped by class and shuffled deterministically —
/// the common building block of stratified splits and folds.
pub fn shuffled_indices_by_class(samples: &[Sample], rng: &mut ChaCha8Rng) -> [Vec<usize>; 2] {
    let mut groups: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, s) in samples.iter().enumerate() {
        groups[s.label.index()].push(i);
    }
    for group in &mut groups {
        group.shuffle(rng);
    }
    groups
}

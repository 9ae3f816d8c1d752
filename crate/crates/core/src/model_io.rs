//! Versioned model persistence: a self-describing JSON document with a
//! schema version field, holding any of the three classifier kinds.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::forest::RandomForest;
use crate::logistic::LogisticModel;
use crate::tree::DecisionTree;

/// Current on-disk schema version.
pub const SCHEMA_VERSION: u64 = 1;

/// Any trained classifier the pipeline can persist and serve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    RandomForest(RandomForest),
    DecisionTree(DecisionTree),
    LogisticRegression(LogisticModel),
}

impl TrainedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            TrainedModel::RandomForest(_) => "random_forest",
            TrainedModel::DecisionTree(_) => "decision_tree",
            TrainedModel::LogisticRegression(_) => "logistic_regression",
        }
    }

    pub fn predict_proba(&self, x: &[f64; 4]) -> f64 {
        match self {
            TrainedModel::RandomForest(m) => m.predict_proba(x),
            TrainedModel::DecisionTree(m) => m.predict_proba(x),
            TrainedModel::LogisticRegression(m) => m.predict_proba(x),
        }
    }

    pub fn predict(&self, x: &[f64; 4]) -> Label {
        if self.predict_proba(x) >= 0.5 {
            Label::Infected
        } else {
            Label::Uninfected
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    schema_version: u64,
    #[serde(flatten)]
    model: TrainedModel,
}

/// Writes the model as pretty-printed JSON.
pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = ModelFile { schema_version: SCHEMA_VERSION, model: model.clone() };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::format(format!("model serialization failed: {e}")))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads a model back, checking the schema version before decoding the
/// payload so version mismatches are reported as such rather than as
/// arbitrary parse failures.
pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    let version = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::format(format!("{}: missing schema_version", path.display())))?;
    if version != SCHEMA_VERSION {
        return Err(Error::UnsupportedVersion { found: version, expected: SCHEMA_VERSION });
    }
    let file: ModelFile = serde_json::from_value(value)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    Ok(file.model)
}

//! JSON documents read and written by the CLI. Every document carries a
//! `format_version`.
//!
//! Model document:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "n_features": 2,
//!   "stumps": [
//!     {"kind": "threshold", "feature": 0, "threshold": 2.5, "polarity": 1},
//!     {"kind": "constant", "output": -1}
//!   ],
//!   "metadata": {...}
//! }
//! ```
//!
//! A threshold stump outputs `polarity` when `x[feature] >= threshold` and
//! `-polarity` otherwise; a constant stump always outputs `output`. The
//! predicted label is 1 when the sum of outputs is positive and 0 otherwise
//! (a zero sum predicts 0).
//!
//! Cost-set document: `{"format_version": 1, "matrices": [{"c0": 1.0, "c1": 4.0}, ...]}`.
//! A bare list of `{c0, c1}` objects is also accepted on input.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cost::{CostMatrixSet, OperatingPoint};
use crate::error::{Error, Result};
use crate::framework::{Framework, Provenance, TrainedCandidate};
use crate::learner::StumpEnsemble;

pub const FORMAT_VERSION: u32 = 1;

pub const PREDICTION_RULE: &str =
    "label 1 iff sum of stump outputs > 0, else 0; threshold stump outputs polarity iff x[feature] >= threshold";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub framework: Framework,
    pub provenance: Provenance,
    pub cost_set: CostMatrixSet,
    pub train_point: OperatingPoint,
    pub train_max_cost: f64,
    pub max_iters: usize,
    pub seed: Option<u64>,
    pub feature_names: Option<Vec<String>>,
    pub prediction_rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    #[serde(flatten)]
    pub model: StumpEnsemble,
    pub metadata: Option<ModelMetadata>,
}

impl ModelDocument {
    pub fn new(
        candidate: &TrainedCandidate,
        framework: Framework,
        cost_set: &CostMatrixSet,
        max_iters: usize,
        seed: Option<u64>,
        feature_names: Option<Vec<String>>,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            model: candidate.model.clone(),
            metadata: Some(ModelMetadata {
                framework,
                provenance: candidate.provenance,
                cost_set: cost_set.clone(),
                train_point: candidate.train_point,
                train_max_cost: candidate.train_max_cost,
                max_iters,
                seed,
                feature_names,
                prediction_rule: PREDICTION_RULE.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSetDocument {
    pub format_version: u32,
    pub matrices: CostMatrixSet,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CostSetInput {
    Versioned(CostSetDocument),
    Bare(CostMatrixSet),
}

fn check_version(what: &'static str, found: u32) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            what,
            found,
            expected: FORMAT_VERSION,
        });
    }
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_cost_set(text: &str) -> Result<CostMatrixSet> {
    match serde_json::from_str::<CostSetInput>(text) {
        Ok(CostSetInput::Versioned(doc)) => {
            check_version("cost set", doc.format_version)?;
            Ok(doc.matrices)
        }
        Ok(CostSetInput::Bare(set)) => Ok(set),
        // re-parse strictly for a useful message
        Err(_) => Ok(serde_json::from_str::<CostSetDocument>(text)?.matrices),
    }
}

pub fn read_cost_set(path: &Path) -> Result<CostMatrixSet> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_cost_set(&text)
}

pub fn write_cost_set(path: &Path, set: &CostMatrixSet) -> Result<()> {
    write_json(
        path,
        &CostSetDocument {
            format_version: FORMAT_VERSION,
            matrices: set.clone(),
        },
    )
}

pub fn read_model(path: &Path) -> Result<ModelDocument> {
    let doc: ModelDocument = read_json(path)?;
    check_version("model", doc.format_version)?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::{DecisionStump, Sign};

    #[test]
    fn model_document_layout() {
        let model = StumpEnsemble::new(
            2,
            vec![
                DecisionStump::Threshold {
                    feature: 1,
                    threshold: 0.5,
                    polarity: Sign::Plus,
                },
                DecisionStump::Constant { output: Sign::Minus },
            ],
        )
        .unwrap();
        let doc = ModelDocument {
            format_version: FORMAT_VERSION,
            model,
            metadata: None,
        };
        let v = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["n_features"], 2);
        assert_eq!(v["stumps"][0]["kind"], "threshold");
        assert_eq!(v["stumps"][1]["output"], -1);
        let back: ModelDocument = serde_json::from_value(v).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn cost_set_documents() {
        let set =
            parse_cost_set(r#"{"format_version": 1, "matrices": [{"c0": 1, "c1": 4}, {"c0": 3, "c1": 2}]}"#).unwrap();
        assert_eq!(set, CostMatrixSet::from_pairs(&[(1.0, 4.0), (3.0, 2.0)]).unwrap());
        assert_eq!(
            parse_cost_set(r#"[{"c0": 1, "c1": 4}, {"c0": 3, "c1": 2}]"#).unwrap(),
            set
        );
        assert!(matches!(
            parse_cost_set(r#"{"format_version": 9, "matrices": [{"c0": 1, "c1": 4}]}"#),
            Err(Error::FormatVersion { found: 9, .. })
        ));
        assert!(parse_cost_set(r#"{"format_version": 1, "matrices": []}"#).is_err());
        assert!(parse_cost_set(r#"[{"c0": -1, "c1": 4}]"#).is_err());
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("costs.json");
        let set = CostMatrixSet::from_pairs(&[(0.25, 9.5)]).unwrap();
        write_cost_set(&p, &set).unwrap();
        assert_eq!(read_cost_set(&p).unwrap(), set);
    }
}

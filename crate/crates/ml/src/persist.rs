//! Saving and loading trained models as tagged, schema-versioned JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::MlError;
use crate::gnb::GnbModel;
use crate::knn::KnnModel;
use crate::pca::PcaModel;
use crate::svm::SvmModel;

/// Bumped whenever the on-disk layout of any model changes.
pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "snake_case")]
pub enum ModelPayload {
    Pca(PcaModel),
    Knn(KnnModel),
    Gnb(GnbModel),
    Svm(SvmModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub payload: ModelPayload,
}

pub fn save_model(path: &Path, payload: &ModelPayload) -> Result<(), MlError> {
    let file = ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        payload: payload.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ModelPayload, MlError> {
    let text = fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text)?;
    if file.schema_version != MODEL_SCHEMA_VERSION {
        return Err(MlError::SchemaMismatch {
            expected: MODEL_SCHEMA_VERSION,
            found: file.schema_version,
        });
    }
    Ok(file.payload)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnb::fit_gnb;
    use crate::knn::fit_knn;
    use crate::pca::{fit_pca, PcaTarget};
    use crate::svm::{fit_svm, SmoParams, SvmKernel};

    fn toy() -> (Vec<Vec<f64>>, Vec<u8>) {
        (
            vec![
                vec![0.0, 0.1],
                vec![0.2, 0.0],
                vec![1.0, 0.9],
                vec![0.9, 1.1],
            ],
            vec![0, 0, 1, 1],
        )
    }

    #[test]
    fn every_model_kind_round_trips_bit_exactly() {
        let (x, y) = toy();
        let dir = tempfile::tempdir().unwrap();
        let payloads = [ModelPayload::Pca(fit_pca(&x, PcaTarget::Components(2)).unwrap()),
            ModelPayload::Knn(fit_knn(&x, &y, 1).unwrap()),
            ModelPayload::Gnb(fit_gnb(&x, &y).unwrap()),
            ModelPayload::Svm(fit_svm(&x, &y, SvmKernel::Linear, SmoParams::default()).unwrap())];
        for (i, payload) in payloads.iter().enumerate() {
            let path = dir.path().join(format!("model_{i}.json"));
            save_model(&path, payload).unwrap();
            let loaded = load_model(&path).unwrap();
            assert_eq!(&loaded, payload);
        }
    }

    #[test]
    fn unsupported_schema_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let text = r#"{"schema_version": 999, "kind": "knn", "model": {"k": 1, "points": [[0.0]], "labels": [0]}}"#;
        std::fs::write(&path, text).unwrap();
        match load_model(&path) {
            Err(MlError::SchemaMismatch { expected, found }) => {
                assert_eq!(expected, MODEL_SCHEMA_VERSION);
                assert_eq!(found, 999);
            }
            other => panic!("expected SchemaMismatch, got {other:?}"),
        }
    }

    #[test]
    fn tag_names_are_stable() {
        let (x, y) = toy();
        let payload = ModelPayload::Gnb(fit_gnb(&x, &y).unwrap());
        let json = serde_json::to_string(&ModelFile {
            schema_version: MODEL_SCHEMA_VERSION,
            payload,
        })
        .unwrap();
        assert!(json.contains(r#""kind":"gnb""#));
        assert!(json.contains(r#""schema_version":1"#));
    }
}

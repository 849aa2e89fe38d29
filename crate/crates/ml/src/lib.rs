//! Classical learning components used downstream of feature extraction:
//! standardising PCA, three from-scratch binary classifiers
//! (k-nearest-neighbour, Gaussian naive Bayes, and an SMO-trained support
//! vector machine), stratified splitting, evaluation metrics, and model
//! persistence.
//!
//! Everything here is deterministic given its seeds: pair selection in the
//! SVM solver, tie-breaking in the classifiers, and the split shuffles all
//! use fixed orders or seeded generators.

pub mod data;
pub mod error;
pub mod gnb;
pub mod knn;
pub mod pca;
pub mod persist;
pub mod svm;

pub use data::{evaluate, train_test_split, Classifier, Metrics, Split};
pub use error::MlError;
pub use gnb::{fit_gnb, GnbModel};
pub use knn::{fit_knn, KnnModel};
pub use pca::{fit_pca, PcaModel, PcaTarget};
pub use persist::{load_model, save_model, ModelFile, ModelPayload, MODEL_SCHEMA_VERSION};
pub use svm::{default_rbf_gamma, fit_svm, max_kkt_violation, SmoParams, SvmKernel, SvmModel};

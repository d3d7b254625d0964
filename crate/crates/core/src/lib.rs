//! Multilevel support vector machine training for imbalanced binary
//! classification.
//!
//! Each class is turned into a k-nearest-neighbor graph and coarsened into a
//! hierarchy of ever smaller graphs by clustering and contraction. An RBF
//! C-SVM is trained on the coarsest levels with a uniform-design parameter
//! search and then refined level by level on the uncontracted support
//! vectors. See [`driver::train_multilevel`] for the entry point.

pub mod cli;
pub mod clustering;
pub mod dataset;
pub mod driver;
pub mod error;
pub mod graph;
pub mod hierarchy;
pub mod knn;
pub mod matrix;
pub mod model_select;
pub mod par;
pub mod seed;
pub mod svm;
pub mod synthetic;

pub use driver::{
    cross_validate, predict_dataset, train_multilevel, Mode, TrainConfig, TrainReport,
};
pub use error::{MlsvmError, Result};

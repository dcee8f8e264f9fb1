//! Information-theoretic feature selection with FCBF and its resampled
//! variant RFCBF, plus the preprocessing and KNN cross-validation harness
//! used to compare them.

pub mod error;
pub mod evaluation;
pub mod fcbf;
pub mod harness;
pub mod info_theory;
pub mod preprocess;
pub mod rfcbf;

pub use error::{Error, Result};
pub use evaluation::{evaluate_pipeline, CvOptions, CvReport, Method};
pub use fcbf::{fcbf, FeatureScore, RankedList, SelectionResult};
pub use info_theory::{conditional_entropy, entropy, information_gain, symmetrical_uncertainty, DiscreteColumn};
pub use preprocess::{DiscreteDataset, RawDataset};
pub use rfcbf::{rfcbf, SelectionParams};

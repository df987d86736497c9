//! Desk-scale downstream classifier used to measure the effect of language
//! augmentation: hashed n-gram features feeding a softmax regression.

pub mod experiment;
pub mod features;
pub mod model;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentError, ExperimentResult, TagSource};
pub use features::{featurize, FeatureVector};
pub use model::{loss_and_gradient, train_baseline, BaselineError, BaselineModel, Hyper};

//! End-to-end experiment: normalize, tag, augment, split, train, evaluate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{train_baseline, BaselineError, BaselineModel, Hyper};
use crate::augment::{augment, AugmentError, AugmentationMode};
use crate::corpus::{split, CorpusError, Dataset, LabeledExample, SplitSpec, Splits};
use crate::lid::LidModel;
use crate::metrics::{evaluate, EvalReport, MetricsError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Where word-level tags come from.
#[derive(Debug, Clone, Copy)]
pub enum TagSource<'a> {
    Model(&'a LidModel),
    /// The dataset already carries tags (for example from `import_tags`).
    Pretagged,
}

impl TagSource<'_> {
    fn describe(&self) -> &'static str {
        match self {
            TagSource::Model(_) => "lid-model",
            TagSource::Pretagged => "imported-tags",
        }
    }
}

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub examples: usize,
    pub mode: AugmentationMode,
    pub tag_source: String,
    pub split: SplitSpec,
    pub hyper: Hyper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub train_size: usize,
    pub val_size: usize,
    pub test_size: usize,
    pub epoch_losses: Vec<f64>,
    pub report: EvalReport,
}

/// Normalizes and tags every example; returns a dataset whose texts are clean
/// and whose `tags` are set.
pub fn tag_dataset(dataset: &Dataset, source: TagSource<'_>) -> Result<Dataset, CorpusError> {
    match source {
        TagSource::Model(model) => Ok(dataset.tag_with(model)),
        TagSource::Pretagged => {
            if let Some(e) = dataset.examples.iter().find(|e| e.tagged_tokens().is_none()) {
                return Err(CorpusError::UntaggedExample(e.id.clone()));
            }
            Ok(dataset.clone())
        }
    }
}

/// Replaces each (tagged) text by its augmented form.
pub fn augment_dataset(tagged: &Dataset, mode: AugmentationMode) -> Result<Dataset, ExperimentError> {
    let examples = tagged
        .examples
        .iter()
        .map(|e| {
            let tokens = e.tagged_tokens().ok_or_else(|| CorpusError::UntaggedExample(e.id.clone()))?;
            let text = augment(&tokens, mode)?.value;
            Ok(LabeledExample { text, tags: None, ..e.clone() })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(Dataset { name: tagged.name.clone(), examples, label_set: tagged.label_set.clone() })
}

pub fn train_on(train: &Dataset, hyper: &Hyper) -> Result<BaselineModel, BaselineError> {
    let pairs: Vec<(&str, &str)> = train.examples.iter().map(|e| (e.text.as_str(), e.label.as_str())).collect();
    train_baseline(&pairs, &train.label_set, hyper)
}

pub fn evaluate_on(model: &BaselineModel, test: &Dataset) -> Result<EvalReport, MetricsError> {
    let truth: Vec<&str> = test.examples.iter().map(|e| e.label.as_str()).collect();
    let pred: Vec<&str> = test.examples.iter().map(|e| model.predict(&e.text)).collect();
    evaluate(&truth, &pred, &test.label_set)
}

/// Runs the full pipeline for one augmentation mode.
pub fn run_experiment(
    dataset: &Dataset,
    mode: AugmentationMode,
    source: TagSource<'_>,
    hyper: &Hyper,
    split_spec: &SplitSpec,
) -> Result<ExperimentResult, ExperimentError> {
    let tagged = tag_dataset(dataset, source)?;
    let augmented = augment_dataset(&tagged, mode)?;
    let Splits { train, val, test } = split(&augmented, split_spec)?;
    let model = train_on(&train, hyper)?;
    let report = evaluate_on(&model, &test)?;
    Ok(ExperimentResult {
        config: ExperimentConfig {
            dataset: dataset.name.clone(),
            examples: dataset.len(),
            mode,
            tag_source: source.describe().to_owned(),
            split: *split_spec,
            hyper: *hyper,
        },
        train_size: train.len(),
        val_size: val.len(),
        test_size: test.len(),
        epoch_losses: model.epoch_losses,
        report,
    })
}

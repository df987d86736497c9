//! Language-tag augmentation for code-mixed Hindi-English text classification.
//!
//! Raw text is normalized ([`preprocess`]), each word is tagged `HI` or `EN`
//! ([`lid`]), and the tags are woven into the text ([`augment`]) either after
//! every word or after the whole sentence. [`corpus`] handles datasets and
//! splits, [`metrics`] scores predictions, and [`baseline`] is a small linear
//! classifier for running the whole pipeline end to end.

pub mod augment;
pub mod baseline;
pub mod container;
pub mod corpus;
pub mod lid;
pub mod metrics;
pub mod preprocess;
pub mod synth;

pub use augment::{augment, strip_augmentation, AugmentationMode, AugmentedText};
pub use corpus::{lid_stats, split, split_sizes, Dataset, DatasetStats, LabeledExample, SplitSpec};
pub use lid::{train_lid, LangTag, LidModel, TaggedToken};
pub use metrics::{evaluate, EvalReport};
pub use preprocess::{normalize, tokenize, CleanText, Token};

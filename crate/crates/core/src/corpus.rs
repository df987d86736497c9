//! Labeled datasets: loading, splitting, external tag import and
//! token-language statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::lid::{LangTag, LidModel, TaggedToken};
use crate::preprocess::{normalize, tokenize, whitespace_tokens};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("schema error at record {record}: {msg}")]
    Schema { record: usize, msg: String },
    #[error("duplicate example id {0:?}")]
    DuplicateId(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("class {label:?} has {count} examples; stratified splitting needs at least 3")]
    StratumTooSmall { label: String, count: usize },
    #[error("example {0:?} has no split assignment")]
    MissingSplit(String),
    #[error("example {id:?}: unknown split name {value:?}")]
    UnknownSplit { id: String, value: String },
    #[error("example {id:?}: {tags} tags for {tokens} tokens")]
    LengthMismatch { id: String, tokens: usize, tags: usize },
    #[error("example {id:?}: unknown tag {value:?}")]
    UnknownTag { id: String, value: String },
    #[error("no tags for example {0:?}")]
    MissingId(String),
    #[error("example {0:?} is not tagged")]
    UntaggedExample(String),
    #[error("dataset {name:?} should have {expected} labels, found {found}")]
    LabelCountMismatch { name: String, expected: usize, found: usize },
    #[error("invalid split fraction {0}")]
    InvalidFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Tsv,
    Jsonl,
}

impl DataFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(DataFormat::Csv),
            "tsv" => Some(DataFormat::Tsv),
            "jsonl" | "ndjson" => Some(DataFormat::Jsonl),
            _ => None,
        }
    }
}

impl FromStr for DataFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(DataFormat::Csv),
            "tsv" => Ok(DataFormat::Tsv),
            "jsonl" => Ok(DataFormat::Jsonl),
            other => Err(format!("unknown data format {other:?} (expected csv, tsv or jsonl)")),
        }
    }
}

/// Which columns / JSON fields hold each value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schema {
    /// When absent, ids are the zero-based record index.
    pub id: Option<String>,
    pub text: String,
    pub label: String,
    /// Split assignment column for pre-split datasets.
    pub split: Option<String>,
}

impl Default for Schema {
    fn default() -> Self {
        Self { id: Some("id".into()), text: "text".into(), label: "label".into(), split: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub text: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
    /// Language tags aligned with the whitespace tokens of `text`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<Vec<LangTag>>,
}

impl LabeledExample {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Self { id: id.into(), text: text.into(), label: label.into(), split: None, tags: None }
    }

    /// Tokens of `text` paired with their tags, when tagged and aligned.
    pub fn tagged_tokens(&self) -> Option<Vec<TaggedToken>> {
        let tags = self.tags.as_ref()?;
        let tokens = whitespace_tokens(&self.text);
        (tokens.len() == tags.len())
            .then(|| tokens.into_iter().zip(tags).map(|(t, &g)| TaggedToken::new(t, g)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub examples: Vec<LabeledExample>,
    /// Sorted, deduplicated.
    pub label_set: Vec<String>,
}

/// Label counts for the benchmark corpora this pipeline was designed around.
pub fn known_label_count(name: &str) -> Option<usize> {
    match name.to_ascii_lowercase().as_str() {
        "icon" => Some(3),
        "sentiment" => Some(3),
        "hatespeech" | "hate-speech" | "hate_speech" => Some(2),
        "hasoc" => Some(2),
        "emotions" => Some(6),
        _ => None,
    }
}

impl Dataset {
    /// Builds a dataset, rejecting duplicate ids and inferring the label set.
    pub fn new(name: impl Into<String>, examples: Vec<LabeledExample>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(examples.len());
        for ex in &examples {
            if !seen.insert(ex.id.as_str()) {
                return Err(CorpusError::DuplicateId(ex.id.clone()));
            }
        }
        let label_set = examples.iter().map(|e| e.label.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        Ok(Self { name: name.into(), examples, label_set })
    }

    /// Same name and label set, different members.
    fn subset(&self, examples: Vec<LabeledExample>) -> Self {
        Self { name: self.name.clone(), examples, label_set: self.label_set.clone() }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.examples.iter().map(|e| e.id.as_str()).collect()
    }

    /// Checks the label count when the name matches a known benchmark corpus.
    pub fn check_known_label_count(&self) -> Result<(), CorpusError> {
        match known_label_count(&self.name) {
            Some(expected) if expected != self.label_set.len() => {
                Err(CorpusError::LabelCountMismatch { name: self.name.clone(), expected, found: self.label_set.len() })
            }
            _ => Ok(()),
        }
    }

    /// Replaces every text by its normalized form. Drops existing tags.
    pub fn normalized(&self) -> Self {
        let examples = self
            .examples
            .iter()
            .map(|e| LabeledExample { text: normalize(&e.text).into_string(), tags: None, ..e.clone() })
            .collect();
        self.subset(examples)
    }

    /// Normalizes and tags every example with `model`.
    pub fn tag_with(&self, model: &LidModel) -> Self {
        let examples = self
            .examples
            .iter()
            .map(|e| {
                let clean = normalize(&e.text);
                let tags = model.tag_sentence(&tokenize(&clean)).into_iter().map(|t| t.tag).collect();
                LabeledExample { text: clean.into_string(), tags: Some(tags), ..e.clone() }
            })
            .collect();
        self.subset(examples)
    }
}

fn value_to_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

struct RawRecord {
    id: Option<String>,
    text: String,
    label: String,
    split: Option<String>,
    tags: Option<Vec<LangTag>>,
}

fn assemble(name: &str, records: Vec<RawRecord>) -> Result<Dataset, CorpusError> {
    let examples = records
        .into_iter()
        .enumerate()
        .map(|(i, r)| LabeledExample {
            id: r.id.unwrap_or_else(|| i.to_string()),
            text: r.text,
            label: r.label,
            split: r.split,
            tags: r.tags,
        })
        .collect();
    Dataset::new(name, examples)
}

/// Parses JSON Lines. Blank lines are skipped.
pub fn parse_jsonl(name: &str, text: &str, schema: &Schema) -> Result<Dataset, CorpusError> {
    let mut records = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = line_no + 1;
        let schema_err = |msg: String| CorpusError::Schema { record, msg };
        let obj: Value = serde_json::from_str(line).map_err(|e| schema_err(e.to_string()))?;
        let field = |key: &str| -> Result<String, CorpusError> {
            let v = obj.get(key).ok_or_else(|| schema_err(format!("missing field {key:?}")))?;
            value_to_string(v).ok_or_else(|| schema_err(format!("field {key:?} is not a scalar")))
        };
        records.push(RawRecord {
            id: schema.id.as_deref().map(field).transpose()?,
            text: field(&schema.text)?,
            label: field(&schema.label)?,
            split: schema.split.as_deref().map(field).transpose()?,
            tags: parse_tag_field(&obj, record)?,
        });
    }
    assemble(name, records)
}

/// Optional `tags` array carried by tagged JSONL.
fn parse_tag_field(obj: &Value, record: usize) -> Result<Option<Vec<LangTag>>, CorpusError> {
    let Some(tags) = obj.get("tags") else { return Ok(None) };
    let id = obj.get("id").and_then(value_to_string).unwrap_or_else(|| record.to_string());
    let arr =
        tags.as_array().ok_or_else(|| CorpusError::Schema { record, msg: "field \"tags\" is not an array".into() })?;
    arr.iter()
        .map(|t| {
            t.as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CorpusError::UnknownTag { id: id.clone(), value: t.to_string() })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

/// Parses CSV or TSV with a header row.
pub fn parse_delimited(name: &str, text: &str, delimiter: u8, schema: &Schema) -> Result<Dataset, CorpusError> {
    let mut reader = csv::ReaderBuilder::new().delimiter(delimiter).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CorpusError::Schema { record: 0, msg: e.to_string() })?.clone();
    let column = |key: &str| {
        headers
            .iter()
            .position(|h| h == key)
            .ok_or_else(|| CorpusError::Schema { record: 0, msg: format!("missing column {key:?}") })
    };
    let id_col = schema.id.as_deref().map(column).transpose()?;
    let text_col = column(&schema.text)?;
    let label_col = column(&schema.label)?;
    let split_col = schema.split.as_deref().map(column).transpose()?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let record = i + 1;
        let row = row.map_err(|e| CorpusError::Schema { record, msg: e.to_string() })?;
        let get = |c: usize| {
            row.get(c)
                .map(str::to_owned)
                .ok_or_else(|| CorpusError::Schema { record, msg: format!("missing column {c}") })
        };
        records.push(RawRecord {
            id: id_col.map(get).transpose()?,
            text: get(text_col)?,
            label: get(label_col)?,
            split: split_col.map(get).transpose()?,
            tags: None,
        });
    }
    assemble(name, records)
}

pub fn parse_dataset(name: &str, text: &str, format: DataFormat, schema: &Schema) -> Result<Dataset, CorpusError> {
    match format {
        DataFormat::Jsonl => parse_jsonl(name, text, schema),
        DataFormat::Csv => parse_delimited(name, text, b',', schema),
        DataFormat::Tsv => parse_delimited(name, text, b'\t', schema),
    }
}

/// Loads a dataset. The dataset name is the file stem.
pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat, schema: &Schema) -> Result<Dataset, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    parse_dataset(name, &text, format, schema)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_frac: f64,
    pub seed: u64,
    pub stratified: bool,
    /// Use each example's own `split` field instead of re-splitting.
    pub presplit: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train_frac: 0.70, seed: 42, stratified: true, presplit: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splits {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

fn floor_share(frac: f64, n: usize) -> usize {
    // absorbs representation error, e.g. 0.7 * 20 landing just under 14
    ((frac * n as f64 + 1e-9).floor() as usize).min(n)
}

/// `(train, val, test)` sizes: train is `floor(frac * n)`, the remainder is
/// halved with the odd example going to test.
pub fn split_sizes(n: usize, train_frac: f64) -> (usize, usize, usize) {
    let train = floor_share(train_frac, n);
    let rest = n - train;
    let val = rest / 2;
    (train, val, rest - val)
}

/// Gives each class its floored share, then hands the `target - sum` leftover
/// slots to the classes with the largest fractional parts (ties by class order).
fn apportion(ideal: &[f64], target: usize) -> Vec<usize> {
    let mut alloc: Vec<usize> = ideal.iter().map(|x| (x + 1e-9).floor() as usize).collect();
    let assigned: usize = alloc.iter().sum();
    let mut order: Vec<usize> = (0..ideal.len()).collect();
    let frac = |i: usize| ideal[i] - alloc[i] as f64;
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
    for &i in order.iter().take(target.saturating_sub(assigned)) {
        alloc[i] += 1;
    }
    alloc
}

/// Deterministic seeded train/val/test split.
pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<Splits, CorpusError> {
    if dataset.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    if spec.presplit {
        return split_by_assignment(dataset);
    }
    if !(spec.train_frac > 0.0 && spec.train_frac < 1.0) {
        return Err(CorpusError::InvalidFraction(spec.train_frac));
    }

    // strata hold indices into dataset.examples, ordered by id
    let mut strata: Vec<(String, Vec<usize>)> = if spec.stratified {
        let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, e) in dataset.examples.iter().enumerate() {
            by_label.entry(e.label.as_str()).or_default().push(i);
        }
        by_label.into_iter().map(|(l, v)| (l.to_owned(), v)).collect()
    } else {
        vec![(String::new(), (0..dataset.len()).collect())]
    };
    if spec.stratified {
        if let Some((label, members)) = strata.iter().find(|(_, m)| m.len() < 3) {
            return Err(CorpusError::StratumTooSmall { label: label.clone(), count: members.len() });
        }
    }

    let (train_total, val_total, _) = split_sizes(dataset.len(), spec.train_frac);
    let sizes: Vec<usize> = strata.iter().map(|(_, m)| m.len()).collect();
    let train_alloc = apportion(&sizes.iter().map(|&n| spec.train_frac * n as f64).collect::<Vec<_>>(), train_total);
    let val_alloc =
        apportion(&sizes.iter().zip(&train_alloc).map(|(&n, &t)| (n - t) as f64 / 2.0).collect::<Vec<_>>(), val_total);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut part = vec![Part::Test; dataset.len()];
    for ((_, members), (&n_train, &n_val)) in strata.iter_mut().zip(train_alloc.iter().zip(&val_alloc)) {
        members.sort_by(|&a, &b| dataset.examples[a].id.cmp(&dataset.examples[b].id));
        members.shuffle(&mut rng);
        for (rank, &i) in members.iter().enumerate() {
            part[i] = if rank < n_train {
                Part::Train
            } else if rank < n_train + n_val {
                Part::Val
            } else {
                Part::Test
            };
        }
    }
    collect_parts(dataset, |i, _| Ok(vec![part[i]]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Train,
    Val,
    Test,
}

fn split_by_assignment(dataset: &Dataset) -> Result<Splits, CorpusError> {
    collect_parts(dataset, |_, e| {
        let value = e.split.as_deref().ok_or_else(|| CorpusError::MissingSplit(e.id.clone()))?;
        // "test+val" lets one file feed both evaluation parts
        value
            .split('+')
            .map(|v| match v.trim().to_ascii_lowercase().as_str() {
                "train" => Ok(Part::Train),
                "val" | "valid" | "validation" | "dev" | "eval" => Ok(Part::Val),
                "test" => Ok(Part::Test),
                _ => Err(CorpusError::UnknownSplit { id: e.id.clone(), value: value.to_owned() }),
            })
            .collect()
    })
}

fn collect_parts(
    dataset: &Dataset,
    assign: impl Fn(usize, &LabeledExample) -> Result<Vec<Part>, CorpusError>,
) -> Result<Splits, CorpusError> {
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (i, e) in dataset.examples.iter().enumerate() {
        for p in assign(i, e)? {
            match p {
                Part::Train => train.push(e.clone()),
                Part::Val => val.push(e.clone()),
                Part::Test => test.push(e.clone()),
            }
        }
    }
    Ok(Splits { train: dataset.subset(train), val: dataset.subset(val), test: dataset.subset(test) })
}

#[derive(Debug, Deserialize)]
struct TagRecord {
    id: Value,
    tags: Vec<String>,
}

/// Attaches externally produced tags (`{"id": ..., "tags": [...]}` per line).
/// Texts are normalized first; tag arrays must align with their tokens.
pub fn import_tags(dataset: &Dataset, tags_jsonl: &str) -> Result<Dataset, CorpusError> {
    let mut by_id: HashMap<String, Vec<String>> = HashMap::new();
    for (line_no, line) in tags_jsonl.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let schema_err = |msg: String| CorpusError::Schema { record: line_no + 1, msg };
        let rec: TagRecord = serde_json::from_str(line).map_err(|e| schema_err(e.to_string()))?;
        let id = value_to_string(&rec.id).ok_or_else(|| schema_err("id is not a scalar".into()))?;
        by_id.insert(id, rec.tags);
    }

    let examples = dataset
        .examples
        .iter()
        .map(|e| {
            let raw = by_id.get(&e.id).ok_or_else(|| CorpusError::MissingId(e.id.clone()))?;
            let clean = normalize(&e.text);
            let n_tokens = tokenize(&clean).len();
            if raw.len() != n_tokens {
                return Err(CorpusError::LengthMismatch { id: e.id.clone(), tokens: n_tokens, tags: raw.len() });
            }
            let tags = raw
                .iter()
                .map(|t| {
                    t.parse::<LangTag>().map_err(|_| CorpusError::UnknownTag { id: e.id.clone(), value: t.clone() })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(LabeledExample { text: clean.into_string(), tags: Some(tags), ..e.clone() })
        })
        .collect::<Result<Vec<_>, CorpusError>>()?;
    Ok(dataset.subset(examples))
}

pub fn import_tags_file(dataset: &Dataset, path: impl AsRef<Path>) -> Result<Dataset, CorpusError> {
    import_tags(dataset, &fs::read_to_string(path)?)
}

/// Token-language aggregates over a tagged dataset.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetStats {
    pub sentences: u64,
    pub hindi_tokens: u64,
    pub english_tokens: u64,
    pub hindi_per_sentence: f64,
    pub english_per_sentence: f64,
    /// Mean over non-empty sentences of HI / (HI + EN).
    pub hindi_ratio_macro: f64,
    /// Total HI / total tokens.
    pub hindi_ratio_micro: f64,
}

pub fn lid_stats(dataset: &Dataset) -> Result<DatasetStats, CorpusError> {
    let mut stats = DatasetStats::default();
    let mut ratio_sum = 0.0;
    let mut nonempty = 0u64;
    for e in &dataset.examples {
        let tags = e.tags.as_ref().ok_or_else(|| CorpusError::UntaggedExample(e.id.clone()))?;
        let n_tokens = whitespace_tokens(&e.text).len();
        if n_tokens != tags.len() {
            return Err(CorpusError::LengthMismatch { id: e.id.clone(), tokens: n_tokens, tags: tags.len() });
        }
        let hi = tags.iter().filter(|&&t| t == LangTag::Hi).count() as u64;
        let en = tags.len() as u64 - hi;
        stats.sentences += 1;
        stats.hindi_tokens += hi;
        stats.english_tokens += en;
        if hi + en > 0 {
            ratio_sum += hi as f64 / (hi + en) as f64;
            nonempty += 1;
        }
    }
    if stats.sentences > 0 {
        stats.hindi_per_sentence = stats.hindi_tokens as f64 / stats.sentences as f64;
        stats.english_per_sentence = stats.english_tokens as f64 / stats.sentences as f64;
    }
    if nonempty > 0 {
        stats.hindi_ratio_macro = ratio_sum / nonempty as f64;
        stats.hindi_ratio_micro = stats.hindi_tokens as f64 / (stats.hindi_tokens + stats.english_tokens) as f64;
    }
    Ok(stats)
}

impl DatasetStats {
    /// One-row table with the usual LID-analysis columns plus both ratios.
    pub fn to_table(&self, name: &str) -> String {
        let w = name.len().max(7);
        format!(
            "{:<w$}  {:>12}  {:>12}  {:>10}  {:>10}  {:>11}  {:>11}\n{:<w$}  {:>12}  {:>12}  {:>10.2}  {:>10.2}  {:>11.2}  {:>11.2}\n",
            "dataset", "hindi", "english", "hi/sent", "en/sent", "ratio-macro", "ratio-micro",
            name,
            self.hindi_tokens,
            self.english_tokens,
            self.hindi_per_sentence,
            self.english_per_sentence,
            self.hindi_ratio_macro,
            self.hindi_ratio_micro,
        )
    }
}

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::Path;

use codemix::augment::{augment as augment_tokens, AugmentationMode};
use codemix::baseline::experiment::{augment_dataset, run_experiment, train_on, TagSource};
use codemix::baseline::{BaselineModel, Hyper};
use codemix::corpus::{self, import_tags_file, lid_stats, load_dataset, DataFormat, Dataset, Schema, SplitSpec};
use codemix::lid::{train_lid, LangTag, LidModel, LidTrainingCorpus, TaggedToken};
use codemix::metrics::evaluate;
use codemix::preprocess::{normalize, whitespace_tokens};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::io::{ensure_dir, open_output, pretty_json, read_input, read_objects, str_field, write_file, write_jsonl};
use crate::{DataArgs, TagArgs};

pub fn format_for(path: &Path, explicit: Option<DataFormat>) -> Result<DataFormat> {
    explicit
        .or_else(|| DataFormat::from_path(path))
        .ok_or_else(|| CliError::config(format!("cannot infer the format of {}; pass --format", path.display())))
}

pub fn load_data(args: &DataArgs) -> Result<Dataset> {
    let format = format_for(&args.dataset, args.format)?;
    let mut d = load_dataset(&args.dataset, format, &args.schema())
        .map_err(|e| CliError::from(e).context(args.dataset.display()))?;
    if let Some(name) = &args.name {
        d.name = name.clone();
    }
    d.check_known_label_count()?;
    Ok(d)
}

fn tag_with_args(dataset: &Dataset, tags: &TagArgs) -> Result<Dataset> {
    match (&tags.lid, &tags.tags) {
        (Some(model), None) => Ok(dataset.tag_with(&LidModel::load(model)?)),
        (None, Some(path)) => Ok(import_tags_file(dataset, path)?),
        _ => Err(CliError::config("give exactly one of --lid or --tags")),
    }
}

pub fn preprocess(input: Option<&Path>, output: Option<&Path>, keep_raw: bool) -> Result<()> {
    let mut rows = read_objects(input)?;
    for (i, obj) in rows.iter_mut().enumerate() {
        let raw = str_field(obj, "text", i + 1)?.to_owned();
        obj.insert("text".into(), Value::String(normalize(&raw).into_string()));
        if keep_raw {
            obj.insert("raw_text".into(), Value::String(raw));
        }
    }
    write_jsonl(&mut *open_output(output)?, rows)
}

pub fn lid_train(corpus_path: &Path, out: &Path, smoothing: f64) -> Result<()> {
    let corpus = LidTrainingCorpus::from_tsv(&read_input(Some(corpus_path))?)?;
    let model = train_lid(&corpus, smoothing)?;
    model.save(out)?;
    log::info!("trained LID on {} words ({} distinct) -> {}", corpus.entries.len(), model.lexicon_len(), out.display());
    Ok(())
}

pub fn lid_tag(model: &Path, input: Option<&Path>, output: Option<&Path>) -> Result<()> {
    let model = LidModel::load(model)?;
    let mut rows = read_objects(input)?;
    for (i, obj) in rows.iter_mut().enumerate() {
        let tokens = whitespace_tokens(str_field(obj, "text", i + 1)?);
        let tags = model.tag_sentence(&tokens).into_iter().map(|t| Value::from(t.tag.as_str())).collect();
        obj.insert("tags".into(), Value::Array(tags));
    }
    write_jsonl(&mut *open_output(output)?, rows)
}

#[derive(Serialize)]
struct AugmentedRow<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a Value>,
    mode: AugmentationMode,
    text_aug: String,
}

pub fn augment(mode: AugmentationMode, input: Option<&Path>, output: Option<&Path>) -> Result<()> {
    let rows = read_objects(input)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, obj) in rows.iter().enumerate() {
        let line = i + 1;
        let tokens = whitespace_tokens(str_field(obj, "text", line)?);
        let tags = obj
            .get("tags")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::data(format!("record {line}: missing array field \"tags\"")))?;
        if tags.len() != tokens.len() {
            return Err(CliError::data(format!("record {line}: {} tags for {} tokens", tags.len(), tokens.len())));
        }
        let tagged = tokens
            .into_iter()
            .zip(tags)
            .map(|(t, g)| {
                let tag = g
                    .as_str()
                    .and_then(|s| s.parse::<LangTag>().ok())
                    .ok_or_else(|| CliError::data(format!("record {line}: unknown tag {g}")))?;
                Ok(TaggedToken::new(t, tag))
            })
            .collect::<Result<Vec<_>>>()?;
        let text_aug = augment_tokens(&tagged, mode).map_err(|e| CliError::data(format!("record {line}: {e}")))?.value;
        out.push(AugmentedRow { id: obj.get("id"), label: obj.get("label"), mode, text_aug });
    }
    write_jsonl(&mut *open_output(output)?, out)
}

pub fn write_splits(splits: &corpus::Splits, out_dir: &Path, name: &str) -> Result<Vec<std::path::PathBuf>> {
    ensure_dir(out_dir)?;
    let mut written = Vec::new();
    for (part, d) in [("train", &splits.train), ("val", &splits.val), ("test", &splits.test)] {
        let path = out_dir.join(format!("{name}.{part}.jsonl"));
        write_jsonl(&mut *open_output(Some(&path))?, &d.examples)?;
        written.push(path);
    }
    Ok(written)
}

pub fn split(data: &DataArgs, spec: &SplitSpec, out_dir: &Path) -> Result<()> {
    let d = load_data(data)?;
    let splits = corpus::split(&d, spec)?;
    write_splits(&splits, out_dir, &d.name)?;
    eprintln!("{}: train {} / val {} / test {}", d.name, splits.train.len(), splits.val.len(), splits.test.len());
    Ok(())
}

#[derive(Serialize)]
pub struct StatsReport<'a> {
    pub dataset: &'a str,
    #[serde(flatten)]
    pub stats: corpus::DatasetStats,
}

pub fn stats(data: &DataArgs, json: bool) -> Result<()> {
    let d = load_data(data)?;
    let stats = lid_stats(&d)?;
    if json {
        let mut out = open_output(None)?;
        out.write_all(&pretty_json(&StatsReport { dataset: &d.name, stats })?)?;
        out.flush()?;
    } else {
        print!("{}", stats.to_table(&d.name));
    }
    Ok(())
}

pub fn train(data: &DataArgs, hyper: &Hyper, out: &Path) -> Result<()> {
    let d = load_data(data)?;
    let model = train_on(&d, hyper)?;
    model.save(out)?;
    log::info!("trained on {} examples, epoch losses {:?}", d.len(), model.epoch_losses);
    Ok(())
}

pub fn predict(model: &Path, text_field: &str, input: Option<&Path>, output: Option<&Path>) -> Result<()> {
    let model = BaselineModel::load(model)?;
    let mut rows = read_objects(input)?;
    for (i, obj) in rows.iter_mut().enumerate() {
        let pred = model.predict(str_field(obj, text_field, i + 1)?).to_owned();
        obj.insert("pred".into(), Value::String(pred));
    }
    write_jsonl(&mut *open_output(output)?, rows)
}

pub fn eval(
    input: &Path,
    format: Option<DataFormat>,
    true_col: &str,
    pred_col: &str,
    labels: Option<Vec<String>>,
    json: bool,
) -> Result<()> {
    let format = format_for(input, format)?;
    // the prediction column rides in the `text` slot
    let schema = Schema { id: None, text: pred_col.into(), label: true_col.into(), split: None };
    let d = corpus::parse_dataset("eval", &read_input(Some(input))?, format, &schema)?;
    let truth: Vec<&str> = d.examples.iter().map(|e| e.label.as_str()).collect();
    let pred: Vec<&str> = d.examples.iter().map(|e| e.text.as_str()).collect();
    let labels = labels.unwrap_or_else(|| {
        truth.iter().chain(&pred).map(|s| s.to_string()).collect::<BTreeSet<_>>().into_iter().collect()
    });
    let report = evaluate(&truth, &pred, &labels)?;
    if json {
        let mut out = open_output(None)?;
        out.write_all(&pretty_json(&report)?)?;
        out.flush()?;
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

pub fn experiment(
    data: &DataArgs,
    tags: &TagArgs,
    mode: AugmentationMode,
    hyper: &Hyper,
    spec: &SplitSpec,
    report: Option<&Path>,
) -> Result<()> {
    let d = load_data(data)?;
    let result = match (&tags.lid, &tags.tags) {
        (Some(model), None) => {
            let model = LidModel::load(model)?;
            run_experiment(&d, mode, TagSource::Model(&model), hyper, spec)?
        }
        _ => run_experiment(&tag_with_args(&d, tags)?, mode, TagSource::Pretagged, hyper, spec)?,
    };
    let bytes = pretty_json(&result)?;
    match report {
        Some(path) => write_file(path, &bytes)?,
        None => {
            let mut out = open_output(None)?;
            out.write_all(&bytes)?;
            out.flush()?;
        }
    }
    log::info!("{} / {}: macro F1 {:.5}", d.name, mode, result.report.macro_f1);
    Ok(())
}

#[derive(Serialize)]
pub struct HfRow<'a> {
    pub id: &'a str,
    pub text_aug: &'a str,
    pub mode: AugmentationMode,
    pub label: &'a str,
}

pub fn hf_rows(d: &Dataset, mode: AugmentationMode) -> impl Iterator<Item = HfRow<'_>> {
    d.examples.iter().map(move |e| HfRow { id: &e.id, text_aug: &e.text, mode, label: &e.label })
}

pub fn export_hf(
    data: &DataArgs,
    tags: &TagArgs,
    mode: AugmentationMode,
    spec: &SplitSpec,
    out_dir: &Path,
) -> Result<()> {
    let d = load_data(data)?;
    let augmented = augment_dataset(&tag_with_args(&d, tags)?, mode)?;
    let splits = corpus::split(&augmented, spec)?;
    ensure_dir(out_dir)?;
    for (part, subset) in [("train", &splits.train), ("val", &splits.val), ("test", &splits.test)] {
        let path = out_dir.join(format!("{}.{part}.jsonl", d.name));
        write_jsonl(&mut *open_output(Some(&path))?, hf_rows(subset, mode))?;
    }
    Ok(())
}

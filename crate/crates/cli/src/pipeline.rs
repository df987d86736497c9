//! One-shot pipeline driven by a TOML config.
//!
//! ```toml
//! output_dir = "out"
//! modes = ["word-lang", "sentence-lang", "none"]   # or: mode = "word-lang"
//!
//! [dataset]
//! path = "data/sentiment.jsonl"
//! format = "jsonl"            # optional, inferred from the extension
//! name = "sentiment"          # optional, defaults to the file stem
//! [dataset.schema]            # optional, these are the defaults
//! id = "id"
//! text = "text"
//! label = "label"
//!
//! [lid]                       # exactly one of `model` / `tags`
//! model = "lid.bin"
//!
//! [split]                     # optional
//! train_frac = 0.7
//! seed = 42
//! stratified = true
//! presplit = false
//!
//! [baseline]                  # optional
//! learning_rate = 0.5
//! epochs = 10
//! l2 = 1e-5
//! seed = 42
//! dim = 262144
//! ```
//!
//! Relative paths in the file are resolved against its directory. Command
//! line overrides take precedence and are relative to the working directory.

use std::fs;
use std::path::{Path, PathBuf};

use codemix::augment::AugmentationMode;
use codemix::baseline::experiment::{augment_dataset, run_experiment, ExperimentResult, TagSource};
use codemix::baseline::{model as baseline_model, Hyper};
use codemix::corpus::{self, import_tags_file, lid_stats, load_dataset, DataFormat, Dataset, Schema, SplitSpec};
use codemix::lid::{self, LidModel};
use serde::{Deserialize, Serialize};

use crate::commands::{format_for, hf_rows, StatsReport};
use crate::error::{CliError, Result};
use crate::io::{ensure_dir, jsonl_bytes, pretty_json, sha256_hex, write_file};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<DataFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub schema: Schema,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LidConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub dataset: DatasetConfig,
    pub lid: LidConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<AugmentationMode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<AugmentationMode>,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default)]
    pub baseline: Hyper,
    /// Not part of the recorded config: moving the output does not change results.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("pipeline-out")
}

#[derive(Debug, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub modes: Option<Vec<AugmentationMode>>,
    pub seed: Option<u64>,
    pub dataset: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(dir) = o.out_dir {
            self.output_dir = dir;
        }
        if let Some(modes) = o.modes {
            self.mode = None;
            self.modes = modes;
        }
        if let Some(seed) = o.seed {
            self.split.seed = seed;
            self.baseline.seed = seed;
        }
        if let Some(path) = o.dataset {
            self.dataset.path = path;
        }
    }

    /// Requested modes, deduplicated, in the order given.
    pub fn resolved_modes(&self) -> Result<Vec<AugmentationMode>> {
        let mut out: Vec<AugmentationMode> = Vec::new();
        match (self.mode, self.modes.is_empty()) {
            (Some(_), false) => return Err(CliError::config("set either `mode` or `modes`, not both")),
            (Some(m), true) => out.push(m),
            (None, false) => {
                for m in &self.modes {
                    if !out.contains(m) {
                        out.push(*m);
                    }
                }
            }
            (None, true) => return Err(CliError::config("no augmentation mode configured")),
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.lid.model, &self.lid.tags) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err(CliError::config("[lid] needs exactly one of `model` or `tags`")),
        }
        self.resolved_modes()?;
        if !(self.split.train_frac > 0.0 && self.split.train_frac < 1.0) {
            return Err(CliError::config(format!("split.train_frac {} not in (0, 1)", self.split.train_frac)));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct Artifact {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Seeds {
    pub split: u64,
    pub train: u64,
}

#[derive(Debug, Serialize)]
pub struct Components {
    pub codemix: &'static str,
    pub lid_format: u32,
    pub baseline_format: u32,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub config_hash: String,
    pub config: PipelineConfig,
    pub seeds: Seeds,
    pub components: Components,
    pub dataset_sha256: String,
    pub lid_sha256: String,
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Serialize)]
struct PipelineReport<'a> {
    dataset: &'a str,
    results: Vec<ExperimentResult>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn run_from_file(config_path: &Path, overrides: Overrides) -> Result<Manifest> {
    let text = fs::read_to_string(config_path).map_err(|e| CliError::config(e).context(config_path.display()))?;
    let mut config = PipelineConfig::parse(&text)?;
    let (out_flag, data_flag) = (overrides.out_dir.is_some(), overrides.dataset.is_some());
    config.apply(overrides);
    let base = config_path.parent().unwrap_or(Path::new("")).to_path_buf();
    // paths given on the command line are relative to the working directory
    let out_dir = if out_flag { config.output_dir.clone() } else { resolve(&base, &config.output_dir) };
    let data_path = if data_flag { config.dataset.path.clone() } else { resolve(&base, &config.dataset.path) };
    run(&config, &base, &data_path, &out_dir)
}

/// `base` anchors the config's relative lid paths; `data_path` and `out_dir`
/// are used as given.
pub fn run(config: &PipelineConfig, base: &Path, data_path: &Path, out_dir: &Path) -> Result<Manifest> {
    config.validate()?;
    let modes = config.resolved_modes()?;
    ensure_dir(out_dir)?;

    let format = format_for(data_path, config.dataset.format)?;
    let dataset_bytes = fs::read(data_path).map_err(|e| CliError::data(e).context(data_path.display()))?;
    let mut dataset = load_dataset(data_path, format, &config.dataset.schema)
        .map_err(|e| CliError::from(e).context(data_path.display()))?;
    if let Some(name) = &config.dataset.name {
        dataset.name = name.clone();
    }
    dataset.check_known_label_count()?;
    log::info!("loaded {} examples from {}", dataset.len(), data_path.display());

    let mut artifacts = Vec::new();
    let mut emit = |name: String, bytes: Vec<u8>| -> Result<()> {
        write_file(&out_dir.join(&name), &bytes)?;
        artifacts.push(Artifact { file: name, bytes: bytes.len(), sha256: sha256_hex(&bytes) });
        Ok(())
    };

    let normalized = dataset.normalized();
    emit("normalized.jsonl".into(), jsonl_bytes(&normalized.examples)?)?;

    let (lid_path, model) = match (&config.lid.model, &config.lid.tags) {
        (Some(p), None) => {
            let p = resolve(base, p);
            let m = LidModel::load(&p).map_err(|e| CliError::from(e).context(p.display()))?;
            (p, Some(m))
        }
        (None, Some(p)) => (resolve(base, p), None),
        _ => unreachable!("validated"),
    };
    let lid_bytes = fs::read(&lid_path).map_err(|e| CliError::data(e).context(lid_path.display()))?;
    let tagged: Dataset = match &model {
        Some(m) => dataset.tag_with(m),
        None => import_tags_file(&dataset, &lid_path)?,
    };
    emit("tagged.jsonl".into(), jsonl_bytes(&tagged.examples)?)?;

    let stats = lid_stats(&tagged)?;
    emit("stats.json".into(), pretty_json(&StatsReport { dataset: &tagged.name, stats })?)?;

    let splits = corpus::split(&tagged, &config.split)?;
    for (part, d) in [("train", &splits.train), ("val", &splits.val), ("test", &splits.test)] {
        emit(format!("{}.{part}.jsonl", tagged.name), jsonl_bytes(&d.examples)?)?;
    }

    let mut results = Vec::with_capacity(modes.len());
    for mode in modes {
        let augmented = augment_dataset(&tagged, mode)?;
        emit(format!("augmented.{mode}.jsonl"), jsonl_bytes(hf_rows(&augmented, mode))?)?;
        let source = match &model {
            Some(m) => TagSource::Model(m),
            None => TagSource::Pretagged,
        };
        let input = if model.is_some() { &dataset } else { &tagged };
        let result = run_experiment(input, mode, source, &config.baseline, &config.split)?;
        log::info!("{mode}: macro F1 {:.5}", result.report.macro_f1);
        results.push(result);
    }
    emit("report.json".into(), pretty_json(&PipelineReport { dataset: &tagged.name, results })?)?;

    let config_json = serde_json::to_vec(config).map_err(CliError::internal)?;
    let manifest = Manifest {
        config_hash: sha256_hex(&config_json),
        config: config.clone(),
        seeds: Seeds { split: config.split.seed, train: config.baseline.seed },
        components: Components {
            codemix: env!("CARGO_PKG_VERSION"),
            lid_format: lid::FORMAT_VERSION,
            baseline_format: baseline_model::FORMAT_VERSION,
        },
        dataset_sha256: sha256_hex(&dataset_bytes),
        lid_sha256: sha256_hex(&lid_bytes),
        artifacts,
    };
    write_file(&out_dir.join("manifest.json"), &pretty_json(&manifest)?)?;
    Ok(manifest)
}

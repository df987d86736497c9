mod commands;
mod error;
mod io;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use codemix::augment::AugmentationMode;
use codemix::baseline::Hyper;
use codemix::corpus::{DataFormat, Schema, SplitSpec};

use crate::error::CliError;

/// Language-tag augmentation pipeline for code-mixed Hindi-English text.
#[derive(Debug, Parser)]
#[command(name = "codemix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize the `text` field of JSONL records.
    Preprocess {
        /// Input JSONL (default: stdin).
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Output JSONL (default: stdout).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Keep the original text in `raw_text`.
        #[arg(long)]
        keep_raw: bool,
    },
    /// Train or apply the word-level language identifier.
    #[command(subcommand)]
    Lid(LidCommand),
    /// Add language tags to tagged JSONL text (`text` + `tags` -> `text_aug`).
    Augment {
        #[arg(long, value_parser = parse_mode)]
        mode: AugmentationMode,
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Split a dataset into `<name>.train/val/test.jsonl`.
    Split {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        /// Output directory.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Token-language statistics of a tagged JSONL dataset.
    Stats {
        #[command(flatten)]
        data: DataArgs,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Train the baseline classifier.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict labels with a trained baseline model (adds `pred`).
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Field holding the text to classify.
        #[arg(long, default_value = "text")]
        text_field: String,
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Score predictions against truth.
    Eval {
        /// JSONL or CSV/TSV file with both columns.
        #[arg(long, short)]
        input: PathBuf,
        /// Column holding the true label.
        #[arg(long = "true", default_value = "label")]
        true_col: String,
        /// Column holding the predicted label.
        #[arg(long = "pred", default_value = "pred")]
        pred_col: String,
        /// Comma-separated label order (default: sorted union of observed labels).
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[arg(long)]
        format: Option<DataFormat>,
        #[arg(long)]
        json: bool,
    },
    /// Tag, augment, split, train and evaluate in one go.
    Experiment {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        tags: TagArgs,
        #[arg(long, value_parser = parse_mode)]
        mode: AugmentationMode,
        /// Seed for both the split and training.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        train_frac: f64,
        #[arg(long)]
        no_stratify: bool,
        #[command(flatten)]
        hyper: HyperArgs,
        /// Report JSON path (default: stdout).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the full pipeline from a config file, writing every artifact.
    Pipeline {
        /// TOML config file.
        #[arg(long)]
        config: PathBuf,
        /// Override the output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the augmentation mode(s).
        #[arg(long, value_parser = parse_mode, value_delimiter = ',')]
        mode: Option<Vec<AugmentationMode>>,
        /// Override both the split and training seeds.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the dataset path.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Write augmented splits as `{"id","text_aug","mode","label"}` JSONL for
    /// the transformer fine-tuning harness.
    ExportHf {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        tags: TagArgs,
        #[arg(long, value_parser = parse_mode)]
        mode: AugmentationMode,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum LidCommand {
    /// Train a model from `word<TAB>HI|EN` lines.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        smoothing: f64,
    },
    /// Add `tags` to JSONL records, aligned with the whitespace tokens of `text`.
    Tag {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Dataset file (CSV/TSV with header, or JSONL).
    #[arg(long)]
    dataset: PathBuf,
    /// csv, tsv or jsonl (default: from the extension).
    #[arg(long)]
    format: Option<DataFormat>,
    #[arg(long, default_value = "id")]
    id_field: String,
    /// Use the record index as id.
    #[arg(long)]
    no_id: bool,
    #[arg(long, default_value = "text")]
    text_field: String,
    #[arg(long, default_value = "label")]
    label_field: String,
    /// Column with a train/val/test assignment (pre-split datasets).
    #[arg(long)]
    split_field: Option<String>,
    /// Dataset name (default: file stem).
    #[arg(long)]
    name: Option<String>,
}

impl DataArgs {
    fn schema(&self) -> Schema {
        Schema {
            id: (!self.no_id).then(|| self.id_field.clone()),
            text: self.text_field.clone(),
            label: self.label_field.clone(),
            split: self.split_field.clone(),
        }
    }
}

#[derive(Debug, Args)]
struct TagArgs {
    /// Trained LID model.
    #[arg(long, conflicts_with = "tags", required_unless_present = "tags")]
    lid: Option<PathBuf>,
    /// External tags JSONL (`{"id", "tags"}`).
    #[arg(long)]
    tags: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 0.7)]
    train_frac: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    no_stratify: bool,
    /// Keep the dataset's own split assignment (needs --split-field).
    #[arg(long)]
    presplit: bool,
}

impl SplitArgs {
    fn spec(&self) -> SplitSpec {
        SplitSpec {
            train_frac: self.train_frac,
            seed: self.seed,
            stratified: !self.no_stratify,
            presplit: self.presplit,
        }
    }
}

#[derive(Debug, Args)]
struct HyperArgs {
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    l2: Option<f64>,
    /// Training seed.
    #[arg(long)]
    train_seed: Option<u64>,
    /// log2 of the hashing dimension.
    #[arg(long)]
    dim_bits: Option<u32>,
}

impl HyperArgs {
    fn resolve(&self, base: Hyper) -> Result<Hyper, CliError> {
        let dim = match self.dim_bits {
            Some(b) if (1..=30).contains(&b) => 1usize << b,
            Some(b) => return Err(CliError::config(format!("--dim-bits {b} out of range 1..=30"))),
            None => base.dim,
        };
        Ok(Hyper {
            learning_rate: self.learning_rate.unwrap_or(base.learning_rate),
            epochs: self.epochs.unwrap_or(base.epochs),
            l2: self.l2.unwrap_or(base.l2),
            seed: self.train_seed.unwrap_or(base.seed),
            dim,
        })
    }
}

fn parse_mode(s: &str) -> Result<AugmentationMode, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Preprocess { input, output, keep_raw } => {
            commands::preprocess(input.as_deref(), output.as_deref(), keep_raw)
        }
        Command::Lid(LidCommand::Train { corpus, out, smoothing }) => commands::lid_train(&corpus, &out, smoothing),
        Command::Lid(LidCommand::Tag { model, input, output }) => {
            commands::lid_tag(&model, input.as_deref(), output.as_deref())
        }
        Command::Augment { mode, input, output } => commands::augment(mode, input.as_deref(), output.as_deref()),
        Command::Split { data, split, out_dir } => commands::split(&data, &split.spec(), &out_dir),
        Command::Stats { data, json } => commands::stats(&data, json),
        Command::Train { data, hyper, out } => commands::train(&data, &hyper.resolve(Hyper::default())?, &out),
        Command::Predict { model, text_field, input, output } => {
            commands::predict(&model, &text_field, input.as_deref(), output.as_deref())
        }
        Command::Eval { input, true_col, pred_col, labels, format, json } => {
            commands::eval(&input, format, &true_col, &pred_col, labels, json)
        }
        Command::Experiment { data, tags, mode, seed, train_frac, no_stratify, hyper, report } => {
            let base = Hyper { seed, ..Hyper::default() };
            let spec = SplitSpec { train_frac, seed, stratified: !no_stratify, presplit: data.split_field.is_some() };
            commands::experiment(&data, &tags, mode, &hyper.resolve(base)?, &spec, report.as_deref())
        }
        Command::Pipeline { config, out_dir, mode, seed, dataset } => {
            let overrides = pipeline::Overrides { out_dir, modes: mode, seed, dataset };
            pipeline::run_from_file(&config, overrides).map(|_| ())
        }
        Command::ExportHf { data, tags, mode, split, out_dir } => {
            commands::export_hf(&data, &tags, mode, &split.spec(), &out_dir)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}

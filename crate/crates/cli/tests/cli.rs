use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use codemix::synth::homograph_dataset;

fn codemix(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codemix")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes `data.jsonl`, `tags.jsonl` and a `pipeline.toml` for `n` examples.
fn fixture(dir: &Path, n: usize, mode: &str) {
    let data = homograph_dataset(n, 4);
    let (mut rows, mut tags) = (String::new(), String::new());
    for e in &data.examples {
        rows += &format!("{}\n", serde_json::json!({"id": e.id, "text": e.text, "label": e.label}));
        let t: Vec<&str> = e.tags.as_ref().unwrap().iter().map(|t| t.as_str()).collect();
        tags += &format!("{}\n", serde_json::json!({"id": e.id, "tags": t}));
    }
    fs::write(dir.join("data.jsonl"), rows).unwrap();
    fs::write(dir.join("tags.jsonl"), tags).unwrap();
    let config = format!(
        "mode = \"{mode}\"\noutput_dir = \"out\"\n[dataset]\npath = \"data.jsonl\"\n[lid]\ntags = \"tags.jsonl\"\n[baseline]\ndim = 1024\n"
    );
    fs::write(dir.join("pipeline.toml"), config).unwrap();
}

#[test]
fn help_exits_zero_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let subcommands: &[&[&str]] = &[
        &[],
        &["preprocess"],
        &["lid"],
        &["lid", "train"],
        &["lid", "tag"],
        &["augment"],
        &["split"],
        &["stats"],
        &["train"],
        &["predict"],
        &["eval"],
        &["experiment"],
        &["pipeline"],
        &["export-hf"],
    ];
    for sub in subcommands {
        let mut args = sub.to_vec();
        args.push("--help");
        let out = codemix(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{args:?}");
    }
}

#[test]
fn usage_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = codemix(&["augment", "--mode", "bogus"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_dataset_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = codemix(&["stats", "--dataset", "nope.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("kind=data code=2"), "{}", stderr(&out));

    fixture(dir.path(), 20, "none");
    let out = codemix(&["pipeline", "--config", "pipeline.toml", "--dataset", "nope.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = codemix(&["pipeline", "--config", "absent.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));

    fixture(dir.path(), 20, "none");
    let text = fs::read_to_string(dir.path().join("pipeline.toml")).unwrap();
    fs::write(dir.path().join("both.toml"), text.replace("[lid]\n", "[lid]\nmodel = \"lid.bin\"\n")).unwrap();
    let out = codemix(&["pipeline", "--config", "both.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("kind=config"), "{}", stderr(&out));
}

#[test]
fn small_pipeline_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), 20, "none");
    let out = codemix(&["pipeline", "--config", "pipeline.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let out_dir = dir.path().join("out");
    let expected = [
        "normalized.jsonl",
        "tagged.jsonl",
        "stats.json",
        "data.train.jsonl",
        "data.val.jsonl",
        "data.test.jsonl",
        "augmented.none.jsonl",
        "report.json",
        "manifest.json",
    ];
    let mut found: Vec<String> =
        fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    found.sort();
    let mut want: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
    want.sort();
    assert_eq!(found, want);

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert_eq!(artifacts.len(), expected.len() - 1);
    for a in artifacts {
        let bytes = fs::read(out_dir.join(a["file"].as_str().unwrap())).unwrap();
        assert_eq!(a["bytes"].as_u64().unwrap() as usize, bytes.len());
    }

    let split_total: usize = ["train", "val", "test"]
        .iter()
        .map(|p| fs::read_to_string(out_dir.join(format!("data.{p}.jsonl"))).unwrap().lines().count())
        .sum();
    assert_eq!(split_total, 20);

    let report: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["results"].as_array().unwrap().len(), 1);
    assert_eq!(report["results"][0]["config"]["mode"], "none");
}

#[test]
fn config_hash_ignores_output_location() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), 40, "word-lang");
    for out in ["a", "b"] {
        let o = codemix(&["pipeline", "--config", "pipeline.toml", "--out-dir", out], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d: &str| fs::read(dir.path().join(d).join("manifest.json")).unwrap();
    assert_eq!(read("a"), read("b"));
}

#[test]
fn lid_train_tag_augment_chain() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("lex.tsv"), "bhai\tHI\nyaar\tHI\nkya\tHI\nthe\tEN\nmovie\tEN\ngood\tEN\n").unwrap();
    let o = codemix(&["lid", "train", "--corpus", "lex.tsv", "--out", "lid.bin"], p);
    assert!(o.status.success(), "{}", stderr(&o));

    fs::write(p.join("raw.jsonl"), "{\"id\":\"1\",\"text\":\"Kya MOVIE 😂 https://t.co/x bhai!!\"}\n").unwrap();
    let o = codemix(&["preprocess", "-i", "raw.jsonl", "-o", "clean.jsonl"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = codemix(&["lid", "tag", "--model", "lid.bin", "-i", "clean.jsonl", "-o", "tagged.jsonl"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = codemix(&["augment", "--mode", "word-lang", "-i", "tagged.jsonl"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let row: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(row["text_aug"], "kya HI movie EN bhai HI");
    assert_eq!(row["id"], "1");
}

#[test]
fn eval_prints_macro_scores() {
    let dir = tempfile::tempdir().unwrap();
    let rows = [("A", "A"), ("A", "B"), ("B", "B"), ("B", "B")]
        .iter()
        .map(|(t, p)| format!("{{\"label\":\"{t}\",\"pred\":\"{p}\"}}\n"))
        .collect::<String>();
    fs::write(dir.path().join("preds.jsonl"), rows).unwrap();
    let o = codemix(&["eval", "-i", "preds.jsonl", "--json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((report["macro_f1"].as_f64().unwrap() - 0.733333).abs() < 1e-6);
    assert_eq!(report["accuracy"], 0.75);
}

#[test]
fn dataset_flag_is_relative_to_working_directory() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("conf");
    fs::create_dir(&conf).unwrap();
    fixture(&conf, 20, "none");
    fs::rename(conf.join("data.jsonl"), dir.path().join("moved.jsonl")).unwrap();
    let o = codemix(&["pipeline", "--config", "conf/pipeline.toml", "--dataset", "moved.jsonl"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(conf.join("out").join("moved.train.jsonl").exists());
}

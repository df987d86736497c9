//! Word-level language identification (Hindi vs English).
//!
//! A [`LidModel`] combines an exact-match lexicon with per-language character
//! n-gram tables (orders 1 to 4, Laplace-smoothed over boundary-padded words).
//! Known words with a majority language are tagged from the lexicon; all other
//! words are scored by the n-gram tables. Ties go to English.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::container::{self, ContainerError};
use crate::preprocess::Token;

/// Highest n-gram order scored by the model.
pub const MAX_ORDER: usize = 4;
/// Model file format version.
pub const FORMAT_VERSION: u32 = 1;
/// Magic bytes at the head of a model file.
pub const MAGIC: &[u8; 8] = b"CMLIDv01";

const BOS: char = '^';
const EOS: char = '$';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LangTag {
    #[serde(rename = "HI")]
    Hi,
    #[serde(rename = "EN")]
    En,
}

impl LangTag {
    pub const ALL: [LangTag; 2] = [LangTag::Hi, LangTag::En];

    pub fn as_str(self) -> &'static str {
        match self {
            LangTag::Hi => "HI",
            LangTag::En => "EN",
        }
    }

    fn index(self) -> usize {
        match self {
            LangTag::Hi => 0,
            LangTag::En => 1,
        }
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown language tag {0:?} (expected HI or EN)")]
pub struct UnknownTag(pub String);

impl FromStr for LangTag {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "HI" => Ok(LangTag::Hi),
            "EN" => Ok(LangTag::En),
            other => Err(UnknownTag(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: LangTag,
}

impl TaggedToken {
    pub fn new(token: Token, tag: LangTag) -> Self {
        Self { token, tag }
    }
}

#[derive(Debug, Error)]
pub enum LidError {
    #[error("training corpus has no {0} entries")]
    EmptyCorpus(LangTag),
    #[error("smoothing must be positive and finite, got {0}")]
    InvalidSmoothing(f64),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("model format version {found} is not supported (expected {expected})")]
    FormatVersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<ContainerError> for LidError {
    fn from(e: ContainerError) -> Self {
        match e {
            ContainerError::Io(e) => LidError::Io(e),
            other => LidError::CorruptModel(other.to_string()),
        }
    }
}

/// Word/tag pairs used to train a [`LidModel`].
#[derive(Debug, Clone, Default)]
pub struct LidTrainingCorpus {
    pub entries: Vec<(Token, LangTag)>,
}

impl LidTrainingCorpus {
    pub fn new(entries: Vec<(Token, LangTag)>) -> Self {
        Self { entries }
    }

    /// Parses `word<TAB>HI|EN` lines. Blank lines and `#` comments are skipped.
    pub fn from_tsv(text: &str) -> Result<Self, LidError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |msg: String| LidError::Parse { line: i + 1, msg };
            let (word, tag) = line.split_once('\t').ok_or_else(|| parse_err("expected word<TAB>tag".into()))?;
            let token = Token::new(word.trim()).ok_or_else(|| parse_err(format!("invalid word {word:?}")))?;
            let tag = tag.trim().parse::<LangTag>().map_err(|e| parse_err(e.to_string()))?;
            entries.push((token, tag));
        }
        Ok(Self { entries })
    }
}

/// Count data a model is built from. This is what gets serialized; the
/// log-probability tables are a pure function of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LidCounts {
    version: u32,
    smoothing: f64,
    /// word -> [count_HI, count_EN]
    lexicon: BTreeMap<String, [u64; 2]>,
    /// tokens seen per language
    token_counts: [u64; 2],
    /// per order (index 0 = unigrams): gram -> [count_HI, count_EN]
    ngrams: Vec<BTreeMap<String, [u64; 2]>>,
}

/// Smoothed log-probabilities for one language and one n-gram order.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramTable {
    log_probs: BTreeMap<String, f64>,
    unseen: f64,
}

impl NgramTable {
    pub fn log_prob(&self, gram: &str) -> f64 {
        self.log_probs.get(gram).copied().unwrap_or(self.unseen)
    }

    /// Log-probability assigned to any n-gram outside the training alphabet.
    pub fn unseen_log_prob(&self) -> f64 {
        self.unseen
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.log_probs.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// A trained language identifier. Immutable; share freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LidModel {
    counts: LidCounts,
    /// [language][order - 1]
    tables: [Vec<NgramTable>; 2],
    log_priors: [f64; 2],
}

/// Character n-grams of order `n` over the boundary-padded word.
pub fn char_ngrams(word: &str, n: usize) -> Vec<String> {
    let padded: Vec<char> = std::iter::once(BOS).chain(word.chars()).chain(std::iter::once(EOS)).collect();
    if n == 0 || padded.len() < n {
        return Vec::new();
    }
    padded.windows(n).map(|w| w.iter().collect()).collect()
}

pub fn train_lid(corpus: &LidTrainingCorpus, smoothing: f64) -> Result<LidModel, LidError> {
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(LidError::InvalidSmoothing(smoothing));
    }
    let mut lexicon: BTreeMap<String, [u64; 2]> = BTreeMap::new();
    let mut token_counts = [0u64; 2];
    let mut ngrams: Vec<BTreeMap<String, [u64; 2]>> = vec![BTreeMap::new(); MAX_ORDER];

    for (token, tag) in &corpus.entries {
        let li = tag.index();
        token_counts[li] += 1;
        lexicon.entry(token.as_str().to_owned()).or_default()[li] += 1;
        for (n, table) in ngrams.iter_mut().enumerate() {
            for gram in char_ngrams(token.as_str(), n + 1) {
                table.entry(gram).or_default()[li] += 1;
            }
        }
    }
    for tag in LangTag::ALL {
        if token_counts[tag.index()] == 0 {
            return Err(LidError::EmptyCorpus(tag));
        }
    }
    Ok(LidModel::from_counts(LidCounts { version: FORMAT_VERSION, smoothing, lexicon, token_counts, ngrams }))
}

impl LidModel {
    fn from_counts(counts: LidCounts) -> Self {
        let total_tokens = (counts.token_counts[0] + counts.token_counts[1]) as f64;
        let log_priors =
            [(counts.token_counts[0] as f64 / total_tokens).ln(), (counts.token_counts[1] as f64 / total_tokens).ln()];
        let alpha = counts.smoothing;
        let tables = [0usize, 1].map(|li| {
            counts
                .ngrams
                .iter()
                .map(|order| {
                    // shared alphabet across languages, plus one unseen bucket
                    let total: u64 = order.values().map(|c| c[li]).sum();
                    let denom = total as f64 + alpha * (order.len() as f64 + 1.0);
                    let log_probs =
                        order.iter().map(|(g, c)| (g.clone(), ((c[li] as f64 + alpha) / denom).ln())).collect();
                    NgramTable { log_probs, unseen: (alpha / denom).ln() }
                })
                .collect::<Vec<_>>()
        });
        Self { counts, tables, log_priors }
    }

    pub fn smoothing(&self) -> f64 {
        self.counts.smoothing
    }

    pub fn version(&self) -> u32 {
        self.counts.version
    }

    /// `(count_HI, count_EN)` for a word, if it was seen in training.
    pub fn lexicon_counts(&self, word: &str) -> Option<(u64, u64)> {
        self.counts.lexicon.get(word).map(|c| (c[0], c[1]))
    }

    pub fn lexicon_len(&self) -> usize {
        self.counts.lexicon.len()
    }

    pub fn log_prior(&self, tag: LangTag) -> f64 {
        self.log_priors[tag.index()]
    }

    /// Table for `tag` at n-gram `order` (1-based).
    pub fn ngram_table(&self, tag: LangTag, order: usize) -> &NgramTable {
        &self.tables[tag.index()][order - 1]
    }

    /// Prior plus n-gram log-likelihood, averaged over orders 1..=4.
    pub fn ngram_score(&self, word: &str, tag: LangTag) -> f64 {
        let tables = &self.tables[tag.index()];
        let per_order: f64 =
            (1..=MAX_ORDER).map(|n| char_ngrams(word, n).iter().map(|g| tables[n - 1].log_prob(g)).sum::<f64>()).sum();
        self.log_priors[tag.index()] + per_order / MAX_ORDER as f64
    }

    /// Tags one word. The score is the HI-minus-EN log-odds: from smoothed
    /// lexicon counts when the lexicon decides, otherwise from the n-gram scores.
    pub fn tag_word(&self, word: &Token) -> (LangTag, f64) {
        if let Some(&[hi, en]) = self.counts.lexicon.get(word.as_str()) {
            if hi != en {
                let a = self.counts.smoothing;
                let log_odds = ((hi as f64 + a) / (en as f64 + a)).ln();
                let tag = if hi > en { LangTag::Hi } else { LangTag::En };
                return (tag, log_odds);
            }
        }
        let log_odds = self.ngram_score(word.as_str(), LangTag::Hi) - self.ngram_score(word.as_str(), LangTag::En);
        let tag = if log_odds > 0.0 { LangTag::Hi } else { LangTag::En };
        (tag, log_odds)
    }

    pub fn tag_sentence(&self, tokens: &[Token]) -> Vec<TaggedToken> {
        tokens.iter().map(|t| TaggedToken::new(t.clone(), self.tag_word(t).0)).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = serde_json::to_vec(&self.counts).expect("counts serialize");
        container::encode(MAGIC, &payload)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LidError> {
        let payload = container::decode(MAGIC, bytes)?;
        let version = peek_version(payload)?;
        if version != FORMAT_VERSION {
            return Err(LidError::FormatVersionMismatch { found: version, expected: FORMAT_VERSION });
        }
        let counts: LidCounts = serde_json::from_slice(payload).map_err(|e| LidError::CorruptModel(e.to_string()))?;
        validate(&counts)?;
        Ok(Self::from_counts(counts))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LidError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LidError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

fn peek_version(payload: &[u8]) -> Result<u32, LidError> {
    #[derive(Deserialize)]
    struct Header {
        version: u32,
    }
    serde_json::from_slice::<Header>(payload).map(|h| h.version).map_err(|e| LidError::CorruptModel(e.to_string()))
}

fn validate(counts: &LidCounts) -> Result<(), LidError> {
    let bad = |msg: &str| Err(LidError::CorruptModel(msg.to_owned()));
    if !(counts.smoothing > 0.0 && counts.smoothing.is_finite()) {
        return bad("non-positive smoothing");
    }
    if counts.ngrams.len() != MAX_ORDER {
        return bad("wrong number of n-gram orders");
    }
    if counts.token_counts.contains(&0) {
        return bad("a language has no training tokens");
    }
    Ok(())
}

/// Set of distinct words in a training corpus, per language. Handy for building
/// held-out splits in tests and tools.
pub fn vocabulary(corpus: &LidTrainingCorpus) -> [BTreeSet<&str>; 2] {
    let mut out = [BTreeSet::new(), BTreeSet::new()];
    for (t, tag) in &corpus.entries {
        out[tag.index()].insert(t.as_str());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(s: &str) -> Token {
        Token::new(s).unwrap()
    }

    fn corpus(entries: &[(&str, LangTag)]) -> LidTrainingCorpus {
        LidTrainingCorpus::new(entries.iter().map(|(w, t)| (tok(w), *t)).collect())
    }

    #[test]
    fn two_word_model() {
        let m = train_lid(&corpus(&[("hai", LangTag::Hi), ("the", LangTag::En)]), 1.0).unwrap();
        assert_eq!(m.lexicon_counts("hai"), Some((1, 0)));
        assert_eq!(m.lexicon_counts("the"), Some((0, 1)));
        assert_eq!(m.lexicon_len(), 2);
        assert!((m.log_prior(LangTag::Hi) - 0.5f64.ln()).abs() < 1e-15);
        assert!((m.log_prior(LangTag::En) - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn single_language_corpus_is_rejected() {
        let err = train_lid(&corpus(&[("hai", LangTag::Hi), ("nahi", LangTag::Hi)]), 1.0).unwrap_err();
        assert!(matches!(err, LidError::EmptyCorpus(LangTag::En)));
    }

    #[test]
    fn bad_smoothing_is_rejected() {
        let c = corpus(&[("hai", LangTag::Hi), ("the", LangTag::En)]);
        assert!(matches!(train_lid(&c, 0.0), Err(LidError::InvalidSmoothing(_))));
        assert!(matches!(train_lid(&c, f64::NAN), Err(LidError::InvalidSmoothing(_))));
    }

    #[test]
    fn lexicon_majority_wins() {
        let mut entries = vec![("the", LangTag::En); 5];
        entries.push(("hai", LangTag::Hi));
        let m = train_lid(&corpus(&entries), 1.0).unwrap();
        let (tag, score) = m.tag_word(&tok("the"));
        assert_eq!(tag, LangTag::En);
        assert!(score < 0.0);
    }

    #[test]
    fn symmetric_unseen_word_goes_to_english() {
        // mirror-image corpora: every statistic of "xy" is identical in both languages
        let m = train_lid(&corpus(&[("ab", LangTag::Hi), ("ba", LangTag::En)]), 1.0).unwrap();
        let (tag, score) = m.tag_word(&tok("zz"));
        assert_eq!(score, 0.0);
        assert_eq!(tag, LangTag::En);
    }

    #[test]
    fn lexicon_tie_falls_back_to_ngrams() {
        let m = train_lid(
            &corpus(&[("bus", LangTag::Hi), ("bus", LangTag::En), ("kahaan", LangTag::Hi), ("the", LangTag::En)]),
            1.0,
        )
        .unwrap();
        let (_, score) = m.tag_word(&tok("bus"));
        let expected = m.ngram_score("bus", LangTag::Hi) - m.ngram_score("bus", LangTag::En);
        assert_eq!(score, expected);
    }

    #[test]
    fn tag_sentence_preserves_length_and_order() {
        let m = train_lid(&corpus(&[("the", LangTag::En), ("hai", LangTag::Hi)]), 1.0).unwrap();
        assert!(m.tag_sentence(&[]).is_empty());
        let out = m.tag_sentence(&[tok("the")]);
        assert_eq!(out, vec![TaggedToken::new(tok("the"), LangTag::En)]);
    }

    #[test]
    fn smoothed_tables_are_normalized() {
        let m = train_lid(
            &corpus(&[
                ("yeh", LangTag::Hi),
                ("hai", LangTag::Hi),
                ("nahi", LangTag::Hi),
                ("movie", LangTag::En),
                ("the", LangTag::En),
            ]),
            0.5,
        )
        .unwrap();
        for tag in LangTag::ALL {
            for n in 1..=MAX_ORDER {
                let table = m.ngram_table(tag, n);
                let total: f64 = table.iter().map(|(_, lp)| lp.exp()).sum::<f64>() + table.unseen_log_prob().exp();
                assert!((total - 1.0).abs() < 1e-9, "{tag} order {n}: {total}");
            }
        }
    }

    #[test]
    fn tsv_parsing() {
        let c = LidTrainingCorpus::from_tsv("# words\nhai\tHI\n\nthe\tEN\r\n").unwrap();
        assert_eq!(c.entries.len(), 2);
        assert!(matches!(LidTrainingCorpus::from_tsv("hai\tFR\n"), Err(LidError::Parse { line: 1, .. })));
        assert!(matches!(LidTrainingCorpus::from_tsv("hai HI\n"), Err(LidError::Parse { .. })));
    }

    #[test]
    fn lang_tag_serde() {
        assert_eq!(serde_json::to_string(&LangTag::Hi).unwrap(), "\"HI\"");
        assert_eq!(serde_json::from_str::<LangTag>("\"EN\"").unwrap(), LangTag::En);
        assert!(serde_json::from_str::<LangTag>("\"hi\"").is_err());
    }

    #[test]
    fn char_ngrams_are_padded() {
        assert_eq!(char_ngrams("ab", 1), ["^", "a", "b", "$"]);
        assert_eq!(char_ngrams("ab", 3), ["^ab", "ab$"]);
        assert!(char_ngrams("ab", 5).is_empty());
    }
}

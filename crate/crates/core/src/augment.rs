//! Language-tag augmentation of tagged sentences.
//!
//! Tags are inserted as plain uppercase tokens (`HI` / `EN`). Words are
//! lowercase, so a Hindi word `hi` can never be mistaken for the tag `HI`.
//!
//! | mode            | layout                         |
//! |-----------------|--------------------------------|
//! | `word-lang`     | `w1 T1 w2 T2 ... wn Tn`        |
//! | `sentence-lang` | `w1 w2 ... wn T1 T2 ... Tn`    |
//! | `none`          | `w1 w2 ... wn`                 |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lid::{LangTag, TaggedToken};
use crate::preprocess::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugmentationMode {
    WordLang,
    SentenceLang,
    None,
}

impl AugmentationMode {
    pub const ALL: [AugmentationMode; 3] =
        [AugmentationMode::WordLang, AugmentationMode::SentenceLang, AugmentationMode::None];

    pub fn as_str(self) -> &'static str {
        match self {
            AugmentationMode::WordLang => "word-lang",
            AugmentationMode::SentenceLang => "sentence-lang",
            AugmentationMode::None => "none",
        }
    }

    pub fn adds_tags(self) -> bool {
        self != AugmentationMode::None
    }
}

impl fmt::Display for AugmentationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AugmentationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "word-lang" => Ok(AugmentationMode::WordLang),
            "sentence-lang" => Ok(AugmentationMode::SentenceLang),
            "none" => Ok(AugmentationMode::None),
            other => Err(format!("unknown augmentation mode {other:?} (expected word-lang, sentence-lang or none)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedText {
    pub value: String,
    pub mode: AugmentationMode,
    /// Token count of the source sentence.
    pub source_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("token {0:?} contains an uppercase letter; normalize before augmenting")]
    MixedCaseToken(String),
    #[error("malformed {mode} text: {reason}")]
    MalformedAugmentation { mode: AugmentationMode, reason: String },
}

pub fn augment(tokens: &[TaggedToken], mode: AugmentationMode) -> Result<AugmentedText, AugmentError> {
    if let Some(t) = tokens.iter().find(|t| t.token.as_str().chars().any(char::is_uppercase)) {
        return Err(AugmentError::MixedCaseToken(t.token.as_str().to_owned()));
    }
    let words = tokens.iter().map(|t| t.token.as_str());
    let tags = tokens.iter().map(|t| t.tag.as_str());
    let parts: Vec<&str> = match mode {
        AugmentationMode::WordLang => tokens.iter().flat_map(|t| [t.token.as_str(), t.tag.as_str()]).collect(),
        AugmentationMode::SentenceLang => words.chain(tags).collect(),
        AugmentationMode::None => words.collect(),
    };
    Ok(AugmentedText { value: parts.join(" "), mode, source_len: tokens.len() })
}

/// Recovers the tagged sentence from word-lang or sentence-lang text.
pub fn strip_augmentation(text: &AugmentedText) -> Result<Vec<TaggedToken>, AugmentError> {
    let malformed = |reason: String| AugmentError::MalformedAugmentation { mode: text.mode, reason };
    let parts: Vec<&str> = text.value.split_whitespace().collect();
    if !parts.len().is_multiple_of(2) {
        return Err(malformed(format!("odd token count {}", parts.len())));
    }
    let n = parts.len() / 2;
    let (words, tags): (Vec<&str>, Vec<&str>) = match text.mode {
        AugmentationMode::WordLang => {
            (parts.iter().step_by(2).copied().collect(), parts.iter().skip(1).step_by(2).copied().collect())
        }
        AugmentationMode::SentenceLang => (parts[..n].to_vec(), parts[n..].to_vec()),
        AugmentationMode::None => return Err(malformed("mode none carries no tags".into())),
    };
    words
        .iter()
        .zip(&tags)
        .enumerate()
        .map(|(i, (w, t))| {
            let tag =
                t.parse::<LangTag>().map_err(|_| malformed(format!("expected a tag at position {i}, found {t:?}")))?;
            if w.parse::<LangTag>().is_ok() {
                return Err(malformed(format!("tag {w:?} found in word position {i}")));
            }
            let token = Token::new(*w).expect("split_whitespace yields valid tokens");
            Ok(TaggedToken::new(token, tag))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use LangTag::{En, Hi};

    fn sent(words: &[(&str, LangTag)]) -> Vec<TaggedToken> {
        words.iter().map(|(w, t)| TaggedToken::new(Token::new(*w).unwrap(), *t)).collect()
    }

    #[test]
    fn formats() {
        let s = sent(&[("yeh", Hi), ("movie", En), ("hit", En), ("hai", Hi)]);
        assert_eq!(augment(&s, AugmentationMode::WordLang).unwrap().value, "yeh HI movie EN hit EN hai HI");
        assert_eq!(augment(&s, AugmentationMode::SentenceLang).unwrap().value, "yeh movie hit hai HI EN EN HI");
        assert_eq!(augment(&s, AugmentationMode::None).unwrap().value, "yeh movie hit hai");
        for mode in AugmentationMode::ALL {
            let a = augment(&[], mode).unwrap();
            assert_eq!(a.value, "");
            assert_eq!(a.source_len, 0);
        }
    }

    #[test]
    fn uppercase_word_is_rejected() {
        let s = sent(&[("Bus", Hi)]);
        assert_eq!(augment(&s, AugmentationMode::None), Err(AugmentError::MixedCaseToken("Bus".into())));
    }

    #[test]
    fn strip_examples() {
        let at = |v: &str, mode| AugmentedText { value: v.into(), mode, source_len: 2 };
        let expected = sent(&[("yeh", Hi), ("movie", En)]);
        assert_eq!(strip_augmentation(&at("yeh HI movie EN", AugmentationMode::WordLang)).unwrap(), expected);
        assert_eq!(strip_augmentation(&at("yeh movie HI EN", AugmentationMode::SentenceLang)).unwrap(), expected);
        assert!(matches!(
            strip_augmentation(&at("yeh HI movie", AugmentationMode::WordLang)),
            Err(AugmentError::MalformedAugmentation { .. })
        ));
        assert!(strip_augmentation(&at("yeh movie HI EN", AugmentationMode::WordLang)).is_err());
        assert!(strip_augmentation(&at("HI yeh", AugmentationMode::WordLang)).is_err());
        assert!(strip_augmentation(&at("a b", AugmentationMode::None)).is_err());
    }

    #[test]
    fn word_hi_does_not_collide_with_tag() {
        let s = sent(&[("hi", En), ("hi", Hi)]);
        for mode in [AugmentationMode::WordLang, AugmentationMode::SentenceLang] {
            let a = augment(&s, mode).unwrap();
            let tags = a.value.split(' ').filter(|t| *t == "HI" || *t == "EN").count();
            assert_eq!(tags, 2, "{}", a.value);
            assert_eq!(strip_augmentation(&a).unwrap(), s);
        }
    }

    #[test]
    fn mode_serde() {
        assert_eq!(serde_json::to_string(&AugmentationMode::WordLang).unwrap(), "\"word-lang\"");
        assert_eq!(serde_json::to_string(&AugmentationMode::SentenceLang).unwrap(), "\"sentence-lang\"");
        assert_eq!(serde_json::to_string(&AugmentationMode::None).unwrap(), "\"none\"");
        for m in AugmentationMode::ALL {
            assert_eq!(m.as_str().parse::<AugmentationMode>().unwrap(), m);
        }
    }
}

//! Seeded synthetic corpora for benchmarks and tests.
//!
//! * [`toy_lid_corpus`]: two "languages" built from disjoint consonant
//!   inventories, with stems and inflectional suffixes, split so that held-out
//!   words never occur in training.
//! * [`homograph_dataset`]: sentences whose label is decided only by which
//!   language a shared homograph (`bus`) belongs to. Context words are drawn
//!   independently of the label, so untagged text carries no signal.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Dataset, LabeledExample};
use crate::lid::{LangTag, LidTrainingCorpus};
use crate::preprocess::Token;

struct Phonology {
    onsets: &'static [&'static str],
    vowels: &'static [&'static str],
    suffixes: &'static [&'static str],
}

const HINDI_LIKE: Phonology = Phonology {
    onsets: &["bh", "kh", "gh", "jh", "dh", "k", "g", "j", "d", "n", "m", "r", "h"],
    vowels: &["a", "aa", "i", "u"],
    suffixes: &["ta", "ti", "na", "ni", "ka", "ki", "kar", "gaa", "raha", "rahi", "ja"],
};

const ENGLISH_LIKE: Phonology = Phonology {
    onsets: &["st", "tr", "w", "c", "f", "l", "p", "v", "s", "t", "y", "b", "pl"],
    vowels: &["e", "o", "ee", "oo", "ou"],
    suffixes: &["ed", "ing", "s", "ly", "er", "est", "ful", "ness", "tion", "ous", "es"],
};

fn stem(p: &Phonology, rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.gen_range(1..=3);
    (0..syllables).map(|_| format!("{}{}", p.onsets.choose(rng).unwrap(), p.vowels.choose(rng).unwrap())).collect()
}

/// Balanced two-language word lists: `(train, held_out)` with no word shared
/// between them. Held-out words reuse training stems with different suffixes
/// where possible, so they look like unseen inflections.
pub fn toy_lid_corpus(
    train_words: usize,
    held_out_words: usize,
    seed: u64,
) -> (LidTrainingCorpus, Vec<(Token, LangTag)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(train_words);
    let mut held_out = Vec::with_capacity(held_out_words);
    let mut seen = BTreeSet::new();

    for (i, (tag, phon)) in [(LangTag::Hi, &HINDI_LIKE), (LangTag::En, &ENGLISH_LIKE)].into_iter().enumerate() {
        let n_train = train_words / 2 + if i == 0 { train_words % 2 } else { 0 };
        let n_held = held_out_words / 2 + if i == 0 { held_out_words % 2 } else { 0 };
        let mut stems = Vec::new();
        while train.iter().filter(|(_, t)| *t == tag).count() < n_train {
            let s = stem(phon, &mut rng);
            let word = format!("{s}{}", phon.suffixes.choose(&mut rng).unwrap());
            if seen.insert(word.clone()) {
                stems.push(s);
                train.push((Token::new(word).unwrap(), tag));
            }
        }
        let mut made = 0;
        while made < n_held {
            let s = if rng.gen_bool(0.7) { stems.choose(&mut rng).unwrap().clone() } else { stem(phon, &mut rng) };
            let word = format!("{s}{}", phon.suffixes.choose(&mut rng).unwrap());
            if seen.insert(word.clone()) {
                held_out.push((Token::new(word).unwrap(), tag));
                made += 1;
            }
        }
    }
    train.shuffle(&mut rng);
    held_out.shuffle(&mut rng);
    (LidTrainingCorpus::new(train), held_out)
}

pub const HOMOGRAPH: &str = "bus";
/// Label when the homograph is Hindi ("enough").
pub const LABEL_HINDI_SENSE: &str = "enough";
/// Label when the homograph is English (the vehicle).
pub const LABEL_ENGLISH_SENSE: &str = "vehicle";

const HI_CONTEXT: &[&str] = &[
    "yeh", "hai", "kya", "nahi", "bahut", "accha", "kal", "aaj", "mera", "tera", "bhai", "yaar", "thoda", "abhi",
    "woh", "kuch", "sab", "ghar", "chalo", "pakka", "karo", "gaya", "ho", "ab",
];
const EN_CONTEXT: &[&str] = &[
    "the", "movie", "late", "office", "train", "good", "very", "today", "match", "phone", "time", "city", "road",
    "ticket", "stop", "driver", "morning", "traffic", "school", "friend", "please", "now", "really", "so",
];

/// `n` pre-tagged, balanced sentences. Each contains the homograph once at a
/// random position among 3 to 8 context words of random language.
pub fn homograph_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let examples = (0..n)
        .map(|i| {
            let sense = if i % 2 == 0 { LangTag::Hi } else { LangTag::En };
            let len = rng.gen_range(3..=8);
            let mut words: Vec<(&str, LangTag)> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        (*HI_CONTEXT.choose(&mut rng).unwrap(), LangTag::Hi)
                    } else {
                        (*EN_CONTEXT.choose(&mut rng).unwrap(), LangTag::En)
                    }
                })
                .collect();
            words.insert(rng.gen_range(0..=len), (HOMOGRAPH, sense));
            let label = match sense {
                LangTag::Hi => LABEL_HINDI_SENSE,
                LangTag::En => LABEL_ENGLISH_SENSE,
            };
            let text = words.iter().map(|(w, _)| *w).collect::<Vec<_>>().join(" ");
            LabeledExample {
                tags: Some(words.iter().map(|(_, t)| *t).collect()),
                ..LabeledExample::new(format!("h{i:05}"), text, label)
            }
        })
        .collect();
    Dataset::new("homograph", examples).expect("generated ids are unique")
}

/// `n` examples over `k` balanced labels whose texts are random code-mixed
/// word salad, independent of the label.
pub fn label_noise_dataset(n: usize, k: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let examples = (0..n)
        .map(|i| {
            let len = rng.gen_range(3..=10);
            let words: Vec<&str> = (0..len)
                .map(|_| *if rng.gen_bool(0.5) { HI_CONTEXT } else { EN_CONTEXT }.choose(&mut rng).unwrap())
                .collect();
            LabeledExample::new(format!("n{i:05}"), words.join(" "), format!("class{}", i % k))
        })
        .collect();
    Dataset::new("noise", examples).expect("generated ids are unique")
}

/// Lexicon covering the context vocabulary above, for tagging synthetic text
/// with a trained model.
pub fn context_lexicon() -> LidTrainingCorpus {
    let entries = HI_CONTEXT
        .iter()
        .map(|w| (Token::new(*w).unwrap(), LangTag::Hi))
        .chain(EN_CONTEXT.iter().map(|w| (Token::new(*w).unwrap(), LangTag::En)))
        .collect();
    LidTrainingCorpus::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_corpus_shape() {
        let (train, held) = toy_lid_corpus(200, 50, 1);
        assert_eq!(train.entries.len(), 200);
        assert_eq!(held.len(), 50);
        let train_words: BTreeSet<_> = train.entries.iter().map(|(t, _)| t.as_str()).collect();
        assert!(held.iter().all(|(t, _)| !train_words.contains(t.as_str())));
        assert_eq!(train.entries.iter().filter(|(_, t)| *t == LangTag::Hi).count(), 100);
    }

    #[test]
    fn homograph_rows_are_consistent() {
        let d = homograph_dataset(50, 3);
        assert_eq!(d.label_set, [LABEL_HINDI_SENSE, LABEL_ENGLISH_SENSE]);
        for e in &d.examples {
            let tokens = e.tagged_tokens().unwrap();
            let bus: Vec<_> = tokens.iter().filter(|t| t.token.as_str() == HOMOGRAPH).collect();
            assert_eq!(bus.len(), 1);
            let expected = if bus[0].tag == LangTag::Hi { LABEL_HINDI_SENSE } else { LABEL_ENGLISH_SENSE };
            assert_eq!(e.label, expected);
        }
        assert_eq!(homograph_dataset(50, 3), d);
    }

    #[test]
    fn context_vocabularies_are_disjoint() {
        let hi: BTreeSet<_> = HI_CONTEXT.iter().collect();
        assert!(EN_CONTEXT.iter().all(|w| !hi.contains(w)));
        assert!(!hi.contains(&HOMOGRAPH) && !EN_CONTEXT.contains(&HOMOGRAPH));
    }
}

//! Hashed n-gram features.
//!
//! Each whitespace token contributes a unigram, each adjacent pair a bigram, and
//! each token its character 3-, 4- and 5-grams over `<token>`. Feature keys are
//! hashed with 64-bit FNV-1a and reduced modulo the (power-of-two) dimension.
//! Tag tokens such as `HI` are ordinary tokens here, which is how language
//! augmentation reaches the model.

use std::collections::BTreeMap;

pub const DEFAULT_DIM: usize = 1 << 18;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Sparse bucket counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVector {
    pub dim: usize,
    pub counts: BTreeMap<u32, u32>,
}

impl FeatureVector {
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    /// Entries scaled to unit Euclidean norm.
    pub fn normalized(&self) -> Vec<(usize, f64)> {
        let norm = self.counts.values().map(|&c| (c as f64).powi(2)).sum::<f64>().sqrt();
        self.counts.iter().map(|(&i, &c)| (i as usize, c as f64 / norm)).collect()
    }
}

/// Bucket for a feature key.
pub fn bucket(key: &str, dim: usize) -> u32 {
    (fnv1a64(key.as_bytes()) & (dim as u64 - 1)) as u32
}

pub fn unigram_key(word: &str) -> String {
    format!("u\u{1f}{word}")
}

pub fn bigram_key(first: &str, second: &str) -> String {
    format!("b\u{1f}{first}\u{1f}{second}")
}

pub fn char_gram_keys(word: &str) -> Vec<String> {
    let padded: Vec<char> = std::iter::once('<').chain(word.chars()).chain(std::iter::once('>')).collect();
    (3..=5)
        .flat_map(|n| padded.windows(n).map(|w| format!("c\u{1f}{}", w.iter().collect::<String>())).collect::<Vec<_>>())
        .collect()
}

/// All feature keys of `text`, in a fixed order.
pub fn feature_keys(text: &str) -> Vec<String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let mut keys: Vec<String> = words.iter().map(|w| unigram_key(w)).collect();
    keys.extend(words.windows(2).map(|p| bigram_key(p[0], p[1])));
    keys.extend(words.iter().flat_map(|w| char_gram_keys(w)));
    keys
}

/// # Panics
///
/// If `dim` is not a power of two.
pub fn featurize(text: &str, dim: usize) -> FeatureVector {
    assert!(dim.is_power_of_two(), "feature dimension must be a power of two, got {dim}");
    let mut counts = BTreeMap::new();
    for key in feature_keys(text) {
        *counts.entry(bucket(&key, dim)).or_insert(0) += 1;
    }
    FeatureVector { dim, counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        // published FNV-1a 64 test vectors
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn empty_text_has_no_features() {
        assert!(featurize("", DEFAULT_DIM).is_empty());
        assert!(featurize("   ", DEFAULT_DIM).is_empty());
    }

    #[test]
    fn key_inventory() {
        let keys = feature_keys("ab cd");
        // 2 unigrams, 1 bigram, per word "<ab>": 2 trigrams + 1 four-gram = 3
        assert_eq!(keys.len(), 2 + 1 + 3 + 3);
        assert!(keys.contains(&bigram_key("ab", "cd")));
    }

    #[test]
    fn tag_changes_bigram_bucket() {
        let dim = DEFAULT_DIM;
        let hi = featurize("bus HI", dim);
        let en = featurize("bus EN", dim);
        assert_ne!(hi, en);
        let b_hi = bucket(&bigram_key("bus", "HI"), dim);
        let b_en = bucket(&bigram_key("bus", "EN"), dim);
        assert_ne!(b_hi, b_en);
        assert!(hi.counts.contains_key(&b_hi) && !hi.counts.contains_key(&b_en));
        assert!(en.counts.contains_key(&b_en) && !en.counts.contains_key(&b_hi));
    }

    #[test]
    fn counts_accumulate() {
        let v = featurize("ha ha", 1 << 4);
        let total: u32 = v.counts.values().sum();
        assert_eq!(total as usize, feature_keys("ha ha").len());
        assert!(v.counts.keys().all(|&i| i < 16));
    }

    #[test]
    fn normalized_has_unit_norm() {
        let v = featurize("yeh movie hit hai", DEFAULT_DIM).normalized();
        let n: f64 = v.iter().map(|(_, x)| x * x).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "power of two")]
    fn rejects_non_power_of_two() {
        featurize("a", 1000);
    }
}

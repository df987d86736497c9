use codemix::augment::{augment, strip_augmentation, AugmentationMode};
use codemix::lid::{LangTag, TaggedToken};
use codemix::preprocess::Token;
use proptest::prelude::*;

fn tagged_sentence() -> impl Strategy<Value = Vec<TaggedToken>> {
    let word = prop_oneof!["[a-z0-9]{1,10}", Just("hi".to_owned()), Just("en".to_owned())];
    let tag = prop_oneof![Just(LangTag::Hi), Just(LangTag::En)];
    prop::collection::vec((word, tag), 0..40)
        .prop_map(|v| v.into_iter().map(|(w, t)| TaggedToken::new(Token::new(w).unwrap(), t)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn strip_inverts_augment(s in tagged_sentence()) {
        for mode in [AugmentationMode::WordLang, AugmentationMode::SentenceLang] {
            let a = augment(&s, mode).unwrap();
            prop_assert_eq!(strip_augmentation(&a).unwrap(), s.clone());
        }
    }

    #[test]
    fn token_count_law(s in tagged_sentence()) {
        for mode in AugmentationMode::ALL {
            let a = augment(&s, mode).unwrap();
            let count = a.value.split_whitespace().count();
            let expected = if mode.adds_tags() { 2 * s.len() } else { s.len() };
            prop_assert_eq!(count, expected);
            prop_assert_eq!(a.source_len, s.len());
        }
    }

    #[test]
    fn tags_are_exactly_the_uppercase_tokens(s in tagged_sentence()) {
        for mode in [AugmentationMode::WordLang, AugmentationMode::SentenceLang] {
            let a = augment(&s, mode).unwrap();
            let upper: Vec<&str> = a.value.split_whitespace().filter(|t| t.chars().any(char::is_uppercase)).collect();
            let expected: Vec<&str> = s.iter().map(|t| t.tag.as_str()).collect();
            prop_assert_eq!(upper, expected);
        }
    }

    #[test]
    fn word_order_preserved(s in tagged_sentence()) {
        for mode in AugmentationMode::ALL {
            let a = augment(&s, mode).unwrap();
            let words: Vec<&str> = a.value.split_whitespace().filter(|t| *t != "HI" && *t != "EN").collect();
            let expected: Vec<&str> = s.iter().map(|t| t.token.as_str()).collect();
            prop_assert_eq!(words, expected);
        }
    }
}

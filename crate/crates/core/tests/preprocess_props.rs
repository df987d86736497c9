use codemix::preprocess::{is_emoji, normalize, tokenize, CleanText};
use proptest::prelude::*;

/// Strings mixing ASCII, punctuation, emoji, URLs, Devanagari and arbitrary codepoints.
fn messy_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[A-Za-z]{1,8}",
        "[ \t\n]{1,3}",
        "[!?.,;:'\"#@()\\-]{1,3}",
        prop::sample::select(vec!["😡", "👍🏽", "❤️", "🇮🇳", "😂😂", "1️⃣", "🏳️‍🌈", "Ⓜ️"]).prop_map(str::to_owned),
        prop::sample::select(vec!["https://t.co/abc", "http://x.y/z?q=1", "www.example.com", "HTTPS://A.B"])
            .prop_map(str::to_owned),
        "[\u{0900}-\u{097F}]{1,5}",
        any::<char>().prop_map(String::from),
        "[0-9]{1,4}",
    ];
    prop::collection::vec(piece, 0..12).prop_map(|v| v.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn normalize_is_idempotent(s in messy_text()) {
        let once = normalize(&s);
        let twice = normalize(once.as_str());
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn output_is_clean(s in messy_text()) {
        let out = normalize(&s);
        prop_assert!(CleanText::new(out.as_str()).is_some(), "{:?} -> {:?}", s, out);
        prop_assert!(out.as_str().chars().all(|c| c == ' ' || (c.is_alphanumeric() && !is_emoji(c))));
    }

    #[test]
    fn tokens_join_back(s in messy_text()) {
        let clean = normalize(&s);
        let joined = tokenize(&clean).iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" ");
        prop_assert_eq!(joined, clean.as_str());
    }

    #[test]
    fn plain_lowercase_words_pass_through(words in prop::collection::vec("[a-z0-9]{1,10}", 0..10)) {
        let text = words.join(" ");
        let out = normalize(&text);
        prop_assert_eq!(out.as_str(), text.as_str());
    }
}

//! Text normalization for social-media input.
//!
//! [`normalize`] applies five rules in a fixed order:
//!
//! 1. drop URL spans (`http://`, `https://`, and whitespace-delimited `www.` tokens);
//! 2. delete emoji and pictographic codepoints;
//! 3. replace every other codepoint that is not a letter, digit or space with a space;
//! 4. lowercase;
//! 5. collapse whitespace runs and trim.
//!
//! The result is a [`CleanText`]: lowercase alphanumerics separated by single
//! ASCII spaces. Normalizing a `CleanText` again is a no-op.

use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Normalized text. Construct with [`normalize`] or [`CleanText::new`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CleanText(String);

impl CleanText {
    /// Wraps `value` if it already satisfies the normalized-text invariants.
    pub fn new(value: impl Into<String>) -> Option<Self> {
        let value = value.into();
        is_clean(&value).then_some(Self(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CleanText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CleanText {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A single word: non-empty, no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    pub fn new(value: impl Into<String>) -> Option<Self> {
        let value = value.into();
        (!value.is_empty() && !value.chars().any(char::is_whitespace)).then_some(Self(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Token {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Token::new(value.clone()).ok_or_else(|| format!("invalid token {value:?}"))
    }
}

impl From<Token> for String {
    fn from(t: Token) -> Self {
        t.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn url_pattern() -> &'static Regex {
    static URL: OnceLock<Regex> = OnceLock::new();
    URL.get_or_init(|| Regex::new(r"(?i)https?://\S*|(?:^|\s)www\.\S*").expect("static URL pattern compiles"))
}

/// Pictographic and emoji-component codepoints.
///
/// Alphanumeric codepoints are never treated as emoji (keycap digits, circled
/// letters), so they go through the ordinary letter/digit path.
pub fn is_emoji(c: char) -> bool {
    if c.is_alphanumeric() {
        return false;
    }
    matches!(c as u32,
        0x00A9 | 0x00AE | 0x203C | 0x2049 | 0x2122 | 0x2139
        | 0x2194..=0x2199 | 0x21A9..=0x21AA
        | 0x231A..=0x231B | 0x2328 | 0x23CF | 0x23E9..=0x23F3 | 0x23F8..=0x23FA
        | 0x24C2 | 0x25AA..=0x25AB | 0x25B6 | 0x25C0 | 0x25FB..=0x25FE
        | 0x2600..=0x27BF
        | 0x2934..=0x2935 | 0x2B05..=0x2B07 | 0x2B1B..=0x2B1C | 0x2B50 | 0x2B55
        | 0x3030 | 0x303D | 0x3297 | 0x3299
        // zero-width joiner, keycap combiner, variation selectors
        | 0x200D | 0x20E3 | 0xFE00..=0xFE0F
        | 0x1F000..=0x1FAFF
        // tag characters used in flag sequences
        | 0xE0020..=0xE007F)
}

/// Unicode simple lowercase mapping: the single-codepoint lowercase form.
fn simple_lowercase(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        // U+0130 is the only unconditional multi-codepoint mapping; its simple form is 'i'.
        (Some(l), Some(_)) => l,
        _ => c,
    }
}

/// Normalizes raw social-media text. Total: never fails, may return empty text.
pub fn normalize(raw: &str) -> CleanText {
    let without_urls = url_pattern().replace_all(raw, " ");

    let mut out = String::with_capacity(without_urls.len());
    let mut pending_space = false;
    for c in without_urls.chars() {
        if is_emoji(c) {
            continue;
        }
        if !c.is_alphanumeric() {
            pending_space = true;
            continue;
        }
        let lower = simple_lowercase(c);
        if !lower.is_alphanumeric() {
            pending_space = true;
            continue;
        }
        if pending_space && !out.is_empty() {
            out.push(' ');
        }
        pending_space = false;
        out.push(lower);
    }
    CleanText(out)
}

fn is_clean(s: &str) -> bool {
    if s.starts_with(' ') || s.ends_with(' ') || s.contains("  ") {
        return false;
    }
    s.chars().all(|c| c == ' ' || (c.is_alphanumeric() && simple_lowercase(c) == c && !is_emoji(c)))
}

/// Splits normalized text on single spaces.
pub fn tokenize(text: &CleanText) -> Vec<Token> {
    if text.is_empty() {
        return Vec::new();
    }
    text.0.split(' ').map(|w| Token(w.to_owned())).collect()
}

/// Splits arbitrary text on whitespace. Used where input is assumed normalized
/// but comes from a file.
pub fn whitespace_tokens(text: &str) -> Vec<Token> {
    text.split_whitespace().map(|w| Token(w.to_owned())).collect()
}

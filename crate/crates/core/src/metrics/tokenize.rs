//! Tokenization compatible with the mteval-v13a rules, plus a character-level
//! scheme for Chinese, Japanese and Korean targets.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenizationScheme {
    /// mteval-v13a punctuation splitting.
    #[default]
    InternationalDefault,
    /// Ideographs, kana and hangul become single-character tokens; other runs use the default rules.
    CjkChar,
}

impl FromStr for TokenizationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "default" | "13a" | "international-default" => Ok(Self::InternationalDefault),
            "cjk-char" | "cjk" | "char" => Ok(Self::CjkChar),
            other => Err(Error::Parse(format!("unknown tokenizer '{other}'"))),
        }
    }
}

impl fmt::Display for TokenizationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InternationalDefault => "default",
            Self::CjkChar => "cjk-char",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Tokenizer {
    pub scheme: TokenizationScheme,
    pub lowercase: bool,
}

impl Tokenizer {
    pub fn new(scheme: TokenizationScheme) -> Self {
        Self {
            scheme,
            lowercase: false,
        }
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let owned;
        let text = if self.lowercase {
            owned = text.to_lowercase();
            owned.as_str()
        } else {
            text
        };
        match self.scheme {
            TokenizationScheme::InternationalDefault => tokenize_13a(text),
            TokenizationScheme::CjkChar => tokenize_cjk(text),
        }
    }
}

pub fn tokenize(text: &str, scheme: TokenizationScheme) -> Vec<String> {
    Tokenizer::new(scheme).tokenize(text)
}

static RULES: LazyLock<[(Regex, &'static str); 4]> = LazyLock::new(|| {
    [
        (Regex::new(r"([\{-~\[-` -&\(-\+:-@/])").unwrap(), " ${1} "),
        (Regex::new(r"([^0-9])([\.,])").unwrap(), "${1} ${2} "),
        (Regex::new(r"([\.,])([^0-9])").unwrap(), " ${1} ${2}"),
        (Regex::new(r"([0-9])(-)").unwrap(), "${1} ${2} "),
    ]
});

fn tokenize_13a(text: &str) -> Vec<String> {
    let mut line = text
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let mut line = format!(" {line} ");
    for (re, rep) in RULES.iter() {
        line = re.replace_all(&line, *rep).into_owned();
    }
    line.split_whitespace().map(str::to_owned).collect()
}

fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x1100..=0x11FF
        | 0x2E80..=0x2FDF
        | 0x3000..=0x303F
        | 0x3040..=0x31FF
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xA960..=0xA97F
        | 0xAC00..=0xD7FF
        | 0xF900..=0xFAFF
        | 0xFE30..=0xFE4F
        | 0xFF00..=0xFFEF
        | 0x20000..=0x2FA1F)
}

fn tokenize_cjk(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut run = String::new();
    for c in text.chars() {
        if is_cjk(c) {
            if !run.is_empty() {
                tokens.extend(tokenize_13a(&run));
                run.clear();
            }
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
        } else {
            run.push(c);
        }
    }
    if !run.is_empty() {
        tokens.extend(tokenize_13a(&run));
    }
    tokens
}

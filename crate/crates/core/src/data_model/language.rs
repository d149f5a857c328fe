//! Bundled language metadata: translation direction and target-script class.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    IntoEnglish,
    FromEnglish,
    NonEnglish,
}

impl Direction {
    pub fn of(source: &str, target: &str) -> Self {
        if base_code(target) == "en" {
            Direction::IntoEnglish
        } else if base_code(source) == "en" {
            Direction::FromEnglish
        } else {
            Direction::NonEnglish
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::IntoEnglish => "into-en",
            Direction::FromEnglish => "from-en",
            Direction::NonEnglish => "non-en",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "into-en" | "into-english" | "xx-en" => Ok(Direction::IntoEnglish),
            "from-en" | "from-english" | "en-xx" => Ok(Direction::FromEnglish),
            "non-en" | "non-english" | "xx-yy" => Ok(Direction::NonEnglish),
            other => Err(Error::Parse(format!("unknown direction '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScriptClass {
    Latin,
    NonLatin,
    /// Chinese, Japanese and Korean targets.
    Logogram,
}

impl ScriptClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ScriptClass::Latin => "latin",
            ScriptClass::NonLatin => "non-latin",
            ScriptClass::Logogram => "logogram",
        }
    }
}

impl fmt::Display for ScriptClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScriptClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "latin" => Ok(ScriptClass::Latin),
            "non-latin" | "nonlatin" => Ok(ScriptClass::NonLatin),
            "logogram" | "cjk" => Ok(ScriptClass::Logogram),
            other => Err(Error::Parse(format!("unknown script class '{other}'"))),
        }
    }
}

const LOGOGRAM: &[&str] = &["zh", "ja", "ko", "yue", "lzh"];

const NON_LATIN: &[&str] = &[
    "am", "ar", "as", "ba", "be", "bg", "bn", "bo", "ckb", "cv", "dv", "el", "fa", "gu", "he",
    "hi", "hy", "iu", "ka", "kk", "km", "kn", "ky", "lo", "mk", "ml", "mn", "mr", "my", "ne",
    "or", "pa", "prs", "ps", "ru", "sa", "sd", "si", "sr", "ta", "te", "tg", "th", "ti", "tt",
    "ug", "uk", "ur", "yi",
];

const LATIN: &[&str] = &[
    "af", "az", "bs", "ca", "cs", "cy", "da", "de", "en", "eo", "es", "et", "eu", "fi", "fil",
    "fj", "fo", "fr", "ga", "gd", "gl", "ha", "haw", "hr", "ht", "hu", "id", "ig", "is", "it",
    "jv", "kmr", "ku", "la", "lb", "lt", "lv", "mg", "mi", "ms", "mt", "mww", "nb", "nl", "nn",
    "no", "ny", "otq", "pl", "pt", "ro", "rw", "sk", "sl", "sm", "sn", "so", "sq", "st", "su",
    "sv", "sw", "tk", "tl", "tlh", "to", "tr", "ty", "uz", "vi", "xh", "yo", "yua", "zu",
];

/// Lowercased primary subtag: "pt-BR" -> "pt", "sr_Latn" -> "sr".
fn base_code(code: &str) -> String {
    code.split(['-', '_'])
        .next()
        .unwrap_or("")
        .to_ascii_lowercase()
}

/// Script class of a target language, or `None` for languages not in the table.
pub fn script_class(code: &str) -> Option<ScriptClass> {
    let lower = code.to_ascii_lowercase();
    // Script subtags override the language default.
    if lower.contains("latn") {
        return Some(ScriptClass::Latin);
    }
    if lower.contains("cyrl") || lower.contains("arab") {
        return Some(ScriptClass::NonLatin);
    }
    let base = base_code(code);
    if LOGOGRAM.contains(&base.as_str()) {
        Some(ScriptClass::Logogram)
    } else if NON_LATIN.contains(&base.as_str()) {
        Some(ScriptClass::NonLatin)
    } else if LATIN.contains(&base.as_str()) {
        Some(ScriptClass::Latin)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions() {
        assert_eq!(Direction::of("de", "en"), Direction::IntoEnglish);
        assert_eq!(Direction::of("en", "ja"), Direction::FromEnglish);
        assert_eq!(Direction::of("fr", "de"), Direction::NonEnglish);
        assert_eq!(Direction::of("en-US", "zh-Hans"), Direction::FromEnglish);
    }

    #[test]
    fn script_classes() {
        assert_eq!(script_class("zh-Hant"), Some(ScriptClass::Logogram));
        assert_eq!(script_class("ko"), Some(ScriptClass::Logogram));
        assert_eq!(script_class("ru"), Some(ScriptClass::NonLatin));
        assert_eq!(script_class("sr-Latn"), Some(ScriptClass::Latin));
        assert_eq!(script_class("de"), Some(ScriptClass::Latin));
        assert_eq!(script_class("xx"), None);
    }

    #[test]
    fn tables_are_disjoint() {
        for c in LOGOGRAM {
            assert!(!NON_LATIN.contains(c) && !LATIN.contains(c), "{c}");
        }
        for c in NON_LATIN {
            assert!(!LATIN.contains(c), "{c}");
        }
    }
}

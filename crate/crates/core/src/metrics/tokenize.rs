use std::fmt;

use serde::{Deserialize, Serialize};

/// A caption split into lowercase word tokens.
///
/// The only constructor is [`tokenize`], so every token is non-empty and
/// drawn from `[a-z0-9']`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct TokenSequence(Vec<String>);

impl TokenSequence {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

impl<'de> Deserialize<'de> for TokenSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Ok(tokenize(&raw))
    }
}

impl AsRef<[String]> for TokenSequence {
    fn as_ref(&self) -> &[String] {
        &self.0
    }
}

/// Lowercases, replaces every character outside `[a-z0-9']` with a space,
/// then splits on whitespace.
pub fn tokenize(raw: &str) -> TokenSequence {
    let cleaned: String = raw
        .to_lowercase()
        .chars()
        .map(|c| match c {
            'a'..='z' | '0'..='9' | '\'' => c,
            _ => ' ',
        })
        .collect();
    TokenSequence(cleaned.split_whitespace().map(str::to_owned).collect())
}

//! Dictionary sentiment scorers: polarity counts and contextual valence.

mod polarity;
mod valence;

use std::path::Path;

pub use polarity::{score_polarity, PolarityLexicon};
pub use valence::{score_valence, ValenceLexicon, ValenceParams, DEFAULT_BOOSTER_INCREMENT};

use crate::corpus::TokenStream;
use crate::error::{Error, Result};

/// Any lexicon-backed scorer.
#[derive(Debug, Clone)]
pub enum LexiconScorer {
    Polarity(PolarityLexicon),
    Valence(ValenceLexicon),
}

impl LexiconScorer {
    pub fn score(&self, tokens: &TokenStream) -> f64 {
        match self {
            LexiconScorer::Polarity(lex) => score_polarity(tokens, lex),
            LexiconScorer::Valence(lex) => score_valence(tokens, lex),
        }
    }
}

/// Non-blank, non-comment lines of a text file with their 1-based line
/// numbers. Leading and trailing spaces are trimmed; tabs are kept.
pub(crate) fn read_word_lines(path: &Path) -> Result<Vec<(u64, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i as u64 + 1, l.trim_matches(|c| c == ' ' || c == '\r')))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.to_owned()))
        .collect())
}

use std::collections::HashSet;
use std::path::Path;

use super::read_word_lines;
use crate::corpus::TokenStream;
use crate::error::{Error, Result};

/// Positive and negative word lists, as used by dictionary methods such as
/// Loughran-McDonald or the Harvard General Inquirer.
#[derive(Debug, Clone)]
pub struct PolarityLexicon {
    name: String,
    positive: HashSet<String>,
    negative: HashSet<String>,
}

impl PolarityLexicon {
    pub fn new<P, N>(name: impl Into<String>, positive: P, negative: N) -> Result<Self>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        let name = name.into();
        let positive: HashSet<String> = positive.into_iter().map(Into::into).collect();
        let negative: HashSet<String> = negative.into_iter().map(Into::into).collect();
        if let Some(w) = positive.iter().chain(&negative).find(|w| **w != w.to_lowercase()) {
            return Err(Error::Value(format!("lexicon {name}: word {w:?} is not lowercase")));
        }
        let mut both: Vec<&String> = positive.intersection(&negative).collect();
        if !both.is_empty() {
            both.sort();
            return Err(Error::Value(format!(
                "lexicon {name}: words listed as both positive and negative: {both:?}"
            )));
        }
        Ok(Self {
            name,
            positive,
            negative,
        })
    }

    /// Loads `positive.txt`-style and `negative.txt`-style word lists.
    /// Words are lowercased on read; blank lines and `#` comments are skipped.
    pub fn load(name: impl Into<String>, positive: &Path, negative: &Path) -> Result<Self> {
        let pos = read_word_lines(positive)?;
        let neg = read_word_lines(negative)?;
        Self::new(
            name,
            pos.into_iter().map(|(_, w)| w.to_lowercase()),
            neg.into_iter().map(|(_, w)| w.to_lowercase()),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn positive(&self) -> &HashSet<String> {
        &self.positive
    }

    pub fn negative(&self) -> &HashSet<String> {
        &self.negative
    }

    /// The same lexicon with positive and negative lists exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            name: self.name.clone(),
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }
}

/// `(P - N) / (P + N)` over lexicon hits, or 0 when nothing matches.
pub fn score_polarity(tokens: &TokenStream, lex: &PolarityLexicon) -> f64 {
    let (mut pos, mut neg) = (0u64, 0u64);
    for t in tokens.iter() {
        if lex.positive.contains(t) {
            pos += 1;
        } else if lex.negative.contains(t) {
            neg += 1;
        }
    }
    if pos + neg == 0 {
        0.0
    } else {
        (pos as f64 - neg as f64) / (pos + neg) as f64
    }
}

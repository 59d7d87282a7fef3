use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::read_word_lines;
use crate::corpus::TokenStream;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Booster increment used when a booster file line carries no value.
pub const DEFAULT_BOOSTER_INCREMENT: f64 = 0.293;

/// Tunable constants of the valence scorer. Defaults follow the VADER
/// reference implementation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValenceParams {
    /// Normalization constant in `s / sqrt(s^2 + alpha)`.
    pub alpha: f64,
    /// Multiplier applied to a negated word's valence.
    pub negation_factor: f64,
    /// How many preceding tokens are searched for a negator.
    pub negation_window: usize,
}

impl Default for ValenceParams {
    fn default() -> Self {
        Self {
            alpha: 15.0,
            negation_factor: -0.74,
            negation_window: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValenceLexicon {
    valence: HashMap<String, f64>,
    negators: HashSet<String>,
    boosters: HashMap<String, f64>,
    params: ValenceParams,
}

impl ValenceLexicon {
    pub fn new(
        valence: HashMap<String, f64>,
        negators: HashSet<String>,
        boosters: HashMap<String, f64>,
        params: ValenceParams,
    ) -> Result<Self> {
        if let Some((w, v)) = valence
            .iter()
            .find(|(_, v)| !(v.is_finite() && (-4.0..=4.0).contains(*v)))
        {
            return Err(Error::Value(format!("valence {v} for {w:?} outside [-4, 4]")));
        }
        if let Some(w) = valence
            .keys()
            .chain(&negators)
            .chain(boosters.keys())
            .find(|w| **w != w.to_lowercase())
        {
            return Err(Error::Value(format!("lexicon word {w:?} is not lowercase")));
        }
        if let Some(w) = negators.iter().find(|w| valence.contains_key(*w)) {
            return Err(Error::Value(format!("negator {w:?} also has a valence")));
        }
        if let Some((w, b)) = boosters.iter().find(|(_, b)| !b.is_finite()) {
            return Err(Error::Value(format!("booster {w:?} has non-finite increment {b}")));
        }
        if !(params.alpha.is_finite() && params.alpha > 0.0) {
            return Err(Error::Value(format!("alpha must be positive, got {}", params.alpha)));
        }
        if !params.negation_factor.is_finite() {
            return Err(Error::Value("negation factor must be finite".into()));
        }
        Ok(Self {
            valence,
            negators,
            boosters,
            params,
        })
    }

    /// Loads a `word<TAB>valence` lexicon (extra columns ignored, so the
    /// published VADER lexicon file works as-is), a negator word list and an
    /// optional `word<TAB>increment` booster list.
    pub fn load(
        valence: &Path,
        negators: &Path,
        boosters: Option<&Path>,
        params: ValenceParams,
    ) -> Result<Self> {
        let mut map = HashMap::new();
        for (line, text) in read_word_lines(valence)? {
            let mut cols = text.split('\t');
            let word = cols.next().unwrap_or("").trim().to_lowercase();
            let value = cols
                .next()
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::parse(valence, line, format!("expected word<TAB>valence, got {text:?}")))?;
            map.insert(word, value);
        }

        let neg = read_word_lines(negators)?
            .into_iter()
            .map(|(_, w)| w.to_lowercase())
            .collect();

        let mut boost = HashMap::new();
        if let Some(path) = boosters {
            for (line, text) in read_word_lines(path)? {
                let mut cols = text.split('\t');
                let word = cols.next().unwrap_or("").trim().to_lowercase();
                let inc = match cols.next().map(str::trim) {
                    None | Some("") => DEFAULT_BOOSTER_INCREMENT,
                    Some(v) => v
                        .parse::<f64>()
                        .map_err(|e| Error::parse(path, line, format!("bad increment {v:?}: {e}")))?,
                };
                boost.insert(word, inc);
            }
        }
        Self::new(map, neg, boost, params)
    }

    pub fn params(&self) -> &ValenceParams {
        &self.params
    }

    pub fn valence(&self, word: &str) -> Option<f64> {
        self.valence.get(word).copied()
    }

    /// Unnormalized sum of contextual valences.
    pub fn raw_sum(&self, tokens: &TokenStream) -> f64 {
        let words = tokens.tokens();
        let mut acc = CompensatedSum::new();
        for (i, word) in words.iter().enumerate() {
            let Some(base) = self.valence(word) else {
                continue;
            };
            let mut v = base;
            if let Some(inc) = i.checked_sub(1).and_then(|p| self.boosters.get(&words[p])) {
                if base > 0.0 {
                    v += inc;
                } else if base < 0.0 {
                    v -= inc;
                }
            }
            let from = i.saturating_sub(self.params.negation_window);
            if words[from..i].iter().any(|w| self.negators.contains(w)) {
                v *= self.params.negation_factor;
            }
            acc.add(v);
        }
        acc.value()
    }

    /// Maps a raw valence sum into (-1, 1).
    pub fn normalize(&self, sum: f64) -> f64 {
        if sum == 0.0 {
            0.0
        } else {
            sum / (sum * sum + self.params.alpha).sqrt()
        }
    }
}

/// Valence score of a token stream, normalized into [-1, 1].
pub fn score_valence(tokens: &TokenStream, lex: &ValenceLexicon) -> f64 {
    lex.normalize(lex.raw_sum(tokens))
}

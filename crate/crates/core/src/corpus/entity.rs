use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::Deserialize;

use super::article::Article;
use super::text::preprocess;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alias {
    pub text: String,
    pub case_sensitive: bool,
    // original-case tokens when case sensitive, lowercased otherwise
    tokens: Vec<String>,
}

impl Alias {
    pub fn new(text: impl Into<String>, case_sensitive: bool) -> Result<Self> {
        let text = text.into();
        let ts = preprocess(&text);
        if ts.is_empty() {
            return Err(Error::Value(format!("alias {text:?} contains no word characters")));
        }
        let tokens = if case_sensitive {
            ts.original().to_vec()
        } else {
            ts.tokens().to_vec()
        };
        Ok(Self {
            text,
            case_sensitive,
            tokens,
        })
    }

    fn lower_key(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.to_lowercase()).collect()
    }

    /// True when the alias occurs at token `at`. The final alias word also
    /// matches its possessive form ("Sachs's").
    fn matches_at(&self, lower: &[String], original: &[String], at: usize) -> bool {
        let hay = if self.case_sensitive { original } else { lower };
        let Some(window) = hay.get(at..at + self.tokens.len()) else {
            return false;
        };
        let last = self.tokens.len() - 1;
        window.iter().zip(&self.tokens).enumerate().all(|(i, (w, a))| {
            w == a || (i == last && strip_possessive(w) == Some(a.as_str()))
        })
    }
}

fn strip_possessive(token: &str) -> Option<&str> {
    token.strip_suffix("'s").or_else(|| token.strip_suffix("'S"))
}

/// Ticker to alias mapping used for whole-word company matching.
#[derive(Debug, Clone, Default)]
pub struct EntityTable {
    entries: BTreeMap<String, Vec<Alias>>,
    // lowercased first alias token -> (ticker, alias index)
    index: HashMap<String, Vec<(String, usize)>>,
}

#[derive(Deserialize)]
struct EntityRow {
    ticker: String,
    alias: String,
    #[serde(default)]
    case_sensitive: Option<u8>,
}

impl EntityTable {
    /// Validates and indexes the entries. Rejects lowercase or empty
    /// tickers, empty alias lists, and any alias that could match text
    /// claimed by an alias of a different ticker.
    pub fn new(entries: BTreeMap<String, Vec<Alias>>) -> Result<Self> {
        let mut by_key: HashMap<Vec<String>, Vec<(&str, &Alias)>> = HashMap::new();
        for (ticker, aliases) in &entries {
            if ticker.is_empty()
                || ticker.chars().any(char::is_whitespace)
                || *ticker != ticker.to_uppercase()
            {
                return Err(Error::Value(format!(
                    "ticker {ticker:?} must be non-empty uppercase without whitespace"
                )));
            }
            if aliases.is_empty() {
                return Err(Error::Value(format!("ticker {ticker} has no aliases")));
            }
            for alias in aliases {
                by_key.entry(alias.lower_key()).or_default().push((ticker, alias));
            }
        }

        for group in by_key.values() {
            for (i, (t1, a1)) in group.iter().enumerate() {
                for (t2, a2) in &group[i + 1..] {
                    let overlap = !a1.case_sensitive || !a2.case_sensitive || a1.tokens == a2.tokens;
                    if t1 != t2 && overlap {
                        return Err(Error::Value(format!(
                            "ambiguous alias {:?} maps to both {t1} and {t2}",
                            a1.text
                        )));
                    }
                }
            }
        }

        let mut index: HashMap<String, Vec<(String, usize)>> = HashMap::new();
        for (ticker, aliases) in &entries {
            for (i, alias) in aliases.iter().enumerate() {
                index
                    .entry(alias.tokens[0].to_lowercase())
                    .or_default()
                    .push((ticker.clone(), i));
            }
        }
        Ok(Self { entries, index })
    }

    /// Reads a `ticker,alias,case_sensitive` CSV. Rows for the same ticker
    /// accumulate; `case_sensitive` is 0 or 1 and defaults to 0 when blank.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        let mut entries: BTreeMap<String, Vec<Alias>> = BTreeMap::new();
        for row in reader.deserialize::<EntityRow>() {
            let row = row.map_err(|e| Error::csv(path, e))?;
            let case_sensitive = match row.case_sensitive {
                None | Some(0) => false,
                Some(1) => true,
                Some(v) => {
                    return Err(Error::Value(format!(
                        "case_sensitive must be 0 or 1, got {v} for alias {:?}",
                        row.alias
                    )))
                }
            };
            let alias = Alias::new(row.alias.trim(), case_sensitive)?;
            let list = entries.entry(row.ticker.trim().to_owned()).or_default();
            if !list.contains(&alias) {
                list.push(alias);
            }
        }
        Self::new(entries)
    }

    pub fn tickers(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn aliases(&self, ticker: &str) -> Option<&[Alias]> {
        self.entries.get(ticker).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn scan(&self, text: &str, hits: &mut BTreeSet<String>) {
        let ts = preprocess(text);
        let (lower, original) = (ts.tokens(), ts.original());
        for (pos, token) in lower.iter().enumerate() {
            let keys = [Some(token.as_str()), strip_possessive(token)];
            let candidates = keys.into_iter().flatten().filter_map(|k| self.index.get(k)).flatten();
            for (ticker, i) in candidates {
                if !hits.contains(ticker) && self.entries[ticker][*i].matches_at(lower, original, pos) {
                    hits.insert(ticker.clone());
                }
            }
        }
    }
}

/// Tickers with at least one alias occurring as a whole-word match in the
/// article title or body, in ascending order. Title and body are scanned
/// separately so an alias never spans the two.
pub fn match_entities(article: &Article, table: &EntityTable) -> Vec<String> {
    let mut hits = BTreeSet::new();
    table.scan(&article.title, &mut hits);
    table.scan(&article.body, &mut hits);
    hits.into_iter().collect()
}

/// Fills in `tickers` for every article and drops those with no match.
/// Returns the retained articles and the number dropped as irrelevant.
pub fn match_corpus(articles: Vec<Article>, table: &EntityTable) -> (Vec<Article>, usize) {
    let total = articles.len();
    let retained: Vec<Article> = articles
        .into_iter()
        .filter_map(|mut a| {
            a.tickers = match_entities(&a, table);
            (!a.tickers.is_empty()).then_some(a)
        })
        .collect();
    let dropped = total - retained.len();
    (retained, dropped)
}

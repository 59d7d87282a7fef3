//! Per-article scores and their per-company daily averages.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{preprocess, Article, TradingCalendar};
use crate::error::{Error, Result, RowViolation};
use crate::lexicon::LexiconScorer;
use crate::numeric::CompensatedSum;

/// Tolerance for the probability-sum and strength-consistency checks.
pub const PROBABILITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassProbabilities {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
}

impl ClassProbabilities {
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (label, p) in [
            ("p_pos", self.positive),
            ("p_neg", self.negative),
            ("p_neu", self.neutral),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{label} = {p} outside [0, 1]"));
            }
        }
        let total = self.positive + self.negative + self.neutral;
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(format!("probabilities sum to {total}, expected 1"));
        }
        Ok(())
    }

    pub fn strength(&self) -> f64 {
        self.positive - self.negative
    }
}

/// Sentiment strength of one article toward one company.
#[derive(Debug, Clone, PartialEq)]
pub struct ArticleScore {
    pub article_id: String,
    pub ticker: String,
    pub date: NaiveDate,
    pub strength: f64,
    pub probabilities: Option<ClassProbabilities>,
}

impl ArticleScore {
    pub fn new(
        article_id: impl Into<String>,
        ticker: impl Into<String>,
        date: NaiveDate,
        strength: f64,
        probabilities: Option<ClassProbabilities>,
    ) -> Result<Self> {
        let score = Self {
            article_id: article_id.into(),
            ticker: ticker.into(),
            date,
            strength,
            probabilities,
        };
        score.validate().map_err(Error::Value)?;
        Ok(score)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.article_id.is_empty() {
            return Err("empty article_id".into());
        }
        if self.ticker.is_empty() {
            return Err("empty ticker".into());
        }
        if !(-1.0..=1.0).contains(&self.strength) {
            return Err(format!("strength {} outside [-1, 1]", self.strength));
        }
        if let Some(p) = &self.probabilities {
            p.validate()?;
            if (p.strength() - self.strength).abs() > PROBABILITY_TOLERANCE {
                return Err(format!(
                    "strength {} inconsistent with p_pos - p_neg = {}",
                    self.strength,
                    p.strength()
                ));
            }
        }
        Ok(())
    }
}

pub const SCORE_FILE_HEADER: [&str; 7] =
    ["article_id", "ticker", "date", "strength", "p_pos", "p_neg", "p_neu"];

/// Reads a score file, validating every row. All failing rows are reported
/// together, each with its line number.
pub fn load_score_file(path: impl AsRef<Path>) -> Result<Vec<ArticleScore>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::csv(path, e))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let [id_c, ticker_c, date_c, strength_c] = ["article_id", "ticker", "date", "strength"].map(col);
    let (Some(id_c), Some(ticker_c), Some(date_c), Some(strength_c)) = (id_c, ticker_c, date_c, strength_c)
    else {
        return Err(Error::parse(
            path,
            1,
            "header must contain article_id, ticker, date and strength",
        ));
    };
    let prob_cols = [col("p_pos"), col("p_neg"), col("p_neu")];

    let mut scores = Vec::new();
    let mut violations = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |c: Option<usize>| c.and_then(|i| record.get(i)).map(str::trim).unwrap_or("");

        let parsed = (|| -> std::result::Result<ArticleScore, String> {
            let date = NaiveDate::parse_from_str(field(Some(date_c)), "%Y-%m-%d")
                .map_err(|e| format!("bad date {:?}: {e}", field(Some(date_c))))?;
            let num = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("bad number {s:?}"))
            };
            let strength = num(field(Some(strength_c)))?;
            let raw = prob_cols.map(field);
            let probabilities = match raw.iter().filter(|s| !s.is_empty()).count() {
                0 => None,
                3 => Some(ClassProbabilities {
                    positive: num(raw[0])?,
                    negative: num(raw[1])?,
                    neutral: num(raw[2])?,
                }),
                _ => return Err("p_pos, p_neg and p_neu must be all present or all empty".into()),
            };
            let score = ArticleScore {
                article_id: field(Some(id_c)).to_owned(),
                ticker: field(Some(ticker_c)).to_owned(),
                date,
                strength,
                probabilities,
            };
            score.validate()?;
            Ok(score)
        })();

        match parsed {
            Ok(s) => scores.push(s),
            Err(message) => violations.push(RowViolation { line, message }),
        }
    }

    if violations.is_empty() {
        Ok(scores)
    } else {
        Err(Error::Validation {
            path: path.to_owned(),
            violations,
        })
    }
}

/// Writes scores in the score-file CSV format, in the given order.
pub fn write_score_file<W: Write>(out: W, scores: &[ArticleScore]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCORE_FILE_HEADER)?;
    for s in scores {
        let (pos, neg, neu) = match &s.probabilities {
            Some(p) => (p.positive.to_string(), p.negative.to_string(), p.neutral.to_string()),
            None => Default::default(),
        };
        w.write_record([
            s.article_id.as_str(),
            s.ticker.as_str(),
            &s.date.to_string(),
            &s.strength.to_string(),
            &pos,
            &neg,
            &neu,
        ])?;
    }
    w.flush()
}

/// Scores each article once and emits one row per matched ticker, dated by
/// the article's publication date. Articles without tickers yield no rows.
pub fn score_articles(articles: &[Article], scorer: &LexiconScorer) -> Vec<ArticleScore> {
    let mut out = Vec::new();
    for a in articles {
        if a.tickers.is_empty() {
            continue;
        }
        let mut tokens = preprocess(&a.title);
        tokens.extend(preprocess(&a.body));
        let strength = scorer.score(&tokens);
        for t in &a.tickers {
            out.push(ArticleScore {
                article_id: a.id.clone(),
                ticker: t.clone(),
                date: a.published_at,
                strength,
                probabilities: None,
            });
        }
    }
    out
}

/// Mean sentiment of one company on one trading day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailySentiment {
    /// Trading day the articles were rolled onto, before any lag.
    pub date: NaiveDate,
    pub s_t: f64,
    pub n_t: usize,
}

/// Averages the strengths of one ticker's articles on one day.
///
/// Strengths are summed in sorted order, so the result does not depend on
/// the order of `scores`.
pub fn aggregate_daily(scores: &[ArticleScore]) -> Result<DailySentiment> {
    let first = scores.first().ok_or(Error::Empty("no scores for ticker-day"))?;
    if let Some(s) = scores
        .iter()
        .find(|s| s.ticker != first.ticker || s.date != first.date)
    {
        return Err(Error::Value(format!(
            "mixed groups in aggregation: {}@{} and {}@{}",
            first.ticker, first.date, s.ticker, s.date
        )));
    }
    Ok(mean_of(first.date, scores.iter().map(|s| s.strength)))
}

fn mean_of(date: NaiveDate, strengths: impl Iterator<Item = f64>) -> DailySentiment {
    let mut values: Vec<f64> = strengths.collect();
    values.sort_by(f64::total_cmp);
    let mut acc = CompensatedSum::new();
    acc.extend(values.iter().copied());
    DailySentiment {
        date,
        s_t: acc.value() / values.len() as f64,
        n_t: values.len(),
    }
}

/// Daily sentiment per company, keyed by the trading day on which it may
/// first be traded (observation day shifted by `lag` sessions).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignalPanel {
    days: BTreeMap<NaiveDate, BTreeMap<String, DailySentiment>>,
    lag: usize,
    out_of_range: usize,
    shifted_out: usize,
}

impl SignalPanel {
    pub fn lag(&self) -> usize {
        self.lag
    }

    pub fn day(&self, date: NaiveDate) -> Option<&BTreeMap<String, DailySentiment>> {
        self.days.get(&date)
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.days.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, &BTreeMap<String, DailySentiment>)> {
        self.days.iter().map(|(d, m)| (*d, m))
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// Number of (day, ticker) entries.
    pub fn len(&self) -> usize {
        self.days.values().map(BTreeMap::len).sum()
    }

    /// Sum of article counts over all entries.
    pub fn total_articles(&self) -> usize {
        self.days.values().flat_map(|m| m.values()).map(|e| e.n_t).sum()
    }

    /// Scores dated before the first or after the last calendar day.
    pub fn out_of_range(&self) -> usize {
        self.out_of_range
    }

    /// Articles whose entry was pushed past the calendar end by the lag.
    pub fn shifted_out(&self) -> usize {
        self.shifted_out
    }
}

/// Groups scores by ticker and trading day (weekend and holiday dates roll
/// forward), averages each group, then moves every entry `lag` sessions
/// later. Scores dated outside the calendar and entries shifted past its end
/// are dropped and counted.
pub fn build_signal_panel(
    scores: &[ArticleScore],
    cal: &TradingCalendar,
    lag: usize,
) -> Result<SignalPanel> {
    let (Some(first), Some(last)) = (cal.first(), cal.last()) else {
        return Err(Error::Empty("trading calendar"));
    };

    let mut groups: BTreeMap<(String, NaiveDate), Vec<f64>> = BTreeMap::new();
    let mut out_of_range = 0;
    for s in scores {
        if s.date < first || s.date > last {
            out_of_range += 1;
            continue;
        }
        let day = cal.to_trading_day(s.date)?;
        groups.entry((s.ticker.clone(), day)).or_default().push(s.strength);
    }

    let mut panel = SignalPanel {
        lag,
        out_of_range,
        ..SignalPanel::default()
    };
    for ((ticker, day), strengths) in groups {
        let entry = mean_of(day, strengths.into_iter());
        match cal.shift(day, lag) {
            Some(trade_day) => {
                panel.days.entry(trade_day).or_default().insert(ticker, entry);
            }
            None => panel.shifted_out += entry.n_t,
        }
    }
    Ok(panel)
}

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One news item. `tickers` is empty until entity matching has run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    #[serde(rename = "date")]
    pub published_at: NaiveDate,
    #[serde(default)]
    pub source: String,
    pub title: String,
    pub body: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tickers: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArticleFormat {
    Jsonl,
    Csv,
}

impl ArticleFormat {
    /// Guesses the format from a file extension; anything but `.csv` is
    /// treated as JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ArticleFormat::Csv,
            _ => ArticleFormat::Jsonl,
        }
    }
}

impl FromStr for ArticleFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(ArticleFormat::Jsonl),
            "csv" => Ok(ArticleFormat::Csv),
            other => Err(Error::Value(format!("unknown article format {other:?}"))),
        }
    }
}

#[derive(Deserialize)]
struct CsvArticle {
    id: String,
    date: NaiveDate,
    #[serde(default)]
    source: String,
    title: String,
    body: String,
    #[serde(default)]
    tickers: String,
}

/// Loads articles and returns them sorted by `(published_at, id)`.
pub fn load_articles(path: impl AsRef<Path>, format: ArticleFormat) -> Result<Vec<Article>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut articles = match format {
        ArticleFormat::Jsonl => read_jsonl(path, BufReader::new(file))?,
        ArticleFormat::Csv => read_csv(path, file)?,
    };

    let mut seen = HashSet::with_capacity(articles.len());
    for a in &articles {
        if !seen.insert(a.id.as_str()) {
            return Err(Error::Duplicate {
                what: "article id",
                key: a.id.clone(),
            });
        }
    }
    for a in &mut articles {
        normalize_tickers(&mut a.tickers);
    }
    articles.sort_by(|a, b| (a.published_at, &a.id).cmp(&(b.published_at, &b.id)));
    Ok(articles)
}

fn normalize_tickers(tickers: &mut Vec<String>) {
    let mut seen = HashSet::new();
    tickers.retain(|t| seen.insert(t.clone()));
}

fn read_jsonl(path: &Path, reader: impl BufRead) -> Result<Vec<Article>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let article: Article =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        out.push(article);
    }
    Ok(out)
}

fn read_csv(path: &Path, file: std::fs::File) -> Result<Vec<Article>> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(file);
    let mut out = Vec::new();
    for row in reader.deserialize::<CsvArticle>() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        out.push(Article {
            id: row.id,
            published_at: row.date,
            source: row.source,
            title: row.title,
            body: row.body,
            tickers: row
                .tickers
                .split(';')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::to_owned)
                .collect(),
        });
    }
    Ok(out)
}

/// Writes articles as JSONL, one object per line, in the given order.
pub fn write_articles<W: Write>(mut out: W, articles: &[Article]) -> std::io::Result<()> {
    for a in articles {
        serde_json::to_writer(&mut out, a)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Simple daily returns per ticker, each series sorted by date.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PriceTable {
    series: BTreeMap<String, Vec<(NaiveDate, f64)>>,
}

impl PriceTable {
    /// Validates that every series is strictly increasing in date and that
    /// every return is finite and above -1.
    pub fn new(series: BTreeMap<String, Vec<(NaiveDate, f64)>>) -> Result<Self> {
        for (ticker, rows) in &series {
            if let Some(w) = rows.windows(2).find(|w| w[0].0 >= w[1].0) {
                return Err(Error::Ordering {
                    key: ticker.clone(),
                    previous: w[0].0,
                    next: w[1].0,
                });
            }
            if let Some((d, r)) = rows.iter().find(|(_, r)| !(r.is_finite() && *r > -1.0)) {
                return Err(Error::Value(format!(
                    "return {r} for {ticker} on {d} must be finite and > -1"
                )));
            }
        }
        Ok(Self { series })
    }

    pub fn tickers(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn series(&self, ticker: &str) -> Option<&[(NaiveDate, f64)]> {
        self.series.get(ticker).map(Vec::as_slice)
    }

    pub fn return_on(&self, ticker: &str, date: NaiveDate) -> Option<f64> {
        let rows = self.series.get(ticker)?;
        rows.binary_search_by_key(&date, |(d, _)| *d)
            .ok()
            .map(|i| rows[i].1)
    }

    /// Every date on which at least one ticker has a return, ascending.
    pub fn dates(&self) -> Vec<NaiveDate> {
        let set: BTreeSet<NaiveDate> = self
            .series
            .values()
            .flat_map(|rows| rows.iter().map(|(d, _)| *d))
            .collect();
        set.into_iter().collect()
    }

    /// All returns on `date`, keyed by ticker.
    pub fn returns_on(&self, date: NaiveDate) -> BTreeMap<&str, f64> {
        self.series
            .keys()
            .filter_map(|t| self.return_on(t, date).map(|r| (t.as_str(), r)))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.series.values().all(Vec::is_empty)
    }
}

enum ValueColumn {
    Close(usize),
    Return(usize),
}

/// Reads a `ticker,date,close` or `ticker,date,return` CSV.
///
/// Rows for a ticker must appear in strictly increasing date order. With
/// close prices, the return on each row after a ticker's first is
/// `close_t / close_{t-1} - 1`; the first row yields no return.
pub fn load_market_data(path: impl AsRef<Path>) -> Result<PriceTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));

    let (ticker_col, date_col) = match (col("ticker"), col("date")) {
        (Some(t), Some(d)) => (t, d),
        _ => return Err(Error::parse(path, 1, "header must contain ticker and date columns")),
    };
    let value_col = match (col("close"), col("return")) {
        (Some(c), None) => ValueColumn::Close(c),
        (None, Some(r)) => ValueColumn::Return(r),
        _ => {
            return Err(Error::parse(
                path,
                1,
                "header must contain exactly one of close or return",
            ))
        }
    };

    let mut series: BTreeMap<String, Vec<(NaiveDate, f64)>> = BTreeMap::new();
    let mut last_seen: BTreeMap<String, (NaiveDate, f64)> = BTreeMap::new();

    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).map(str::trim).unwrap_or("");

        let ticker = field(ticker_col).to_owned();
        if ticker.is_empty() {
            return Err(Error::parse(path, line, "empty ticker"));
        }
        let date = NaiveDate::parse_from_str(field(date_col), "%Y-%m-%d")
            .map_err(|e| Error::parse(path, line, format!("bad date {:?}: {e}", field(date_col))))?;
        let parse_num = |i: usize| {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("bad number {:?}", field(i))))
        };

        if let Some((prev, _)) = last_seen.get(&ticker) {
            if *prev >= date {
                return Err(Error::Ordering {
                    key: ticker,
                    previous: *prev,
                    next: date,
                });
            }
        }

        match value_col {
            ValueColumn::Return(i) => {
                let r = parse_num(i)?;
                if r <= -1.0 {
                    return Err(Error::Value(format!(
                        "{}:{line}: return {r} for {ticker} must be > -1",
                        path.display()
                    )));
                }
                series.entry(ticker.clone()).or_default().push((date, r));
                last_seen.insert(ticker, (date, r));
            }
            ValueColumn::Close(i) => {
                let close = parse_num(i)?;
                if close <= 0.0 {
                    return Err(Error::Value(format!(
                        "{}:{line}: close {close} for {ticker} must be positive",
                        path.display()
                    )));
                }
                let rows = series.entry(ticker.clone()).or_default();
                if let Some((_, prev_close)) = last_seen.get(&ticker) {
                    rows.push((date, close / prev_close - 1.0));
                }
                last_seen.insert(ticker, (date, close));
            }
        }
    }
    PriceTable::new(series)
}

use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::error::{Error, Result};

/// Ordered trading days. Strictly increasing, never a Saturday or Sunday.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    days: Vec<NaiveDate>,
}

fn is_weekend(d: NaiveDate) -> bool {
    matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

impl TradingCalendar {
    pub fn new(days: Vec<NaiveDate>) -> Result<Self> {
        if let Some(w) = days.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Ordering {
                key: "trading calendar".into(),
                previous: w[0],
                next: w[1],
            });
        }
        if let Some(d) = days.iter().find(|d| is_weekend(**d)) {
            return Err(Error::Value(format!("trading calendar contains weekend date {d}")));
        }
        Ok(Self { days })
    }

    /// Builds a calendar from an unordered collection of dates, dropping
    /// duplicates.
    pub fn from_dates<I: IntoIterator<Item = NaiveDate>>(dates: I) -> Result<Self> {
        let mut days: Vec<NaiveDate> = dates.into_iter().collect();
        days.sort_unstable();
        days.dedup();
        Self::new(days)
    }

    /// Reads one `YYYY-MM-DD` date per line; blank lines and `#` comments
    /// are ignored.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut days = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let d = NaiveDate::parse_from_str(line, "%Y-%m-%d")
                .map_err(|e| Error::parse(path, i as u64 + 1, format!("bad date {line:?}: {e}")))?;
            days.push(d);
        }
        Self::new(days)
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn first(&self) -> Option<NaiveDate> {
        self.days.first().copied()
    }

    pub fn last(&self) -> Option<NaiveDate> {
        self.days.last().copied()
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.days.binary_search(&date).is_ok()
    }

    /// Position of `date` in the calendar, if it is a trading day.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.days.binary_search(&date).ok()
    }

    /// The earliest trading day on or after `date`.
    pub fn to_trading_day(&self, date: NaiveDate) -> Result<NaiveDate> {
        let idx = self.days.partition_point(|d| *d < date);
        match self.days.get(idx) {
            Some(d) => Ok(*d),
            None => Err(self.out_of_range(date)),
        }
    }

    /// The trading day `n` sessions after `date`, which must itself be a
    /// trading day. `None` when the shift runs past the calendar end.
    pub fn shift(&self, date: NaiveDate, n: usize) -> Option<NaiveDate> {
        let idx = self.index_of(date)?;
        self.days.get(idx + n).copied()
    }

    pub(crate) fn out_of_range(&self, date: NaiveDate) -> Error {
        match (self.first(), self.last()) {
            (Some(first), Some(last)) => Error::OutOfRange { date, first, last },
            _ => Error::Empty("trading calendar"),
        }
    }
}

//! Daily cross-sectional long-short portfolio on sentiment ranks.
//!
//! Each trading day the companies with a sentiment entry and a price
//! return are ranked by sentiment (descending, ties by ticker ascending).
//! The top `floor(f * M)` names are held long and the bottom `floor(f * M)`
//! short, equally weighted, and the day's return is the mean long return
//! minus the mean short return. No costs or slippage are modeled.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::PriceTable;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::signal::SignalPanel;

// Absorbs representation error in products such as 0.35 * 60.
const SELECTION_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestConfig {
    /// Share of ranked names held on each side, in (0, 0.5].
    pub fraction: f64,
    /// Sessions between observing sentiment and trading on it.
    pub lag: usize,
    /// Days with fewer ranked (and priced) names stay flat.
    pub min_names: usize,
    /// Annualized risk-free rate used in the Sharpe ratio.
    pub risk_free_rate: f64,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            fraction: 0.35,
            lag: 1,
            min_names: 3,
            risk_free_rate: 0.0,
        }
    }
}

impl BacktestConfig {
    /// Every bound violation, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.fraction > 0.0 && self.fraction <= 0.5) {
            v.push(format!("fraction must be in (0, 0.5], got {}", self.fraction));
        }
        if self.min_names < 2 {
            v.push(format!("min_names must be at least 2, got {}", self.min_names));
        }
        if !(self.risk_free_rate.is_finite() && self.risk_free_rate >= 0.0) {
            v.push(format!(
                "risk_free_rate must be finite and >= 0, got {}",
                self.risk_free_rate
            ));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }
}

/// Names held on one day, best-ranked first on both sides.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub longs: Vec<String>,
    pub shorts: Vec<String>,
}

/// Names per side for `ranked` candidates: `floor(fraction * ranked)`.
pub fn selection_size(ranked: usize, fraction: f64) -> usize {
    (fraction * ranked as f64 + SELECTION_EPSILON).floor() as usize
}

/// Ranks by sentiment and takes the top and bottom `floor(fraction * M)`.
pub fn rank_and_select(day_signals: &BTreeMap<String, f64>, fraction: f64) -> Selection {
    let mut ranked: Vec<(&String, f64)> = day_signals.iter().map(|(t, s)| (t, *s)).collect();
    // BTreeMap iteration is already ticker-ascending; a stable sort keeps it
    // as the tie-break.
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    let k = selection_size(ranked.len(), fraction).min(ranked.len() / 2);
    if k == 0 {
        return Selection::default();
    }
    Selection {
        longs: ranked[..k].iter().map(|(t, _)| (*t).clone()).collect(),
        shorts: ranked[ranked.len() - k..].iter().map(|(t, _)| (*t).clone()).collect(),
    }
}

fn equal_weight_mean(side: &'static str, names: &[String], day_returns: &BTreeMap<String, f64>) -> Result<f64> {
    if names.is_empty() {
        return Err(Error::Empty(side));
    }
    let mut acc = CompensatedSum::new();
    for t in names {
        let r = day_returns
            .get(t)
            .ok_or_else(|| Error::Value(format!("no return for {t} in {side}")))?;
        acc.add(*r);
    }
    Ok(acc.value() / names.len() as f64)
}

/// Equal-weight mean return of the long book.
pub fn daily_long_return(longs: &[String], day_returns: &BTreeMap<String, f64>) -> Result<f64> {
    equal_weight_mean("long book", longs, day_returns)
}

/// Equal-weight mean raw return of the shorted names. The sign flip for
/// the short side happens in [`daily_ls_return`].
pub fn daily_short_return(shorts: &[String], day_returns: &BTreeMap<String, f64>) -> Result<f64> {
    equal_weight_mean("short book", shorts, day_returns)
}

pub fn daily_ls_return(r_long: f64, r_short: f64) -> f64 {
    r_long - r_short
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerDay {
    pub date: NaiveDate,
    pub selection: Selection,
}

impl LedgerDay {
    pub fn n_long(&self) -> usize {
        self.selection.longs.len()
    }

    pub fn n_short(&self) -> usize {
        self.selection.shorts.len()
    }

    pub fn is_flat(&self) -> bool {
        self.selection.longs.is_empty() && self.selection.shorts.is_empty()
    }
}

/// Positions for every backtest day; flat days have empty books.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PositionLedger {
    pub days: Vec<LedgerDay>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyReturn {
    pub date: NaiveDate,
    pub n_long: usize,
    pub n_short: usize,
    pub r_long: f64,
    pub r_short: f64,
    pub r_daily: f64,
}

/// One row per trading day, strictly increasing in date.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReturnSeries {
    rows: Vec<DailyReturn>,
}

impl ReturnSeries {
    pub fn new(rows: Vec<DailyReturn>) -> Result<Self> {
        if let Some(w) = rows.windows(2).find(|w| w[0].date >= w[1].date) {
            return Err(Error::Ordering {
                key: "return series".into(),
                previous: w[0].date,
                next: w[1].date,
            });
        }
        if let Some(r) = rows.iter().find(|r| !r.r_daily.is_finite()) {
            return Err(Error::Value(format!("non-finite daily return on {}", r.date)));
        }
        Ok(Self { rows })
    }

    /// A single-leg series, e.g. a benchmark index: `r_long = r_daily`,
    /// `r_short = 0`.
    pub fn from_returns(returns: &[(NaiveDate, f64)]) -> Result<Self> {
        Self::new(
            returns
                .iter()
                .map(|&(date, r)| DailyReturn {
                    date,
                    n_long: 0,
                    n_short: 0,
                    r_long: r,
                    r_short: 0.0,
                    r_daily: r,
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> &[DailyReturn] {
        &self.rows
    }

    pub fn daily_returns(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.r_daily).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.rows.iter().map(|r| r.date).collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Runs the daily long-short rule over every price date from the first to
/// the last panel date.
///
/// Names without a price return on a day are removed before ranking. Days
/// with fewer than `min_names` remaining names, or too few for one name per
/// side, are flat with a zero return.
pub fn run_backtest(
    panel: &SignalPanel,
    prices: &PriceTable,
    cfg: &BacktestConfig,
) -> Result<(PositionLedger, ReturnSeries)> {
    cfg.validate()?;
    let price_dates = prices.dates();
    let (Some(first), Some(last)) = (panel.dates().next(), panel.dates().last()) else {
        return Err(Error::Config(vec!["signal panel is empty".into()]));
    };
    if !panel
        .dates()
        .any(|d| price_dates.binary_search(&d).is_ok())
    {
        return Err(Error::Config(vec![format!(
            "no overlap between signal dates ({first}..={last}) and price dates"
        )]));
    }

    let mut ledger = PositionLedger::default();
    let mut rows = Vec::new();
    for &date in price_dates.iter().filter(|d| (first..=last).contains(*d)) {
        let mut signals = BTreeMap::new();
        let mut day_returns = BTreeMap::new();
        if let Some(day) = panel.day(date) {
            for (ticker, entry) in day {
                if let Some(r) = prices.return_on(ticker, date) {
                    signals.insert(ticker.clone(), entry.s_t);
                    day_returns.insert(ticker.clone(), r);
                }
            }
        }

        let selection = if signals.len() >= cfg.min_names {
            rank_and_select(&signals, cfg.fraction)
        } else {
            Selection::default()
        };
        let row = if selection.longs.is_empty() {
            DailyReturn {
                date,
                n_long: 0,
                n_short: 0,
                r_long: 0.0,
                r_short: 0.0,
                r_daily: 0.0,
            }
        } else {
            let r_long = daily_long_return(&selection.longs, &day_returns)?;
            let r_short = daily_short_return(&selection.shorts, &day_returns)?;
            DailyReturn {
                date,
                n_long: selection.longs.len(),
                n_short: selection.shorts.len(),
                r_long,
                r_short,
                r_daily: daily_ls_return(r_long, r_short),
            }
        };
        rows.push(row);
        ledger.days.push(LedgerDay { date, selection });
    }
    Ok((ledger, ReturnSeries::new(rows)?))
}

pub const DAILY_CSV_HEADER: [&str; 6] = ["date", "n_long", "n_short", "r_long", "r_short", "r_daily"];
pub const POSITIONS_CSV_HEADER: [&str; 4] = ["date", "side", "ticker", "weight"];

pub fn write_daily_csv<W: Write>(out: W, series: &ReturnSeries) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DAILY_CSV_HEADER)?;
    for r in series.rows() {
        w.write_record([
            r.date.to_string(),
            r.n_long.to_string(),
            r.n_short.to_string(),
            r.r_long.to_string(),
            r.r_short.to_string(),
            r.r_daily.to_string(),
        ])?;
    }
    w.flush()
}

pub fn read_daily_csv(path: impl AsRef<Path>) -> Result<ReturnSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut rows = Vec::new();
    for row in reader.deserialize::<DailyReturn>() {
        rows.push(row.map_err(|e| Error::csv(path, e))?);
    }
    ReturnSeries::new(rows)
}

/// One row per held name; long weights are `+1/k`, short weights `-1/k`.
pub fn write_positions_csv<W: Write>(out: W, ledger: &PositionLedger) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(POSITIONS_CSV_HEADER)?;
    for day in &ledger.days {
        let date = day.date.to_string();
        for (side, names, sign) in [
            ("long", &day.selection.longs, 1.0),
            ("short", &day.selection.shorts, -1.0),
        ] {
            let weight = (sign / names.len() as f64).to_string();
            for t in names {
                w.write_record([date.as_str(), side, t.as_str(), weight.as_str()])?;
            }
        }
    }
    w.flush()
}

#[derive(Deserialize)]
struct PositionRow {
    date: NaiveDate,
    side: String,
    ticker: String,
}

/// Rebuilds the books of every day listed in `series` from a positions CSV.
pub fn read_positions_csv(path: impl AsRef<Path>, series: &ReturnSeries) -> Result<PositionLedger> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut books: BTreeMap<NaiveDate, Selection> = BTreeMap::new();
    for row in reader.deserialize::<PositionRow>() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let sel = books.entry(row.date).or_default();
        match row.side.as_str() {
            "long" => sel.longs.push(row.ticker),
            "short" => sel.shorts.push(row.ticker),
            other => return Err(Error::Value(format!("unknown side {other:?} in {}", path.display()))),
        }
    }
    let days = series
        .rows()
        .iter()
        .map(|r| LedgerDay {
            date: r.date,
            selection: books.remove(&r.date).unwrap_or_default(),
        })
        .collect();
    if let Some(date) = books.keys().next() {
        return Err(Error::Value(format!("positions on {date} have no daily return row")));
    }
    Ok(PositionLedger { days })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TradingCalendar;
    use crate::signal::{build_signal_panel, ArticleScore};
    use proptest::prelude::*;

    fn signals(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(t, s)| (t.to_string(), *s)).collect()
    }

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn ten_names_at_35_percent() {
        let s: BTreeMap<String, f64> = (0..10).map(|i| (format!("T{i}"), i as f64 / 10.0)).collect();
        let sel = rank_and_select(&s, 0.35);
        assert_eq!(sel.longs, ["T9", "T8", "T7"]);
        assert_eq!(sel.shorts, ["T2", "T1", "T0"]);
    }

    #[test]
    fn selection_sizes() {
        assert_eq!(selection_size(10, 0.35), 3);
        assert_eq!(selection_size(417, 0.35), 145);
        assert_eq!(selection_size(2, 0.35), 0);
        assert_eq!(selection_size(4, 0.25), 1);
        assert_eq!(selection_size(20, 0.35), 7);
        assert_eq!(selection_size(60, 0.35), 21);
        assert_eq!(selection_size(100, 0.35), 35);
        assert_eq!(selection_size(10, 0.1), 1);
        assert_eq!(selection_size(7, 0.5), 3);
    }

    #[test]
    fn too_few_names_hold_nothing() {
        let sel = rank_and_select(&signals(&[("A", 0.1), ("B", -0.2)]), 0.35);
        assert!(sel.longs.is_empty() && sel.shorts.is_empty());
    }

    #[test]
    fn ties_fall_back_to_ticker_order() {
        let sel = rank_and_select(&signals(&[("D", 0.0), ("B", 0.0), ("A", 0.0), ("C", 0.0)]), 0.5);
        assert_eq!(sel.longs, ["A", "B"]);
        assert_eq!(sel.shorts, ["C", "D"]);
    }

    #[test]
    fn book_returns() {
        let rets = signals(&[("A", 0.01), ("B", 0.03), ("C", -0.02), ("D", 0.0)]);
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!((daily_long_return(&names(&["A", "B"]), &rets).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(daily_long_return(&names(&["C"]), &rets).unwrap(), -0.02);
        assert!(daily_long_return(&[], &rets).is_err());
        let rets2 = signals(&[("A", -0.01), ("B", -0.03)]);
        assert!((daily_short_return(&names(&["A", "B"]), &rets2).unwrap() + 0.02).abs() < 1e-15);
        assert_eq!(daily_short_return(&names(&["D"]), &rets).unwrap(), 0.0);
        assert!(daily_short_return(&[], &rets).is_err());
        assert!(daily_short_return(&names(&["Z"]), &rets).is_err());
    }

    #[test]
    fn long_short_difference() {
        assert!((daily_ls_return(0.01, -0.02) - 0.03).abs() < 1e-15);
        assert_eq!(daily_ls_return(0.123, 0.123), 0.0);
        assert!((daily_ls_return(0.02, 0.005) - 0.015).abs() < 1e-15);
    }

    #[test]
    fn config_bounds() {
        assert!(BacktestConfig::default().violations().is_empty());
        let bad = BacktestConfig {
            fraction: 0.6,
            min_names: 1,
            risk_free_rate: -0.01,
            ..Default::default()
        };
        let v = bad.violations();
        assert_eq!(v.len(), 3);
        assert!(v[0].contains("fraction must be in (0, 0.5]"));
        assert!(BacktestConfig { fraction: 0.0, ..Default::default() }.validate().is_err());
        assert!(BacktestConfig { fraction: 0.5, ..Default::default() }.validate().is_ok());
    }

    fn one_day(signal: &[(&str, f64)], returns: &[(&str, f64)], cfg: BacktestConfig) -> (PositionLedger, ReturnSeries) {
        let day = d("2020-03-02");
        let cal = TradingCalendar::new(vec![day]).unwrap();
        let scores: Vec<ArticleScore> = signal
            .iter()
            .map(|(t, s)| ArticleScore::new(format!("a{t}"), *t, day, *s, None).unwrap())
            .collect();
        let panel = build_signal_panel(&scores, &cal, 0).unwrap();
        let prices = PriceTable::new(returns.iter().map(|(t, r)| (t.to_string(), vec![(day, *r)])).collect()).unwrap();
        run_backtest(&panel, &prices, &cfg).unwrap()
    }

    #[test]
    fn four_name_hand_trace() {
        let cfg = BacktestConfig {
            fraction: 0.25,
            lag: 0,
            ..Default::default()
        };
        let (ledger, series) = one_day(
            &[("A", 0.9), ("B", 0.5), ("C", -0.5), ("D", -0.9)],
            &[("A", 0.02), ("B", 0.5), ("C", -0.3), ("D", -0.01)],
            cfg,
        );
        assert_eq!(ledger.days[0].selection.longs, ["A"]);
        assert_eq!(ledger.days[0].selection.shorts, ["D"]);
        let row = series.rows()[0];
        assert_eq!((row.n_long, row.n_short), (1, 1));
        assert!((row.r_daily - 0.03).abs() < 1e-15);
    }

    #[test]
    fn below_min_names_is_flat() {
        let (ledger, series) = one_day(&[("A", 0.9), ("B", -0.9)], &[("A", 0.02), ("B", -0.01)], BacktestConfig::default());
        assert!(ledger.days[0].is_flat());
        assert_eq!(series.rows()[0].r_daily, 0.0);
    }

    #[test]
    fn unpriced_names_dropped_before_ranking() {
        let cfg = BacktestConfig {
            fraction: 0.25,
            lag: 0,
            ..Default::default()
        };
        // E would be the top long but has no return; re-ranking over A..D
        let (ledger, series) = one_day(
            &[("A", 0.9), ("B", 0.5), ("C", -0.5), ("D", -0.9), ("E", 1.0)],
            &[("A", 0.02), ("B", 0.5), ("C", -0.3), ("D", -0.01)],
            cfg,
        );
        assert_eq!(ledger.days[0].selection.longs, ["A"]);
        assert!((series.rows()[0].r_daily - 0.03).abs() < 1e-15);
    }

    #[test]
    fn no_overlap_is_config_error() {
        let cal = TradingCalendar::new(vec![d("2020-03-02"), d("2020-03-03")]).unwrap();
        let score = ArticleScore::new("a", "A", d("2020-03-02"), 0.1, None).unwrap();
        let panel = build_signal_panel(&[score], &cal, 0).unwrap();
        let prices = PriceTable::new(BTreeMap::from([("A".into(), vec![(d("2020-03-03"), 0.1)])])).unwrap();
        assert!(matches!(
            run_backtest(&panel, &prices, &BacktestConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn csv_exports_round_trip() {
        let cfg = BacktestConfig {
            fraction: 0.25,
            lag: 0,
            ..Default::default()
        };
        let (ledger, series) = one_day(
            &[("A", 0.9), ("B", 0.5), ("C", -0.5), ("D", -0.9)],
            &[("A", 0.02), ("B", 0.5), ("C", -0.3), ("D", -0.01)],
            cfg,
        );
        let dir = tempfile::tempdir().unwrap();
        let daily = dir.path().join("daily.csv");
        let pos = dir.path().join("positions.csv");
        write_daily_csv(std::fs::File::create(&daily).unwrap(), &series).unwrap();
        write_positions_csv(std::fs::File::create(&pos).unwrap(), &ledger).unwrap();
        let text = std::fs::read_to_string(&pos).unwrap();
        assert_eq!(text, "date,side,ticker,weight\n2020-03-02,long,A,1\n2020-03-02,short,D,-1\n");
        let back = read_daily_csv(&daily).unwrap();
        assert_eq!(back, series);
        assert_eq!(read_positions_csv(&pos, &back).unwrap(), ledger);
    }

    fn distinct_signals() -> impl Strategy<Value = BTreeMap<String, f64>> {
        proptest::collection::btree_map("[A-Z]{1,3}", -1000i32..1000, 1..30)
            .prop_map(|m| m.into_iter().map(|(t, s)| (t, s as f64 / 1000.0)).collect())
            .prop_filter("distinct scores", |m: &BTreeMap<String, f64>| {
                let mut v: Vec<i64> = m.values().map(|s| (s * 1000.0).round() as i64).collect();
                v.sort_unstable();
                v.windows(2).all(|w| w[0] != w[1])
            })
    }

    proptest! {
        #[test]
        fn sides_equal_and_disjoint(s in distinct_signals(), f in 0.01f64..=0.5) {
            let sel = rank_and_select(&s, f);
            prop_assert_eq!(sel.longs.len(), sel.shorts.len());
            prop_assert_eq!(sel.longs.len(), selection_size(s.len(), f));
            prop_assert!(sel.longs.iter().all(|t| !sel.shorts.contains(t)));
        }

        #[test]
        fn offset_invariant(s in distinct_signals(), c in -5.0f64..5.0, f in 0.01f64..=0.5) {
            let shifted: BTreeMap<String, f64> = s.iter().map(|(t, v)| (t.clone(), v + c)).collect();
            prop_assert_eq!(rank_and_select(&s, f), rank_and_select(&shifted, f));
        }

        #[test]
        fn negation_swaps_books(s in distinct_signals(), f in 0.01f64..=0.5) {
            let neg: BTreeMap<String, f64> = s.iter().map(|(t, v)| (t.clone(), -v)).collect();
            let a = rank_and_select(&s, f);
            let mut b = rank_and_select(&neg, f);
            b.longs.reverse();
            b.shorts.reverse();
            prop_assert_eq!(a.longs, b.shorts);
            prop_assert_eq!(a.shorts, b.longs);
        }
    }
}

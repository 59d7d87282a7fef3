//! Metrics JSON and the per-day and rolling CSV files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{rolling_stats, MetricsReport, RollingStats};
use crate::output::write_atomic;
use crate::portfolio::{write_daily_csv, BacktestConfig, PositionLedger, ReturnSeries};

pub const METRICS_FILE: &str = "metrics.json";
pub const DAILY_FILE: &str = "daily.csv";
pub const ROLLING_FILE: &str = "rolling.csv";

/// Run settings echoed into the metrics file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub scorer: String,
    pub fraction: f64,
    pub lag: usize,
    pub min_names: usize,
    pub risk_free_rate: f64,
    pub rolling_window: usize,
    pub compounded_cumulative: bool,
    pub seed: Option<u64>,
}

impl ConfigEcho {
    pub fn new(scorer: impl Into<String>, bt: &BacktestConfig, rolling_window: usize) -> Self {
        Self {
            scorer: scorer.into(),
            fraction: bt.fraction,
            lag: bt.lag,
            min_names: bt.min_names,
            risk_free_rate: bt.risk_free_rate,
            rolling_window,
            compounded_cumulative: false,
            seed: None,
        }
    }
}

/// Contents of `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub strategy: MetricsReport,
    pub benchmark: Option<MetricsReport>,
    pub config_echo: ConfigEcho,
}

impl Report {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line() as u64, e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Computes strategy (and optional benchmark) metrics and writes
/// `metrics.json`, `daily.csv` and `rolling.csv` into `out_dir`.
///
/// The rolling file is written with only its header when the series is
/// shorter than the window.
pub fn emit_report(
    out_dir: &Path,
    ledger: &PositionLedger,
    series: &ReturnSeries,
    benchmark: Option<&ReturnSeries>,
    echo: &ConfigEcho,
) -> Result<(Report, Vec<PathBuf>)> {
    if ledger.days.len() != series.len()
        || ledger
            .days
            .iter()
            .zip(series.rows())
            .any(|(l, r)| l.date != r.date || l.n_long() != r.n_long || l.n_short() != r.n_short)
    {
        return Err(Error::Internal("position ledger does not match return series".into()));
    }

    let strategy = MetricsReport::compute(
        &series.daily_returns(),
        echo.risk_free_rate,
        echo.compounded_cumulative,
    )?;
    let benchmark = benchmark
        .map(|b| MetricsReport::compute(&b.daily_returns(), echo.risk_free_rate, echo.compounded_cumulative))
        .transpose()?;
    let report = Report {
        strategy,
        benchmark,
        config_echo: echo.clone(),
    };

    let rolling = if series.len() >= echo.rolling_window {
        rolling_stats(series, echo.rolling_window)?
    } else {
        log::warn!(
            "series has {} days, fewer than the {}-day rolling window; rolling.csv left empty",
            series.len(),
            echo.rolling_window
        );
        RollingStats {
            window: echo.rolling_window,
            points: vec![],
        }
    };

    let metrics_path = out_dir.join(METRICS_FILE);
    let daily_path = out_dir.join(DAILY_FILE);
    let rolling_path = out_dir.join(ROLLING_FILE);
    let json = report.to_json();
    write_atomic(&metrics_path, |w| w.write_all(json.as_bytes()))?;
    write_atomic(&daily_path, |w| write_daily_csv(w, series))?;
    write_atomic(&rolling_path, |w| write_rolling_csv(w, &rolling))?;
    Ok((report, vec![metrics_path, daily_path, rolling_path]))
}

pub fn write_rolling_csv<W: std::io::Write>(out: W, stats: &RollingStats) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "ma", "mstd"])?;
    for p in &stats.points {
        w.write_record([p.date.to_string(), p.ma.to_string(), p.mstd.to_string()])?;
    }
    w.flush()
}

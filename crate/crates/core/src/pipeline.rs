//! Batch driver: ingest, score, backtest and report from one TOML file.
//!
//! Every stage reads its inputs from disk and writes its outputs into the
//! output directory, so stages can be rerun individually:
//!
//! | stage    | reads                                  | writes                          |
//! |----------|----------------------------------------|---------------------------------|
//! | ingest   | articles, entity table                 | `articles.matched.jsonl`        |
//! | score    | matched articles + lexicon, or scores  | `scores.csv`                    |
//! | backtest | `scores.csv`, market data, calendar    | `daily.csv`, `positions.csv`    |
//! | report   | `daily.csv`, `positions.csv`, benchmark| `metrics.json`, `daily.csv`, `rolling.csv` |

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::corpus::{
    load_articles, load_market_data, match_corpus, write_articles, ArticleFormat, EntityTable,
    PriceTable, TradingCalendar,
};
use crate::error::{Error, Result};
use crate::lexicon::{LexiconScorer, PolarityLexicon, ValenceLexicon, ValenceParams};
use crate::output::write_atomic;
use crate::portfolio::{
    read_daily_csv, read_positions_csv, run_backtest, write_daily_csv, write_positions_csv,
    BacktestConfig, ReturnSeries,
};
use crate::report::{emit_report, ConfigEcho, Report, DAILY_FILE};
use crate::signal::{build_signal_panel, load_score_file, score_articles, write_score_file};

pub const MATCHED_ARTICLES_FILE: &str = "articles.matched.jsonl";
pub const SCORES_FILE: &str = "scores.csv";
pub const POSITIONS_FILE: &str = "positions.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scorer {
    PolarityLmd,
    PolarityHiv4,
    ValenceVader,
    External(PathBuf),
}

impl FromStr for Scorer {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "polarity:lmd" => Ok(Scorer::PolarityLmd),
            "polarity:hiv4" => Ok(Scorer::PolarityHiv4),
            "valence:vader" => Ok(Scorer::ValenceVader),
            other => match other.strip_prefix("external:") {
                Some(path) if !path.trim().is_empty() => Ok(Scorer::External(PathBuf::from(path.trim()))),
                _ => Err(format!(
                    "unknown scorer {other:?}; expected polarity:lmd, polarity:hiv4, valence:vader or external:<score-file>"
                )),
            },
        }
    }
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scorer::PolarityLmd => f.write_str("polarity:lmd"),
            Scorer::PolarityHiv4 => f.write_str("polarity:hiv4"),
            Scorer::ValenceVader => f.write_str("valence:vader"),
            Scorer::External(p) => write!(f, "external:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScorerSelection {
    One(String),
    Many(Vec<String>),
}

impl ScorerSelection {
    pub fn entries(&self) -> Vec<&str> {
        match self {
            ScorerSelection::One(s) => vec![s.as_str()],
            ScorerSelection::Many(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub articles: Option<PathBuf>,
    pub articles_format: Option<String>,
    pub entities: Option<PathBuf>,
    pub market_data: Option<PathBuf>,
    pub calendar: Option<PathBuf>,
    pub benchmark: Option<PathBuf>,
    pub benchmark_ticker: Option<String>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarityPaths {
    pub positive: PathBuf,
    pub negative: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValencePaths {
    pub valence: PathBuf,
    pub negators: PathBuf,
    pub boosters: Option<PathBuf>,
    #[serde(default)]
    pub params: ValenceParams,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lexicons {
    pub lmd: Option<PolarityPaths>,
    pub hiv4: Option<PolarityPaths>,
    pub vader: Option<ValencePaths>,
}

/// Backtest bounds as written in the file; signed so negative values can
/// be reported instead of failing to parse.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestSection {
    pub fraction: f64,
    pub lag: i64,
    pub min_names: i64,
    pub risk_free_rate: f64,
}

impl Default for BacktestSection {
    fn default() -> Self {
        let d = BacktestConfig::default();
        Self {
            fraction: d.fraction,
            lag: d.lag as i64,
            min_names: d.min_names as i64,
            risk_free_rate: d.risk_free_rate,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    pub rolling_window: usize,
    /// Adds the compounded cumulative return next to the summed one.
    pub compounded_cumulative: bool,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self {
            rolling_window: 30,
            compounded_cumulative: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Echoed into the report; no stage draws random numbers.
    pub seed: Option<u64>,
    pub scorer: ScorerSelection,
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub lexicons: Lexicons,
    #[serde(default)]
    pub backtest: BacktestSection,
    #[serde(default)]
    pub report: ReportSection,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(vec![e.message().to_owned()]))?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("cannot read config {}: {e}", path.display())]))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base)
            .map_err(|e| match e {
                Error::Config(v) => Error::Config(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
                e => e,
            })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn resolved(&self, p: &Option<PathBuf>) -> Option<PathBuf> {
        p.as_deref().map(|p| self.resolve(p))
    }

    pub fn set_output_dir(&mut self, dir: PathBuf) {
        // overrides are taken relative to the working directory
        let dir = if dir.is_absolute() {
            dir
        } else {
            std::env::current_dir().map(|c| c.join(&dir)).unwrap_or(dir)
        };
        self.paths.output_dir = Some(dir);
    }

    pub fn output_dir(&self) -> Result<PathBuf> {
        self.resolved(&self.paths.output_dir)
            .ok_or_else(|| Error::Config(vec!["paths.output_dir is required".into()]))
    }

    /// The single selected scorer; fails if the selection is not exactly one
    /// known scorer.
    pub fn scorer(&self) -> Result<Scorer> {
        match self.scorer.entries().as_slice() {
            [one] => one.parse().map_err(|e| Error::Config(vec![e])),
            many => Err(Error::Config(vec![format!(
                "exactly one scorer must be selected, got {}",
                many.len()
            )])),
        }
    }

    pub fn backtest_config(&self) -> Result<BacktestConfig> {
        let b = self.backtest;
        if b.lag < 0 || b.min_names < 0 {
            return Err(Error::Config(vec!["lag and min_names must be non-negative".into()]));
        }
        let cfg = BacktestConfig {
            fraction: b.fraction,
            lag: b.lag as usize,
            min_names: b.min_names as usize,
            risk_free_rate: b.risk_free_rate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn config_echo(&self) -> Result<ConfigEcho> {
        let mut echo = ConfigEcho::new(
            self.scorer.entries().join(","),
            &self.backtest_config()?,
            self.report.rolling_window,
        );
        echo.compounded_cumulative = self.report.compounded_cumulative;
        echo.seed = self.seed;
        Ok(echo)
    }
}

fn require_file(violations: &mut Vec<String>, key: &str, path: Option<PathBuf>) {
    match path {
        None => violations.push(format!("{key} is required")),
        Some(p) if !p.is_file() => violations.push(format!("{key}: file not found: {}", p.display())),
        Some(_) => {}
    }
}

fn check_writable_dir(violations: &mut Vec<String>, dir: &Path) {
    let mut probe = Some(dir);
    while let Some(p) = probe {
        if p.exists() {
            match std::fs::metadata(p) {
                Ok(m) if !m.is_dir() => {
                    violations.push(format!("output_dir: {} is not a directory", p.display()))
                }
                Ok(m) if m.permissions().readonly() => {
                    violations.push(format!("output_dir: {} is not writable", p.display()))
                }
                Ok(_) => {}
                Err(e) => violations.push(format!("output_dir: {}: {e}", p.display())),
            }
            return;
        }
        probe = p.parent().filter(|p| !p.as_os_str().is_empty());
    }
}

/// Every problem with the configuration; empty when it is runnable.
pub fn validate_config(cfg: &PipelineConfig) -> Vec<String> {
    let mut v = Vec::new();

    let entries = cfg.scorer.entries();
    if entries.len() != 1 {
        v.push(format!("exactly one scorer must be selected, got {}", entries.len()));
    }
    for entry in &entries {
        let scorer = match entry.parse::<Scorer>() {
            Ok(s) => s,
            Err(e) => {
                v.push(e);
                continue;
            }
        };
        let needs_corpus = !matches!(scorer, Scorer::External(_));
        if needs_corpus {
            require_file(&mut v, "paths.articles", cfg.resolved(&cfg.paths.articles));
            require_file(&mut v, "paths.entities", cfg.resolved(&cfg.paths.entities));
        }
        match &scorer {
            Scorer::PolarityLmd | Scorer::PolarityHiv4 => {
                let (key, lex) = if scorer == Scorer::PolarityLmd {
                    ("lexicons.lmd", &cfg.lexicons.lmd)
                } else {
                    ("lexicons.hiv4", &cfg.lexicons.hiv4)
                };
                match lex {
                    None => v.push(format!("{key} is required for scorer {scorer}")),
                    Some(p) => {
                        require_file(&mut v, &format!("{key}.positive"), Some(cfg.resolve(&p.positive)));
                        require_file(&mut v, &format!("{key}.negative"), Some(cfg.resolve(&p.negative)));
                    }
                }
            }
            Scorer::ValenceVader => match &cfg.lexicons.vader {
                None => v.push(format!("lexicons.vader is required for scorer {scorer}")),
                Some(p) => {
                    require_file(&mut v, "lexicons.vader.valence", Some(cfg.resolve(&p.valence)));
                    require_file(&mut v, "lexicons.vader.negators", Some(cfg.resolve(&p.negators)));
                    if let Some(b) = &p.boosters {
                        require_file(&mut v, "lexicons.vader.boosters", Some(cfg.resolve(b)));
                    }
                    if !(p.params.alpha.is_finite() && p.params.alpha > 0.0) {
                        v.push(format!("lexicons.vader.params.alpha must be positive, got {}", p.params.alpha));
                    }
                }
            },
            Scorer::External(p) => {
                require_file(&mut v, "scorer external score file", Some(cfg.resolve(p)))
            }
        }
    }

    require_file(&mut v, "paths.market_data", cfg.resolved(&cfg.paths.market_data));
    if cfg.paths.calendar.is_some() {
        require_file(&mut v, "paths.calendar", cfg.resolved(&cfg.paths.calendar));
    }
    if cfg.paths.benchmark.is_some() {
        require_file(&mut v, "paths.benchmark", cfg.resolved(&cfg.paths.benchmark));
    }
    if let Some(fmt) = &cfg.paths.articles_format {
        if fmt.parse::<ArticleFormat>().is_err() {
            v.push(format!("paths.articles_format must be jsonl or csv, got {fmt:?}"));
        }
    }

    let b = cfg.backtest;
    if !(b.fraction > 0.0 && b.fraction <= 0.5) {
        v.push(format!("fraction must be in (0, 0.5], got {}", b.fraction));
    }
    if b.lag < 0 {
        v.push(format!("lag must be >= 0, got {}", b.lag));
    }
    if b.min_names < 2 {
        v.push(format!("min_names must be at least 2, got {}", b.min_names));
    }
    if !(b.risk_free_rate.is_finite() && b.risk_free_rate >= 0.0) {
        v.push(format!("risk_free_rate must be finite and >= 0, got {}", b.risk_free_rate));
    }
    if cfg.report.rolling_window < 2 {
        v.push(format!("rolling_window must be >= 2, got {}", cfg.report.rolling_window));
    }

    match cfg.resolved(&cfg.paths.output_dir) {
        None => v.push("paths.output_dir is required".into()),
        Some(dir) => check_writable_dir(&mut v, &dir),
    }
    v
}

fn ensure_valid(cfg: &PipelineConfig) -> Result<PathBuf> {
    let v = validate_config(cfg);
    if !v.is_empty() {
        return Err(Error::Config(v));
    }
    let out = cfg.output_dir()?;
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestSummary {
    pub loaded: usize,
    pub retained: usize,
    pub dropped: usize,
}

/// Loads articles, matches tickers and writes the relevant ones.
pub fn ingest(cfg: &PipelineConfig) -> Result<IngestSummary> {
    let out = ensure_valid(cfg)?;
    (|| {
        let path = cfg
            .resolved(&cfg.paths.articles)
            .ok_or_else(|| Error::Config(vec!["paths.articles is required".into()]))?;
        let format = match &cfg.paths.articles_format {
            Some(f) => f.parse()?,
            None => ArticleFormat::from_path(&path),
        };
        let articles = load_articles(&path, format)?;
        let entities_path = cfg
            .resolved(&cfg.paths.entities)
            .ok_or_else(|| Error::Config(vec!["paths.entities is required".into()]))?;
        let table = EntityTable::load(entities_path)?;
        let loaded = articles.len();
        let (retained, dropped) = match_corpus(articles, &table);
        log::info!("ingest: {loaded} articles, {} matched, {dropped} irrelevant", retained.len());
        write_atomic(&out.join(MATCHED_ARTICLES_FILE), |w| write_articles(w, &retained))?;
        Ok(IngestSummary {
            loaded,
            retained: retained.len(),
            dropped,
        })
    })()
    .map_err(|e: Error| e.in_stage("ingest"))
}

fn load_scorer(cfg: &PipelineConfig, scorer: &Scorer) -> Result<LexiconScorer> {
    let missing = |key: &str| Error::Config(vec![format!("{key} is required for scorer {scorer}")]);
    match scorer {
        Scorer::PolarityLmd | Scorer::PolarityHiv4 => {
            let (name, paths) = if *scorer == Scorer::PolarityLmd {
                ("lmd", cfg.lexicons.lmd.as_ref().ok_or_else(|| missing("lexicons.lmd"))?)
            } else {
                ("hiv4", cfg.lexicons.hiv4.as_ref().ok_or_else(|| missing("lexicons.hiv4"))?)
            };
            Ok(LexiconScorer::Polarity(PolarityLexicon::load(
                name,
                &cfg.resolve(&paths.positive),
                &cfg.resolve(&paths.negative),
            )?))
        }
        Scorer::ValenceVader => {
            let p = cfg.lexicons.vader.as_ref().ok_or_else(|| missing("lexicons.vader"))?;
            Ok(LexiconScorer::Valence(ValenceLexicon::load(
                &cfg.resolve(&p.valence),
                &cfg.resolve(&p.negators),
                p.boosters.as_deref().map(|b| cfg.resolve(b)).as_deref(),
                p.params,
            )?))
        }
        Scorer::External(_) => Err(Error::Internal("external scorer has no lexicon".into())),
    }
}

/// Produces `scores.csv` from the matched articles, or validates and
/// normalizes an external score file into it.
pub fn score(cfg: &PipelineConfig) -> Result<usize> {
    let out = ensure_valid(cfg)?;
    (|| {
        let scorer = cfg.scorer()?;
        let scores = match &scorer {
            Scorer::External(p) => load_score_file(cfg.resolve(p))?,
            _ => {
                let lex = load_scorer(cfg, &scorer)?;
                let articles = load_articles(out.join(MATCHED_ARTICLES_FILE), ArticleFormat::Jsonl)?;
                score_articles(&articles, &lex)
            }
        };
        log::info!("score: {} article-ticker rows with {scorer}", scores.len());
        write_atomic(&out.join(SCORES_FILE), |w| write_score_file(w, &scores))?;
        Ok(scores.len())
    })()
    .map_err(|e: Error| e.in_stage("score"))
}

fn load_calendar(cfg: &PipelineConfig, prices: &PriceTable) -> Result<TradingCalendar> {
    match cfg.resolved(&cfg.paths.calendar) {
        None => TradingCalendar::from_dates(prices.dates()),
        Some(p) => {
            let cal = TradingCalendar::load(&p)?;
            if let Some(d) = prices.dates().into_iter().find(|d| !cal.contains(*d)) {
                return Err(Error::Value(format!(
                    "market data date {d} is not in the trading calendar {}",
                    p.display()
                )));
            }
            Ok(cal)
        }
    }
}

fn market_data(cfg: &PipelineConfig) -> Result<PriceTable> {
    let p = cfg
        .resolved(&cfg.paths.market_data)
        .ok_or_else(|| Error::Config(vec!["paths.market_data is required".into()]))?;
    load_market_data(p)
}

/// Aggregates `scores.csv` into the daily panel and runs the long-short
/// backtest, writing `daily.csv` and `positions.csv`.
pub fn backtest(cfg: &PipelineConfig) -> Result<ReturnSeries> {
    let out = ensure_valid(cfg)?;
    (|| {
        let bt = cfg.backtest_config()?;
        let prices = market_data(cfg)?;
        let cal = load_calendar(cfg, &prices)?;
        let scores = load_score_file(out.join(SCORES_FILE))?;
        let panel = build_signal_panel(&scores, &cal, bt.lag)?;
        log::info!(
            "backtest: {} panel entries from {} rows ({} outside calendar, {} past end after lag)",
            panel.len(),
            scores.len(),
            panel.out_of_range(),
            panel.shifted_out()
        );
        let (ledger, series) = run_backtest(&panel, &prices, &bt)?;
        write_atomic(&out.join(DAILY_FILE), |w| write_daily_csv(w, &series))?;
        write_atomic(&out.join(POSITIONS_FILE), |w| write_positions_csv(w, &ledger))?;
        Ok(series)
    })()
    .map_err(|e: Error| e.in_stage("backtest"))
}

fn benchmark_series(cfg: &PipelineConfig, strategy: &ReturnSeries) -> Result<Option<ReturnSeries>> {
    let Some(path) = cfg.resolved(&cfg.paths.benchmark) else {
        return Ok(None);
    };
    let table = load_market_data(&path)?;
    let ticker = match &cfg.paths.benchmark_ticker {
        Some(t) => t.clone(),
        None => {
            let tickers: Vec<&str> = table.tickers().collect();
            match tickers.as_slice() {
                [one] => one.to_string(),
                _ => {
                    return Err(Error::Config(vec![format!(
                        "{} has {} tickers; set paths.benchmark_ticker",
                        path.display(),
                        tickers.len()
                    )]))
                }
            }
        }
    };
    let rows = table
        .series(&ticker)
        .ok_or_else(|| Error::Value(format!("benchmark ticker {ticker} not in {}", path.display())))?;
    let dates = strategy.dates();
    let aligned: Vec<_> = rows
        .iter()
        .filter(|(d, _)| dates.binary_search(d).is_ok())
        .copied()
        .collect();
    Ok(Some(ReturnSeries::from_returns(&aligned)?))
}

/// Computes metrics from the backtest outputs and writes the report files.
pub fn report(cfg: &PipelineConfig) -> Result<Report> {
    let out = ensure_valid(cfg)?;
    (|| {
        let series = read_daily_csv(out.join(DAILY_FILE))?;
        let ledger = read_positions_csv(out.join(POSITIONS_FILE), &series)?;
        let benchmark = benchmark_series(cfg, &series)?;
        let (report, files) = emit_report(&out, &ledger, &series, benchmark.as_ref(), &cfg.config_echo()?)?;
        log::info!("report: wrote {} files to {}", files.len(), out.display());
        Ok(report)
    })()
    .map_err(|e: Error| e.in_stage("report"))
}

/// All stages in order. The configuration is validated before anything is
/// written.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Report> {
    ensure_valid(cfg)?;
    if !matches!(cfg.scorer()?, Scorer::External(_)) {
        ingest(cfg)?;
    }
    score(cfg)?;
    backtest(cfg)?;
    report(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, dir: &Path) -> PipelineConfig {
        PipelineConfig::from_toml(text, dir).unwrap()
    }

    fn touch(dir: &Path, names: &[&str]) {
        for n in names {
            std::fs::write(dir.join(n), "").unwrap();
        }
    }

    const BASE: &str = r#"
scorer = "polarity:lmd"
[paths]
articles = "a.jsonl"
entities = "e.csv"
market_data = "m.csv"
output_dir = "out"
[lexicons.lmd]
positive = "p.txt"
negative = "n.txt"
"#;

    #[test]
    fn valid_config_has_no_violations() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["a.jsonl", "e.csv", "m.csv", "p.txt", "n.txt"]);
        assert_eq!(validate_config(&cfg(BASE, dir.path())), Vec::<String>::new());
    }

    #[test]
    fn reports_every_violation() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["a.jsonl", "e.csv", "p.txt", "n.txt"]);
        let text = format!("{BASE}[backtest]\nfraction = 0.6\nlag = -1\n");
        let v = validate_config(&cfg(&text, dir.path()));
        assert!(v.iter().any(|m| m.contains("fraction must be in (0, 0.5]")), "{v:?}");
        assert!(v.iter().any(|m| m.contains("lag must be >= 0")));
        assert!(v.iter().any(|m| m.contains("paths.market_data")));
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn two_scorers_rejected() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["a.jsonl", "e.csv", "m.csv", "p.txt", "n.txt", "s.csv"]);
        let text = BASE.replace(
            "scorer = \"polarity:lmd\"",
            "scorer = [\"polarity:lmd\", \"external:s.csv\"]",
        );
        let c = cfg(&text, dir.path());
        let v = validate_config(&c);
        assert!(v.iter().any(|m| m.contains("exactly one scorer")), "{v:?}");
        assert!(c.scorer().is_err());
    }

    #[test]
    fn unknown_scorer_and_missing_lexicon() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["a.jsonl", "e.csv", "m.csv"]);
        let text = BASE.replace("polarity:lmd", "polarity:hiv4");
        let v = validate_config(&cfg(&text, dir.path()));
        assert!(v.iter().any(|m| m.contains("lexicons.hiv4 is required")), "{v:?}");
        let text = BASE.replace("polarity:lmd", "bert");
        let v = validate_config(&cfg(&text, dir.path()));
        assert!(v.iter().any(|m| m.contains("unknown scorer")), "{v:?}");
    }

    #[test]
    fn external_scorer_needs_no_corpus() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["m.csv", "s.csv"]);
        let text = "scorer = \"external:s.csv\"\n[paths]\nmarket_data = \"m.csv\"\noutput_dir = \"out\"\n";
        let c = cfg(text, dir.path());
        assert!(validate_config(&c).is_empty());
        assert_eq!(c.scorer().unwrap(), Scorer::External("s.csv".into()));
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let err = PipelineConfig::from_toml("scorer = \"polarity:lmd\"\nfractoin = 0.3\n", ".").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn output_dir_must_be_a_directory() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["a.jsonl", "e.csv", "m.csv", "p.txt", "n.txt", "out"]);
        let v = validate_config(&cfg(BASE, dir.path()));
        assert!(v.iter().any(|m| m.contains("not a directory")), "{v:?}");
    }

    #[test]
    fn scorer_names_round_trip() {
        for s in ["polarity:lmd", "polarity:hiv4", "valence:vader", "external:x/y.csv"] {
            assert_eq!(s.parse::<Scorer>().unwrap().to_string(), s);
        }
        assert!("external:".parse::<Scorer>().is_err());
    }
}

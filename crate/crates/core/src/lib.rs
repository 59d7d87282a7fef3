//! News sentiment to long-short portfolio pipeline.
//!
//! - [`corpus`]: article, entity-table and market-data ingestion, text
//!   tokenization and the trading calendar
//! - [`lexicon`]: polarity-count and valence dictionary scorers
//! - [`signal`]: per-article scores, score files and daily per-company
//!   sentiment
//! - [`portfolio`]: daily ranking, long/short selection and returns
//! - [`metrics`] and [`report`]: evaluation statistics and output files
//! - [`pipeline`]: config-driven batch driver used by the CLI

pub mod corpus;
pub mod error;
pub mod lexicon;
pub mod metrics;
pub mod numeric;
pub mod output;
pub mod pipeline;
pub mod portfolio;
pub mod report;
pub mod signal;

pub use error::{Error, Result};

//! Ingestion: articles, entity matching, text normalization, market data
//! and the trading calendar.

mod article;
mod calendar;
mod entity;
mod market;
mod text;

pub use article::{load_articles, write_articles, Article, ArticleFormat};
pub use calendar::TradingCalendar;
pub use entity::{match_corpus, match_entities, Alias, EntityTable};
pub use market::{load_market_data, PriceTable};
pub use text::{preprocess, TokenStream};

//! Multifactor election forecasting from tweet corpora.
//!
//! The pipeline tags tweets by party, scores their sentiment against a
//! lexicon, ranks users by PageRank on the direct-message network, forms
//! daily distributions of per-user multifactor scores
//! (`1000 * x_i * sum_j S_j R_j`), and forecasts the daily medians with a
//! FARIMA model. Forecasts are converted into two-party vote shares and
//! compared against tweet-count baselines.

pub mod election;
pub mod error;
pub mod farima;
pub mod ingest;
pub mod mfscore;
pub mod netgraph;
pub mod optim;
pub mod pipeline;
pub mod sentiment;
pub mod synthkit;
pub mod text;

pub use error::{Error, Result};
pub use ingest::{AnalysisWindow, KeywordTable, PartyId, TweetRecord, UserId};
pub use sentiment::{Lexicon, PartyCounts, Polarity};

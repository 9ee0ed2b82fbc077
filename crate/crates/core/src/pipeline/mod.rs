//! Pipeline orchestration: configuration, in-memory analysis steps and the
//! file-based stages behind the command-line tool.

mod analysis;
mod chart;
mod config;
mod stages;

pub use analysis::{
    day_buckets, forecast_records, forecast_series, forecast_track, party_series, prepare_records, shares_from,
    tagged_parties, window_centrality, ForecastSummary, PartyForecast, TrackPoint,
};
pub use chart::{line_chart, Line};
pub use config::{FarimaConfig, GraphStatsConfig, PipelineConfig, Slicing};
pub use stages::{
    load_record_store, read_counts_csv, read_series, run_baselines, run_evaluate, run_forecast, run_graph_stats,
    run_ingest, run_score, run_sentiment_stats, run_synth, slug, synth_spec, StageReport, COUNTS_FILE, RECORD_STORE,
    TOP_USERS,
};

//! `mfcast`: run the forecasting pipeline stage by stage over files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mfcast_core::mfscore::Statistic;
use mfcast_core::pipeline::{self, PipelineConfig, StageReport};
use mfcast_core::{AnalysisWindow, Error, Result};

#[derive(Parser)]
#[command(name = "mfcast", version, about = "Multifactor election forecasting from tweet corpora")]
struct Cli {
    /// JSON pipeline configuration; defaults apply to missing fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for synthetic corpus generation (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Analysis window as `YYYY-MM-DD:YYYY-MM-DD` (overrides `window`).
    #[arg(long, global = true, value_name = "START:END")]
    window: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, tag and score a corpus; write per-day, per-party record files
    /// and polarity counts.
    Ingest(IngestArgs),
    /// Polarity breakdown per party, overall and for the most central users.
    SentimentStats,
    /// Interaction graph, PageRank and topology measures.
    GraphStats,
    /// Daily MFS distributions, summary series, distances and t fits.
    Score(StatisticArg),
    /// FARIMA fits, one-step forecasts, vote shares and forecast track.
    Forecast(StatisticArg),
    /// Tweet-count baseline vote shares.
    Baselines(CountsArgs),
    /// Method comparison with MAE against the reference results.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Corpus file (.jsonl or .csv).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Tab-separated sentiment lexicon.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Keyword table JSON.
    #[arg(long)]
    keywords: Option<PathBuf>,
    /// Leave tweets that match several parties untagged.
    #[arg(long)]
    drop_multiparty: bool,
}

#[derive(Args)]
struct StatisticArg {
    /// Daily summary statistic: median or mean.
    #[arg(long)]
    statistic: Option<Statistic>,
}

#[derive(Args)]
struct CountsArgs {
    /// `party,total,positive,negative,neutral` CSV instead of ingested counts.
    #[arg(long)]
    counts: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    counts: CountsArgs,
    #[command(flatten)]
    statistic: StatisticArg,
    /// Reference results JSON (`actual` and `polls` shares).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Forecast values as `PARTY=VALUE`, one per party.
    #[arg(long = "forecast", value_name = "PARTY=VALUE")]
    forecasts: Vec<String>,
}

#[derive(Args)]
struct SynthArgs {
    /// Corpus spec JSON.
    #[arg(long)]
    spec: Option<PathBuf>,
}

fn parse_forecasts(items: &[String]) -> Result<std::collections::BTreeMap<mfcast_core::PartyId, f64>> {
    items
        .iter()
        .map(|item| {
            let (party, value) = item
                .rsplit_once('=')
                .ok_or_else(|| Error::Parameter(format!("expected PARTY=VALUE, got {item:?}")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|e| Error::Parameter(format!("forecast value {value:?}: {e}")))?;
            Ok((party.trim().into(), v))
        })
        .collect()
}

fn build_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) if !path.exists() => {
            return Err(Error::MissingInput(format!("config {} does not exist", path.display())))
        }
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(w) = &cli.window {
        cfg.window = w.parse::<AnalysisWindow>()?;
    }
    match &cli.command {
        Command::Ingest(a) => {
            if a.corpus.is_some() {
                cfg.corpus = a.corpus.clone();
            }
            if a.lexicon.is_some() {
                cfg.lexicon = a.lexicon.clone();
            }
            if a.keywords.is_some() {
                cfg.keywords = a.keywords.clone();
            }
            cfg.drop_multiparty |= a.drop_multiparty;
        }
        Command::Score(s) | Command::Forecast(s) => {
            if let Some(st) = s.statistic {
                cfg.statistic = st;
            }
        }
        Command::Baselines(c) => {
            if c.counts.is_some() {
                cfg.counts = c.counts.clone();
            }
        }
        Command::Evaluate(e) => {
            if e.counts.counts.is_some() {
                cfg.counts = e.counts.counts.clone();
            }
            if let Some(st) = e.statistic.statistic {
                cfg.statistic = st;
            }
            if e.reference.is_some() {
                cfg.reference = e.reference.clone();
            }
            if !e.forecasts.is_empty() {
                cfg.forecasts = Some(parse_forecasts(&e.forecasts)?);
            }
        }
        Command::Synth(s) => {
            if s.spec.is_some() {
                cfg.synth_spec = s.spec.clone();
            }
        }
        Command::SentimentStats | Command::GraphStats => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<StageReport> {
    let cfg = build_config(cli)?;
    match cli.command {
        Command::Ingest(_) => pipeline::run_ingest(&cfg),
        Command::SentimentStats => pipeline::run_sentiment_stats(&cfg),
        Command::GraphStats => pipeline::run_graph_stats(&cfg),
        Command::Score(_) => pipeline::run_score(&cfg),
        Command::Forecast(_) => pipeline::run_forecast(&cfg),
        Command::Baselines(_) => pipeline::run_baselines(&cfg),
        Command::Evaluate(_) => pipeline::run_evaluate(&cfg),
        Command::Synth(_) => pipeline::run_synth(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({"error": e.kind(), "message": e.to_string()});
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}

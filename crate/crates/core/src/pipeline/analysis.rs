//! In-memory pipeline steps shared by the file-based stages.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::config::{FarimaConfig, PipelineConfig};
use crate::election::{vote_share_from_forecasts, VoteShares};
use crate::error::{Error, Result};
use crate::farima::{fit_farima, forecast, DEstimate, FarimaModel, MIN_GPH_LENGTH};
use crate::ingest::{tag_records, AnalysisWindow, KeywordTable, PartyId, TweetRecord, UserId};
use crate::mfscore::{daily_distributions, DailyDistribution, DailySeries, Statistic};
use crate::netgraph::{build_graph, build_weighted_graph, pagerank, CentralityScores, PageRankParams};
use crate::sentiment::{score_records, Lexicon};

/// Tags, scores and window-filters raw records, returning them ordered by
/// `(timestamp, tweet_id)`.
pub fn prepare_records(
    mut records: Vec<TweetRecord>,
    table: &KeywordTable,
    lexicon: &Lexicon,
    window: &AnalysisWindow,
    drop_multiparty: bool,
) -> Vec<TweetRecord> {
    records.retain(|r| window.contains(r.day()));
    tag_records(&mut records, table, drop_multiparty);
    score_records(&mut records, lexicon);
    records.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.tweet_id.cmp(&b.tweet_id)));
    records
}

/// PageRank on the interaction graph of all records in the window.
pub fn window_centrality(records: &[TweetRecord], params: &PageRankParams, weighted: bool) -> Result<CentralityScores> {
    let graph = if weighted {
        build_weighted_graph(records)
    } else {
        build_graph(records)
    };
    if graph.is_empty() {
        return Err(Error::EmptySample("no records in the analysis window".into()));
    }
    pagerank(&graph, params)
}

pub fn day_buckets(records: &[TweetRecord]) -> BTreeMap<NaiveDate, Vec<TweetRecord>> {
    let mut out: BTreeMap<NaiveDate, Vec<TweetRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.day()).or_default().push(r.clone());
    }
    out
}

/// Daily MFS distributions for `party` and their summary series.
pub fn party_series(
    window: &AnalysisWindow,
    buckets: &BTreeMap<NaiveDate, Vec<TweetRecord>>,
    centrality: &BTreeMap<UserId, f64>,
    party: &PartyId,
    statistic: Statistic,
    coefficient: f64,
) -> (Vec<DailyDistribution>, DailySeries) {
    let dists = daily_distributions(window, buckets, centrality, party, coefficient);
    let series = DailySeries::from_distributions(party, statistic, &dists);
    (dists, series)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartyForecast {
    pub party: PartyId,
    pub statistic: Statistic,
    pub model: FarimaModel,
    pub d_estimate: DEstimate,
    /// One-step-ahead forecast after the last window day.
    pub forecast: f64,
    /// Days without active users, filled by interpolation before fitting.
    pub interpolated_days: usize,
    pub observations: usize,
}

/// Fits FARIMA to a daily series (gaps interpolated) and forecasts one step.
pub fn forecast_series(series: &DailySeries, cfg: &FarimaConfig) -> Result<PartyForecast> {
    if series.values.len() < MIN_GPH_LENGTH {
        return Err(Error::SeriesTooShort {
            required: MIN_GPH_LENGTH,
            actual: series.values.len(),
        });
    }
    let filled = series.filled()?;
    let fit = fit_farima(&filled, cfg.order, cfg.truncation)?;
    let next = forecast(&fit.model, &filled, 1)?[0];
    Ok(PartyForecast {
        party: series.party.clone(),
        statistic: series.statistic,
        model: fit.model,
        d_estimate: fit.d_estimate,
        forecast: next,
        interpolated_days: series.missing_days(),
        observations: filled.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub day: NaiveDate,
    pub party: PartyId,
    /// Forecast for `day` from a model fitted on all earlier days.
    pub forecast: f64,
    pub observed: Option<f64>,
}

/// Expanding-window one-step forecasts: for every day from the configured
/// track start, the model is refitted on all preceding days.
pub fn forecast_track(series: &DailySeries, cfg: &FarimaConfig) -> Result<Vec<TrackPoint>> {
    let filled = series.filled()?;
    let first = cfg
        .track_start
        .and_then(|d| series.days.iter().position(|&x| x >= d))
        .unwrap_or(0)
        .max(MIN_GPH_LENGTH);
    let mut out = Vec::new();
    for t in first..filled.len() {
        let fit = fit_farima(&filled[..t], cfg.order, cfg.truncation)?;
        out.push(TrackPoint {
            day: series.days[t],
            party: series.party.clone(),
            forecast: forecast(&fit.model, &filled[..t], 1)?[0],
            observed: series.values[t],
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastSummary {
    pub forecasts: Vec<PartyForecast>,
    pub shares: VoteShares,
}

impl ForecastSummary {
    pub fn value(&self, party: &PartyId) -> Option<f64> {
        self.forecasts.iter().find(|f| &f.party == party).map(|f| f.forecast)
    }

    /// Parties by forecast value, highest first; `None` on an exact tie.
    pub fn leader(&self) -> Option<&PartyId> {
        let mut sorted: Vec<&PartyForecast> = self.forecasts.iter().collect();
        sorted.sort_by(|a, b| b.forecast.total_cmp(&a.forecast));
        match sorted.as_slice() {
            [a, b, ..] if a.forecast == b.forecast => None,
            [a, ..] => Some(&a.party),
            [] => None,
        }
    }
}

/// Vote shares from the two parties' forecasts.
pub fn shares_from(forecasts: &[PartyForecast], parties: &[PartyId; 2]) -> Result<VoteShares> {
    let get = |p: &PartyId| {
        forecasts
            .iter()
            .find(|f| &f.party == p)
            .map(|f| f.forecast)
            .ok_or_else(|| Error::PartyMismatch(format!("no forecast for {p}")))
    };
    vote_share_from_forecasts(&parties[0], get(&parties[0])?, &parties[1], get(&parties[1])?)
}

/// Centrality, daily series and forecasts for already prepared records.
pub fn forecast_records(records: &[TweetRecord], cfg: &PipelineConfig) -> Result<ForecastSummary> {
    let centrality = window_centrality(records, &cfg.pagerank, cfg.weighted_graph)?;
    let buckets = day_buckets(records);
    let forecasts = cfg
        .parties
        .iter()
        .map(|party| {
            let (_, series) = party_series(
                &cfg.window,
                &buckets,
                &centrality.values,
                party,
                cfg.statistic,
                cfg.mfs_coefficient,
            );
            forecast_series(&series, &cfg.farima)
        })
        .collect::<Result<Vec<_>>>()?;
    let shares = shares_from(&forecasts, &cfg.parties)?;
    Ok(ForecastSummary { forecasts, shares })
}

/// Parties named in any record's tags.
pub fn tagged_parties(records: &[TweetRecord]) -> BTreeSet<PartyId> {
    records.iter().flat_map(|r| r.party_tags.iter().cloned()).collect()
}

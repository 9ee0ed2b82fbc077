//! File-based pipeline stages. Each stage reads its inputs from the config
//! and the output directory, and writes deterministic CSV/JSON artifacts
//! under a stage-named subdirectory.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::analysis::{
    day_buckets, forecast_series, forecast_track, party_series, prepare_records, shares_from, window_centrality,
    PartyForecast, TrackPoint,
};
use super::chart::{line_chart, Line};
use super::config::PipelineConfig;
use crate::election::{baselines, evaluate, ReferenceResults};
use crate::error::{Error, Result};
use crate::ingest::{read_corpus, AnalysisWindow, PartyId, TweetRecord, UserId};
use crate::mfscore::{distance_matrix, fit_student_t, write_distance_matrix, DailySeries, Statistic};
use crate::netgraph::{
    average_path_length, build_graph, build_weighted_graph, global_clustering, pagerank, top_k_by_centrality,
    vertex_betweenness, InteractionGraph,
};
use crate::sentiment::{classify_polarity, party_counts, PartyCounts, Polarity};
use crate::synthkit::{expected_ordering, generate_records, CorpusSpec};

/// Number of most central users summarized by `sentiment-stats`.
pub const TOP_USERS: usize = 100;

/// Files written by a stage (relative to the output directory) and a
/// small JSON summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    pub outputs: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

struct Outputs<'a> {
    root: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Outputs<'a> {
    fn new(root: &'a Path) -> Self {
        Outputs {
            root,
            written: Vec::new(),
        }
    }

    fn write(&mut self, rel: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel.as_ref());
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.written.push(rel.as_ref().to_path_buf());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, rel: impl AsRef<Path>, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(rel, text.as_bytes())
    }

    fn csv<F>(&mut self, rel: impl AsRef<Path>, fill: F) -> Result<()>
    where
        F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<()>,
    {
        let mut buf = Vec::new();
        {
            let mut wr = csv::Writer::from_writer(&mut buf);
            fill(&mut wr)?;
            wr.flush().map_err(|e| Error::io(rel.as_ref(), e))?;
        }
        self.write(rel, &buf)
    }

    fn report(self, stage: &'static str, summary: serde_json::Value) -> StageReport {
        StageReport {
            stage,
            outputs: self.written,
            summary,
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// File-name form of a party name: lowercase alphanumerics joined by `_`.
pub fn slug(party: &PartyId) -> String {
    let mut out = String::new();
    for c in party.as_str().chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

pub const RECORD_STORE: &str = "ingest/records.jsonl";
pub const COUNTS_FILE: &str = "ingest/counts.csv";

fn series_file(statistic: Statistic) -> String {
    format!("score/{}_series.csv", statistic.label())
}

fn forecast_dir(statistic: Statistic) -> String {
    format!("forecast/{}", statistic.label())
}

/// Tagged and scored records persisted by `ingest`, restricted to the
/// configured window.
pub fn load_record_store(cfg: &PipelineConfig) -> Result<Vec<TweetRecord>> {
    let path = cfg.out_dir.join(RECORD_STORE);
    if !path.exists() {
        return Err(Error::MissingInput(format!(
            "{} not found; run `ingest` first",
            path.display()
        )));
    }
    let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&path, e))?;
        if line.is_empty() {
            continue;
        }
        let r: TweetRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            context: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if cfg.window.contains(r.day()) {
            out.push(r);
        }
    }
    Ok(out)
}

fn write_counts_csv<W: std::io::Write>(wr: &mut csv::Writer<W>, counts: &[PartyCounts]) -> Result<()> {
    wr.write_record(["party", "total", "positive", "negative", "neutral"])?;
    for c in counts {
        wr.write_record([
            c.party.to_string(),
            c.total.to_string(),
            c.positive.to_string(),
            c.negative.to_string(),
            c.neutral.to_string(),
        ])?;
    }
    Ok(())
}

/// Reads `party,total,positive,negative,neutral` rows. A total that
/// disagrees with the class sum is replaced by the sum, with a warning.
pub fn read_counts_csv(path: &Path) -> Result<BTreeMap<PartyId, PartyCounts>> {
    #[derive(Deserialize)]
    struct Row {
        party: PartyId,
        total: u64,
        positive: u64,
        negative: u64,
        neutral: u64,
    }
    let mut rd = csv::Reader::from_path(path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for row in rd.deserialize::<Row>() {
        let r = row?;
        let c = PartyCounts::from_classes(r.party.clone(), r.positive, r.negative, r.neutral);
        if c.total != r.total {
            log::warn!(
                "{}: total {} for {} differs from the class sum {}; using the sum",
                path.display(),
                r.total,
                r.party,
                c.total
            );
        }
        out.insert(r.party, c);
    }
    Ok(out)
}

fn load_counts(cfg: &PipelineConfig) -> Result<(PartyCounts, PartyCounts)> {
    let path = match &cfg.counts {
        Some(p) => p.clone(),
        None => cfg.out_dir.join(COUNTS_FILE),
    };
    if !path.exists() {
        return Err(Error::MissingInput(format!(
            "party counts {} not found; run `ingest` or set `counts`",
            path.display()
        )));
    }
    let mut all = read_counts_csv(&path)?;
    let mut take = |p: &PartyId| {
        all.remove(p)
            .ok_or_else(|| Error::PartyMismatch(format!("{} has no row for {p}", path.display())))
    };
    Ok((take(&cfg.parties[0])?, take(&cfg.parties[1])?))
}

fn load_reference(cfg: &PipelineConfig) -> Result<ReferenceResults> {
    match &cfg.reference {
        Some(p) => ReferenceResults::load(p),
        None => Ok(ReferenceResults::us_2020()),
    }
}

/// `ingest`: parse, tag, score and bucket the corpus.
pub fn run_ingest(cfg: &PipelineConfig) -> Result<StageReport> {
    let corpus = cfg.corpus_path()?;
    let table = cfg.load_keywords()?;
    let lexicon = cfg.load_lexicon()?;
    let parsed = read_corpus(corpus)?;
    let parsed_count = parsed.records.len();
    let records = prepare_records(parsed.records, &table, &lexicon, &cfg.window, cfg.drop_multiparty);

    let mut out = Outputs::new(&cfg.out_dir);
    let days_dir = cfg.out_dir.join("ingest/days");
    if days_dir.exists() {
        std::fs::remove_dir_all(&days_dir).map_err(|e| Error::io(&days_dir, e))?;
    }
    let mut store = String::new();
    for r in &records {
        store.push_str(&r.to_json_line());
        store.push('\n');
    }
    out.write(RECORD_STORE, store.as_bytes())?;

    let mut per_file: BTreeMap<(NaiveDate, String), String> = BTreeMap::new();
    for r in &records {
        for p in &r.party_tags {
            let buf = per_file.entry((r.day(), slug(p))).or_default();
            buf.push_str(&r.to_json_line());
            buf.push('\n');
        }
    }
    for ((day, party), text) in &per_file {
        out.write(format!("ingest/days/{day}/{party}.jsonl"), text.as_bytes())?;
    }

    let mut parties: BTreeSet<PartyId> = table.parties().cloned().collect();
    parties.extend(cfg.parties.iter().cloned());
    let counts: Vec<PartyCounts> = parties.iter().map(|p| party_counts(p, &records, None)).collect();
    out.csv(COUNTS_FILE, |wr| write_counts_csv(wr, &counts))?;

    let untagged = records.iter().filter(|r| r.party_tags.is_empty()).count();
    let multiparty = records.iter().filter(|r| r.party_tags.len() > 1).count();
    let summary = serde_json::json!({
        "window": cfg.window,
        "parsed": parsed_count,
        "malformed": parsed.malformed,
        "duplicates": parsed.duplicates,
        "self_messages": parsed.self_messages,
        "out_of_window": parsed_count - records.len(),
        "in_window": records.len(),
        "untagged": untagged,
        "multiparty": multiparty,
        "drop_multiparty": cfg.drop_multiparty,
        "days_with_records": records.iter().map(|r| r.day()).collect::<BTreeSet<_>>().len(),
        "counts": counts.iter().map(|c| (c.party.to_string(), c)).collect::<BTreeMap<_, _>>(),
    });
    out.json("ingest/summary.json", &summary)?;
    Ok(out.report("ingest", summary))
}

fn graph_of(records: &[TweetRecord], weighted: bool) -> InteractionGraph {
    if weighted {
        build_weighted_graph(records)
    } else {
        build_graph(records)
    }
}

/// `sentiment-stats`: polarity breakdown per party, overall and for the
/// most central users.
pub fn run_sentiment_stats(cfg: &PipelineConfig) -> Result<StageReport> {
    let records = load_record_store(cfg)?;
    let centrality = window_centrality(&records, &cfg.pagerank, cfg.weighted_graph)?;
    let top = top_k_by_centrality(&centrality.values, TOP_USERS);
    let top_set: BTreeSet<UserId> = top.iter().copied().collect();
    let top_records: Vec<&TweetRecord> = records.iter().filter(|r| top_set.contains(&r.from_user_id)).collect();

    let mut parties: BTreeSet<PartyId> = cfg.parties.iter().cloned().collect();
    parties.extend(records.iter().flat_map(|r| r.party_tags.iter().cloned()));

    let mean_score = |rs: &mut dyn Iterator<Item = &TweetRecord>| {
        let (n, s) = rs.fold((0usize, 0.0), |(n, s), r| (n + 1, s + r.sentiment_score.unwrap_or(0.0)));
        if n == 0 {
            String::new()
        } else {
            num(s / n as f64)
        }
    };

    let mut out = Outputs::new(&cfg.out_dir);
    let mut summary = BTreeMap::new();
    out.csv("sentiment/party_stats.csv", |wr| {
        wr.write_record([
            "subset",
            "party",
            "total",
            "positive",
            "negative",
            "neutral",
            "positive_pct",
            "negative_pct",
            "neutral_pct",
            "mean_score",
        ])?;
        for (subset, rs) in [("all", records.iter().collect::<Vec<_>>()), ("top100", top_records.clone())] {
            for p in &parties {
                let c = party_counts(p, rs.iter().copied(), None);
                let pct = |x: f64| if c.total == 0 { String::new() } else { num(x) };
                wr.write_record([
                    subset.to_string(),
                    p.to_string(),
                    c.total.to_string(),
                    c.positive.to_string(),
                    c.negative.to_string(),
                    c.neutral.to_string(),
                    pct(c.positive_pct()),
                    pct(c.negative_pct()),
                    pct(c.neutral_pct()),
                    mean_score(&mut rs.iter().copied().filter(|r| r.party_tags.contains(p))),
                ])?;
                summary.insert(format!("{subset}/{p}"), c);
            }
        }
        Ok(())
    })?;

    out.csv("sentiment/top_users.csv", |wr| {
        wr.write_record(["rank", "user_id", "pagerank", "tweets", "positive", "negative", "neutral", "mean_score"])?;
        for (rank, u) in top.iter().enumerate() {
            let mine: Vec<&TweetRecord> = records.iter().filter(|r| r.from_user_id == *u).collect();
            let mut classes = [0usize; 3];
            for r in &mine {
                classes[match classify_polarity(r.sentiment_score.unwrap_or(0.0)) {
                    Polarity::Positive => 0,
                    Polarity::Negative => 1,
                    Polarity::Neutral => 2,
                }] += 1;
            }
            wr.write_record([
                (rank + 1).to_string(),
                u.to_string(),
                num(centrality.values[u]),
                mine.len().to_string(),
                classes[0].to_string(),
                classes[1].to_string(),
                classes[2].to_string(),
                mean_score(&mut mine.iter().copied()),
            ])?;
        }
        Ok(())
    })?;
    Ok(out.report("sentiment-stats", serde_json::to_value(summary)?))
}

#[derive(Serialize)]
struct GraphSummary {
    vertices: usize,
    edges: usize,
    weighted: bool,
    alpha: f64,
    spectral_radius: f64,
    pagerank_iterations: usize,
    pagerank_residual: f64,
    average_path_length: Option<f64>,
    reachable_pairs: Option<u64>,
    global_clustering: Option<f64>,
}

/// `graph-stats`: interaction graph, PageRank, topology measures and the
/// optional per-day slices.
pub fn run_graph_stats(cfg: &PipelineConfig) -> Result<StageReport> {
    let records = load_record_store(cfg)?;
    let graph = graph_of(&records, cfg.weighted_graph);
    if graph.is_empty() {
        return Err(Error::EmptySample("no records in the analysis window".into()));
    }
    let scores = pagerank(&graph, &cfg.pagerank)?;
    let mut out = Outputs::new(&cfg.out_dir);

    let mut edges = Vec::new();
    graph
        .write_edge_list(&mut edges)
        .map_err(|e| Error::io("graph/edges.tsv", e))?;
    out.write("graph/edges.tsv", &edges)?;
    let mut cent = Vec::new();
    scores.write_csv(&mut cent)?;
    out.write("graph/centrality.csv", &cent)?;

    let apl = cfg.graph.topology.then(|| average_path_length(&graph)).flatten();
    let summary = GraphSummary {
        vertices: graph.len(),
        edges: graph.edge_count(),
        weighted: cfg.weighted_graph,
        alpha: cfg.pagerank.alpha,
        spectral_radius: scores.spectral_radius,
        pagerank_iterations: scores.iterations_used,
        pagerank_residual: scores.residual,
        average_path_length: apl.map(|s| s.mean),
        reachable_pairs: apl.map(|s| s.pairs),
        global_clustering: cfg.graph.topology.then(|| global_clustering(&graph)),
    };
    out.json("graph/summary.json", &summary)?;

    if cfg.graph.betweenness {
        let bc = vertex_betweenness(&graph);
        out.csv("graph/betweenness.csv", |wr| {
            wr.write_record(["user_id", "betweenness"])?;
            for (u, b) in &bc {
                wr.write_record([u.to_string(), num(*b)])?;
            }
            Ok(())
        })?;
    }

    let mut slicing = cfg.graph.slicing.clone();
    slicing.sort();
    slicing.dedup();
    if !slicing.is_empty() {
        let buckets = day_buckets(&records);
        out.csv("graph/slices.csv", |wr| {
            wr.write_record([
                "slicing",
                "date",
                "vertices",
                "edges",
                "average_path_length",
                "reachable_pairs",
                "global_clustering",
            ])?;
            for s in &slicing {
                let mut acc: Vec<TweetRecord> = Vec::new();
                for day in cfg.window.days() {
                    let today = buckets.get(&day).map(Vec::as_slice).unwrap_or(&[]);
                    let g = match s {
                        super::config::Slicing::Daily => graph_of(today, cfg.weighted_graph),
                        super::config::Slicing::Cumulative => {
                            acc.extend_from_slice(today);
                            graph_of(&acc, cfg.weighted_graph)
                        }
                    };
                    let apl = average_path_length(&g);
                    wr.write_record([
                        s.label().to_string(),
                        day.to_string(),
                        g.len().to_string(),
                        g.edge_count().to_string(),
                        apl.map(|a| num(a.mean)).unwrap_or_default(),
                        apl.map(|a| a.pairs.to_string()).unwrap_or_default(),
                        num(global_clustering(&g)),
                    ])?;
                }
            }
            Ok(())
        })?;
    }
    Ok(out.report("graph-stats", serde_json::to_value(&summary)?))
}

fn compute_series(cfg: &PipelineConfig, records: &[TweetRecord]) -> Result<Vec<(DailySeries, Vec<crate::mfscore::DailyDistribution>)>> {
    let centrality = window_centrality(records, &cfg.pagerank, cfg.weighted_graph)?;
    let buckets = day_buckets(records);
    Ok(cfg
        .parties
        .iter()
        .map(|p| {
            let (dists, series) = party_series(
                &cfg.window,
                &buckets,
                &centrality.values,
                p,
                cfg.statistic,
                cfg.mfs_coefficient,
            );
            (series, dists)
        })
        .collect())
}

fn write_series(out: &mut Outputs, statistic: Statistic, series: &[&DailySeries]) -> Result<()> {
    out.csv(series_file(statistic), |wr| {
        wr.write_record(DailySeries::csv_header(statistic))?;
        for s in series {
            s.write_rows(wr)?;
        }
        Ok(())
    })
}

/// Reads a series file written by `score`, restricted to the window days.
pub fn read_series(path: &Path, party: &PartyId, statistic: Statistic, window: &AnalysisWindow) -> Result<DailySeries> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
    let mut by_day: BTreeMap<NaiveDate, (Option<f64>, usize)> = BTreeMap::new();
    for (i, row) in rd.deserialize::<(NaiveDate, PartyId, Option<f64>, usize)>().enumerate() {
        let (day, p, v, n) = row.map_err(|e| Error::Parse {
            context: path.display().to_string(),
            line: i + 2,
            message: e.to_string(),
        })?;
        if &p == party && window.contains(day) {
            by_day.insert(day, (v, n));
        }
    }
    let days: Vec<NaiveDate> = window.days().collect();
    Ok(DailySeries {
        party: party.clone(),
        statistic,
        values: days.iter().map(|d| by_day.get(d).and_then(|x| x.0)).collect(),
        sample_sizes: days.iter().map(|d| by_day.get(d).map_or(0, |x| x.1)).collect(),
        days,
    })
}

/// `score`: per-user MFS distributions, the daily summary series, daily
/// Wasserstein distance matrices and Student-t fits.
pub fn run_score(cfg: &PipelineConfig) -> Result<StageReport> {
    let records = load_record_store(cfg)?;
    let per_party = compute_series(cfg, &records)?;
    let mut out = Outputs::new(&cfg.out_dir);
    write_series(&mut out, cfg.statistic, &per_party.iter().map(|(s, _)| s).collect::<Vec<_>>())?;

    let mut summary = BTreeMap::new();
    let mut tfit_rows: Vec<[String; 8]> = Vec::new();
    for (series, dists) in &per_party {
        let name = slug(&series.party);
        out.csv(format!("score/distributions_{name}.csv"), |wr| {
            wr.write_record(["date", "user_id", "mfs"])?;
            for d in dists {
                for s in d.scores() {
                    wr.write_record([s.day.to_string(), s.user_id.to_string(), num(s.mfs)])?;
                }
            }
            Ok(())
        })?;

        let nonempty: Vec<(NaiveDate, Vec<f64>)> = dists
            .iter()
            .filter(|d| !d.is_empty())
            .map(|d| (d.day, d.sample.clone()))
            .collect();
        if !nonempty.is_empty() {
            let m = distance_matrix(&nonempty)?;
            let labels: Vec<NaiveDate> = nonempty.iter().map(|(d, _)| *d).collect();
            let mut buf = Vec::new();
            write_distance_matrix(&labels, &m, &mut buf)?;
            out.write(format!("score/wasserstein_{name}.csv"), &buf)?;
        }

        for d in dists {
            let row = match fit_student_t(&d.sample) {
                Ok(f) => [
                    num(f.degrees_of_freedom),
                    num(f.location),
                    num(f.scale),
                    num(f.log_likelihood),
                    "ok".to_string(),
                ],
                Err(e) => [String::new(), String::new(), String::new(), String::new(), e.kind().to_string()],
            };
            let [a, b, c, e, status] = row;
            tfit_rows.push([
                d.day.to_string(),
                series.party.to_string(),
                d.sample.len().to_string(),
                a,
                b,
                c,
                e,
                status,
            ]);
        }
        summary.insert(
            series.party.to_string(),
            serde_json::json!({
                "days": series.days.len(),
                "days_without_users": series.missing_days(),
                "user_days": series.sample_sizes.iter().sum::<usize>(),
            }),
        );
    }
    out.csv("score/tfits.csv", |wr| {
        wr.write_record(["date", "party", "sample_size", "nu", "location", "scale", "log_likelihood", "status"])?;
        for r in &tfit_rows {
            wr.write_record(r)?;
        }
        Ok(())
    })?;
    Ok(out.report("score", serde_json::to_value(summary)?))
}

#[derive(Serialize)]
struct ForecastRecord<'a> {
    window: AnalysisWindow,
    statistic: Statistic,
    forecasts: &'a [PartyForecast],
    vote_shares: &'a crate::election::VoteShares,
    track: &'static str,
}

/// `forecast`: FARIMA fits per party on the daily series, one-step
/// forecasts, vote shares, and the expanding-window forecast track.
///
/// Uses the series written by `score` when present and computes it from
/// the record store otherwise.
pub fn run_forecast(cfg: &PipelineConfig) -> Result<StageReport> {
    let mut out = Outputs::new(&cfg.out_dir);
    let path = cfg.out_dir.join(series_file(cfg.statistic));
    let series: Vec<DailySeries> = if path.exists() {
        cfg.parties
            .iter()
            .map(|p| read_series(&path, p, cfg.statistic, &cfg.window))
            .collect::<Result<_>>()?
    } else {
        let records = load_record_store(cfg)?;
        let computed: Vec<DailySeries> = compute_series(cfg, &records)?.into_iter().map(|(s, _)| s).collect();
        write_series(&mut out, cfg.statistic, &computed.iter().collect::<Vec<_>>())?;
        computed
    };

    let forecasts = series
        .iter()
        .map(|s| forecast_series(s, &cfg.farima))
        .collect::<Result<Vec<_>>>()?;
    let shares = shares_from(&forecasts, &cfg.parties)?;
    let dir = forecast_dir(cfg.statistic);
    let label = cfg.statistic.label();

    for f in &forecasts {
        out.json(format!("{dir}/model_{}.json", slug(&f.party)), f)?;
    }
    out.csv(format!("{dir}/forecast.csv"), |wr| {
        wr.write_record(["party", "statistic", "horizon", "value"])?;
        for f in &forecasts {
            wr.write_record([f.party.to_string(), label.to_string(), "1".to_string(), num(f.forecast)])?;
        }
        Ok(())
    })?;
    out.json(format!("{dir}/vote_shares.json"), &shares)?;

    let mut tracks: Vec<Vec<TrackPoint>> = Vec::new();
    if cfg.farima.track {
        for s in &series {
            tracks.push(forecast_track(s, &cfg.farima)?);
        }
        out.csv(format!("{dir}/track.csv"), |wr| {
            wr.write_record(["date", "party", "statistic", "refit", "forecast", "observed"])?;
            for t in tracks.iter().flatten() {
                wr.write_record([
                    t.day.to_string(),
                    t.party.to_string(),
                    label.to_string(),
                    "expanding_window".to_string(),
                    num(t.forecast),
                    t.observed.map(num).unwrap_or_default(),
                ])?;
            }
            Ok(())
        })?;
    }

    if cfg.charts {
        let colors = ["#1f5fbf", "#c0392b"];
        let mut lines = Vec::new();
        for (k, s) in series.iter().enumerate() {
            lines.push(Line {
                label: s.party.as_str(),
                color: colors[k % 2],
                dashed: false,
                points: s
                    .values
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| v.map(|v| (i as f64, v)))
                    .collect(),
            });
        }
        let track_labels: Vec<String> = series.iter().map(|s| format!("{} forecast", s.party)).collect();
        for (k, t) in tracks.iter().enumerate() {
            let s = &series[k];
            lines.push(Line {
                label: &track_labels[k],
                color: colors[k % 2],
                dashed: true,
                points: t
                    .iter()
                    .filter_map(|p| s.days.iter().position(|d| *d == p.day).map(|i| (i as f64, p.forecast)))
                    .collect(),
            });
        }
        let first = cfg.window.start_day().to_string();
        let last = cfg.window.end_day().to_string();
        let svg = line_chart(&format!("daily {label} MFS"), (&first, &last), &lines);
        out.write(format!("{dir}/chart.svg"), svg.as_bytes())?;
    }

    let record = ForecastRecord {
        window: cfg.window,
        statistic: cfg.statistic,
        forecasts: &forecasts,
        vote_shares: &shares,
        track: if cfg.farima.track { "expanding_window" } else { "disabled" },
    };
    let summary = serde_json::to_value(&record)?;
    out.json(format!("{dir}/summary.json"), &record)?;
    Ok(out.report("forecast", summary))
}

/// `baselines`: the tweet-count methods on the party counts.
pub fn run_baselines(cfg: &PipelineConfig) -> Result<StageReport> {
    let (a, b) = load_counts(cfg)?;
    let results = baselines(&a, &b, cfg.baselines)?;
    let mut out = Outputs::new(&cfg.out_dir);
    out.csv("baselines/baselines.csv", |wr| {
        wr.write_record(["method", "party", "share"])?;
        for (m, shares, _) in &results {
            for p in &cfg.parties {
                wr.write_record([m.clone(), p.to_string(), shares.get(p).map(num).unwrap_or_default()])?;
            }
        }
        Ok(())
    })?;
    let value: BTreeMap<&str, serde_json::Value> = results
        .iter()
        .map(|(m, s, notes)| (m.as_str(), serde_json::json!({"shares": s, "notes": notes})))
        .collect();
    out.json("baselines/baselines.json", &value)?;
    Ok(out.report("baselines", serde_json::to_value(&value)?))
}

fn read_forecast_values(cfg: &PipelineConfig) -> Result<Option<(f64, f64)>> {
    if let Some(f) = &cfg.forecasts {
        return Ok(Some((f[&cfg.parties[0]], f[&cfg.parties[1]])));
    }
    let path = cfg.out_dir.join(forecast_dir(cfg.statistic)).join("forecast.csv");
    if !path.exists() {
        return Ok(None);
    }
    let mut rd = csv::Reader::from_path(&path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
    let mut values = BTreeMap::new();
    for row in rd.deserialize::<(PartyId, String, usize, f64)>() {
        let (p, _, h, v) = row?;
        if h == 1 {
            values.insert(p, v);
        }
    }
    let get = |p: &PartyId| {
        values
            .get(p)
            .copied()
            .ok_or_else(|| Error::PartyMismatch(format!("{} has no forecast for {p}", path.display())))
    };
    Ok(Some((get(&cfg.parties[0])?, get(&cfg.parties[1])?)))
}

/// `evaluate`: method x party share matrix and MAE against the reference
/// results.
pub fn run_evaluate(cfg: &PipelineConfig) -> Result<StageReport> {
    let reference = load_reference(cfg)?;
    let (a, b) = load_counts(cfg)?;
    let forecasts = read_forecast_values(cfg)?;
    if forecasts.is_none() {
        log::warn!("no forecast values available; the multifactor column is omitted");
    }
    let eval = evaluate((&a, &b), forecasts, &reference, cfg.baselines)?;
    let mut out = Outputs::new(&cfg.out_dir);
    let mut buf = Vec::new();
    eval.write_csv(&mut buf)?;
    out.write("evaluate/evaluation.csv", &buf)?;
    out.json("evaluate/evaluation.json", &eval)?;
    let summary = eval
        .methods
        .iter()
        .map(|m| (m.method.clone(), m.mae.as_ref().map(|r| r.mean)))
        .collect::<BTreeMap<_, _>>();
    Ok(out.report("evaluate", serde_json::to_value(summary)?))
}

/// Corpus spec used by `synth`: the configured file, or a two-party
/// 10,000-user spec covering the configured window.
pub fn synth_spec(cfg: &PipelineConfig) -> Result<CorpusSpec> {
    let mut spec = match &cfg.synth_spec {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::MissingInput(format!("corpus spec {}: {e}", p.display())))?;
            CorpusSpec::from_json(&text)?
        }
        None => {
            let mut s = CorpusSpec::two_party_crossing(10_000, cfg.window.len_days(), 2000, 0);
            s.start_day = cfg.window.start_day();
            s
        }
    };
    if let Some(seed) = cfg.seed {
        spec.seed = seed;
    }
    spec.validate()?;
    Ok(spec)
}

/// `synth`: writes a synthetic corpus, its generator tallies and the
/// planted ordering.
pub fn run_synth(cfg: &PipelineConfig) -> Result<StageReport> {
    let spec = synth_spec(cfg)?;
    let corpus = generate_records(&spec)?;
    let ordering = expected_ordering(&spec)?;
    let mut out = Outputs::new(&cfg.out_dir);
    out.write("synth/corpus.jsonl", corpus.to_jsonl().as_bytes())?;
    let counts: Vec<PartyCounts> = corpus.tally.values().cloned().collect();
    out.csv("synth/tally.csv", |wr| write_counts_csv(wr, &counts))?;
    out.json("synth/spec.json", &spec)?;
    out.json("synth/expected_ordering.json", &ordering)?;
    let summary = serde_json::json!({
        "records": corpus.records.len(),
        "seed": spec.seed,
        "expected_ordering": ordering,
    });
    Ok(out.report("synth", summary))
}

//! Acceptance suite. Each criterion prints one PASS/FAIL line with its
//! measured values; the process exits non-zero if any criterion fails.
//!
//! Published figures are checked against the values printed in the
//! comparison tables; everything else is checked against independent
//! oracles (dense linear solves, exhaustive enumeration, linear programs,
//! direct binomial products) implemented here.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use mfcast_core::election::{
    baseline_actual_sentiment, baseline_cross_negative, baseline_popularity, evaluate, vote_share_from_forecasts,
    BaselineToggles, ReferenceResults, METHOD_ACTUAL_SENTIMENT, METHOD_CROSS_NEGATIVE, METHOD_MULTIFACTOR,
    METHOD_POLLS, METHOD_POPULARITY,
};
use mfcast_core::farima::{
    estimate_d, fit_arma, frac_diff_coeffs, frac_difference, frac_integrate, simulate_farima, FarimaModel,
};
use mfcast_core::mfscore::wasserstein1;
use mfcast_core::netgraph::{
    average_path_length, global_clustering, pagerank, spectral_radius, vertex_betweenness, InteractionGraph,
    PageRankParams,
};
use mfcast_core::pipeline::{
    forecast_records, prepare_records, run_baselines, run_evaluate, run_forecast, run_graph_stats, run_ingest,
    run_score, run_sentiment_stats, run_synth, PipelineConfig, Slicing,
};
use mfcast_core::synthkit::{expected_ordering, generate_records, CorpusSpec};
use mfcast_core::{AnalysisWindow, KeywordTable, Lexicon, PartyCounts, PartyId};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "baseline shares from tweet counts", budget: Duration::from_secs(1), run: c1_baselines },
        Criterion { id: 2, name: "MAE against actual results", budget: Duration::from_secs(1), run: c2_mae },
        Criterion { id: 3, name: "forecast to vote-share conversion", budget: Duration::from_secs(1), run: c3_conversion },
        Criterion { id: 4, name: "PageRank vs dense linear solve", budget: Duration::from_secs(5), run: c4_pagerank },
        Criterion { id: 5, name: "graph metrics vs exhaustive enumeration", budget: Duration::from_secs(10), run: c5_graph_metrics },
        Criterion { id: 6, name: "Wasserstein-1 vs transport LP, metric axioms", budget: Duration::from_secs(10), run: c6_wasserstein },
        Criterion { id: 7, name: "fractional differencing round trip and coefficients", budget: Duration::from_secs(10), run: c7_fracdiff },
        Criterion { id: 8, name: "FARIMA parameter recovery", budget: Duration::from_secs(60), run: c8_recovery },
        Criterion { id: 9, name: "end-to-end planted ordering sign test", budget: Duration::from_secs(300), run: c9_sign_test },
        Criterion { id: 10, name: "byte-identical reruns of every stage", budget: Duration::from_secs(120), run: c10_determinism },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let out = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let pass = out.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} — {} ({:.2}s of {}s{}) — {}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" },
            out.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

fn dem() -> PartyId {
    "Democratic".into()
}

fn rep() -> PartyId {
    "Republican".into()
}

fn published_counts() -> (PartyCounts, PartyCounts) {
    (PartyCounts::us_2020_democratic(), PartyCounts::us_2020_republican())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------- 1-3

const PP_TOL: f64 = 0.01;

fn c1_baselines() -> Outcome {
    let (d, r) = published_counts();
    let first = baseline_actual_sentiment(&d, &r).unwrap().normalized;
    let second = baseline_popularity(&d, &r).unwrap();
    let third = baseline_cross_negative(&d, &r).unwrap();
    let published = [
        ("first", &first, -2.55, 102.55),
        ("second", &second, 17.69, 27.73),
        ("third", &third, 54.96, 45.04),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, s, pd, pr) in published {
        let (vd, vr) = (s.get(&dem()).unwrap(), s.get(&rep()).unwrap());
        pass &= close(vd, pd, PP_TOL) && close(vr, pr, PP_TOL);
        detail.push(format!("{name} ({vd:.4}, {vr:.4}) vs ({pd}, {pr})"));
    }
    outcome(pass, detail.join("; "))
}

fn c2_mae() -> Outcome {
    let (d, r) = published_counts();
    let eval = evaluate(
        (&d, &r),
        Some((0.004256, -0.010304)),
        &ReferenceResults::us_2020(),
        BaselineToggles::default(),
    )
    .unwrap();
    // (method, MAE Democratic, MAE Republican, mean) as published
    let published = [
        (METHOD_MULTIFACTOR, 0.67, 2.37, 1.52),
        (METHOD_POLLS, 3.00, 1.30, 2.15),
        (METHOD_ACTUAL_SENTIMENT, 53.95, 55.65, 54.80),
        (METHOD_POPULARITY, 33.71, 19.17, 26.44),
        (METHOD_CROSS_NEGATIVE, 3.56, 1.86, 2.71),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (m, pd, pr, pm) in published {
        let rep_ = eval.method(m).and_then(|x| x.mae.clone()).unwrap();
        let (vd, vr) = (rep_.per_party[&dem()], rep_.per_party[&rep()]);
        pass &= close(vd, pd, PP_TOL) && close(vr, pr, PP_TOL) && close(rep_.mean, pm, PP_TOL);
        detail.push(format!("{m} {vd:.3}/{vr:.3}/{:.3}", rep_.mean));
    }
    outcome(pass, detail.join("; "))
}

fn c3_conversion() -> Outcome {
    let s = vote_share_from_forecasts(&dem(), 0.004256, &rep(), -0.010304).unwrap();
    let (vd, vr) = (s.get(&dem()).unwrap(), s.get(&rep()).unwrap());
    outcome(
        close(vd, 50.73, 0.005) && close(vr, 49.27, 0.005),
        format!("({vd:.4}, {vr:.4}) vs (50.73, 49.27)"),
    )
}

// ---------------------------------------------------------------- 4-5

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> InteractionGraph {
    let mut edges = Vec::new();
    for u in 1..=n as u64 {
        for v in 1..=n as u64 {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    InteractionGraph::from_edges(1..=n as u64, edges)
}

fn adjacency(g: &InteractionGraph) -> Vec<Vec<bool>> {
    let n = g.len();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[g.index_of(u).unwrap()][g.index_of(v).unwrap()] = true;
    }
    a
}

fn c4_pagerank() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let params = PageRankParams::default();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=50);
        let p = rng.gen_range(0.1..=0.5);
        let g = random_graph(&mut rng, n, p);
        let rho = spectral_radius(&g);
        if !(params.alpha * rho < 1.0) {
            return outcome(false, format!("alpha {} not admissible for rho {rho}", params.alpha));
        }
        let x = pagerank(&g, &params).unwrap();

        // (I - alpha P^T) x = beta 1 with P = D^-1 A, dangling rows zero
        let a = adjacency(&g);
        let mut m = DMatrix::<f64>::identity(n, n);
        for (i, row) in a.iter().enumerate() {
            let deg = row.iter().filter(|&&e| e).count();
            for (j, &e) in row.iter().enumerate() {
                if e {
                    m[(j, i)] -= params.alpha / deg as f64;
                }
            }
        }
        let beta = (1.0 - params.alpha) / n as f64;
        let solved = m.lu().solve(&DVector::from_element(n, beta)).unwrap();
        for (k, &id) in g.ids().iter().enumerate() {
            worst = worst.max((x.values[&id] - solved[k]).abs());
        }
    }
    outcome(worst <= 1e-8, format!("max |power - dense| = {worst:.2e} over 20 graphs (tol 1e-8)"))
}

/// All-pairs hop distances by Floyd-Warshall; `None` = unreachable.
fn floyd(a: &[Vec<bool>]) -> Vec<Vec<Option<usize>>> {
    let n = a.len();
    let mut d: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Some(0) } else if a[i][j] { Some(1) } else { None }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].map_or(true, |z| x + y < z) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// Every shortest path from `s` to `t`, listed explicitly.
fn all_shortest_paths(a: &[Vec<bool>], d: &[Vec<Option<usize>>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(a: &[Vec<bool>], d: &[Vec<Option<usize>>], t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return;
        }
        let left = d[u][t].unwrap();
        for w in 0..a.len() {
            if a[u][w] && d[w][t] == Some(left - 1) {
                path.push(w);
                walk(a, d, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if d[s][t].is_some() {
        walk(a, d, t, &mut vec![s], &mut out);
    }
    out
}

fn c5_graph_metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut mismatches = Vec::new();
    for case in 0..50 {
        let n = rng.gen_range(1..=12);
        let p = rng.gen_range(0.05..=0.6);
        let g = random_graph(&mut rng, n, p);
        let a = adjacency(&g);
        let d = floyd(&a);

        // mean hop distance over reachable ordered pairs
        let (mut sum, mut pairs) = (0usize, 0usize);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    if let Some(x) = d[i][j] {
                        sum += x;
                        pairs += 1;
                    }
                }
            }
        }
        let apl = average_path_length(&g);
        match (apl, pairs) {
            (None, 0) => {}
            (Some(s), p) if p > 0 && s.pairs as usize == p => {
                worst = worst.max((s.mean - sum as f64 / p as f64).abs());
            }
            other => mismatches.push(format!("case {case}: path length {other:?}")),
        }

        // closed / connected triplets on the undirected projection
        let u = |i: usize, j: usize| a[i][j] || a[j][i];
        let (mut closed, mut triplets) = (0usize, 0usize);
        for c in 0..n {
            for x in 0..n {
                for y in x + 1..n {
                    if x != c && y != c && u(c, x) && u(c, y) {
                        triplets += 1;
                        if u(x, y) {
                            closed += 1;
                        }
                    }
                }
            }
        }
        let cc = if triplets == 0 { 0.0 } else { closed as f64 / triplets as f64 };
        worst = worst.max((global_clustering(&g) - cc).abs());

        // fraction of s-t shortest paths through v, summed over ordered pairs
        let mut bc = vec![0.0; n];
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let paths = all_shortest_paths(&a, &d, s, t);
                if paths.is_empty() {
                    continue;
                }
                for (v, b) in bc.iter_mut().enumerate() {
                    if v != s && v != t {
                        let through = paths.iter().filter(|p| p.contains(&v)).count();
                        *b += through as f64 / paths.len() as f64;
                    }
                }
            }
        }
        let got = vertex_betweenness(&g);
        for (k, id) in g.ids().iter().enumerate() {
            worst = worst.max((got[id] - bc[k]).abs());
        }
    }
    outcome(
        worst <= 1e-10 && mismatches.is_empty(),
        format!("max deviation {worst:.2e} over 50 graphs (tol 1e-10){}", if mismatches.is_empty() { String::new() } else { format!("; {}", mismatches.join(", ")) }),
    )
}

// ---------------------------------------------------------------- 6

/// Optimal transport between uniform empirical measures as an LP. Masses
/// are scaled by `n * m` so that all supplies are integers.
fn transport_lp(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<minilp::Variable>> = a
        .iter()
        .map(|x| b.iter().map(|y| lp.add_var((x - y).abs(), (0.0, f64::INFINITY))).collect())
        .collect();
    for row in &vars {
        lp.add_constraint(row.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, m as f64);
    }
    for j in 0..m {
        lp.add_constraint(vars.iter().map(|row| (row[j], 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, n as f64);
    }
    lp.solve().unwrap().objective() / (n * m) as f64
}

fn random_sample(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.gen_range(1..=10);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.3) {
                // coarse grid values produce ties
                (rng.gen_range(-4..=4) as f64) * 0.5
            } else {
                rng.gen_range(-5.0..5.0)
            }
        })
        .collect()
}

fn c6_wasserstein() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (a, b) = (random_sample(&mut rng), random_sample(&mut rng));
        worst = worst.max((wasserstein1(&a, &b).unwrap() - transport_lp(&a, &b)).abs());
    }
    let mut symmetric = true;
    let mut worst_triangle = f64::NEG_INFINITY;
    let mut identity = true;
    for _ in 0..50 {
        let (a, b, c) = (random_sample(&mut rng), random_sample(&mut rng), random_sample(&mut rng));
        let ab = wasserstein1(&a, &b).unwrap();
        symmetric &= ab == wasserstein1(&b, &a).unwrap();
        identity &= wasserstein1(&a, &a).unwrap() == 0.0;
        let excess = wasserstein1(&a, &c).unwrap() - ab - wasserstein1(&b, &c).unwrap();
        worst_triangle = worst_triangle.max(excess);
    }
    outcome(
        worst <= 1e-10 && symmetric && identity && worst_triangle <= 1e-12,
        format!(
            "max |W1 - LP| = {worst:.2e} (tol 1e-10); symmetric={symmetric}; identity={identity}; max triangle excess {worst_triangle:.2e} (tol 1e-12)"
        ),
    )
}

// ---------------------------------------------------------------- 7-8

/// `(-1)^k C(d, k) = prod_{j<k} (d - j) / k!` with signs applied directly.
fn direct_binomial(d: f64, k: usize) -> f64 {
    let mut num = 1.0;
    let mut fact = 1.0;
    for j in 0..k {
        num *= d - j as f64;
        fact *= (j + 1) as f64;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * num / fact
}

fn c7_fracdiff() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (n, k) = (512, 100);
    let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut worst_trip: f64 = 0.0;
    let mut worst_coef: f64 = 0.0;
    for d in [-0.45, -0.3, 0.0, 0.3, 0.45] {
        let y = frac_difference(&x, d, k).unwrap();
        let back = frac_integrate(&y, d, k).unwrap();
        for t in k..n {
            worst_trip = worst_trip.max((back[t] - x[t]).abs());
        }
        let pi = frac_diff_coeffs(d, 50).unwrap();
        for (j, p) in pi.iter().enumerate() {
            worst_coef = worst_coef.max((p - direct_binomial(d, j)).abs());
        }
    }
    outcome(
        worst_trip <= 1e-6 && worst_coef <= 1e-12,
        format!("round trip max error {worst_trip:.2e} for t >= K (tol 1e-6); coefficient max error {worst_coef:.2e} (tol 1e-12)"),
    )
}

fn median_of(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// The GPH median error over 20 seeds is itself a random quantity (its
/// sampling spread at n = 2048 straddles 0.1), so the check is run on ten
/// disjoint 20-seed batches per d with separate seed streams: the pooled
/// median must meet the bound and so must at least eight batch medians.
fn c8_recovery() -> Outcome {
    const BATCHES: u64 = 10;
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, d) in [-0.3, 0.0, 0.3].into_iter().enumerate() {
        let model = FarimaModel::new(vec![], d, vec![], 1.0, 100, 0.0).unwrap();
        let base = 100_000 * (k as u64 + 1);
        let errors: Vec<Vec<f64>> = (0..BATCHES)
            .map(|b| {
                (0..20)
                    .map(|i| {
                        let x = simulate_farima(&model, 2048, base + 20 * b + i).unwrap();
                        (estimate_d(&x).unwrap().d - d).abs()
                    })
                    .collect()
            })
            .collect();
        let batch_medians: Vec<f64> = errors.iter().map(|e| median_of(e.clone())).collect();
        let good = batch_medians.iter().filter(|m| **m <= 0.1).count();
        let pooled = median_of(errors.concat());
        pass &= pooled <= 0.1 && good >= 8;
        detail.push(format!(
            "d={d}: pooled median |d_hat - d| {pooled:.3}, batches within 0.1: {good}/{BATCHES} (first batch {:.3})",
            batch_medians[0]
        ));
    }
    let ar = FarimaModel::new(vec![0.6], 0.0, vec![], 1.0, 100, 0.0).unwrap();
    let phis: Vec<f64> = (0..20)
        .map(|seed| {
            let y = simulate_farima(&ar, 2000, 900 + seed).unwrap();
            fit_arma(&y, 1, 0).unwrap().phi[0]
        })
        .collect();
    let med = median_of(phis);
    pass &= (med - 0.6).abs() <= 0.1;
    detail.push(format!("AR(1) median phi_hat {med:.3} (target 0.6 +- 0.1)"));
    outcome(pass, detail.join("; "))
}

// ---------------------------------------------------------------- 9

fn window_for(spec: &CorpusSpec) -> AnalysisWindow {
    AnalysisWindow::new(spec.start_day, spec.start_day + chrono::Duration::days(spec.n_days as i64 - 1)).unwrap()
}

fn c9_sign_test() -> Outcome {
    let table = KeywordTable::us_2020();
    let lexicon = Lexicon::test_lexicon();
    let mut matches = 0;
    let mut misses = Vec::new();
    for seed in 0..20u64 {
        let spec = CorpusSpec::two_party_crossing(10_000, 63, 2000, 9_000 + seed);
        let planted = expected_ordering(&spec).unwrap();
        let cfg = PipelineConfig {
            window: window_for(&spec),
            ..Default::default()
        };
        let raw = generate_records(&spec).unwrap().records;
        let records = prepare_records(raw, &table, &lexicon, &cfg.window, cfg.drop_multiparty);
        match forecast_records(&records, &cfg) {
            Ok(summary) if summary.leader().is_some() && summary.leader() == planted.leader() => matches += 1,
            Ok(summary) => misses.push(format!(
                "seed {}: D {:.4e} R {:.4e}",
                spec.seed,
                summary.value(&dem()).unwrap_or(f64::NAN),
                summary.value(&rep()).unwrap_or(f64::NAN)
            )),
            Err(e) => misses.push(format!("seed {}: {e}", spec.seed)),
        }
    }
    outcome(
        matches >= 18,
        format!(
            "{matches}/20 seeds forecast the planted Democratic lead (need 18){}",
            if misses.is_empty() { String::new() } else { format!("; misses: {}", misses.join(", ")) }
        ),
    )
}

// ---------------------------------------------------------------- 10

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn run_every_stage(out_dir: &Path) -> Result<(), mfcast_core::Error> {
    let start = NaiveDate::from_ymd_opt(2020, 9, 1).unwrap();
    let mut cfg = PipelineConfig {
        out_dir: out_dir.to_path_buf(),
        window: AnalysisWindow::new(start, start + chrono::Duration::days(39)).unwrap(),
        seed: Some(17),
        charts: true,
        ..Default::default()
    };
    cfg.graph.slicing = vec![Slicing::Daily, Slicing::Cumulative];
    cfg.farima.track_start = Some(start + chrono::Duration::days(34));

    let spec_path = out_dir.join("spec-input.json");
    let mut spec = CorpusSpec::two_party_crossing(300, 40, 150, 0);
    spec.start_day = start;
    std::fs::create_dir_all(out_dir).unwrap();
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
    cfg.synth_spec = Some(spec_path);
    run_synth(&cfg)?;
    cfg.corpus = Some(out_dir.join("synth/corpus.jsonl"));
    run_ingest(&cfg)?;
    run_sentiment_stats(&cfg)?;
    run_graph_stats(&cfg)?;
    run_score(&cfg)?;
    run_forecast(&cfg)?;
    run_baselines(&cfg)?;
    run_evaluate(&cfg)?;
    Ok(())
}

fn c10_determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    if let Err(e) = run_every_stage(a.path()).and_then(|_| run_every_stage(b.path())) {
        return outcome(false, format!("stage failed: {e}"));
    }
    let first = read_tree(a.path());
    // rerun in place: outputs must be rewritten identically
    if let Err(e) = run_every_stage(a.path()) {
        return outcome(false, format!("rerun failed: {e}"));
    }
    let rerun = read_tree(a.path());
    let second = read_tree(b.path());
    let differing: Vec<&String> = first
        .keys()
        .filter(|k| first.get(*k) != second.get(*k) || first.get(*k) != rerun.get(*k))
        .collect();
    let same_sets = first.keys().eq(second.keys()) && first.keys().eq(rerun.keys());
    let csv_json = first.keys().filter(|k| k.ends_with(".csv") || k.ends_with(".json")).count();
    outcome(
        differing.is_empty() && same_sets && csv_json > 20,
        format!(
            "{} files ({csv_json} CSV/JSON) compared across two directories and an in-place rerun; differing: {:?}",
            first.len(),
            differing
        ),
    )
}

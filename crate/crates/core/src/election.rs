//! Vote-share conversion, tweet-count baselines and MAE evaluation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PartyId;
use crate::sentiment::PartyCounts;

/// Percentage points per party.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoteShares(pub BTreeMap<PartyId, f64>);

impl VoteShares {
    pub fn pair(a: &PartyId, share_a: f64, b: &PartyId, share_b: f64) -> Self {
        VoteShares([(a.clone(), share_a), (b.clone(), share_b)].into())
    }

    pub fn get(&self, party: &PartyId) -> Option<f64> {
        self.0.get(party).copied()
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn parties(&self) -> impl Iterator<Item = &PartyId> {
        self.0.keys()
    }
}

/// Actual results and poll averages an evaluation is scored against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceResults {
    pub actual: VoteShares,
    pub polls: VoteShares,
}

impl ReferenceResults {
    /// November 2020 US presidential election: results and The Economist's
    /// poll aggregate.
    pub fn us_2020() -> Self {
        let (d, r) = (PartyId::from("Democratic"), PartyId::from("Republican"));
        ReferenceResults {
            actual: VoteShares::pair(&d, 51.40, &r, 46.90),
            polls: VoteShares::pair(&d, 54.40, &r, 45.60),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MissingInput(format!("reference results {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Maps two forecast scores to two-party shares: the difference, read as a
/// fraction of the vote, is split symmetrically around 50%.
pub fn vote_share_from_forecasts(a: &PartyId, f_a: f64, b: &PartyId, f_b: f64) -> Result<VoteShares> {
    if !f_a.is_finite() || !f_b.is_finite() {
        return Err(Error::Parameter("forecasts must be finite".into()));
    }
    let diff_pp = 100.0 * (f_a - f_b);
    Ok(VoteShares::pair(a, 50.0 + diff_pp / 2.0, b, 50.0 - diff_pp / 2.0))
}

/// Raw and normalized output of the actual-sentiment-score baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActualSentimentShares {
    /// `(pos - neg) / (T(A) + T(B))` in percent.
    pub raw: VoteShares,
    /// Raw values rescaled to sum to 100.
    pub normalized: VoteShares,
}

/// Actual sentiment score `(pos(X) - neg(X)) / (T(A) + T(B))`.
///
/// The published comparison table reports these values divided by their
/// sum; both forms are returned and `normalized` is the reported one.
pub fn baseline_actual_sentiment(a: &PartyCounts, b: &PartyCounts) -> Result<ActualSentimentShares> {
    let total = (a.total + b.total) as f64;
    if a.total == 0 || b.total == 0 {
        return Err(Error::Degenerate("actual sentiment score needs tweets for both parties".into()));
    }
    let net = |c: &PartyCounts| c.positive as f64 - c.negative as f64;
    let (raw_a, raw_b) = (100.0 * net(a) / total, 100.0 * net(b) / total);
    let (net_a, net_b) = (net(a), net(b));
    let sum = net_a + net_b;
    if sum == 0.0 {
        return Err(Error::Degenerate("raw actual sentiment scores sum to zero; cannot normalize".into()));
    }
    Ok(ActualSentimentShares {
        raw: VoteShares::pair(&a.party, raw_a, &b.party, raw_b),
        normalized: VoteShares::pair(&a.party, 100.0 * net_a / sum, &b.party, 100.0 * net_b / sum),
    })
}

/// Popularity `pos(X)/(pos(X)+neg(X)) * T(X)/(T(A)+T(B))` in percent; not
/// normalized across parties.
pub fn baseline_popularity(a: &PartyCounts, b: &PartyCounts) -> Result<VoteShares> {
    let total = (a.total + b.total) as f64;
    if total == 0.0 {
        return Err(Error::Degenerate("popularity needs at least one tweet".into()));
    }
    let share = |c: &PartyCounts| -> Result<f64> {
        if c.total == 0 {
            return Ok(0.0);
        }
        let polar = c.positive + c.negative;
        if polar == 0 {
            return Err(Error::Degenerate(format!("{} has no polar tweets", c.party)));
        }
        Ok(100.0 * (c.positive as f64 / polar as f64) * (c.total as f64 / total))
    };
    Ok(VoteShares::pair(&a.party, share(a)?, &b.party, share(b)?))
}

/// Cross-negative share `(pos(A) + neg(B)) / (pos + neg of both parties)`:
/// negative tweets about one party count for the other. Neutral tweets are
/// left out of the denominator, which is what reproduces the published
/// comparison figures.
pub fn baseline_cross_negative(a: &PartyCounts, b: &PartyCounts) -> Result<VoteShares> {
    let denom = (a.positive + a.negative + b.positive + b.negative) as f64;
    if denom == 0.0 {
        return Err(Error::Degenerate("no polar tweets for either party".into()));
    }
    let share_a = 100.0 * (a.positive + b.negative) as f64 / denom;
    let share_b = 100.0 * (b.positive + a.negative) as f64 / denom;
    Ok(VoteShares::pair(&a.party, share_a, &b.party, share_b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaeReport {
    pub per_party: BTreeMap<PartyId, f64>,
    pub mean: f64,
}

/// Per-party absolute errors in percentage points and their mean.
pub fn mae(predicted: &VoteShares, actual: &VoteShares) -> Result<MaeReport> {
    if predicted.0.len() != actual.0.len() || predicted.parties().any(|p| actual.get(p).is_none()) {
        let names = |v: &VoteShares| v.parties().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        return Err(Error::PartyMismatch(format!(
            "predicted [{}] vs actual [{}]",
            names(predicted),
            names(actual)
        )));
    }
    if predicted.0.is_empty() {
        return Err(Error::PartyMismatch("no parties to compare".into()));
    }
    let per_party: BTreeMap<PartyId, f64> = predicted
        .0
        .iter()
        .map(|(p, v)| (p.clone(), (v - actual.0[p]).abs()))
        .collect();
    let mean = per_party.values().sum::<f64>() / per_party.len() as f64;
    Ok(MaeReport { per_party, mean })
}

/// One column of the method comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    pub shares: VoteShares,
    /// `None` for the reference row itself.
    pub mae: Option<MaeReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub parties: [PartyId; 2],
    pub methods: Vec<MethodResult>,
}

pub const METHOD_MULTIFACTOR: &str = "multifactor";
pub const METHOD_POLLS: &str = "polls";
pub const METHOD_ACTUAL_SENTIMENT: &str = "actual_sentiment";
pub const METHOD_POPULARITY: &str = "popularity";
pub const METHOD_CROSS_NEGATIVE: &str = "cross_negative";
pub const METHOD_REAL: &str = "real_results";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineToggles {
    pub actual_sentiment: bool,
    pub popularity: bool,
    pub cross_negative: bool,
}

impl Default for BaselineToggles {
    fn default() -> Self {
        BaselineToggles {
            actual_sentiment: true,
            popularity: true,
            cross_negative: true,
        }
    }
}

/// Enabled baselines as `(method, shares, notes)`.
pub fn baselines(a: &PartyCounts, b: &PartyCounts, toggles: BaselineToggles) -> Result<Vec<(String, VoteShares, Vec<String>)>> {
    let mut out = Vec::new();
    if toggles.actual_sentiment {
        let s = baseline_actual_sentiment(a, b)?;
        let note = format!(
            "raw (pos-neg)/(T(A)+T(B)): {}={:.4}, {}={:.4}; normalized to sum 100",
            a.party,
            s.raw.get(&a.party).unwrap_or_default(),
            b.party,
            s.raw.get(&b.party).unwrap_or_default()
        );
        out.push((METHOD_ACTUAL_SENTIMENT.to_string(), s.normalized, vec![note]));
    }
    if toggles.popularity {
        out.push((METHOD_POPULARITY.to_string(), baseline_popularity(a, b)?, Vec::new()));
    }
    if toggles.cross_negative {
        out.push((
            METHOD_CROSS_NEGATIVE.to_string(),
            baseline_cross_negative(a, b)?,
            vec!["denominator excludes neutral tweets (pos+neg of both parties)".to_string()],
        ));
    }
    Ok(out)
}

/// Assembles the comparison: multifactor (if forecasts are given), polls,
/// enabled baselines, and the reference results, each scored by MAE
/// against `reference.actual`.
pub fn evaluate(
    counts: (&PartyCounts, &PartyCounts),
    forecasts: Option<(f64, f64)>,
    reference: &ReferenceResults,
    toggles: BaselineToggles,
) -> Result<Evaluation> {
    let (a, b) = counts;
    let parties = [a.party.clone(), b.party.clone()];
    let mut methods = Vec::new();
    let mut push = |method: &str, shares: VoteShares, notes: Vec<String>| -> Result<()> {
        let err = mae(&shares, &reference.actual)?;
        methods.push(MethodResult {
            method: method.to_string(),
            shares,
            mae: Some(err),
            notes,
        });
        Ok(())
    };
    if let Some((fa, fb)) = forecasts {
        let shares = vote_share_from_forecasts(&a.party, fa, &b.party, fb)?;
        push(METHOD_MULTIFACTOR, shares, vec![format!("forecasts {fa} / {fb}")])?;
    }
    push(METHOD_POLLS, reference.polls.clone(), Vec::new())?;
    for (m, shares, notes) in baselines(a, b, toggles)? {
        push(&m, shares, notes)?;
    }
    methods.push(MethodResult {
        method: METHOD_REAL.to_string(),
        shares: reference.actual.clone(),
        mae: None,
        notes: Vec::new(),
    });
    Ok(Evaluation { parties, methods })
}

impl Evaluation {
    pub fn method(&self, name: &str) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.method == name)
    }

    /// Method x party share matrix with a `total` row, then per-party MAE
    /// rows and a `mean` row. Values in percentage points.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["table".to_string(), "row".to_string()];
        header.extend(self.methods.iter().map(|m| m.method.clone()));
        wr.write_record(&header)?;
        let fmt = |v: f64| format!("{v:.6}");
        for p in &self.parties {
            let mut row = vec!["shares".to_string(), p.to_string()];
            row.extend(self.methods.iter().map(|m| m.shares.get(p).map(fmt).unwrap_or_default()));
            wr.write_record(&row)?;
        }
        let mut total = vec!["shares".to_string(), "total".to_string()];
        total.extend(self.methods.iter().map(|m| fmt(m.shares.total())));
        wr.write_record(&total)?;
        for p in &self.parties {
            let mut row = vec!["mae".to_string(), p.to_string()];
            row.extend(self.methods.iter().map(|m| {
                m.mae
                    .as_ref()
                    .and_then(|r| r.per_party.get(p).copied())
                    .map(fmt)
                    .unwrap_or_default()
            }));
            wr.write_record(&row)?;
        }
        let mut mean = vec!["mae".to_string(), "mean".to_string()];
        mean.extend(self.methods.iter().map(|m| m.mae.as_ref().map(|r| fmt(r.mean)).unwrap_or_default()));
        wr.write_record(&mean)?;
        wr.flush().map_err(|e| Error::io("<evaluation csv>", e))?;
        Ok(())
    }
}

//! Per-user multifactor scores, their daily distributions and summaries.

mod tfit;
mod wasserstein;

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{AnalysisWindow, PartyId, TweetRecord, UserId};

pub use tfit::{fit_student_t, student_t_log_likelihood, StudentTFit, MIN_T_SAMPLE};
pub use wasserstein::{distance_matrix, wasserstein1};

/// Normalization coefficient in `MFS_i = 1000 x_i sum_j S_j R_j`.
pub const MFS_COEFFICIENT: f64 = 1000.0;

/// Retweet weight of a tweet; tweets that were never retweeted count once.
pub fn retweet_weight(retweets: u64) -> f64 {
    retweets.max(1) as f64
}

/// `coefficient * x * sum_j S_j max(R_j, 1)` over `(sentiment, retweets)` pairs.
pub fn mfs_user_with(coefficient: f64, centrality: f64, tweets: &[(f64, u64)]) -> f64 {
    let weighted: f64 = tweets.iter().map(|&(s, r)| s * retweet_weight(r)).sum();
    coefficient * centrality * weighted
}

pub fn mfs_user(centrality: f64, tweets: &[(f64, u64)]) -> f64 {
    mfs_user_with(MFS_COEFFICIENT, centrality, tweets)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserDayScore {
    pub user_id: UserId,
    pub day: NaiveDate,
    pub party: PartyId,
    pub mfs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DailyDistribution {
    pub day: NaiveDate,
    pub party: PartyId,
    /// One value per active user, in ascending user ID order.
    pub sample: Vec<f64>,
    pub users: Vec<UserId>,
}

impl DailyDistribution {
    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    pub fn scores(&self) -> impl Iterator<Item = UserDayScore> + '_ {
        self.users.iter().zip(&self.sample).map(|(&u, &mfs)| UserDayScore {
            user_id: u,
            day: self.day,
            party: self.party.clone(),
            mfs,
        })
    }
}

/// One distribution per window day for `party`. A user contributes one MFS
/// value on each day they posted at least one tweet tagged with `party`;
/// days without such tweets yield an empty distribution.
pub fn daily_distributions(
    window: &AnalysisWindow,
    buckets: &BTreeMap<NaiveDate, Vec<TweetRecord>>,
    centrality: &BTreeMap<UserId, f64>,
    party: &PartyId,
    coefficient: f64,
) -> Vec<DailyDistribution> {
    window
        .days()
        .map(|day| {
            let mut per_user: BTreeMap<UserId, Vec<(f64, u64)>> = BTreeMap::new();
            for r in buckets.get(&day).into_iter().flatten() {
                if r.party_tags.contains(party) {
                    per_user
                        .entry(r.from_user_id)
                        .or_default()
                        .push((r.sentiment_score.unwrap_or(0.0), r.retweet_count));
                }
            }
            let (users, sample) = per_user
                .into_iter()
                .map(|(u, tweets)| {
                    let x = centrality.get(&u).copied().unwrap_or(0.0);
                    (u, mfs_user_with(coefficient, x, &tweets))
                })
                .unzip();
            DailyDistribution {
                day,
                party: party.clone(),
                sample,
                users,
            }
        })
        .collect()
}

/// Median; the midpoint of the two central order statistics for even sizes.
pub fn median(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample("median of an empty sample".into()));
    }
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

pub fn mean(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample("mean of an empty sample".into()));
    }
    Ok(sample.iter().sum::<f64>() / sample.len() as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    #[default]
    Median,
    Mean,
}

impl Statistic {
    pub fn apply(self, sample: &[f64]) -> Result<f64> {
        match self {
            Statistic::Median => median(sample),
            Statistic::Mean => mean(sample),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Statistic::Median => "median",
            Statistic::Mean => "mean",
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Statistic::Median),
            "mean" => Ok(Statistic::Mean),
            other => Err(Error::Parameter(format!("unknown statistic {other:?}"))),
        }
    }
}

/// Daily summary series for one party. `values[i]` is `None` on days with
/// no active users.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DailySeries {
    pub party: PartyId,
    pub statistic: Statistic,
    pub days: Vec<NaiveDate>,
    pub values: Vec<Option<f64>>,
    pub sample_sizes: Vec<usize>,
}

impl DailySeries {
    pub fn from_distributions(party: &PartyId, statistic: Statistic, dists: &[DailyDistribution]) -> Self {
        DailySeries {
            party: party.clone(),
            statistic,
            days: dists.iter().map(|d| d.day).collect(),
            values: dists.iter().map(|d| statistic.apply(&d.sample).ok()).collect(),
            sample_sizes: dists.iter().map(|d| d.sample.len()).collect(),
        }
    }

    pub fn missing_days(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Values with gaps linearly interpolated between neighbouring observed
    /// days; leading and trailing gaps take the nearest observed value.
    pub fn filled(&self) -> Result<Vec<f64>> {
        interpolate_gaps(&self.values)
    }

    /// Appends `date,party,<stat>_mfs,sample_size` rows (header excluded).
    pub fn write_rows<W: Write>(&self, wr: &mut csv::Writer<W>) -> Result<()> {
        for ((day, v), n) in self.days.iter().zip(&self.values).zip(&self.sample_sizes) {
            wr.write_record([
                day.to_string(),
                self.party.to_string(),
                v.map(|x| format!("{x:.17e}")).unwrap_or_default(),
                n.to_string(),
            ])?;
        }
        Ok(())
    }

    pub fn csv_header(statistic: Statistic) -> [String; 4] {
        [
            "date".into(),
            "party".into(),
            format!("{}_mfs", statistic.label()),
            "sample_size".into(),
        ]
    }
}

pub fn interpolate_gaps(values: &[Option<f64>]) -> Result<Vec<f64>> {
    let known: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|x| (i, x)))
        .collect();
    if known.is_empty() {
        return Err(Error::EmptySample("series has no observed values".into()));
    }
    let mut out = Vec::with_capacity(values.len());
    let mut k = 0;
    for i in 0..values.len() {
        while k + 1 < known.len() && known[k + 1].0 <= i {
            k += 1;
        }
        let (i0, x0) = known[k];
        let v = if i <= i0 || k + 1 == known.len() {
            x0
        } else {
            let (i1, x1) = known[k + 1];
            x0 + (x1 - x0) * (i - i0) as f64 / (i1 - i0) as f64
        };
        out.push(v);
    }
    Ok(out)
}

/// Per-user polarity tallies restricted to a user subset, e.g. the most
/// central accounts.
pub fn users_subset<'a>(
    records: impl IntoIterator<Item = &'a TweetRecord>,
    users: &[UserId],
) -> Vec<&'a TweetRecord> {
    let set: HashSet<UserId> = users.iter().copied().collect();
    records
        .into_iter()
        .filter(|r| set.contains(&r.from_user_id))
        .collect()
}

/// Writes a date-labelled square matrix as CSV.
pub fn write_distance_matrix<W: Write>(labels: &[NaiveDate], m: &[Vec<f64>], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["date".to_string()];
    header.extend(labels.iter().map(|d| d.to_string()));
    wr.write_record(&header)?;
    for (d, row) in labels.iter().zip(m) {
        let mut rec = vec![d.to_string()];
        rec.extend(row.iter().map(|x| format!("{x:.17e}")));
        wr.write_record(&rec)?;
    }
    wr.flush().map_err(|e| Error::io("<distance matrix>", e))?;
    Ok(())
}

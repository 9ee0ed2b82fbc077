//! Synthetic tweet corpora with planted popularity trends, used as ground
//! truth for end-to-end runs.
//!
//! Every generated tweet names exactly one party through one of that party's
//! keyword tokens and carries at most one sentiment word, so the intended
//! party tag and polarity class are recoverable from the text alone.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{PartyId, TweetRecord, UserId, NO_TARGET};
use crate::sentiment::{PartyCounts, Polarity};

/// Linear interpolation from `start` (first day) to `end` (last day).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearTrend {
    pub start: f64,
    pub end: f64,
}

impl LinearTrend {
    pub fn constant(v: f64) -> Self {
        LinearTrend { start: v, end: v }
    }

    pub fn at(&self, day: usize, n_days: usize) -> f64 {
        if n_days <= 1 {
            return self.end;
        }
        let f = day as f64 / (n_days - 1) as f64;
        self.start + (self.end - self.start) * f
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentimentMix {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
}

impl SentimentMix {
    pub fn new(positive: f64, negative: f64, neutral: f64) -> Self {
        SentimentMix {
            positive,
            negative,
            neutral,
        }
    }

    fn check(&self, context: &str) -> Result<()> {
        let ps = [self.positive, self.negative, self.neutral];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Parameter(format!("{context}: probabilities must lie in [0, 1]: {self:?}")));
        }
        if (ps.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!("{context}: sentiment mix must sum to 1: {self:?}")));
        }
        Ok(())
    }

    fn lerp(&self, other: &SentimentMix, f: f64) -> SentimentMix {
        let l = |a: f64, b: f64| a + (b - a) * f;
        SentimentMix::new(
            l(self.positive, other.positive),
            l(self.negative, other.negative),
            l(self.neutral, other.neutral),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartySpec {
    /// Tokens that tag a tweet with this party (e.g. `Biden`, `@GOP`).
    pub keywords: Vec<String>,
    /// Relative tweet volume.
    #[serde(default = "one")]
    pub tweet_share: f64,
    /// Planted popularity: moves `popularity / 2` of probability mass from
    /// negative to positive tweets (negative values move it the other way).
    pub popularity: LinearTrend,
    /// Base class mix on the first day.
    pub sentiment_mix: SentimentMix,
    /// Base class mix on the last day; constant when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment_mix_end: Option<SentimentMix>,
}

fn one() -> f64 {
    1.0
}

impl PartySpec {
    /// Effective class mix on `day` (0-based).
    pub fn mix_on(&self, day: usize, n_days: usize) -> SentimentMix {
        let f = if n_days <= 1 { 1.0 } else { day as f64 / (n_days - 1) as f64 };
        let base = match &self.sentiment_mix_end {
            Some(end) => self.sentiment_mix.lerp(end, f),
            None => self.sentiment_mix,
        };
        let shift = self.popularity.at(day, n_days) / 2.0;
        SentimentMix::new(base.positive + shift, base.negative - shift, base.neutral)
    }

    /// `P(positive) - P(negative)` on `day`.
    pub fn net_lean(&self, day: usize, n_days: usize) -> f64 {
        let m = self.mix_on(day, n_days);
        m.positive - m.negative
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetweetLaw {
    pub exponent: f64,
    pub cap: u64,
}

impl Default for RetweetLaw {
    fn default() -> Self {
        RetweetLaw {
            exponent: 2.5,
            cap: 10_000,
        }
    }
}

impl RetweetLaw {
    /// `floor(U^(-1/(a-1))) - 1`, capped: `P(R >= r) = (r + 1)^-(a-1)`.
    fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let r = u.powf(-1.0 / (self.exponent - 1.0)).floor() - 1.0;
        if r >= self.cap as f64 {
            self.cap
        } else {
            r.max(0.0) as u64
        }
    }
}

fn default_start_day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 9, 1).expect("valid date")
}

fn words(ws: &[&str]) -> Vec<String> {
    ws.iter().map(|w| w.to_string()).collect()
}

fn default_positive_words() -> Vec<String> {
    words(&["good", "great", "love", "win", "best", "hope", "strong", "happy", "support", "proud"])
}

fn default_negative_words() -> Vec<String> {
    words(&["bad", "terrible", "hate", "lose", "worst", "fear", "weak", "corrupt", "disaster", "angry"])
}

fn default_filler_words() -> Vec<String> {
    words(&["today", "rally", "vote", "debate", "news", "tonight", "state", "campaign", "speech", "poll"])
}

fn default_tweets_per_day() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub n_users: usize,
    pub n_days: usize,
    #[serde(default = "default_start_day")]
    pub start_day: NaiveDate,
    #[serde(default = "default_tweets_per_day")]
    pub tweets_per_day: usize,
    pub parties: BTreeMap<PartyId, PartySpec>,
    /// Probability that a tweet is a direct message to another user.
    pub interaction_rate: f64,
    #[serde(default)]
    pub retweet_law: RetweetLaw,
    pub seed: u64,
    #[serde(default = "default_positive_words")]
    pub positive_words: Vec<String>,
    #[serde(default = "default_negative_words")]
    pub negative_words: Vec<String>,
    #[serde(default = "default_filler_words")]
    pub filler_words: Vec<String>,
}

impl CorpusSpec {
    /// Democratic vs Republican corpus in which the Democratic lean rises
    /// from -0.2 to +0.6 while the Republican lean falls from +0.2 to -0.6.
    pub fn two_party_crossing(n_users: usize, n_days: usize, tweets_per_day: usize, seed: u64) -> Self {
        let mix = SentimentMix::new(0.4, 0.4, 0.2);
        let party = |kws: &[&str], start: f64, end: f64| PartySpec {
            keywords: words(kws),
            tweet_share: 1.0,
            popularity: LinearTrend { start, end },
            sentiment_mix: mix,
            sentiment_mix_end: None,
        };
        let parties = [
            (PartyId::from("Democratic"), party(&["Biden", "@JoeBiden", "@TheDemocrats"], -0.2, 0.6)),
            (PartyId::from("Republican"), party(&["Trump", "@realDonaldTrump", "@GOP"], 0.2, -0.6)),
        ]
        .into();
        CorpusSpec {
            n_users,
            n_days,
            start_day: default_start_day(),
            tweets_per_day,
            parties,
            interaction_rate: 0.3,
            retweet_law: RetweetLaw::default(),
            seed,
            positive_words: default_positive_words(),
            negative_words: default_negative_words(),
            filler_words: default_filler_words(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CorpusSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.n_days == 0 {
            return Err(Error::Parameter("n_users and n_days must be >= 1".into()));
        }
        if self.parties.is_empty() {
            return Err(Error::Parameter("corpus spec needs at least one party".into()));
        }
        if !(0.0..=1.0).contains(&self.interaction_rate) {
            return Err(Error::Parameter(format!("interaction_rate {} outside [0, 1]", self.interaction_rate)));
        }
        if !(self.retweet_law.exponent > 1.0) {
            return Err(Error::Parameter("retweet power-law exponent must exceed 1".into()));
        }
        for (name, ws) in [
            ("positive_words", &self.positive_words),
            ("negative_words", &self.negative_words),
            ("filler_words", &self.filler_words),
        ] {
            if ws.is_empty() {
                return Err(Error::Parameter(format!("{name} must not be empty")));
            }
        }
        for (party, p) in &self.parties {
            if p.keywords.is_empty() {
                return Err(Error::Parameter(format!("{party}: no keywords")));
            }
            if !(p.tweet_share >= 0.0 && p.tweet_share.is_finite()) {
                return Err(Error::Parameter(format!("{party}: tweet_share must be finite and >= 0")));
            }
            p.sentiment_mix.check(party.as_str())?;
            if let Some(end) = &p.sentiment_mix_end {
                end.check(party.as_str())?;
            }
            // the effective mix is linear in the day, so the endpoints suffice
            p.mix_on(0, self.n_days).check(&format!("{party} on the first day"))?;
            p.mix_on(self.n_days - 1, self.n_days).check(&format!("{party} on the last day"))?;
        }
        if self.parties.values().all(|p| p.tweet_share == 0.0) {
            return Err(Error::Parameter("at least one party needs a positive tweet_share".into()));
        }
        Ok(())
    }
}

/// A generated corpus with the generator's own per-party class tallies.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCorpus {
    pub records: Vec<TweetRecord>,
    pub tally: BTreeMap<PartyId, PartyCounts>,
}

impl SyntheticCorpus {
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.records {
            writeln!(w, "{}", r.to_json_line())?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

/// Generates the corpus described by `spec`; deterministic per seed.
pub fn generate_records(spec: &CorpusSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let parties: Vec<(&PartyId, &PartySpec)> = spec.parties.iter().collect();
    let party_pick =
        WeightedIndex::new(parties.iter().map(|(_, p)| p.tweet_share)).map_err(|e| Error::Parameter(e.to_string()))?;

    // preferential attachment: every user starts with one ticket and gains
    // one each time they receive a message
    let mut attachment: Vec<UserId> = (1..=spec.n_users as UserId).collect();
    let mut tally: BTreeMap<PartyId, PartyCounts> =
        parties.iter().map(|(id, _)| ((*id).clone(), PartyCounts::empty((*id).clone()))).collect();
    let mut records = Vec::with_capacity(spec.n_days * spec.tweets_per_day);

    for day in 0..spec.n_days {
        let date = spec.start_day + Duration::days(day as i64);
        let midnight = Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("midnight"));
        let mixes: Vec<SentimentMix> = parties.iter().map(|(_, p)| p.mix_on(day, spec.n_days)).collect();
        for _ in 0..spec.tweets_per_day {
            let k = party_pick.sample(&mut rng);
            let (party, pspec) = parties[k];
            let from = rng.gen_range(1..=spec.n_users as UserId);

            let to_user_id = if spec.n_users > 1 && rng.gen_bool(spec.interaction_rate) {
                let mut to = from;
                for _ in 0..8 {
                    to = attachment[rng.gen_range(0..attachment.len())];
                    if to != from {
                        break;
                    }
                }
                if to == from {
                    to = from % spec.n_users as UserId + 1;
                }
                attachment.push(to);
                to as i64
            } else {
                NO_TARGET
            };

            let m = &mixes[k];
            let u: f64 = rng.gen();
            let polarity = if u < m.positive {
                Polarity::Positive
            } else if u < m.positive + m.negative {
                Polarity::Negative
            } else {
                Polarity::Neutral
            };
            let mut text = vec![pspec.keywords.choose(&mut rng).expect("non-empty").clone()];
            match polarity {
                Polarity::Positive => text.push(spec.positive_words.choose(&mut rng).expect("non-empty").clone()),
                Polarity::Negative => text.push(spec.negative_words.choose(&mut rng).expect("non-empty").clone()),
                Polarity::Neutral => {}
            }
            for _ in 0..2 {
                text.push(spec.filler_words.choose(&mut rng).expect("non-empty").clone());
            }
            tally.get_mut(party).expect("known party").add(polarity);

            let second = rng.gen_range(0..86_400);
            records.push(TweetRecord {
                tweet_id: (records.len() + 1).to_string(),
                from_user_id: from,
                to_user_id,
                text: text.join(" "),
                retweet_count: spec.retweet_law.sample(&mut rng),
                timestamp: midnight + Duration::seconds(second),
                party_tags: Default::default(),
                sentiment_score: None,
            });
        }
    }
    Ok(SyntheticCorpus { records, tally })
}

/// Newline-delimited JSON corpus in the ingest record format.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<String> {
    Ok(generate_records(spec)?.to_jsonl())
}

/// Parties grouped by planted final-day lean, strongest first; parties
/// whose leans are equal share a group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyRanking(pub Vec<Vec<PartyId>>);

impl PartyRanking {
    /// True when the top position is shared.
    pub fn is_tie(&self) -> bool {
        self.0.first().map_or(true, |g| g.len() > 1)
    }

    pub fn leader(&self) -> Option<&PartyId> {
        match self.0.first() {
            Some(g) if g.len() == 1 => g.first(),
            _ => None,
        }
    }
}

/// Planted ordering at the end of the window: parties ranked by their
/// final-day `P(positive) - P(negative)`. With a shared base mix this is the
/// ordering of the popularity trends' final values.
pub fn expected_ordering(spec: &CorpusSpec) -> Result<PartyRanking> {
    spec.validate()?;
    let last = spec.n_days - 1;
    let mut leans: Vec<(f64, &PartyId)> = spec
        .parties
        .iter()
        .map(|(id, p)| (p.net_lean(last, spec.n_days), id))
        .collect();
    leans.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    let mut groups: Vec<(f64, Vec<PartyId>)> = Vec::new();
    for (lean, id) in leans {
        match groups.last_mut() {
            Some((l, g)) if (*l - lean).abs() <= 1e-12 => g.push(id.clone()),
            _ => groups.push((lean, vec![id.clone()])),
        }
    }
    Ok(PartyRanking(groups.into_iter().map(|(_, g)| g).collect()))
}

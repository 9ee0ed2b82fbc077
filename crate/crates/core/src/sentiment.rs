//! Additive lexicon sentiment scoring and per-party polarity counts.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{PartyId, TweetRecord};
use crate::text::tokenize;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lexicon {
    scores: HashMap<String, f64>,
}

impl Lexicon {
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut scores = HashMap::new();
        for (tok, score) in pairs {
            let tok = tok.as_ref().trim().to_lowercase();
            if tok.is_empty() {
                return Err(Error::Parameter("empty lexicon token".into()));
            }
            if !score.is_finite() {
                return Err(Error::Parameter(format!("non-finite score for {tok:?}")));
            }
            scores.insert(tok, score);
        }
        Ok(Lexicon { scores })
    }

    /// Reads `token<TAB>score` lines; `#` comment lines and blank lines are
    /// skipped, and a repeated token keeps its last score.
    pub fn read<R: BufRead>(reader: R, context: &str) -> Result<Self> {
        let mut scores = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(context, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                context: context.to_string(),
                line: idx + 1,
                message,
            };
            let (tok, score) = trimmed
                .split_once('\t')
                .ok_or_else(|| parse_err("expected token<TAB>score".into()))?;
            let tok = tok.trim().to_lowercase();
            if tok.is_empty() {
                return Err(parse_err("empty token".into()));
            }
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("unparseable score {score:?}: {e}")))?;
            if !score.is_finite() {
                return Err(parse_err(format!("non-finite score {score}")));
            }
            if scores.insert(tok.clone(), score).is_some() {
                log::warn!("{context}: line {}: duplicate token {tok:?}, keeping last", idx + 1);
            }
        }
        Ok(Lexicon { scores })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Small deterministic lexicon bundled for tests and synthetic corpora.
    pub fn test_lexicon() -> Self {
        Self::read(include_str!("../data/test_lexicon.tsv").as_bytes(), "test_lexicon.tsv")
            .expect("bundled lexicon is valid")
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.scores.get(token).copied()
    }

    /// Sum of the lexicon scores of the tweet's tokens; unknown tokens count zero.
    pub fn score(&self, text: &str) -> f64 {
        tokenize(text)
            .iter()
            .filter_map(|t| self.scores.get(t.as_str()))
            .sum()
    }

    /// Returns a lexicon with every score multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Lexicon {
            scores: self.scores.iter().map(|(k, v)| (k.clone(), v * factor)).collect(),
        }
    }
}

pub fn score_tweet(text: &str, lexicon: &Lexicon) -> f64 {
    lexicon.score(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

pub fn classify_polarity(score: f64) -> Polarity {
    if score > 0.0 {
        Polarity::Positive
    } else if score < 0.0 {
        Polarity::Negative
    } else {
        Polarity::Neutral
    }
}

/// Fills `sentiment_score` on every record.
pub fn score_records(records: &mut [TweetRecord], lexicon: &Lexicon) {
    for r in records {
        r.sentiment_score = Some(lexicon.score(&r.text));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyCounts {
    pub party: PartyId,
    pub total: u64,
    pub positive: u64,
    pub negative: u64,
    pub neutral: u64,
}

impl PartyCounts {
    pub fn empty(party: PartyId) -> Self {
        PartyCounts {
            party,
            total: 0,
            positive: 0,
            negative: 0,
            neutral: 0,
        }
    }

    /// Builds counts from explicit numbers, checking that they add up.
    pub fn new(party: PartyId, positive: u64, negative: u64, neutral: u64, total: u64) -> Result<Self> {
        if positive + negative + neutral != total {
            return Err(Error::Parameter(format!(
                "{party}: {positive} + {negative} + {neutral} != total {total}"
            )));
        }
        Ok(PartyCounts {
            party,
            total,
            positive,
            negative,
            neutral,
        })
    }

    pub fn add(&mut self, polarity: Polarity) {
        self.total += 1;
        match polarity {
            Polarity::Positive => self.positive += 1,
            Polarity::Negative => self.negative += 1,
            Polarity::Neutral => self.neutral += 1,
        }
    }

    fn pct(&self, n: u64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * n as f64 / self.total as f64
        }
    }

    pub fn positive_pct(&self) -> f64 {
        self.pct(self.positive)
    }

    pub fn negative_pct(&self) -> f64 {
        self.pct(self.negative)
    }

    pub fn neutral_pct(&self) -> f64 {
        self.pct(self.neutral)
    }

    /// Builds counts with the total taken as the sum of the three classes.
    pub fn from_classes(party: PartyId, positive: u64, negative: u64, neutral: u64) -> Self {
        PartyCounts {
            party,
            total: positive + negative + neutral,
            positive,
            negative,
            neutral,
        }
    }

    /// Democratic tweet counts, 2020-09-01 to 2020-11-02. The published
    /// total (3,851,293) is one more than the class sum; the class sum is used.
    pub fn us_2020_democratic() -> Self {
        PartyCounts::from_classes("Democratic".into(), 1_663_373, 1_639_495, 548_424)
    }

    /// Republican tweet counts for the same window. The published total
    /// (7,109,941) is one less than the class sum; the class sum is used.
    pub fn us_2020_republican() -> Self {
        PartyCounts::from_classes("Republican".into(), 2_831_179, 3_791_732, 487_031)
    }
}

/// Polarity counts for the records tagged with `party`. Unscored records are
/// scored with `lexicon` when given and count as neutral otherwise.
pub fn party_counts<'a>(
    party: &PartyId,
    records: impl IntoIterator<Item = &'a TweetRecord>,
    lexicon: Option<&Lexicon>,
) -> PartyCounts {
    let mut counts = PartyCounts::empty(party.clone());
    for r in records.into_iter().filter(|r| r.party_tags.contains(party)) {
        let score = match (r.sentiment_score, lexicon) {
            (Some(s), _) => s,
            (None, Some(lex)) => lex.score(&r.text),
            (None, None) => 0.0,
        };
        counts.add(classify_polarity(score));
    }
    counts
}

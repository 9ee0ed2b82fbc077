//! Tweet corpus ingestion: parsing, party tagging and daily bucketing.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Read};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{bare, tokenize};

pub type UserId = u64;

/// Sentinel `to_user_id` for tweets that are not direct messages.
pub const NO_TARGET: i64 = -1;

/// Party (or keyword category) identifier, e.g. `"Democratic"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartyId(String);

impl PartyId {
    pub fn new(name: impl Into<String>) -> Self {
        PartyId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PartyId {
    fn from(s: &str) -> Self {
        PartyId(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub from_user_id: UserId,
    pub to_user_id: i64,
    pub text: String,
    pub retweet_count: u64,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub party_tags: BTreeSet<PartyId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment_score: Option<f64>,
}

impl TweetRecord {
    /// Addressed receiver, if this tweet is a direct message.
    pub fn target(&self) -> Option<UserId> {
        (self.to_user_id >= 1).then_some(self.to_user_id as UserId)
    }

    pub fn day(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("TweetRecord serializes")
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.tweet_id.trim().is_empty() {
            return Err("empty tweet_id".into());
        }
        if self.from_user_id < 1 {
            return Err("from_user_id must be >= 1".into());
        }
        if self.to_user_id != NO_TARGET && self.to_user_id < 1 {
            return Err(format!("invalid to_user_id {}", self.to_user_id));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    JsonLines,
    Csv,
}

impl InputFormat {
    /// `.csv` selects CSV; anything else is treated as newline-delimited JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::JsonLines,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParseReport {
    pub records: Vec<TweetRecord>,
    pub malformed: usize,
    pub duplicates: usize,
    pub self_messages: usize,
}

/// Raw row shape shared by the JSON and CSV readers.
#[derive(Deserialize)]
struct RawRecord {
    tweet_id: StringOrNumber,
    from_user_id: i64,
    to_user_id: i64,
    text: String,
    retweet_count: i64,
    timestamp: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StringOrNumber {
    S(String),
    N(u64),
}

impl RawRecord {
    fn into_record(self) -> std::result::Result<TweetRecord, String> {
        if self.from_user_id < 1 {
            return Err("from_user_id must be >= 1".into());
        }
        if self.retweet_count < 0 {
            return Err("negative retweet_count".into());
        }
        let timestamp = DateTime::parse_from_rfc3339(self.timestamp.trim())
            .map_err(|e| format!("bad timestamp {:?}: {e}", self.timestamp))?
            .with_timezone(&Utc);
        let tweet_id = match self.tweet_id {
            StringOrNumber::S(s) => s,
            StringOrNumber::N(n) => n.to_string(),
        };
        let rec = TweetRecord {
            tweet_id,
            from_user_id: self.from_user_id as UserId,
            to_user_id: self.to_user_id,
            text: self.text,
            retweet_count: self.retweet_count as u64,
            timestamp,
            party_tags: BTreeSet::new(),
            sentiment_score: None,
        };
        rec.validate()?;
        Ok(rec)
    }
}

/// Parses a record stream. Malformed rows are skipped and counted; the
/// only fatal error is an unreadable source.
pub fn parse_tweet_stream<R: Read>(input: R, format: InputFormat) -> Result<ParseReport> {
    let mut parsed = Vec::new();
    let mut malformed = 0usize;
    let mut self_messages = 0usize;

    let mut accept = |raw: std::result::Result<RawRecord, String>, line: usize| match raw
        .and_then(RawRecord::into_record)
    {
        Ok(rec) if rec.target() == Some(rec.from_user_id) => self_messages += 1,
        Ok(rec) => parsed.push(rec),
        Err(msg) => {
            log::warn!("skipping malformed record at line {line}: {msg}");
            malformed += 1;
        }
    };

    match format {
        InputFormat::JsonLines => {
            let reader = std::io::BufReader::new(input);
            for (idx, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| Error::io("<record stream>", e))?;
                if line.trim().is_empty() {
                    continue;
                }
                accept(
                    serde_json::from_str::<RawRecord>(&line).map_err(|e| e.to_string()),
                    idx + 1,
                );
            }
        }
        InputFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
            for (idx, row) in reader.deserialize::<RawRecord>().enumerate() {
                let row = match row {
                    Err(e) if e.is_io_error() => {
                        return Err(Error::Serialization(format!("reading csv: {e}")))
                    }
                    other => other.map_err(|e| e.to_string()),
                };
                accept(row, idx + 2);
            }
        }
    }

    let (records, duplicates) = dedup_last_wins(parsed);
    Ok(ParseReport {
        records,
        malformed,
        duplicates,
        self_messages,
    })
}

/// Reads a corpus file, choosing the format by extension.
pub fn read_corpus(path: &Path) -> Result<ParseReport> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_tweet_stream(file, InputFormat::from_path(path))
}

fn dedup_last_wins(records: Vec<TweetRecord>) -> (Vec<TweetRecord>, usize) {
    let mut last: HashMap<&str, usize> = HashMap::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        last.insert(r.tweet_id.as_str(), i);
    }
    let duplicates = records.len() - last.len();
    if duplicates == 0 {
        return (records, 0);
    }
    let keep: Vec<bool> = records
        .iter()
        .enumerate()
        .map(|(i, r)| last[r.tweet_id.as_str()] == i)
        .collect();
    let out = records
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then_some(r))
        .collect();
    (out, duplicates)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum KeywordPattern {
    Hashtag(String),
    Mention(String),
    Phrase(String),
    Word(String),
}

impl KeywordPattern {
    fn normalized(&self) -> Option<Matcher> {
        let norm = |s: &str| s.trim().to_lowercase();
        let m = match self {
            KeywordPattern::Hashtag(v) => Matcher::Token(format!("#{}", norm(v).trim_start_matches('#'))),
            KeywordPattern::Mention(v) => Matcher::Token(format!("@{}", norm(v).trim_start_matches('@'))),
            KeywordPattern::Phrase(v) => Matcher::Substring(norm(v)),
            KeywordPattern::Word(v) => Matcher::Word(norm(v)),
        };
        let ok = match &m {
            Matcher::Token(t) => t.len() > 1,
            Matcher::Substring(s) | Matcher::Word(s) => !s.is_empty(),
        };
        ok.then_some(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Matcher {
    /// Whole token including its sigil.
    Token(String),
    Substring(String),
    /// Whole word, sigils ignored.
    Word(String),
}

/// Party keyword rules. Construct through [`KeywordTable::new`] or
/// deserialization, both of which validate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<PartyId, Vec<KeywordPattern>>", into = "BTreeMap<PartyId, Vec<KeywordPattern>>")]
pub struct KeywordTable {
    entries: BTreeMap<PartyId, Vec<KeywordPattern>>,
    matchers: Vec<(PartyId, Vec<Matcher>)>,
}

impl KeywordTable {
    pub fn new(entries: BTreeMap<PartyId, Vec<KeywordPattern>>) -> Result<Self> {
        let mut matchers = Vec::with_capacity(entries.len());
        for (party, patterns) in &entries {
            if patterns.is_empty() {
                return Err(Error::Parameter(format!("party {party} has no keyword patterns")));
            }
            let ms = patterns
                .iter()
                .map(|p| {
                    p.normalized().ok_or_else(|| {
                        Error::Parameter(format!("party {party}: empty keyword pattern {p:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            matchers.push((party.clone(), ms));
        }
        Ok(KeywordTable { entries, matchers })
    }

    /// The keyword table used for the 2020 US election collection.
    pub fn us_2020() -> Self {
        serde_json::from_str(include_str!("../data/keywords_us_2020.json"))
            .expect("bundled keyword table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn parties(&self) -> impl Iterator<Item = &PartyId> {
        self.entries.keys()
    }

    pub fn patterns(&self, party: &PartyId) -> Option<&[KeywordPattern]> {
        self.entries.get(party).map(Vec::as_slice)
    }

    /// Every party with at least one matching pattern in `text`.
    pub fn match_party(&self, text: &str) -> BTreeSet<PartyId> {
        if text.is_empty() {
            return BTreeSet::new();
        }
        let tokens = tokenize(text);
        let lowered = text.to_lowercase();
        self.matchers
            .iter()
            .filter(|(_, ms)| {
                ms.iter().any(|m| match m {
                    Matcher::Token(t) => tokens.iter().any(|tok| tok == t),
                    Matcher::Substring(s) => lowered.contains(s.as_str()),
                    Matcher::Word(w) => tokens.iter().any(|tok| bare(tok) == w),
                })
            })
            .map(|(p, _)| p.clone())
            .collect()
    }
}

impl TryFrom<BTreeMap<PartyId, Vec<KeywordPattern>>> for KeywordTable {
    type Error = Error;

    fn try_from(entries: BTreeMap<PartyId, Vec<KeywordPattern>>) -> Result<Self> {
        KeywordTable::new(entries)
    }
}

impl From<KeywordTable> for BTreeMap<PartyId, Vec<KeywordPattern>> {
    fn from(t: KeywordTable) -> Self {
        t.entries
    }
}

/// Free-function form of [`KeywordTable::match_party`].
pub fn match_party(text: &str, table: &KeywordTable) -> BTreeSet<PartyId> {
    table.match_party(text)
}

/// Fills `party_tags` on every record. With `drop_multiparty`, tweets that
/// match more than one party are left untagged.
pub fn tag_records(records: &mut [TweetRecord], table: &KeywordTable, drop_multiparty: bool) {
    for r in records.iter_mut() {
        let tags = table.match_party(&r.text);
        r.party_tags = if drop_multiparty && tags.len() > 1 {
            BTreeSet::new()
        } else {
            tags
        };
    }
}

/// Inclusive range of UTC calendar days.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WindowRepr", into = "WindowRepr")]
pub struct AnalysisWindow {
    start_day: NaiveDate,
    end_day: NaiveDate,
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    start_day: NaiveDate,
    end_day: NaiveDate,
}

impl TryFrom<WindowRepr> for AnalysisWindow {
    type Error = Error;
    fn try_from(w: WindowRepr) -> Result<Self> {
        AnalysisWindow::new(w.start_day, w.end_day)
    }
}

impl From<AnalysisWindow> for WindowRepr {
    fn from(w: AnalysisWindow) -> Self {
        WindowRepr {
            start_day: w.start_day,
            end_day: w.end_day,
        }
    }
}

impl AnalysisWindow {
    pub fn new(start_day: NaiveDate, end_day: NaiveDate) -> Result<Self> {
        if start_day > end_day {
            return Err(Error::Parameter(format!(
                "window start {start_day} is after end {end_day}"
            )));
        }
        Ok(AnalysisWindow { start_day, end_day })
    }

    /// 2020-09-01 through 2020-11-02.
    pub fn us_2020() -> Self {
        AnalysisWindow {
            start_day: NaiveDate::from_ymd_opt(2020, 9, 1).unwrap(),
            end_day: NaiveDate::from_ymd_opt(2020, 11, 2).unwrap(),
        }
    }

    pub fn start_day(&self) -> NaiveDate {
        self.start_day
    }

    pub fn end_day(&self) -> NaiveDate {
        self.end_day
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        (self.start_day..=self.end_day).contains(&day)
    }

    pub fn len_days(&self) -> usize {
        (self.end_day - self.start_day).num_days() as usize + 1
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        self.start_day.iter_days().take(self.len_days())
    }
}

impl FromStr for AnalysisWindow {
    type Err = Error;

    /// `YYYY-MM-DD:YYYY-MM-DD`
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("window {s:?} is not <start>:<end>")))?;
        let parse = |d: &str| {
            NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d")
                .map_err(|e| Error::Parameter(format!("bad window date {d:?}: {e}")))
        };
        AnalysisWindow::new(parse(a)?, parse(b)?)
    }
}

impl fmt::Display for AnalysisWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_day, self.end_day)
    }
}

/// Groups in-window records by UTC calendar day; out-of-window records are dropped.
pub fn bucket_by_day(
    records: impl IntoIterator<Item = TweetRecord>,
    window: &AnalysisWindow,
) -> BTreeMap<NaiveDate, Vec<TweetRecord>> {
    let mut buckets: BTreeMap<NaiveDate, Vec<TweetRecord>> = BTreeMap::new();
    for r in records {
        let day = r.day();
        if window.contains(day) {
            buckets.entry(day).or_default().push(r);
        }
    }
    buckets
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, from: i64, to: i64, rt: i64, ts: &str, text: &str) -> String {
        serde_json::json!({
            "tweet_id": id, "from_user_id": from, "to_user_id": to,
            "text": text, "retweet_count": rt, "timestamp": ts,
        })
        .to_string()
    }

    fn parse(lines: &[String]) -> ParseReport {
        parse_tweet_stream(lines.join("\n").as_bytes(), InputFormat::JsonLines).unwrap()
    }

    #[test]
    fn parses_non_dm_record() {
        let rep = parse(&[line("a", 5, -1, 3, "2020-09-01T10:00:00Z", "hi")]);
        assert_eq!(rep.records.len(), 1);
        let r = &rep.records[0];
        assert_eq!((r.from_user_id, r.to_user_id, r.retweet_count), (5, -1, 3));
        assert_eq!(r.target(), None);
        assert_eq!(rep.malformed, 0);
    }

    #[test]
    fn missing_timestamp_is_malformed() {
        let bad = serde_json::json!({
            "tweet_id": "x", "from_user_id": 1, "to_user_id": -1, "text": "", "retweet_count": 0
        })
        .to_string();
        let rep = parse(&[bad, line("y", 1, -1, 0, "2020-09-01T00:00:00Z", "")]);
        assert_eq!(rep.malformed, 1);
        assert_eq!(rep.records.len(), 1);
    }

    #[test]
    fn empty_input() {
        let rep = parse_tweet_stream(&b""[..], InputFormat::JsonLines).unwrap();
        assert!(rep.records.is_empty());
        assert_eq!(rep.malformed, 0);
    }

    #[test]
    fn invalid_ids_and_self_messages() {
        let rep = parse(&[
            line("a", 0, -1, 0, "2020-09-01T00:00:00Z", ""),
            line("b", 3, 0, 0, "2020-09-01T00:00:00Z", ""),
            line("c", 3, -5, 0, "2020-09-01T00:00:00Z", ""),
            line("d", 3, 3, 0, "2020-09-01T00:00:00Z", ""),
            line("e", 3, 1, -1, "2020-09-01T00:00:00Z", ""),
        ]);
        assert_eq!(rep.malformed, 4);
        assert_eq!(rep.self_messages, 1);
        assert!(rep.records.is_empty());
    }

    #[test]
    fn duplicate_ids_last_wins() {
        let rep = parse(&[
            line("a", 1, -1, 0, "2020-09-01T00:00:00Z", "first"),
            line("b", 2, -1, 0, "2020-09-01T00:00:00Z", "other"),
            line("a", 1, -1, 0, "2020-09-01T00:00:00Z", "second"),
        ]);
        assert_eq!(rep.duplicates, 1);
        let texts: Vec<_> = rep.records.iter().map(|r| r.text.as_str()).collect();
        assert_eq!(texts, vec!["other", "second"]);
    }

    #[test]
    fn csv_input() {
        let data = "tweet_id,from_user_id,to_user_id,text,retweet_count,timestamp\n\
                    1,5,7,\"hello, Biden\",2,2020-09-02T01:00:00Z\n\
                    2,5,-1,broken,notanumber,2020-09-02T01:00:00Z\n";
        let rep = parse_tweet_stream(data.as_bytes(), InputFormat::Csv).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert_eq!(rep.malformed, 1);
        assert_eq!(rep.records[0].target(), Some(7));
        assert_eq!(rep.records[0].text, "hello, Biden");
    }

    #[test]
    fn us_2020_matching() {
        let t = KeywordTable::us_2020();
        let dem = PartyId::from("Democratic");
        let rep = PartyId::from("Republican");
        assert_eq!(t.match_party("I will vote for Biden"), [dem.clone()].into());
        assert_eq!(
            t.match_party("Trump and Biden debate tonight"),
            [dem.clone(), rep.clone()].into()
        );
        assert!(t.match_party("nothing political here").is_empty());
        assert!(t.match_party("").is_empty());
    }

    #[test]
    fn pattern_kinds() {
        let t = KeywordTable::us_2020();
        let rep = PartyId::from("Republican");
        // bare words respect word boundaries
        assert!(t.match_party("Spence was here").is_empty());
        assert_eq!(t.match_party("Pence spoke"), [rep.clone()].into());
        // mentions and hashtags are whole tokens
        assert!(t.match_party("@POTUSfan").is_empty());
        assert_eq!(t.match_party("thanks @potus"), [rep.clone()].into());
        assert_eq!(t.match_party("#maga2020!"), [rep.clone()].into());
        assert!(!t.match_party("@realDonaldTrumpet").contains(&rep));
        // phrases are contiguous substrings
        assert_eq!(
            t.match_party("they say NO MALARKEY! again"),
            [PartyId::from("Democratic")].into()
        );
        assert_eq!(
            t.match_party("#USAelection day"),
            [PartyId::from("US November 2020 Election")].into()
        );
    }

    #[test]
    fn table_validation() {
        let mut entries = BTreeMap::new();
        entries.insert(PartyId::from("A"), vec![]);
        assert!(KeywordTable::new(entries).is_err());
        let bad = r#"{"A": [{"kind": "word", "value": "   "}]}"#;
        assert!(KeywordTable::from_json(bad).is_err());
        let bad_kind = r#"{"A": [{"kind": "emoji", "value": "x"}]}"#;
        assert!(KeywordTable::from_json(bad_kind).is_err());
    }

    #[test]
    fn multiparty_flag() {
        let t = KeywordTable::us_2020();
        let mut recs = parse(&[line("a", 1, -1, 0, "2020-09-01T00:00:00Z", "Trump vs Biden")]).records;
        tag_records(&mut recs, &t, false);
        assert_eq!(recs[0].party_tags.len(), 2);
        tag_records(&mut recs, &t, true);
        assert!(recs[0].party_tags.is_empty());
    }

    #[test]
    fn day_buckets() {
        let w = AnalysisWindow::us_2020();
        let recs = parse(&[
            line("a", 1, -1, 0, "2020-09-01T23:59:00Z", ""),
            line("b", 1, -1, 0, "2020-08-31T12:00:00Z", ""),
            line("c", 2, -1, 0, "2020-09-01T00:00:00Z", ""),
            line("d", 2, -1, 0, "2020-11-02T23:59:59Z", ""),
            line("e", 2, -1, 0, "2020-11-03T00:00:00Z", ""),
        ])
        .records;
        let b = bucket_by_day(recs, &w);
        let sep1 = NaiveDate::from_ymd_opt(2020, 9, 1).unwrap();
        assert_eq!(b[&sep1].len(), 2);
        assert_eq!(b.values().map(Vec::len).sum::<usize>(), 3);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn window_parsing() {
        let w: AnalysisWindow = "2020-09-01:2020-11-02".parse().unwrap();
        assert_eq!(w, AnalysisWindow::us_2020());
        assert_eq!(w.len_days(), 63);
        assert_eq!(w.days().count(), 63);
        assert!("2020-11-02:2020-09-01".parse::<AnalysisWindow>().is_err());
        assert!("2020-11-02".parse::<AnalysisWindow>().is_err());
    }

    #[test]
    fn timestamp_offsets_normalize_to_utc() {
        let rep = parse(&[line("a", 1, -1, 0, "2020-09-01T22:30:00-03:00", "")]);
        assert_eq!(rep.records[0].day(), NaiveDate::from_ymd_opt(2020, 9, 2).unwrap());
    }
}

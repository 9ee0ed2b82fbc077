use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::election::BaselineToggles;
use crate::error::{Error, Result};
use crate::farima::{ArmaOrder, DEFAULT_TRUNCATION};
use crate::ingest::{AnalysisWindow, KeywordTable, PartyId};
use crate::mfscore::{Statistic, MFS_COEFFICIENT};
use crate::netgraph::PageRankParams;
use crate::sentiment::Lexicon;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FarimaConfig {
    pub order: ArmaOrder,
    #[serde(rename = "K")]
    pub truncation: usize,
    /// Whether to produce the expanding-window one-step forecast track.
    pub track: bool,
    /// First day forecast by the track; the track never starts before the
    /// shortest fittable prefix.
    pub track_start: Option<NaiveDate>,
}

impl Default for FarimaConfig {
    fn default() -> Self {
        FarimaConfig {
            order: ArmaOrder::default(),
            truncation: DEFAULT_TRUNCATION,
            track: true,
            track_start: NaiveDate::from_ymd_opt(2020, 10, 5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slicing {
    /// One graph per day from that day's interactions.
    Daily,
    /// One graph per day from all interactions up to and including that day.
    Cumulative,
}

impl Slicing {
    pub fn label(self) -> &'static str {
        match self {
            Slicing::Daily => "daily",
            Slicing::Cumulative => "cumulative",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphStatsConfig {
    /// Average path length and clustering of the window graph.
    pub topology: bool,
    pub betweenness: bool,
    /// Per-day graph series to emit in addition to the window graph.
    pub slicing: Vec<Slicing>,
}

impl Default for GraphStatsConfig {
    fn default() -> Self {
        GraphStatsConfig {
            topology: true,
            betweenness: true,
            slicing: Vec::new(),
        }
    }
}

/// Everything a pipeline run needs. Relative paths in a config file are
/// resolved against the file's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    /// Tab-separated `token<TAB>score` lexicon; the bundled test lexicon
    /// when absent.
    pub lexicon: Option<PathBuf>,
    /// Keyword table JSON; the bundled 2020 table when absent.
    pub keywords: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub window: AnalysisWindow,
    /// The two parties compared in forecasts and evaluation.
    pub parties: [PartyId; 2],
    pub drop_multiparty: bool,
    pub pagerank: PageRankParams,
    /// Weight interaction edges by retweet counts.
    pub weighted_graph: bool,
    pub graph: GraphStatsConfig,
    pub statistic: Statistic,
    pub mfs_coefficient: f64,
    pub farima: FarimaConfig,
    pub baselines: BaselineToggles,
    /// Actual results and polls as JSON; the 2020 figures when absent.
    pub reference: Option<PathBuf>,
    /// `party,total,positive,negative,neutral` CSV used instead of the
    /// ingested counts by `baselines` and `evaluate`.
    pub counts: Option<PathBuf>,
    /// Forecast values used by `evaluate` instead of the `forecast` output.
    pub forecasts: Option<BTreeMap<PartyId, f64>>,
    /// Corpus spec JSON for `synth`; a default two-party spec when absent.
    pub synth_spec: Option<PathBuf>,
    /// Overrides the corpus spec seed in `synth`.
    pub seed: Option<u64>,
    /// Write SVG charts next to the forecast tables.
    pub charts: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: None,
            lexicon: None,
            keywords: None,
            out_dir: PathBuf::from("out"),
            window: AnalysisWindow::us_2020(),
            parties: ["Democratic".into(), "Republican".into()],
            drop_multiparty: false,
            pagerank: PageRankParams::default(),
            weighted_graph: false,
            graph: GraphStatsConfig::default(),
            statistic: Statistic::Median,
            mfs_coefficient: MFS_COEFFICIENT,
            farima: FarimaConfig::default(),
            baselines: BaselineToggles::default(),
            reference: None,
            counts: None,
            forecasts: None,
            synth_spec: None,
            seed: None,
            charts: false,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_relative_to(base);
        }
        Ok(cfg)
    }

    fn resolve_relative_to(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.corpus,
            &mut self.lexicon,
            &mut self.keywords,
            &mut self.reference,
            &mut self.counts,
            &mut self.synth_spec,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.out_dir);
    }

    pub fn validate(&self) -> Result<()> {
        if self.parties[0] == self.parties[1] {
            return Err(Error::Parameter(format!("the two parties must differ, got {} twice", self.parties[0])));
        }
        if self.farima.truncation == 0 {
            return Err(Error::Parameter("FARIMA truncation K must be >= 1".into()));
        }
        if !(self.mfs_coefficient.is_finite() && self.mfs_coefficient > 0.0) {
            return Err(Error::Parameter("mfs_coefficient must be positive".into()));
        }
        if let Some(f) = &self.forecasts {
            for p in &self.parties {
                if !f.contains_key(p) {
                    return Err(Error::PartyMismatch(format!("forecasts lack a value for {p}")));
                }
            }
        }
        Ok(())
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        let p = self
            .corpus
            .as_deref()
            .ok_or_else(|| Error::MissingInput("no corpus path configured".into()))?;
        if !p.exists() {
            return Err(Error::MissingInput(format!("corpus {} does not exist", p.display())));
        }
        Ok(p)
    }

    pub fn load_lexicon(&self) -> Result<Lexicon> {
        match &self.lexicon {
            Some(p) if !p.exists() => Err(Error::MissingInput(format!("lexicon {} does not exist", p.display()))),
            Some(p) => Lexicon::load(p),
            None => Ok(Lexicon::test_lexicon()),
        }
    }

    pub fn load_keywords(&self) -> Result<KeywordTable> {
        match &self.keywords {
            Some(p) if !p.exists() => Err(Error::MissingInput(format!("keyword table {} does not exist", p.display()))),
            Some(p) => KeywordTable::load(p),
            None => Ok(KeywordTable::us_2020()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(PipelineConfig::from_json("{}").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn fields_parse() {
        let cfg = PipelineConfig::from_json(
            r#"{"window": {"start_day": "2020-10-01", "end_day": "2020-10-31"},
                "statistic": "mean",
                "farima": {"order": {"fixed": {"p": 1, "q": 0}}, "K": 50},
                "pagerank": {"alpha": 0.5},
                "baselines": {"popularity": false},
                "graph": {"slicing": ["daily", "cumulative"]},
                "forecasts": {"Democratic": 0.1, "Republican": 0.2}}"#,
        )
        .unwrap();
        assert_eq!(cfg.window.len_days(), 31);
        assert_eq!(cfg.statistic, Statistic::Mean);
        assert_eq!(cfg.farima.order, ArmaOrder::Fixed { p: 1, q: 0 });
        assert_eq!(cfg.farima.truncation, 50);
        assert!(cfg.farima.track);
        assert_eq!(cfg.pagerank.alpha, 0.5);
        assert_eq!(cfg.pagerank.tolerance, 1e-10);
        assert!(!cfg.baselines.popularity && cfg.baselines.cross_negative);
        assert_eq!(cfg.graph.slicing, vec![Slicing::Daily, Slicing::Cumulative]);
    }

    #[test]
    fn invalid_configs() {
        assert!(PipelineConfig::from_json(r#"{"parties": ["A", "A"]}"#).is_err());
        assert!(PipelineConfig::from_json(r#"{"window": {"start_day": "2020-10-02", "end_day": "2020-10-01"}}"#).is_err());
        assert!(matches!(
            PipelineConfig::from_json(r#"{"forecasts": {"Democratic": 0.1}}"#),
            Err(Error::PartyMismatch(_))
        ));
        assert!(PipelineConfig::from_json(r#"{"farima": {"K": 0}}"#).is_err());
        assert!(matches!(PipelineConfig::from_json(r#"{"windw": {}}"#), Err(Error::Serialization(_))));
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"corpus": "tweets.jsonl", "out_dir": "/abs/out"}"#).unwrap();
        let cfg = PipelineConfig::load(&path).unwrap();
        assert_eq!(cfg.corpus.unwrap(), dir.path().join("tweets.jsonl"));
        assert_eq!(cfg.out_dir, PathBuf::from("/abs/out"));
        assert!(matches!(cfg_missing_corpus(), Err(Error::MissingInput(_))));
    }

    fn cfg_missing_corpus() -> Result<()> {
        let cfg = PipelineConfig {
            corpus: Some("/nonexistent/corpus.jsonl".into()),
            ..Default::default()
        };
        cfg.corpus_path().map(|_| ())
    }
}

//! Review sessions: the analysed corpus plus the reviewer's overrides, with
//! the JSON payloads served to the workbench and on-disk persistence.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::corpus::{corpus_stats, serialize_bibtex, Corpus, Status};
use crate::decision::DecisionSet;
use crate::evaluation::Label;
use crate::graphs::{CitationGraph, KnnGraph};
use crate::pipeline::{apply_verdicts, run, Analysis, PipelineConfig};
use crate::projection::{BundleTree, ProjectedMap};
use crate::textprep::Stoplist;

pub const SESSION_SCHEMA: &str = "srmap.session/v1";

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unknown study `{0}`")]
    StudyNotFound(String),
    #[error("study `{key}` is already {status}; only studies under evaluation can be marked")]
    Conflict { key: String, status: Status },
    #[error("unsupported session schema `{0}`")]
    Schema(String),
    #[error("session file: {0}")]
    Io(#[from] std::io::Error),
    #[error("session json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A reviewer's decision on one study.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Override {
    pub label: Label,
    pub at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewSession {
    pub schema: String,
    pub id: String,
    pub config: PipelineConfig,
    pub corpus: Corpus,
    pub map: ProjectedMap,
    pub knn: KnnGraph,
    pub citations: CitationGraph,
    pub tree: BundleTree,
    pub decisions: DecisionSet,
    pub overrides: BTreeMap<String, Override>,
}

impl ReviewSession {
    /// Merges and analyses the uploads. The session is complete on return.
    pub fn create(
        id: impl Into<String>,
        previous: &Corpus,
        new_search: &Corpus,
        stoplist: &Stoplist,
        config: PipelineConfig,
    ) -> Result<Self, crate::Error> {
        let a = run(previous, new_search, stoplist, &config)?;
        Ok(Self::from_analysis(id, config, a))
    }

    /// Wraps a finished analysis, with no overrides yet.
    pub fn from_analysis(id: impl Into<String>, config: PipelineConfig, a: Analysis) -> Self {
        ReviewSession {
            schema: SESSION_SCHEMA.to_string(),
            id: id.into(),
            config,
            corpus: a.corpus,
            map: a.map,
            knn: a.knn,
            citations: a.citations,
            tree: a.tree,
            decisions: a.decisions,
            overrides: BTreeMap::new(),
        }
    }

    fn index_of(&self, key: &str) -> Result<usize, SessionError> {
        self.corpus
            .studies()
            .iter()
            .position(|s| s.key == key)
            .ok_or_else(|| SessionError::StudyNotFound(key.to_string()))
    }

    /// Records the reviewer's choice; later marks replace earlier ones.
    pub fn mark(&mut self, key: &str, label: Label, at: DateTime<Utc>) -> Result<(), SessionError> {
        let idx = self.index_of(key)?;
        let status = self.corpus.studies()[idx].status;
        if status != Status::ToEvaluate {
            return Err(SessionError::Conflict { key: key.to_string(), status });
        }
        self.overrides.insert(key.to_string(), Override { label, at });
        Ok(())
    }

    /// Corpus with the reviewer's overrides applied. With `apply_engine`,
    /// engine verdicts fill in for studies nobody marked; undefined studies
    /// nobody marked stay under evaluation either way.
    pub fn export_corpus(&self, apply_engine: bool) -> Corpus {
        let overrides = self.overrides.iter().map(|(k, o)| (k.clone(), o.label)).collect();
        apply_verdicts(&self.corpus, &self.decisions, &overrides, apply_engine)
    }

    pub fn export_bibtex(&self, apply_engine: bool) -> String {
        serialize_bibtex(&self.export_corpus(apply_engine))
    }

    /// Status shown for a study: its own, or the reviewer's override.
    fn display_status(&self, idx: usize) -> Status {
        let study = &self.corpus.studies()[idx];
        match self.overrides.get(&study.key).map(|o| o.label) {
            Some(Label::Include) => Status::IncludedPrevious,
            Some(Label::Exclude) => Status::ExcludedPrevious,
            None => study.status,
        }
    }

    pub fn map_payload(&self) -> Value {
        let stats = corpus_stats(&self.corpus);
        let points: Vec<Value> = self
            .corpus
            .studies()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let status = self.display_status(i);
                json!({
                    "key": s.key,
                    "title": s.title,
                    "x": self.map.positions[i][0],
                    "y": self.map.positions[i][1],
                    "status": status,
                    "color": status.color(),
                    "original_status": s.status,
                    "verdict": self.decisions.get(&s.key).map(|d| d.verdict),
                    "override": self.overrides.get(&s.key).map(|o| o.label),
                })
            })
            .collect();
        json!({
            "schema": "srmap.map/v1",
            "session": self.id,
            "stress": self.map.final_stress,
            "iterations": self.map.iterations_run,
            "seed": self.map.seed,
            "colors": status_colors(),
            "counts": {
                "included": stats.included,
                "excluded": stats.excluded,
                "toevaluate": stats.to_evaluate,
            },
            "points": points,
            "knn": { "k": self.knn.k, "edges": self.knn.key_edges() },
        })
    }

    pub fn bundles_payload(&self) -> Value {
        let keys = &self.tree.doc_keys;
        json!({
            "schema": "srmap.bundles/v1",
            "session": self.id,
            "colors": status_colors(),
            "tree": self.tree.to_nested(),
            "leaf_order": self.tree.leaf_order.iter().map(|&i| &keys[i]).collect::<Vec<_>>(),
            "statuses": (0..self.corpus.len()).map(|i| (keys[i].clone(), json!(self.display_status(i)))).collect::<serde_json::Map<_, _>>(),
            "citations": self.citations.edges.iter().map(|&(a, b)| json!({
                "source": keys[a],
                "target": keys[b],
            })).collect::<Vec<_>>(),
            "cited_counts": (0..self.corpus.len())
                .filter(|&i| self.citations.cited_by_count(i) > 0)
                .map(|i| (keys[i].clone(), json!(self.citations.cited_by_count(i))))
                .collect::<serde_json::Map<_, _>>(),
        })
    }

    pub fn study_detail(&self, key: &str) -> Result<Value, SessionError> {
        let idx = self.index_of(key)?;
        let s = &self.corpus.studies()[idx];
        let status = self.display_status(idx);
        let decision = self.decisions.get(key);
        Ok(json!({
            "schema": "srmap.study/v1",
            "key": s.key,
            "title": s.title,
            "abstract": s.abstract_text,
            "keywords": s.keywords,
            "doi": s.doi,
            "status": status,
            "color": status.color(),
            "original_status": s.status,
            "markable": s.status == Status::ToEvaluate,
            "verdict": decision.map(|d| d.verdict),
            "evidence": decision.map(|d| &d.evidence),
            "override": self.overrides.get(key),
            "knn_neighbors": self.knn.neighbors(idx).iter().map(|&j| &self.knn.doc_keys[j]).collect::<Vec<_>>(),
            "cites": self.citations.cites(idx).iter().map(|&j| &self.citations.doc_keys[j]).collect::<Vec<_>>(),
            "cited_by": self.citations.edges.iter().filter(|e| e.1 == idx).map(|e| &self.citations.doc_keys[e.0]).collect::<Vec<_>>(),
        }))
    }

    pub fn to_json(&self) -> Result<String, SessionError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, SessionError> {
        let session: ReviewSession = serde_json::from_str(text)?;
        if session.schema != SESSION_SCHEMA {
            return Err(SessionError::Schema(session.schema));
        }
        Ok(session)
    }

    pub fn save(&self, path: &Path) -> Result<(), SessionError> {
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, self.to_json()?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SessionError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn status_colors() -> Value {
    json!({
        "included": Status::IncludedPrevious.color(),
        "excluded": Status::ExcludedPrevious.color(),
        "toevaluate": Status::ToEvaluate.color(),
    })
}

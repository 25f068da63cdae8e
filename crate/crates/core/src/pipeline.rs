//! End-to-end analysis: merged corpus -> matrix -> layout -> graphs -> verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{merge, Corpus, Status};
use crate::decision::{classify_all, DecisionSet, Verdict};
use crate::evaluation::Label;
use crate::graphs::{citation_graph, knn_edges, CitationGraph, KnnGraph, DEFAULT_K};
use crate::projection::{build_bundle_tree, distance_matrix, project, BundleTree, DistanceMatrix, ProjectedMap, ProjectionConfig};
use crate::textprep::{build_matrix, Stoplist, TermDocumentMatrix};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let p = ProjectionConfig::default();
        PipelineConfig { k: DEFAULT_K, seed: p.seed, max_iterations: p.max_iterations, tolerance: p.tolerance }
    }
}

impl PipelineConfig {
    pub fn projection(&self) -> ProjectionConfig {
        ProjectionConfig { seed: self.seed, max_iterations: self.max_iterations, tolerance: self.tolerance }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub corpus: Corpus,
    pub matrix: TermDocumentMatrix,
    pub distances: DistanceMatrix,
    pub map: ProjectedMap,
    pub knn: KnnGraph,
    pub citations: CitationGraph,
    pub tree: BundleTree,
    pub decisions: DecisionSet,
}

/// Runs every stage over an already merged corpus.
pub fn analyze(corpus: Corpus, stoplist: &Stoplist, config: &PipelineConfig) -> Result<Analysis, Error> {
    let matrix = build_matrix(&corpus, stoplist)?;
    let distances = if corpus.len() == 1 {
        DistanceMatrix::from_dense(corpus.keys(), vec![0.0])?
    } else {
        distance_matrix(&matrix)?
    };
    let map = project(&distances, &config.projection());
    let knn = knn_edges(&map, config.k);
    let citations = citation_graph(&corpus);
    let tree = build_bundle_tree(&distances);
    let decisions = classify_all(&corpus, &knn, &citations)?;
    Ok(Analysis { corpus, matrix, distances, map, knn, citations, tree, decisions })
}

/// Merges a new search into a previous review and analyzes the result.
pub fn run(previous: &Corpus, new_search: &Corpus, stoplist: &Stoplist, config: &PipelineConfig) -> Result<Analysis, Error> {
    analyze(merge(previous, new_search), stoplist, config)
}

/// Applies resolved choices to studies under evaluation.
///
/// `overrides` always win; engine verdicts are applied only when
/// `apply_engine` is set. Studies left undefined stay under evaluation.
pub fn apply_verdicts(
    corpus: &Corpus,
    decisions: &DecisionSet,
    overrides: &BTreeMap<String, Label>,
    apply_engine: bool,
) -> Corpus {
    let mut out = corpus.clone();
    for study in corpus.studies().iter().filter(|s| s.status == Status::ToEvaluate) {
        let engine = decisions.get(&study.key).and_then(|d| match d.verdict {
            Verdict::Include if apply_engine => Some(Label::Include),
            Verdict::Exclude if apply_engine => Some(Label::Exclude),
            _ => None,
        });
        let chosen = overrides.get(&study.key).copied().or(engine);
        if let Some(label) = chosen {
            let status = match label {
                Label::Include => Status::IncludedPrevious,
                Label::Exclude => Status::ExcludedPrevious,
            };
            out.set_status(&study.key, status);
        }
    }
    out
}

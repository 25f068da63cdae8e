//! Inclusion / exclusion strategies for new studies.
//!
//! A study under evaluation is
//! * **included** when at least one KNN neighbor was previously included and it
//!   cites no previously excluded study;
//! * **excluded** when no neighbor was previously included, at least one was
//!   previously excluded, and it cites no previously included study;
//! * **undefined** otherwise, left to the reviewer.
//!
//! Neighborhood is adjacency in the symmetrized KNN graph; citations are the
//! study's own outgoing references.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Status};
use crate::graphs::{CitationGraph, KnnGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Include,
    Exclude,
    Undefined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Include => "include",
            Verdict::Exclude => "exclude",
            Verdict::Undefined => "undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("study `{0}` is not under evaluation")]
    NotToEvaluate(String),
    #[error("graphs cover {graphs} studies but the corpus has {corpus}")]
    SizeMismatch { graphs: usize, corpus: usize },
}

/// Keys supporting a verdict.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub included_neighbors: Vec<String>,
    pub excluded_neighbors: Vec<String>,
    pub evaluating_neighbors: Vec<String>,
    pub cited_included: Vec<String>,
    pub cited_excluded: Vec<String>,
}

impl Evidence {
    /// Neighbor of a previously included study, citing no excluded one.
    pub fn meets_inclusion(&self) -> bool {
        !self.included_neighbors.is_empty() && self.cited_excluded.is_empty()
    }

    /// Neighbors only excluded or evaluating studies (at least one excluded),
    /// citing no included one.
    pub fn meets_exclusion(&self) -> bool {
        self.included_neighbors.is_empty() && !self.excluded_neighbors.is_empty() && self.cited_included.is_empty()
    }

    pub fn verdict(&self) -> Verdict {
        match (self.meets_inclusion(), self.meets_exclusion()) {
            (true, false) => Verdict::Include,
            (false, true) => Verdict::Exclude,
            _ => Verdict::Undefined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub key: String,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub include: usize,
    pub exclude: usize,
    pub undefined: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionSet {
    pub decisions: Vec<Decision>,
    pub counts: VerdictCounts,
}

impl DecisionSet {
    pub fn from_decisions(decisions: Vec<Decision>) -> Self {
        let mut counts = VerdictCounts::default();
        for d in &decisions {
            match d.verdict {
                Verdict::Include => counts.include += 1,
                Verdict::Exclude => counts.exclude += 1,
                Verdict::Undefined => counts.undefined += 1,
            }
        }
        DecisionSet { decisions, counts }
    }

    pub fn get(&self, key: &str) -> Option<&Decision> {
        self.decisions.iter().find(|d| d.key == key)
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "srmap.decisions/v1",
            "counts": self.counts,
            "decisions": self.decisions,
        })
    }

    /// Plain-text report, one line per study.
    pub fn report(&self) -> String {
        let mut out = format!(
            "{} new studies: {} include, {} exclude, {} undefined\n",
            self.len(),
            self.counts.include,
            self.counts.exclude,
            self.counts.undefined
        );
        for d in &self.decisions {
            let e = &d.evidence;
            out.push_str(&format!(
                "{:<10} {}  neighbors +{} -{} ?{}  cites +{} -{}\n",
                d.verdict.as_str(),
                d.key,
                e.included_neighbors.len(),
                e.excluded_neighbors.len(),
                e.evaluating_neighbors.len(),
                e.cited_included.len(),
                e.cited_excluded.len(),
            ));
        }
        out
    }
}

/// Classifies the study at position `doc`.
pub fn classify_study(
    doc: usize,
    knn: &KnnGraph,
    cites: &CitationGraph,
    statuses: &[Status],
) -> Result<Decision, DecisionError> {
    let key = &knn.doc_keys[doc];
    if statuses[doc] != Status::ToEvaluate {
        return Err(DecisionError::NotToEvaluate(key.clone()));
    }
    let mut evidence = Evidence::default();
    for &n in knn.neighbors(doc) {
        let bucket = match statuses[n] {
            Status::IncludedPrevious => &mut evidence.included_neighbors,
            Status::ExcludedPrevious => &mut evidence.excluded_neighbors,
            Status::ToEvaluate => &mut evidence.evaluating_neighbors,
        };
        bucket.push(knn.doc_keys[n].clone());
    }
    for &c in cites.cites(doc) {
        match statuses[c] {
            Status::IncludedPrevious => evidence.cited_included.push(cites.doc_keys[c].clone()),
            Status::ExcludedPrevious => evidence.cited_excluded.push(cites.doc_keys[c].clone()),
            Status::ToEvaluate => {}
        }
    }
    Ok(Decision { key: key.clone(), verdict: evidence.verdict(), evidence })
}

/// Classifies every study under evaluation, in corpus order.
pub fn classify_all(corpus: &Corpus, knn: &KnnGraph, cites: &CitationGraph) -> Result<DecisionSet, DecisionError> {
    let n = corpus.len();
    if knn.len() != n || cites.doc_keys.len() != n {
        return Err(DecisionError::SizeMismatch { graphs: knn.len(), corpus: n });
    }
    let statuses = corpus.statuses();
    let decisions = (0..n)
        .filter(|&i| statuses[i] == Status::ToEvaluate)
        .map(|i| classify_study(i, knn, cites, &statuses))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DecisionSet::from_decisions(decisions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Study;

    use Status::*;

    /// Study 0 is the new study; `neighbors` and `cited` list statuses of the others.
    fn scenario(neighbors: &[Status], cited: &[Status]) -> Decision {
        let mut statuses = vec![ToEvaluate];
        statuses.extend_from_slice(neighbors);
        statuses.extend_from_slice(cited);
        let keys: Vec<String> = (0..statuses.len()).map(|i| format!("s{i}")).collect();
        let directed = (0..statuses.len())
            .map(|i| if i == 0 { (1..=neighbors.len()).collect() } else { vec![] })
            .collect();
        let knn = KnnGraph::from_directed(neighbors.len(), keys.clone(), directed);
        let edges = (0..cited.len()).map(|c| (0, 1 + neighbors.len() + c)).collect();
        let cites = CitationGraph::from_edges(keys, edges, vec![]);
        classify_study(0, &knn, &cites, &statuses).unwrap()
    }

    #[test]
    fn included_neighbor_no_citations() {
        assert_eq!(scenario(&[IncludedPrevious], &[]).verdict, Verdict::Include);
    }

    #[test]
    fn only_excluded_neighbors() {
        assert_eq!(scenario(&[ExcludedPrevious, ExcludedPrevious], &[]).verdict, Verdict::Exclude);
    }

    #[test]
    fn excluded_neighbor_cites_included() {
        let d = scenario(&[ExcludedPrevious], &[IncludedPrevious]);
        assert_eq!(d.verdict, Verdict::Undefined);
        assert_eq!(d.evidence.cited_included, vec!["s2"]);
    }

    #[test]
    fn included_neighbor_cites_excluded() {
        assert_eq!(scenario(&[IncludedPrevious], &[ExcludedPrevious]).verdict, Verdict::Undefined);
    }

    #[test]
    fn only_evaluating_neighbors() {
        assert_eq!(scenario(&[ToEvaluate, ToEvaluate], &[]).verdict, Verdict::Undefined);
    }

    #[test]
    fn excluded_and_evaluating_neighbors() {
        assert_eq!(scenario(&[ExcludedPrevious, ToEvaluate], &[]).verdict, Verdict::Exclude);
    }

    #[test]
    fn isolated_study() {
        assert_eq!(scenario(&[], &[]).verdict, Verdict::Undefined);
    }

    #[test]
    fn rejects_classified_study() {
        let keys = vec!["a".to_string()];
        let knn = KnnGraph::from_directed(1, keys.clone(), vec![vec![]]);
        let cites = CitationGraph::from_edges(keys, vec![], vec![]);
        assert_eq!(
            classify_study(0, &knn, &cites, &[IncludedPrevious]),
            Err(DecisionError::NotToEvaluate("a".into()))
        );
    }

    #[test]
    fn classify_all_skips_classified() {
        let corpus = Corpus::from_studies(vec![
            Study::new("i", "I", IncludedPrevious),
            Study::new("n", "N", ToEvaluate),
        ])
        .unwrap();
        let knn = KnnGraph::from_directed(1, corpus.keys(), vec![vec![1], vec![0]]);
        let cites = CitationGraph::from_edges(corpus.keys(), vec![], vec![]);
        let set = classify_all(&corpus, &knn, &cites).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.decisions[0].verdict, Verdict::Include);
        assert_eq!(set.counts, VerdictCounts { include: 1, exclude: 0, undefined: 0 });
        assert!(set.report().contains("include"));
    }
}

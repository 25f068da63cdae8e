//! KNN neighborhood graph over the layout and the citation graph over the corpus.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::projection::ProjectedMap;

/// Default neighbor count.
pub const DEFAULT_K: usize = 5;

/// Nearest-neighbor edges computed on the 2D layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnGraph {
    pub k: usize,
    pub doc_keys: Vec<String>,
    /// Per document, its `min(k, n - 1)` nearest documents, closest first;
    /// equal distances are ordered by study key.
    pub directed_out: Vec<Vec<usize>>,
    /// Symmetrized edges as `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Adjacency in the symmetrized graph, sorted.
    adjacency: Vec<Vec<usize>>,
}

impl KnnGraph {
    pub fn len(&self) -> usize {
        self.doc_keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_keys.is_empty()
    }

    /// Neighbors of `doc` in the symmetrized graph.
    pub fn neighbors(&self, doc: usize) -> &[usize] {
        &self.adjacency[doc]
    }

    pub fn key_edges(&self) -> Vec<(&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.doc_keys[a].as_str(), self.doc_keys[b].as_str()))
            .collect()
    }

    /// Builds the symmetrized graph from per-document out-lists.
    pub fn from_directed(k: usize, doc_keys: Vec<String>, directed_out: Vec<Vec<usize>>) -> Self {
        let n = doc_keys.len();
        let mut set = BTreeSet::new();
        for (i, outs) in directed_out.iter().enumerate() {
            for &j in outs {
                if i != j {
                    set.insert((i.min(j), i.max(j)));
                }
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        adjacency.iter_mut().for_each(|a| a.sort_unstable());
        KnnGraph { k, doc_keys, directed_out, edges, adjacency }
    }
}

pub fn knn_edges(map: &ProjectedMap, k: usize) -> KnnGraph {
    let n = map.len();
    let keep = k.min(n.saturating_sub(1));
    let directed_out = (0..n)
        .map(|i| {
            let mut others: Vec<(f64, usize)> =
                (0..n).filter(|&j| j != i).map(|j| (map.layout_distance(i, j), j)).collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| map.doc_keys[a.1].cmp(&map.doc_keys[b.1])));
            others.into_iter().take(keep).map(|(_, j)| j).collect()
        })
        .collect();
    KnnGraph::from_directed(k, map.doc_keys.clone(), directed_out)
}

/// Directed citations between corpus members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationGraph {
    pub doc_keys: Vec<String>,
    /// `(citing, cited)` in corpus and reference order.
    pub edges: Vec<(usize, usize)>,
    /// `(citing, key)` for references to studies outside the corpus.
    pub unresolved: Vec<(usize, String)>,
    /// Per document, the documents it cites.
    cites: Vec<Vec<usize>>,
}

impl CitationGraph {
    pub fn cites(&self, doc: usize) -> &[usize] {
        &self.cites[doc]
    }

    /// Number of corpus studies citing `doc`.
    pub fn cited_by_count(&self, doc: usize) -> usize {
        self.edges.iter().filter(|&&(_, b)| b == doc).count()
    }

    pub fn from_edges(doc_keys: Vec<String>, edges: Vec<(usize, usize)>, unresolved: Vec<(usize, String)>) -> Self {
        let mut cites = vec![Vec::new(); doc_keys.len()];
        for &(a, b) in &edges {
            cites[a].push(b);
        }
        CitationGraph { doc_keys, edges, unresolved, cites }
    }
}

pub fn citation_graph(corpus: &Corpus) -> CitationGraph {
    let index = corpus.key_index();
    let mut edges = Vec::new();
    let mut unresolved = Vec::new();
    for (i, study) in corpus.studies().iter().enumerate() {
        let mut seen = BTreeSet::new();
        for r in &study.references {
            match index.get(r.as_str()) {
                Some(&j) if j == i => {}
                Some(&j) => {
                    if seen.insert(j) {
                        edges.push((i, j));
                    }
                }
                None => unresolved.push((i, r.clone())),
            }
        }
    }
    CitationGraph::from_edges(corpus.keys(), edges, unresolved)
}

/// JSON edge lists keyed by study key.
pub fn graphs_json(knn: &KnnGraph, cites: &CitationGraph) -> serde_json::Value {
    serde_json::json!({
        "schema": "srmap.graphs/v1",
        "knn": {
            "k": knn.k,
            "edges": knn.key_edges(),
            "directed_out": knn.directed_out.iter().enumerate().map(|(i, outs)| {
                (knn.doc_keys[i].clone(), serde_json::json!(outs.iter().map(|&j| knn.doc_keys[j].clone()).collect::<Vec<_>>()))
            }).collect::<serde_json::Map<_, _>>(),
        },
        "citations": {
            "edges": cites.edges.iter().map(|&(a, b)| serde_json::json!({
                "source": cites.doc_keys[a], "target": cites.doc_keys[b],
            })).collect::<Vec<_>>(),
            "unresolved": cites.unresolved.iter().map(|(a, k)| serde_json::json!({
                "source": cites.doc_keys[*a], "key": k,
            })).collect::<Vec<_>>(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Status, Study};

    fn map(points: &[[f64; 2]]) -> ProjectedMap {
        ProjectedMap {
            positions: points.to_vec(),
            doc_keys: (0..points.len()).map(|i| format!("p{i}")).collect(),
            final_stress: 0.0,
            iterations_run: 0,
            seed: 0,
        }
    }

    #[test]
    fn k_zero_is_empty() {
        let g = knn_edges(&map(&[[0.0, 0.0], [1.0, 0.0]]), 0);
        assert!(g.edges.is_empty());
        assert!(g.directed_out.iter().all(Vec::is_empty));
    }

    #[test]
    fn two_points() {
        let g = knn_edges(&map(&[[0.0, 0.0], [1.0, 0.0]]), 1);
        assert_eq!(g.edges, vec![(0, 1)]);
    }

    #[test]
    fn collinear_points() {
        let g = knn_edges(&map(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]), 1);
        assert_eq!(g.directed_out, vec![vec![1], vec![0], vec![1]]);
        assert_eq!(g.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn ties_broken_by_key() {
        let mut m = map(&[[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]]);
        m.doc_keys = vec!["m".into(), "z".into(), "a".into()];
        let g = knn_edges(&m, 1);
        assert_eq!(g.directed_out[0], vec![2]);
    }

    #[test]
    fn k_larger_than_corpus() {
        let g = knn_edges(&map(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]), 10);
        assert!(g.directed_out.iter().all(|o| o.len() == 2));
        assert_eq!(g.edges.len(), 3);
    }

    fn corpus(studies: Vec<Study>) -> Corpus {
        Corpus::from_studies(studies).unwrap()
    }

    #[test]
    fn citation_examples() {
        let c = corpus(vec![
            Study::new("a", "A", Status::ToEvaluate).with_references(["b", "zzz"]),
            Study::new("b", "B", Status::IncludedPrevious),
        ]);
        let g = citation_graph(&c);
        assert_eq!(g.edges, vec![(0, 1)]);
        assert_eq!(g.unresolved, vec![(0, "zzz".to_string())]);
        assert_eq!(g.cites(0), &[1]);
        assert_eq!(g.cited_by_count(1), 1);

        let none = citation_graph(&corpus(vec![Study::new("a", "A", Status::ToEvaluate)]));
        assert!(none.edges.is_empty());
    }

    #[test]
    fn self_reference_ignored() {
        let c = corpus(vec![Study::new("a", "A", Status::ToEvaluate).with_references(["a"])]);
        assert!(citation_graph(&c).edges.is_empty());
    }

    #[test]
    fn json_uses_keys() {
        let c = corpus(vec![
            Study::new("a", "A", Status::ToEvaluate).with_references(["b"]),
            Study::new("b", "B", Status::IncludedPrevious),
        ]);
        let mut m = map(&[[0.0, 0.0], [1.0, 0.0]]);
        m.doc_keys = c.keys();
        let v = graphs_json(&knn_edges(&m, 1), &citation_graph(&c));
        assert_eq!(v["knn"]["edges"][0][0], "a");
        assert_eq!(v["citations"]["edges"][0]["target"], "b");
    }
}

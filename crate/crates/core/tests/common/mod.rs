//! Test-only oracles and fixtures, written independently of the library's
//! algorithms.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srmap_core::corpus::{Corpus, Status, Study};
use srmap_core::decision::Verdict;
use srmap_core::evaluation::{Confusion, SubjectResult};
use srmap_core::graphs::{citation_graph, knn_edges, CitationGraph, KnnGraph};
use srmap_core::projection::ProjectedMap;

/// One printed row of the experiment's results table.
pub struct TableRow {
    pub group: u8,
    pub subject: u8,
    pub time: f64,
    pub correctly_included: usize,
    pub correctly_excluded: usize,
    pub printed_correct: usize,
    pub printed_percent: f64,
    pub incorrectly_included: usize,
    pub incorrectly_excluded: usize,
    pub printed_incorrect: usize,
}

#[rustfmt::skip]
pub const TABLE1: [TableRow; 12] = [
    TableRow { group: 1, subject: 1, time: 53.0, correctly_included: 5, correctly_excluded: 4, printed_correct: 9, printed_percent: 69.2, incorrectly_included: 3, incorrectly_excluded: 1, printed_incorrect: 4 },
    TableRow { group: 1, subject: 2, time: 55.0, correctly_included: 5, correctly_excluded: 7, printed_correct: 12, printed_percent: 92.3, incorrectly_included: 0, incorrectly_excluded: 1, printed_incorrect: 1 },
    TableRow { group: 1, subject: 3, time: 20.0, correctly_included: 4, correctly_excluded: 6, printed_correct: 10, printed_percent: 76.9, incorrectly_included: 1, incorrectly_excluded: 2, printed_incorrect: 3 },
    TableRow { group: 1, subject: 4, time: 22.0, correctly_included: 3, correctly_excluded: 7, printed_correct: 10, printed_percent: 76.9, incorrectly_included: 0, incorrectly_excluded: 3, printed_incorrect: 3 },
    TableRow { group: 1, subject: 5, time: 14.0, correctly_included: 2, correctly_excluded: 7, printed_correct: 9, printed_percent: 69.2, incorrectly_included: 0, incorrectly_excluded: 4, printed_incorrect: 4 },
    TableRow { group: 1, subject: 6, time: 26.0, correctly_included: 1, correctly_excluded: 6, printed_correct: 7, printed_percent: 53.8, incorrectly_included: 1, incorrectly_excluded: 5, printed_incorrect: 6 },
    TableRow { group: 2, subject: 1, time: 23.0, correctly_included: 5, correctly_excluded: 7, printed_correct: 12, printed_percent: 92.3, incorrectly_included: 0, incorrectly_excluded: 1, printed_incorrect: 1 },
    TableRow { group: 2, subject: 2, time: 13.0, correctly_included: 6, correctly_excluded: 7, printed_correct: 13, printed_percent: 100.0, incorrectly_included: 0, incorrectly_excluded: 0, printed_incorrect: 0 },
    TableRow { group: 2, subject: 3, time: 19.0, correctly_included: 5, correctly_excluded: 7, printed_correct: 12, printed_percent: 92.3, incorrectly_included: 0, incorrectly_excluded: 1, printed_incorrect: 1 },
    TableRow { group: 2, subject: 4, time: 25.0, correctly_included: 5, correctly_excluded: 5, printed_correct: 10, printed_percent: 76.9, incorrectly_included: 2, incorrectly_excluded: 1, printed_incorrect: 3 },
    TableRow { group: 2, subject: 5, time: 13.0, correctly_included: 6, correctly_excluded: 7, printed_correct: 13, printed_percent: 100.0, incorrectly_included: 0, incorrectly_excluded: 0, printed_incorrect: 0 },
    TableRow { group: 2, subject: 6, time: 14.0, correctly_included: 5, correctly_excluded: 7, printed_correct: 12, printed_percent: 92.3, incorrectly_included: 0, incorrectly_excluded: 1, printed_incorrect: 1 },
];

pub fn subject_results(group: u8) -> Vec<SubjectResult> {
    TABLE1
        .iter()
        .filter(|r| r.group == group)
        .map(|r| {
            SubjectResult::new(
                r.subject.to_string(),
                r.time,
                Confusion::new(r.correctly_included, r.correctly_excluded, r.incorrectly_included, r.incorrectly_excluded),
            )
        })
        .collect()
}

/// Minimum Kruskal stress-1 of a point configuration in 2D, by plain gradient
/// descent on the raw stress from many random starts.
pub fn brute_force_min_stress(d: &[Vec<f64>], restarts: usize, seed: u64) -> f64 {
    let n = d.len();
    let denom: f64 = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| d[i][j] * d[i][j]).sum();
    let raw = |x: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let dist = ((x[2 * i] - x[2 * j]).powi(2) + (x[2 * i + 1] - x[2 * j + 1]).powi(2)).sqrt();
                s += (dist - d[i][j]).powi(2);
            }
        }
        s
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let mut x: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut lr = 0.05;
        let mut cur = raw(&x);
        for _ in 0..20_000 {
            let mut g = vec![0.0; 2 * n];
            for i in 0..n {
                for j in i + 1..n {
                    let dx = x[2 * i] - x[2 * j];
                    let dy = x[2 * i + 1] - x[2 * j + 1];
                    let dist = (dx * dx + dy * dy).sqrt().max(1e-12);
                    let c = 2.0 * (dist - d[i][j]) / dist;
                    g[2 * i] += c * dx;
                    g[2 * i + 1] += c * dy;
                    g[2 * j] -= c * dx;
                    g[2 * j + 1] -= c * dy;
                }
            }
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - lr * b).collect();
            let t = raw(&trial);
            if t <= cur {
                x = trial;
                cur = t;
                lr *= 1.1;
            } else {
                lr *= 0.5;
                if lr < 1e-15 {
                    break;
                }
            }
        }
        best = best.min(cur);
    }
    (best / denom).sqrt()
}

/// Center-leaf distance 1, leaf-leaf distance 2, three leaves.
pub fn star_metric() -> Vec<Vec<f64>> {
    let mut d = vec![vec![2.0; 4]; 4];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for i in 1..4 {
        d[0][i] = 1.0;
        d[i][0] = 1.0;
    }
    d
}

/// Random statuses, random layout, random references; graphs built by the library.
pub struct DecisionWorld {
    pub corpus: Corpus,
    pub knn: KnnGraph,
    pub cites: CitationGraph,
}

pub fn random_decision_world(rng: &mut ChaCha8Rng) -> DecisionWorld {
    let n = rng.random_range(2..=50usize);
    let keys: Vec<String> = (0..n).map(|i| format!("k{i:02}")).collect();
    let studies: Vec<Study> = (0..n)
        .map(|i| {
            let status = *Status::ALL.choose(rng).unwrap();
            let n_refs = rng.random_range(0..=3usize);
            let mut refs: Vec<String> = Vec::new();
            for _ in 0..n_refs {
                let r = if rng.random_bool(0.15) { format!("ext{}", rng.random_range(0..5)) } else { keys.choose(rng).unwrap().clone() };
                if r != keys[i] && !refs.contains(&r) {
                    refs.push(r);
                }
            }
            Study::new(keys[i].clone(), "t", status).with_references(refs)
        })
        .collect();
    let corpus = Corpus::from_studies(studies).unwrap();
    let map = ProjectedMap {
        positions: (0..n).map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect(),
        doc_keys: keys,
        final_stress: 0.0,
        iterations_run: 0,
        seed: 0,
    };
    let knn = knn_edges(&map, rng.random_range(0..=6usize));
    let cites = citation_graph(&corpus);
    DecisionWorld { corpus, knn, cites }
}

/// Second, independent reading of the two strategies: neighbors are taken from
/// the raw undirected edge list, citations from the study's own reference keys.
pub fn rule_oracle(world: &DecisionWorld, doc: usize) -> Verdict {
    let studies = world.corpus.studies();
    let status_of = |key: &str| studies.iter().find(|s| s.key == key).map(|s| s.status);
    let neighbor_statuses: Vec<Status> = world
        .knn
        .edges
        .iter()
        .filter_map(|&(a, b)| match (a == doc, b == doc) {
            (true, _) => Some(b),
            (_, true) => Some(a),
            _ => None,
        })
        .map(|j| studies[j].status)
        .collect();
    let cited_statuses: Vec<Status> = studies[doc].references.iter().filter_map(|k| status_of(k)).collect();

    let near_included = neighbor_statuses.contains(&Status::IncludedPrevious);
    let near_excluded = neighbor_statuses.contains(&Status::ExcludedPrevious);
    let cites_included = cited_statuses.contains(&Status::IncludedPrevious);
    let cites_excluded = cited_statuses.contains(&Status::ExcludedPrevious);

    if near_included && !cites_excluded {
        Verdict::Include
    } else if !near_included && near_excluded && !cites_included {
        Verdict::Exclude
    } else {
        Verdict::Undefined
    }
}

const TOPIC_A: &[&str] = &["aspect", "pointcut", "weaving", "advice", "crosscutting", "mutation", "coverage", "fault"];
const TOPIC_B: &[&str] = &["requirement", "stakeholder", "agile", "scrum", "estimation", "effort", "budget", "risk"];
const MIXED: &[&str] = &[
    "aspect", "pointcut", "weaving", "advice", "requirement", "stakeholder", "agile", "scrum", "cloud", "energy",
    "security", "privacy", "compiler", "parser", "database", "query", "network", "sensor", "robot", "vision",
];

/// `n` documents of random words from a 20-word vocabulary.
pub fn random_texts(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    (0..n)
        .map(|_| {
            let len = rng.random_range(3..12usize);
            (0..len).map(|_| *MIXED.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

/// Two groups of documents with disjoint vocabularies; returns texts and group ids.
pub fn two_group_texts(rng: &mut ChaCha8Rng, per_group: usize) -> (Vec<String>, Vec<usize>) {
    let mut texts = Vec::new();
    let mut groups = Vec::new();
    for (g, vocab) in [TOPIC_A, TOPIC_B].iter().enumerate() {
        for _ in 0..per_group {
            let len = rng.random_range(4..10usize);
            texts.push((0..len).map(|_| *vocab.choose(rng).unwrap()).collect::<Vec<_>>().join(" "));
            groups.push(g);
        }
    }
    (texts, groups)
}

pub fn keys(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("d{i:03}")).collect()
}

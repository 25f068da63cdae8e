//! Seeded synthetic review corpora for demos and tests.
//!
//! Included studies draw their text mostly from one topic vocabulary and
//! excluded studies from another; new studies belong to either topic, and the
//! topic is their oracle label.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Status, Study};
use crate::evaluation::{Label, Labels};

const IN_TOPIC: &[&str] = &[
    "aspect", "oriented", "pointcut", "advice", "weaving", "crosscutting", "concern", "join", "point",
    "mutation", "testing", "coverage", "criteria", "fault", "model", "structural", "integration",
    "regression", "unit", "oracle", "aspectj", "interaction", "mutant", "operator", "state", "based",
    "data", "flow", "control", "graph",
];

const OUT_TOPIC: &[&str] = &[
    "requirements", "elicitation", "stakeholder", "agile", "scrum", "process", "maturity", "cost",
    "estimation", "effort", "survey", "industrial", "organization", "management", "risk", "team",
    "communication", "productivity", "metrics", "governance", "outsourcing", "global", "distributed",
    "planning", "release", "velocity", "practitioner", "interview", "budget", "contract",
];

const SHARED: &[&str] = &[
    "software", "approach", "study", "evaluation", "results", "empirical", "technique", "tool",
    "analysis", "proposed", "case", "framework", "systems", "engineering", "method", "experiment",
];

/// Status counts of a generated corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetShape {
    pub included: usize,
    pub excluded: usize,
    pub to_evaluate: usize,
}

impl DatasetShape {
    /// 63 included, 34 excluded, 13 new.
    pub const DATASET2: DatasetShape = DatasetShape { included: 63, excluded: 34, to_evaluate: 13 };
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub previous: Corpus,
    pub new_search: Corpus,
    /// Topic of each new study.
    pub oracle: Labels,
}

fn sentence(rng: &mut ChaCha8Rng, own: &[&str], other: &[&str], words: usize) -> String {
    (0..words)
        .map(|_| {
            let roll: f64 = rng.random();
            let pool = if roll < 0.7 {
                own
            } else if roll < 0.95 {
                SHARED
            } else {
                other
            };
            *pool.choose(rng).expect("non-empty vocabulary")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn study(rng: &mut ChaCha8Rng, key: String, status: Status, on_topic: bool) -> Study {
    let (own, other) = if on_topic { (IN_TOPIC, OUT_TOPIC) } else { (OUT_TOPIC, IN_TOPIC) };
    let mut title = sentence(rng, own, other, 6);
    if let Some(first) = title.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    let mut kws: Vec<&str> = own.choose_multiple(rng, 3).copied().collect();
    kws.sort_unstable();
    Study::new(key, title, status)
        .with_abstract(sentence(rng, own, other, 40) + ".")
        .with_keywords(kws)
}

/// Generates previous and new-search corpora of the given shape.
///
/// Every study cites up to three same-topic previous studies; a few new
/// studies also cite across topics, which produces undefined verdicts.
pub fn generate(seed: u64, shape: DatasetShape) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inc_keys = Vec::new();
    let mut exc_keys = Vec::new();
    let mut previous = Vec::new();
    for i in 0..shape.included {
        let key = format!("inc{:03}", i + 1);
        previous.push(study(&mut rng, key.clone(), Status::IncludedPrevious, true));
        inc_keys.push(key);
    }
    for i in 0..shape.excluded {
        let key = format!("exc{:03}", i + 1);
        previous.push(study(&mut rng, key.clone(), Status::ExcludedPrevious, false));
        exc_keys.push(key);
    }
    for s in previous.iter_mut() {
        let pool = if s.status == Status::IncludedPrevious { &inc_keys } else { &exc_keys };
        let n = rng.random_range(0..=3usize);
        let refs: Vec<String> = pool.choose_multiple(&mut rng, n).filter(|k| **k != s.key).cloned().collect();
        s.references = refs;
    }

    // Roughly 6 of 13 new studies are on topic.
    let n_inc = (shape.to_evaluate * 6 + 6) / 13;
    let mut topics: Vec<bool> = (0..shape.to_evaluate).map(|i| i < n_inc).collect();
    topics.shuffle(&mut rng);
    let mut new_studies = Vec::new();
    let mut oracle = Labels::new();
    for (i, &on_topic) in topics.iter().enumerate() {
        let key = format!("new{:03}", i + 1);
        let mut s = study(&mut rng, key.clone(), Status::ToEvaluate, on_topic);
        let (own, other) = if on_topic { (&inc_keys, &exc_keys) } else { (&exc_keys, &inc_keys) };
        let n_refs = rng.random_range(0..=2usize);
        let mut refs: Vec<String> = own.choose_multiple(&mut rng, n_refs).cloned().collect();
        if rng.random_bool(0.2) {
            refs.extend(other.choose(&mut rng).cloned());
        }
        s.references = refs;
        new_studies.push(s);
        oracle.insert(key, if on_topic { Label::Include } else { Label::Exclude });
    }

    SyntheticDataset {
        previous: Corpus::from_studies(previous).expect("generated keys are unique"),
        new_search: Corpus::from_studies(new_studies).expect("generated keys are unique"),
        oracle,
    }
}

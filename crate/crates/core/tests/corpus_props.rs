use proptest::prelude::*;

use srmap_core::corpus::{merge, parse_bibtex, serialize_bibtex, Corpus, Status, Study};
use srmap_core::textprep::{build_matrix_from_texts, stem, Stoplist};

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,9}"
}

fn words(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..max).prop_map(|w| w.join(" "))
}

fn status() -> impl Strategy<Value = Status> {
    prop::sample::select(Status::ALL.to_vec())
}

prop_compose! {
    fn study_parts()(
        title in words(8),
        abstract_text in prop::option::of(words(30)),
        keywords in prop::collection::vec(word(), 0..4),
        refs in prop::collection::btree_set(0usize..12, 0..4),
        status in status(),
        doi in prop::option::of("10\\.[0-9]{4}/[a-z0-9.]{1,10}"),
    ) -> (String, String, Vec<String>, Vec<usize>, Status, Option<String>) {
        (title, abstract_text.unwrap_or_default(), keywords, refs.into_iter().collect(), status, doi)
    }
}

fn corpus() -> impl Strategy<Value = Corpus> {
    prop::collection::vec(study_parts(), 1..10).prop_map(|parts| {
        let keys: Vec<String> = (0..parts.len()).map(|i| format!("study{i:02}")).collect();
        let studies = parts
            .into_iter()
            .enumerate()
            .map(|(i, (title, abs, kws, refs, status, doi))| {
                let refs: Vec<String> =
                    refs.into_iter().filter(|&r| r != i).map(|r| keys.get(r).cloned().unwrap_or(format!("ext{r}"))).collect();
                let mut s = Study::new(keys[i].clone(), title, status).with_abstract(abs).with_keywords(kws).with_references(refs);
                s.doi = doi;
                s
            })
            .collect();
        Corpus::from_studies(studies).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bibtex_round_trip(c in corpus()) {
        let parsed = parse_bibtex(&serialize_bibtex(&c)).unwrap();
        prop_assert_eq!(parsed.studies(), c.studies());
    }

    #[test]
    fn merge_with_itself_is_identity(c in corpus()) {
        let merged = merge(&c, &c);
        prop_assert_eq!(merged.studies(), c.studies());
    }

    #[test]
    fn merge_is_idempotent_and_deterministic(p in corpus(), n in corpus()) {
        let once = merge(&p, &n);
        let again = merge(&p, &n);
        let twice = merge(&once, &n);
        prop_assert_eq!(once.studies(), again.studies());
        prop_assert_eq!(twice.studies(), once.studies());
        let mut keys = once.keys();
        keys.sort();
        keys.dedup();
        prop_assert_eq!(keys.len(), once.len());
    }

    #[test]
    fn odd_references_never_drop_entries(n in 1usize..8, self_refs in prop::collection::vec(any::<bool>(), 8)) {
        let text: String = (0..n)
            .map(|i| {
                let mut refs = vec![format!("missing{i}")];
                if self_refs[i] {
                    refs.push(format!("e{i}"));
                }
                format!("@article{{e{i},\n  title = {{T {i}}},\n  references = {{{}}},\n  status = {{included}}\n}}\n", refs.join("; "))
            })
            .collect();
        let c = parse_bibtex(&text).unwrap();
        prop_assert_eq!(c.len(), n);
    }

    #[test]
    fn idf_decreases_with_document_frequency(n in 3usize..12) {
        let weight_at = |df: usize| {
            let texts: Vec<String> = (0..n).map(|i| if i < df { "zebra filler".to_string() } else { "filler".to_string() }).collect();
            let keys: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
            let m = build_matrix_from_texts(&keys, &texts, &Stoplist::english()).unwrap();
            m.weight(0, m.term_index("zebra").unwrap())
        };
        let weights: Vec<f64> = (1..n).map(weight_at).collect();
        for w in weights.windows(2) {
            prop_assert!(w[1] < w[0], "{:?}", weights);
        }
        prop_assert!(weights.iter().all(|&w| w > 0.0));
        prop_assert_eq!(weight_at(n), 0.0);
    }

    #[test]
    fn matrix_is_deterministic(texts in prop::collection::vec(words(15), 1..8)) {
        let keys: Vec<String> = (0..texts.len()).map(|i| format!("d{i}")).collect();
        let a = build_matrix_from_texts(&keys, &texts, &Stoplist::english()).unwrap();
        let b = build_matrix_from_texts(&keys, &texts, &Stoplist::english()).unwrap();
        prop_assert_eq!(&a.terms, &b.terms);
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            prop_assert_eq!(ra.len(), rb.len());
            for (x, y) in ra.iter().zip(rb) {
                prop_assert_eq!(x.0, y.0);
                prop_assert_eq!(x.1.to_bits(), y.1.to_bits());
            }
        }
        for (t, &df) in a.doc_freq.iter().enumerate() {
            if df == a.n_docs() {
                prop_assert!((0..a.n_docs()).all(|d| a.weight(d, t) == 0.0));
            }
        }
    }

    #[test]
    fn stopwords_never_reach_vocabulary(
        stops in prop::collection::vec(prop::sample::select(vec!["the", "and", "of", "which", "being", "having", "does", "their", "because", "during"]), 0..10),
        content in prop::collection::vec(prop::sample::select(vec!["weaving", "aspects", "testing", "mutation", "coverage"]), 0..6),
    ) {
        let mut tokens: Vec<&str> = stops.clone();
        tokens.extend(content.iter().copied());
        let text = tokens.join(" ");
        let m = build_matrix_from_texts(&["d".to_string()], &[text], &Stoplist::english()).unwrap();
        let mut want: Vec<String> = content.iter().map(|w| stem(w)).collect();
        want.sort();
        want.dedup();
        prop_assert_eq!(m.terms.clone(), want);
    }
}

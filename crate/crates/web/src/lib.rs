//! WebAssembly entry points for the static demo page in `www/`.
//!
//! Every export takes and returns plain strings (JSON or BibTeX) so the page
//! needs no generated bindings beyond `wasm-bindgen`'s own glue.

pub mod geometry;

use std::cell::RefCell;

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use srmap_core::corpus::{parse_bibtex_with, serialize_bibtex, Corpus, ParseOptions, Status};
use srmap_core::pipeline::{run, PipelineConfig};
use srmap_core::session::ReviewSession;
use srmap_core::synthetic::{generate, DatasetShape};
use srmap_core::textprep::{stem, tokenize, Stoplist};

use geometry::{bundle_path, radial_layout};

thread_local! {
    static LAST: RefCell<Option<ReviewSession>> = const { RefCell::new(None) };
}

fn error(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

/// Synthetic review as `{previous, new, oracle}` with BibTeX text.
#[wasm_bindgen]
pub fn sample_review(seed: u32, included: u32, excluded: u32, new: u32) -> String {
    let shape = DatasetShape { included: included as usize, excluded: excluded as usize, to_evaluate: new as usize };
    let d = generate(seed as u64, shape);
    json!({
        "previous": serialize_bibtex(&d.previous),
        "new": serialize_bibtex(&d.new_search),
        "oracle": d.oracle,
    })
    .to_string()
}

/// Runs the pipeline and returns the map, bundle and decision payloads plus
/// bundle geometry for `beta`; `{error}` on bad input.
#[wasm_bindgen]
pub fn analyze(previous_bib: &str, new_bib: &str, k: u32, seed: u32, beta: f64) -> String {
    let previous = match parse_bibtex_with(previous_bib, &ParseOptions::default()) {
        Ok(c) => c,
        Err(e) => return error(format!("previous review: {e}")),
    };
    let new_search = match parse_bibtex_with(new_bib, &ParseOptions { default_status: Some(Status::ToEvaluate) }) {
        Ok(c) => c,
        Err(e) => return error(format!("new search: {e}")),
    };
    let config = PipelineConfig { k: k as usize, seed: seed as u64, ..PipelineConfig::default() };
    let analysis = match run(&previous, &new_search, &Stoplist::english(), &config) {
        Ok(a) => a,
        Err(e) => return error(e),
    };
    let session = ReviewSession::from_analysis("demo", config, analysis);
    let out = analysis_value(&previous, &new_search, &session, beta);
    LAST.with(|last| *last.borrow_mut() = Some(session));
    out.to_string()
}

fn analysis_value(previous: &Corpus, new_search: &Corpus, session: &ReviewSession, beta: f64) -> Value {
    let warnings: Vec<String> = previous
        .warnings()
        .iter()
        .chain(new_search.warnings())
        .chain(session.corpus.warnings())
        .map(|w| w.to_string())
        .collect();
    json!({
        "map": session.map_payload(),
        "bundles": session.bundles_payload(),
        "geometry": geometry_value(session, beta),
        "decisions": session.decisions.to_json(),
        "warnings": warnings,
    })
}

fn geometry_value(session: &ReviewSession, beta: f64) -> Value {
    let tree = &session.tree;
    let layout = radial_layout(tree);
    let keys = &tree.doc_keys;
    json!({
        "beta": beta,
        "leaves": (0..tree.n_leaves()).map(|i| json!({
            "key": keys[i],
            "x": layout.points[i][0],
            "y": layout.points[i][1],
            "angle": layout.leaf_angle[i],
        })).collect::<Vec<_>>(),
        "paths": session.citations.edges.iter().map(|&(a, b)| json!({
            "source": keys[a],
            "target": keys[b],
            "points": bundle_path(tree, &layout, a, b, beta),
        })).collect::<Vec<_>>(),
    })
}

/// Re-routes the last analysis' citation paths for a new `beta`.
#[wasm_bindgen]
pub fn rebundle(beta: f64) -> String {
    LAST.with(|last| match last.borrow().as_ref() {
        Some(session) => geometry_value(session, beta).to_string(),
        None => error("nothing analysed yet"),
    })
}

/// How a piece of text turns into terms: each token, whether it is a stop
/// word, and its stem.
#[wasm_bindgen]
pub fn explain_terms(text: &str) -> String {
    let stoplist = Stoplist::english();
    let tokens: Vec<Value> = tokenize(text)
        .into_iter()
        .map(|t| {
            let stop = stoplist.contains(&t);
            let stemmed = if stop { Value::Null } else { Value::String(stem(&t)) };
            json!({ "token": t, "stop": stop, "stem": stemmed })
        })
        .collect();
    json!({ "tokens": tokens }).to_string()
}

//! Visual text mining engine for updating systematic reviews.
//!
//! Previously included and excluded studies are merged with the studies found
//! by a new search, vectorized (tf-idf over title, abstract and keywords),
//! laid out on a 2D content-map, and linked by KNN and citation graphs. Each
//! new study is then classified as include, exclude or undefined from its
//! neighborhood and its citations; undefined studies go to the reviewer.

pub mod corpus;
pub mod decision;
pub mod evaluation;
pub mod graphs;
pub mod pipeline;
pub mod projection;
pub mod session;
pub mod synthetic;
pub mod textprep;

use thiserror::Error;

pub use corpus::{Corpus, Status, Study};
pub use decision::{DecisionSet, Verdict};
pub use evaluation::Label;
pub use pipeline::{analyze, run, Analysis, PipelineConfig};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] corpus::ParseError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Textprep(#[from] textprep::TextprepError),
    #[error(transparent)]
    Projection(#[from] projection::ProjectionError),
    #[error(transparent)]
    Decision(#[from] decision::DecisionError),
    #[error(transparent)]
    Evaluation(#[from] evaluation::EvaluationError),
    #[error(transparent)]
    Session(#[from] session::SessionError),
}

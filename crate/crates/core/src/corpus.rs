//! BibTeX ingestion, merging and export of study collections.
//!
//! Every entry carries a review `status` field (`included`, `excluded` or
//! `toevaluate`) and an optional `references` field holding the citation keys
//! it cites, separated by semicolons:
//!
//! ```text
//! @article{ferrari2008,
//!   title = {Mutation testing for aspect-oriented programs},
//!   abstract = {...},
//!   keywords = {aspect-oriented programming, mutation testing},
//!   references = {lemos2007; zhao2003},
//!   status = {included},
//! }
//! ```
//!
//! Fields other than the recognized ones are kept verbatim and written back on
//! export.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Review status of a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "included")]
    IncludedPrevious,
    #[serde(rename = "excluded")]
    ExcludedPrevious,
    #[serde(rename = "toevaluate")]
    ToEvaluate,
}

impl Status {
    pub const ALL: [Status; 3] = [Status::IncludedPrevious, Status::ExcludedPrevious, Status::ToEvaluate];

    /// Token written to the `status` field.
    pub fn as_token(self) -> &'static str {
        match self {
            Status::IncludedPrevious => "included",
            Status::ExcludedPrevious => "excluded",
            Status::ToEvaluate => "toevaluate",
        }
    }

    /// Display color used by the views.
    pub fn color(self) -> &'static str {
        match self {
            Status::IncludedPrevious => "green",
            Status::ExcludedPrevious => "red",
            Status::ToEvaluate => "grey",
        }
    }

    /// Case-insensitive; spaces, dashes and underscores are ignored.
    pub fn from_token(token: &str) -> Option<Status> {
        let folded: String = token
            .chars()
            .filter(|c| !matches!(c, ' ' | '_' | '-'))
            .flat_map(char::to_lowercase)
            .collect();
        match folded.as_str() {
            "included" => Some(Status::IncludedPrevious),
            "excluded" => Some(Status::ExcludedPrevious),
            "toevaluate" | "tobeevaluated" => Some(Status::ToEvaluate),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_token())
    }
}

/// One primary study.
///
/// Text fields hold whitespace-normalized content (single spaces, trimmed);
/// `extra` holds unrecognized fields as `(lowercase name, raw value)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Study {
    pub key: String,
    pub entry_type: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub keywords: Vec<String>,
    pub references: Vec<String>,
    pub status: Status,
    pub doi: Option<String>,
    #[serde(default)]
    pub extra: Vec<(String, String)>,
}

impl Study {
    pub fn new(key: impl Into<String>, title: impl Into<String>, status: Status) -> Self {
        Study {
            key: key.into(),
            entry_type: "article".to_string(),
            title: title.into(),
            abstract_text: String::new(),
            keywords: Vec::new(),
            references: Vec::new(),
            status,
            doi: None,
            extra: Vec::new(),
        }
    }

    pub fn with_abstract(mut self, text: impl Into<String>) -> Self {
        self.abstract_text = text.into();
        self
    }

    pub fn with_keywords<I, S>(mut self, keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.keywords = keywords.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_references<I, S>(mut self, refs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.references = refs.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_doi(mut self, doi: impl Into<String>) -> Self {
        self.doi = Some(doi.into());
        self
    }

    /// Title + abstract + keywords, the text the vectorizer sees.
    pub fn document_text(&self) -> String {
        let mut text = String::with_capacity(self.title.len() + self.abstract_text.len() + 64);
        text.push_str(&self.title);
        text.push(' ');
        text.push_str(&self.abstract_text);
        for kw in &self.keywords {
            text.push(' ');
            text.push_str(kw);
        }
        text
    }
}

/// Non-fatal ingestion diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub line: usize,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(key) => write!(f, "line {}: {}: {}", self.line, key, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("study key must not be empty")]
    EmptyKey,
    #[error("duplicate study key `{0}`")]
    DuplicateKey(String),
}

/// Fatal BibTeX syntax error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line} (byte {offset}){}: {message}", key.as_ref().map(|k| format!(", entry `{k}`")).unwrap_or_default())]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub key: Option<String>,
    pub message: String,
}

/// Ordered, key-unique collection of studies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CorpusRepr")]
pub struct Corpus {
    studies: Vec<Study>,
    #[serde(default)]
    warnings: Vec<Warning>,
}

#[derive(Deserialize)]
struct CorpusRepr {
    studies: Vec<Study>,
    #[serde(default)]
    warnings: Vec<Warning>,
}

impl TryFrom<CorpusRepr> for Corpus {
    type Error = CorpusError;

    fn try_from(repr: CorpusRepr) -> Result<Self, Self::Error> {
        let mut corpus = Corpus::from_studies(repr.studies)?;
        corpus.warnings = repr.warnings;
        Ok(corpus)
    }
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_studies(studies: Vec<Study>) -> Result<Self, CorpusError> {
        let mut corpus = Corpus::new();
        for study in studies {
            corpus.push(study)?;
        }
        Ok(corpus)
    }

    pub fn push(&mut self, study: Study) -> Result<(), CorpusError> {
        if study.key.is_empty() {
            return Err(CorpusError::EmptyKey);
        }
        if self.contains_key(&study.key) {
            return Err(CorpusError::DuplicateKey(study.key));
        }
        self.studies.push(study);
        Ok(())
    }

    pub fn studies(&self) -> &[Study] {
        &self.studies
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.studies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.studies.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&Study> {
        self.studies.iter().find(|s| s.key == key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.studies.iter().any(|s| s.key == key)
    }

    /// Map from key to position in insertion order.
    pub fn key_index(&self) -> HashMap<&str, usize> {
        self.studies.iter().enumerate().map(|(i, s)| (s.key.as_str(), i)).collect()
    }

    pub fn statuses(&self) -> Vec<Status> {
        self.studies.iter().map(|s| s.status).collect()
    }

    pub fn keys(&self) -> Vec<String> {
        self.studies.iter().map(|s| s.key.clone()).collect()
    }

    /// Sets a study's status. Returns false when the key is unknown.
    pub fn set_status(&mut self, key: &str, status: Status) -> bool {
        match self.studies.iter_mut().find(|s| s.key == key) {
            Some(study) => {
                study.status = status;
                true
            }
            None => false,
        }
    }

    fn warn(&mut self, line: usize, key: Option<&str>, message: impl Into<String>) {
        self.warnings.push(Warning {
            line,
            key: key.map(str::to_string),
            message: message.into(),
        });
    }
}

/// Per-status study counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub included: usize,
    pub excluded: usize,
    pub to_evaluate: usize,
}

impl StatusCounts {
    pub fn total(&self) -> usize {
        self.included + self.excluded + self.to_evaluate
    }

    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.included, self.excluded, self.to_evaluate)
    }
}

pub fn corpus_stats(corpus: &Corpus) -> StatusCounts {
    let mut counts = StatusCounts::default();
    for study in corpus.studies() {
        match study.status {
            Status::IncludedPrevious => counts.included += 1,
            Status::ExcludedPrevious => counts.excluded += 1,
            Status::ToEvaluate => counts.to_evaluate += 1,
        }
    }
    counts
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Status given to entries without a `status` field. `None` rejects them.
    pub default_status: Option<Status>,
}

/// Parses a BibTeX file; entries missing a title or status are skipped with a warning.
pub fn parse_bibtex(text: &str) -> Result<Corpus, ParseError> {
    parse_bibtex_with(text, &ParseOptions::default())
}

pub fn parse_bibtex_with(text: &str, options: &ParseOptions) -> Result<Corpus, ParseError> {
    let mut parser = Parser::new(text);
    let mut corpus = Corpus::new();
    while let Some(raw) = parser.next_entry(&mut corpus)? {
        if let Some(study) = build_study(raw, options, &mut corpus) {
            corpus.studies.push(study);
        }
    }
    Ok(corpus)
}

struct RawEntry {
    line: usize,
    entry_type: String,
    key: String,
    fields: Vec<(String, String)>,
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line_starts: Vec<usize>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let line_starts = std::iter::once(0)
            .chain(src.bytes().enumerate().filter(|&(_, b)| b == b'\n').map(|(i, _)| i + 1))
            .collect();
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line_starts,
        }
    }

    fn line_of(&self, offset: usize) -> usize {
        self.line_starts.partition_point(|&start| start <= offset)
    }

    fn error(&self, offset: usize, key: Option<&str>, message: impl Into<String>) -> ParseError {
        ParseError {
            offset,
            line: self.line_of(offset),
            key: key.map(str::to_string),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b':' | b'.' | b'+' | b'/')) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn next_entry(&mut self, corpus: &mut Corpus) -> Result<Option<RawEntry>, ParseError> {
        loop {
            // Text between entries is a comment.
            match self.src[self.pos..].find('@') {
                Some(rel) => self.pos += rel,
                None => {
                    self.pos = self.bytes.len();
                    return Ok(None);
                }
            }
            let at = self.pos;
            self.pos += 1;
            self.skip_ws();
            let entry_type = self.ident().to_ascii_lowercase();
            if entry_type.is_empty() {
                return Err(self.error(at, None, "expected entry type after `@`"));
            }
            self.skip_ws();
            let close = match self.peek() {
                Some(b'{') => b'}',
                Some(b'(') => b')',
                _ => return Err(self.error(self.pos, None, format!("expected `{{` after `@{entry_type}`"))),
            };
            let body_start = self.pos;
            match entry_type.as_str() {
                "comment" | "preamble" => {
                    self.skip_balanced(body_start, None)?;
                    continue;
                }
                "string" => {
                    self.skip_balanced(body_start, None)?;
                    corpus.warn(self.line_of(at), None, "@string definitions are not expanded");
                    continue;
                }
                _ => {}
            }
            self.pos += 1;
            return self.entry_body(at, entry_type, close).map(Some);
        }
    }

    /// Skips a `{...}`/`(...)` block starting at `open`.
    fn skip_balanced(&mut self, open: usize, key: Option<&str>) -> Result<(), ParseError> {
        if self.bytes[open] == b'{' {
            self.pos = self.find_closing_brace(open + 1, key, open)? + 1;
            return Ok(());
        }
        let mut depth = 0usize;
        for (i, &b) in self.bytes.iter().enumerate().skip(open) {
            match b {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos = i + 1;
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
        Err(self.error(open, key, "unbalanced parentheses"))
    }

    fn entry_body(&mut self, at: usize, entry_type: String, close: u8) -> Result<RawEntry, ParseError> {
        self.skip_ws();
        let key_start = self.pos;
        while matches!(self.peek(), Some(b) if !b.is_ascii_whitespace() && !matches!(b, b',' | b'{' | b'}' | b'(' | b')' | b'=' | b'"' | b'#' | b'@')) {
            self.pos += 1;
        }
        let key = self.src[key_start..self.pos].to_string();
        if key.is_empty() {
            return Err(self.error(key_start, None, "missing citation key"));
        }
        let key_ref = Some(key.as_str());
        let mut fields = Vec::new();
        self.skip_ws();
        match self.peek() {
            Some(b',') => self.pos += 1,
            Some(b) if b == close => {
                self.pos += 1;
                return Ok(RawEntry { line: self.line_of(at), entry_type, key, fields });
            }
            None => return Err(self.error(at, key_ref, "unbalanced braces: entry is never closed")),
            _ => return Err(self.error(self.pos, key_ref, "expected `,` after citation key")),
        }
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Err(self.error(at, key_ref, "unbalanced braces: entry is never closed")),
                Some(b) if b == close => {
                    self.pos += 1;
                    break;
                }
                _ => {}
            }
            let name_start = self.pos;
            let name = self.ident().to_ascii_lowercase();
            if name.is_empty() {
                return Err(self.error(name_start, key_ref, "expected field name"));
            }
            self.skip_ws();
            if self.peek() != Some(b'=') {
                return Err(self.error(self.pos, key_ref, format!("expected `=` after field `{name}`")));
            }
            self.pos += 1;
            let value = self.field_value(key_ref)?;
            fields.push((name, value));
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b) if b == close => {}
                None => return Err(self.error(at, key_ref, "unbalanced braces: entry is never closed")),
                _ => return Err(self.error(self.pos, key_ref, "expected `,` between fields")),
            }
        }
        Ok(RawEntry { line: self.line_of(at), entry_type, key, fields })
    }

    /// Reads `{...}`, `"..."` or a bare token, joined with `#`.
    fn field_value(&mut self, key: Option<&str>) -> Result<String, ParseError> {
        let mut value = String::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'{') => {
                    let open = self.pos;
                    let end = self.find_closing_brace(open + 1, key, open)?;
                    value.push_str(&self.src[open + 1..end]);
                    self.pos = end + 1;
                }
                Some(b'"') => {
                    let open = self.pos;
                    let mut depth = 0usize;
                    let mut i = open + 1;
                    loop {
                        match self.bytes.get(i) {
                            None => return Err(self.error(open, key, "unterminated quoted value")),
                            Some(b'{') => depth += 1,
                            Some(b'}') => {
                                if depth == 0 {
                                    return Err(self.error(i, key, "unbalanced braces in quoted value"));
                                }
                                depth -= 1;
                            }
                            Some(b'"') if depth == 0 => break,
                            _ => {}
                        }
                        i += 1;
                    }
                    value.push_str(&self.src[open + 1..i]);
                    self.pos = i + 1;
                }
                Some(b) if b.is_ascii_alphanumeric() => {
                    value.push_str(self.ident());
                }
                _ => return Err(self.error(self.pos, key, "expected field value")),
            }
            self.skip_ws();
            if self.peek() == Some(b'#') {
                self.pos += 1;
            } else {
                return Ok(value);
            }
        }
    }

    fn find_closing_brace(&self, from: usize, key: Option<&str>, open: usize) -> Result<usize, ParseError> {
        let mut depth = 0usize;
        for (i, &b) in self.bytes.iter().enumerate().skip(from) {
            match b {
                b'{' => depth += 1,
                b'}' if depth == 0 => return Ok(i),
                b'}' => depth -= 1,
                _ => {}
            }
        }
        Err(self.error(open, key, "unbalanced braces"))
    }
}

pub(crate) fn normalize_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn build_study(raw: RawEntry, options: &ParseOptions, corpus: &mut Corpus) -> Option<Study> {
    let RawEntry { line, entry_type, key, fields } = raw;
    let k = Some(key.as_str());
    if corpus.contains_key(&key) {
        corpus.warn(line, k, "duplicate key; entry skipped");
        return None;
    }

    let mut title = None;
    let mut abstract_text = None;
    let mut keywords = None;
    let mut references = None;
    let mut status_raw = None;
    let mut doi = None;
    let mut extra: Vec<(String, String)> = Vec::new();

    for (name, value) in fields {
        let slot = match name.as_str() {
            "title" => &mut title,
            "abstract" => &mut abstract_text,
            "keywords" => &mut keywords,
            "references" => &mut references,
            "status" => &mut status_raw,
            "doi" => &mut doi,
            _ => {
                if extra.iter().any(|(n, _)| *n == name) {
                    corpus.warn(line, k, format!("repeated field `{name}` ignored"));
                } else {
                    extra.push((name, value));
                }
                continue;
            }
        };
        if slot.is_some() {
            corpus.warn(line, k, format!("repeated field `{name}` ignored"));
        } else {
            *slot = Some(value);
        }
    }

    let title = match title.map(|t| normalize_ws(&t)).filter(|t| !t.is_empty()) {
        Some(t) => t,
        None => {
            corpus.warn(line, k, "missing title; entry rejected");
            return None;
        }
    };
    let status = match status_raw {
        Some(raw) => match Status::from_token(&raw) {
            Some(s) => s,
            None => {
                corpus.warn(line, k, format!("unknown status `{}`; entry rejected", raw.trim()));
                return None;
            }
        },
        None => match options.default_status {
            Some(s) => s,
            None => {
                corpus.warn(line, k, "missing status; entry rejected");
                return None;
            }
        },
    };
    let abstract_text = match abstract_text {
        Some(a) => normalize_ws(&a),
        None => {
            corpus.warn(line, k, "missing abstract");
            String::new()
        }
    };
    let keywords = match keywords {
        Some(kw) => split_list(&kw, ','),
        None => {
            corpus.warn(line, k, "missing keywords");
            Vec::new()
        }
    };
    let mut refs = Vec::new();
    let mut seen = HashSet::new();
    for r in split_list(references.as_deref().unwrap_or(""), ';') {
        if r == key {
            corpus.warn(line, k, "self-reference dropped");
        } else if !seen.insert(r.clone()) {
            corpus.warn(line, k, format!("repeated reference `{r}` dropped"));
        } else {
            refs.push(r);
        }
    }
    let doi = doi.map(|d| normalize_ws(&d)).filter(|d| !d.is_empty());

    Some(Study {
        key,
        entry_type,
        title,
        abstract_text,
        keywords,
        references: refs,
        status,
        doi,
        extra,
    })
}

fn split_list(raw: &str, sep: char) -> Vec<String> {
    raw.split(sep).map(normalize_ws).filter(|s| !s.is_empty()).collect()
}

/// Writes the corpus back as BibTeX. Output is deterministic and re-parses to
/// the same studies.
pub fn serialize_bibtex(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (i, study) in corpus.studies().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_entry(&mut out, study);
    }
    out
}

fn write_entry(out: &mut String, study: &Study) {
    out.push('@');
    out.push_str(&study.entry_type);
    out.push('{');
    out.push_str(&study.key);
    out.push_str(",\n");
    let mut field = |name: &str, value: &str| {
        out.push_str("  ");
        out.push_str(name);
        out.push_str(" = {");
        out.push_str(value);
        out.push_str("},\n");
    };
    field("title", &study.title);
    field("abstract", &study.abstract_text);
    field("keywords", &study.keywords.join(", "));
    if !study.references.is_empty() {
        field("references", &study.references.join("; "));
    }
    field("status", study.status.as_token());
    if let Some(doi) = &study.doi {
        field("doi", doi);
    }
    for (name, value) in &study.extra {
        field(name, value);
    }
    out.push_str("}\n");
}

/// Lowercase, punctuation stripped, whitespace collapsed.
pub fn normalize_title(title: &str) -> String {
    let kept: String = title
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    normalize_ws(&kept)
}

/// Adds the studies of a new search to a previous review.
///
/// A new study is discarded when it duplicates an already kept study by key,
/// DOI (case-insensitive) or normalized title; the kept record wins. Surviving
/// new studies are marked [`Status::ToEvaluate`].
pub fn merge(previous: &Corpus, new_search: &Corpus) -> Corpus {
    let mut merged = previous.clone();
    let mut dois: HashSet<String> = previous
        .studies()
        .iter()
        .filter_map(|s| s.doi.as_ref().map(|d| d.to_lowercase()))
        .collect();
    let mut titles: HashSet<String> = previous.studies().iter().map(|s| normalize_title(&s.title)).collect();
    titles.remove("");

    for study in new_search.studies() {
        let doi = study.doi.as_ref().map(|d| d.to_lowercase());
        let title = normalize_title(&study.title);
        let reason = if merged.contains_key(&study.key) {
            Some("key")
        } else if doi.as_ref().is_some_and(|d| dois.contains(d)) {
            Some("DOI")
        } else if !title.is_empty() && titles.contains(&title) {
            Some("title")
        } else {
            None
        };
        if let Some(reason) = reason {
            merged.warn(0, Some(&study.key), format!("duplicate {reason} in new search; entry discarded"));
            continue;
        }
        let mut study = study.clone();
        if study.status != Status::ToEvaluate {
            merged.warn(0, Some(&study.key), format!("new-search status `{}` replaced by toevaluate", study.status));
            study.status = Status::ToEvaluate;
        }
        if let Some(d) = doi {
            dois.insert(d);
        }
        if !title.is_empty() {
            titles.insert(title);
        }
        merged.studies.push(study);
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"
@article{lemos2007,
  title = {Control and data flow structural testing criteria for aspect-oriented programs},
  abstract = {We present a structural
      testing approach.},
  keywords = {aspect-oriented, structural testing},
  references = {zhao2003; lemos2007; zhao2003},
  status = {Included},
  year = 2007,
  note = "see {AOP}",
}
"#;

    #[test]
    fn empty_file() {
        let c = parse_bibtex("").unwrap();
        assert!(c.is_empty());
        assert!(c.warnings().is_empty());
    }

    #[test]
    fn single_entry_fields() {
        let c = parse_bibtex(ONE).unwrap();
        assert_eq!(c.len(), 1);
        let s = &c.studies()[0];
        assert_eq!(s.status, Status::IncludedPrevious);
        assert_eq!(s.abstract_text, "We present a structural testing approach.");
        assert_eq!(s.keywords, vec!["aspect-oriented", "structural testing"]);
        assert_eq!(s.references, vec!["zhao2003"]);
        assert_eq!(s.extra, vec![("year".into(), "2007".into()), ("note".into(), "see {AOP}".into())]);
        assert_eq!(c.warnings().len(), 2, "{:?}", c.warnings());
    }

    #[test]
    fn missing_title_or_status_rejected() {
        let text = "@article{a, status = {included}}\n@article{b, title = {B}}\n@article{c, title={C}, status={maybe}}";
        let c = parse_bibtex(text).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.warnings().len(), 3);
        assert!(c.warnings()[0].message.contains("missing title"));
        assert!(c.warnings()[1].message.contains("missing status"));
        assert_eq!(c.warnings()[1].line, 2);
    }

    #[test]
    fn default_status_option() {
        let opts = ParseOptions { default_status: Some(Status::ToEvaluate) };
        let c = parse_bibtex_with("@misc{b, title = {B}, abstract={x}, keywords={y}}", &opts).unwrap();
        assert_eq!(c.studies()[0].status, Status::ToEvaluate);
        assert!(c.warnings().is_empty());
    }

    #[test]
    fn missing_abstract_is_warning() {
        let c = parse_bibtex("@article{a, title={A}, status={excluded}}").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.studies()[0].abstract_text, "");
        assert_eq!(c.warnings().len(), 2);
    }

    #[test]
    fn unbalanced_braces_report_offset_and_key() {
        let text = "@article{x1,\n  title = {Open {brace},\n  status = {included}\n";
        let err = parse_bibtex(text).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("x1"));
        assert_eq!(err.line, 2);
        assert_eq!(err.offset, text.find("{Open").unwrap());
        assert!(err.to_string().contains("x1"));
    }

    #[test]
    fn malformed_entry() {
        let err = parse_bibtex("@article{k, title {x}}").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("k"));
        let err = parse_bibtex("@article k").unwrap_err();
        assert_eq!(err.offset, 9);
    }

    #[test]
    fn comments_and_parens() {
        let text = "% comment\n@comment{ignored {nested}}\n@string{foo = {bar}}\n@inproceedings(p1, title = \"Quoted \" # {Join}, status = toevaluate)";
        let c = parse_bibtex(text).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.studies()[0].title, "Quoted Join");
        assert_eq!(c.studies()[0].entry_type, "inproceedings");
        assert_eq!(c.studies()[0].status, Status::ToEvaluate);
    }

    #[test]
    fn duplicate_keys_in_file() {
        let c = parse_bibtex("@a{k, title={1}, status={included}}\n@a{k, title={2}, status={included}}").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.studies()[0].title, "1");
    }

    #[test]
    fn serialize_empty_and_round_trip() {
        assert_eq!(serialize_bibtex(&Corpus::new()), "");
        let c = parse_bibtex(ONE).unwrap();
        let again = parse_bibtex(&serialize_bibtex(&c)).unwrap();
        assert_eq!(again.studies(), c.studies());
    }

    #[test]
    fn statuses_survive_round_trip() {
        let c = Corpus::from_studies(vec![
            Study::new("a", "A", Status::IncludedPrevious),
            Study::new("b", "B", Status::ExcludedPrevious),
            Study::new("c", "C", Status::ToEvaluate).with_doi("10.1/x"),
        ])
        .unwrap();
        let again = parse_bibtex(&serialize_bibtex(&c)).unwrap();
        assert_eq!(again.studies(), c.studies());
    }

    #[test]
    fn merge_self_is_identity() {
        let c = parse_bibtex(ONE).unwrap();
        assert_eq!(merge(&c, &c).studies(), c.studies());
    }

    #[test]
    fn merge_single_overlap() {
        let prev = Corpus::from_studies(vec![Study::new("x", "Study X", Status::IncludedPrevious)]).unwrap();
        let new = Corpus::from_studies(vec![
            Study::new("x", "Study X", Status::ToEvaluate),
            Study::new("y", "Study Y", Status::IncludedPrevious),
        ])
        .unwrap();
        let m = merge(&prev, &new);
        assert_eq!(m.keys(), vec!["x", "y"]);
        assert_eq!(m.studies()[0].status, Status::IncludedPrevious);
        assert_eq!(m.studies()[1].status, Status::ToEvaluate);
        assert_eq!(m.warnings().len(), 2);
    }

    #[test]
    fn merge_matches_doi_and_title() {
        let prev = Corpus::from_studies(vec![
            Study::new("a", "Testing Aspect-Oriented Programs!", Status::IncludedPrevious),
            Study::new("b", "Other", Status::ExcludedPrevious).with_doi("10.1145/ABC"),
        ])
        .unwrap();
        let new = Corpus::from_studies(vec![
            Study::new("a2", "testing   aspectoriented programs", Status::ToEvaluate),
            Study::new("b2", "Different title", Status::ToEvaluate).with_doi("10.1145/abc"),
            Study::new("c", "Fresh", Status::ToEvaluate),
        ])
        .unwrap();
        let m = merge(&prev, &new);
        assert_eq!(m.keys(), vec!["a", "b", "c"]);
    }

    #[test]
    fn stats() {
        assert_eq!(corpus_stats(&Corpus::new()).as_tuple(), (0, 0, 0));
        let c = Corpus::from_studies((0..5).map(|i| Study::new(format!("s{i}"), "t", Status::ToEvaluate)).collect()).unwrap();
        assert_eq!(corpus_stats(&c).as_tuple(), (0, 0, 5));
    }

    #[test]
    fn status_tokens() {
        assert_eq!(Status::from_token("INCLUDED"), Some(Status::IncludedPrevious));
        assert_eq!(Status::from_token("to_evaluate"), Some(Status::ToEvaluate));
        assert_eq!(Status::from_token("To Evaluate"), Some(Status::ToEvaluate));
        assert_eq!(Status::from_token("pending"), None);
    }

    #[test]
    fn corpus_rejects_duplicates() {
        let err = Corpus::from_studies(vec![Study::new("a", "A", Status::ToEvaluate), Study::new("a", "B", Status::ToEvaluate)]);
        assert_eq!(err, Err(CorpusError::DuplicateKey("a".into())));
        assert_eq!(Corpus::from_studies(vec![Study::new("", "A", Status::ToEvaluate)]), Err(CorpusError::EmptyKey));
    }
}

//! File-based commands: run, evaluate, summarize, synth.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use srmap_core::corpus::{parse_bibtex_with, serialize_bibtex, Corpus, ParseOptions, Status};
use srmap_core::decision::VerdictCounts;
use srmap_core::evaluation::{format_table, parse_labels, score_against_oracle, Confusion, SubjectResult};
use srmap_core::graphs::graphs_json;
use srmap_core::pipeline::{apply_verdicts, run, PipelineConfig};
use srmap_core::session::ReviewSession;
use srmap_core::synthetic::{generate, DatasetShape};
use srmap_core::textprep::Stoplist;

/// Reads a BibTeX file, reporting syntax errors as `path:line: message`.
pub fn read_corpus(path: &Path, default_status: Option<Status>) -> Result<Corpus> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_bibtex_with(&text, &ParseOptions { default_status }).map_err(|e| {
        let key = e.key.as_deref().map(|k| format!(" (entry `{k}`)")).unwrap_or_default();
        anyhow::anyhow!("{}:{}: {}{}", path.display(), e.line, e.message, key)
    })
}

pub fn read_stoplist(path: Option<&Path>) -> Result<Stoplist> {
    match path {
        None => Ok(Stoplist::english()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok(Stoplist::parse(&text))
        }
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub counts: VerdictCounts,
    pub written: Vec<PathBuf>,
    /// Parser and merge warnings, prefixed with their file.
    pub warnings: Vec<String>,
    pub report: String,
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?).with_context(|| format!("cannot write {}", path.display()))
}

/// Runs the whole pipeline and writes its artifacts to `out`.
///
/// Studies in `new_file` without a status field are read as under evaluation.
pub fn run_files(
    previous_file: &Path,
    new_file: &Path,
    stoplist: &Stoplist,
    config: PipelineConfig,
    out: &Path,
    write_matrix: bool,
) -> Result<RunOutput> {
    let previous = read_corpus(previous_file, None)?;
    let new_search = read_corpus(new_file, Some(Status::ToEvaluate))?;
    let mut warnings: Vec<String> = Vec::new();
    warnings.extend(previous.warnings().iter().map(|w| format!("{}: {w}", previous_file.display())));
    warnings.extend(new_search.warnings().iter().map(|w| format!("{}: {w}", new_file.display())));

    let analysis = run(&previous, &new_search, stoplist, &config)?;
    warnings.extend(analysis.corpus.warnings().iter().map(|w| format!("merge: {}", w.message)));
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;

    let mut written = Vec::new();
    let mut put = |name: &str, body: Result<()>| -> Result<()> {
        body?;
        written.push(out.join(name));
        Ok(())
    };
    put("graphs.json", write_json(&out.join("graphs.json"), &graphs_json(&analysis.knn, &analysis.citations)))?;
    put("decisions.json", write_json(&out.join("decisions.json"), &analysis.decisions.to_json()))?;
    if write_matrix {
        put("matrix.json", write_json(&out.join("matrix.json"), &analysis.matrix.to_json()))?;
    }
    let updated = apply_verdicts(&analysis.corpus, &analysis.decisions, &BTreeMap::new(), true);
    put("updated.bib", fs::write(out.join("updated.bib"), serialize_bibtex(&updated)).map_err(Into::into))?;
    let report = analysis.decisions.report();
    put("report.txt", fs::write(out.join("report.txt"), &report).map_err(Into::into))?;

    let counts = analysis.decisions.counts;
    let session = ReviewSession::from_analysis("batch", config, analysis);
    put("map.json", write_json(&out.join("map.json"), &session.map_payload()))?;
    put("bundles.json", write_json(&out.join("bundles.json"), &session.bundles_payload()))?;

    Ok(RunOutput { counts, written, warnings, report })
}

/// Scores a decisions or label file against an oracle label file.
pub fn evaluate_files(decisions_file: &Path, oracle_file: &Path, subject: &str, minutes: f64) -> Result<SubjectResult> {
    let read = |p: &Path| -> Result<_> {
        let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
        parse_labels(&text).with_context(|| format!("{}", p.display()))
    };
    let verdicts = read(decisions_file)?;
    let oracle = read(oracle_file)?;
    let counts = score_against_oracle(&verdicts, &oracle)?;
    Ok(SubjectResult::new(subject, minutes, counts))
}

/// Reads `group,subject,minutes,ci,ce,ii,ie` rows (header optional) and
/// returns the per-group table with summary rows.
pub fn summarize_file(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut groups: Vec<(String, Vec<SubjectResult>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (|| -> Option<(String, SubjectResult)> {
            if cols.len() != 7 {
                return None;
            }
            let minutes: f64 = cols[2].parse().ok()?;
            let c: Vec<usize> = cols[3..].iter().map(|v| v.parse().ok()).collect::<Option<_>>()?;
            Some((cols[0].to_string(), SubjectResult::new(cols[1], minutes, Confusion::new(c[0], c[1], c[2], c[3]))))
        })();
        match parsed {
            Some((group, result)) => match groups.iter_mut().find(|(g, _)| *g == group) {
                Some((_, rows)) => rows.push(result),
                None => groups.push((group, vec![result])),
            },
            None if n == 0 => {}
            None => bail!("{}:{}: expected group,subject,minutes,ci,ce,ii,ie", path.display(), n + 1),
        }
    }
    if groups.is_empty() {
        bail!("{}: no subject rows", path.display());
    }
    Ok(format_table(&groups))
}

/// Writes `previous.bib`, `new.bib` and `oracle.json` for a synthetic review.
pub fn synth_files(seed: u64, shape: DatasetShape, out: &Path) -> Result<Vec<PathBuf>> {
    let data = generate(seed, shape);
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let files = [
        ("previous.bib", serialize_bibtex(&data.previous)),
        ("new.bib", serialize_bibtex(&data.new_search)),
        ("oracle.json", serde_json::to_string_pretty(&data.oracle)?),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = out.join(name);
        fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

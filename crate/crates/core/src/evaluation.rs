//! Scoring selections against an oracle, and per-group summary statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{DecisionSet, Verdict};

/// A resolved include/exclude choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Include,
    Exclude,
}

impl Label {
    pub fn parse(token: &str) -> Option<Label> {
        match token.trim().to_ascii_lowercase().as_str() {
            "include" | "included" => Some(Label::Include),
            "exclude" | "excluded" => Some(Label::Exclude),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Include => "include",
            Label::Exclude => "exclude",
        }
    }
}

pub type Labels = BTreeMap<String, Label>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvaluationError {
    #[error("key sets differ; missing from verdicts: {missing:?}; not in oracle: {extra:?}")]
    KeyMismatch { missing: Vec<String>, extra: Vec<String> },
    #[error("oracle is empty")]
    EmptyOracle,
    #[error("unresolved verdicts: {0:?}")]
    Unresolved(Vec<String>),
    #[error("cannot summarize an empty group")]
    EmptyGroup,
    #[error("bad label file: {0}")]
    BadLabels(String),
}

/// Confusion counts of one selection against the oracle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub correctly_included: usize,
    pub correctly_excluded: usize,
    pub incorrectly_included: usize,
    pub incorrectly_excluded: usize,
}

impl Confusion {
    pub fn new(ci: usize, ce: usize, ii: usize, ie: usize) -> Self {
        Confusion {
            correctly_included: ci,
            correctly_excluded: ce,
            incorrectly_included: ii,
            incorrectly_excluded: ie,
        }
    }

    pub fn correct(&self) -> usize {
        self.correctly_included + self.correctly_excluded
    }

    pub fn incorrect(&self) -> usize {
        self.incorrectly_included + self.incorrectly_excluded
    }

    pub fn total(&self) -> usize {
        self.correct() + self.incorrect()
    }

    /// Fraction correct in `[0, 1]`; 0 for an empty selection.
    pub fn percent_correct(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.correct() as f64 / self.total() as f64
        }
    }
}

pub fn score_against_oracle(verdicts: &Labels, oracle: &Labels) -> Result<Confusion, EvaluationError> {
    if oracle.is_empty() {
        return Err(EvaluationError::EmptyOracle);
    }
    let missing: Vec<String> = oracle.keys().filter(|k| !verdicts.contains_key(*k)).cloned().collect();
    let extra: Vec<String> = verdicts.keys().filter(|k| !oracle.contains_key(*k)).cloned().collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(EvaluationError::KeyMismatch { missing, extra });
    }
    let mut c = Confusion::default();
    for (key, truth) in oracle {
        match (verdicts[key], truth) {
            (Label::Include, Label::Include) => c.correctly_included += 1,
            (Label::Exclude, Label::Exclude) => c.correctly_excluded += 1,
            (Label::Include, Label::Exclude) => c.incorrectly_included += 1,
            (Label::Exclude, Label::Include) => c.incorrectly_excluded += 1,
        }
    }
    Ok(c)
}

/// Resolved labels from a decision set; fails if any verdict is still undefined.
pub fn labels_from_decisions(set: &DecisionSet) -> Result<Labels, EvaluationError> {
    let unresolved: Vec<String> =
        set.decisions.iter().filter(|d| d.verdict == Verdict::Undefined).map(|d| d.key.clone()).collect();
    if !unresolved.is_empty() {
        return Err(EvaluationError::Unresolved(unresolved));
    }
    Ok(set
        .decisions
        .iter()
        .map(|d| (d.key.clone(), if d.verdict == Verdict::Include { Label::Include } else { Label::Exclude }))
        .collect())
}

/// Reads labels from a JSON object `{key: "include"|"exclude"}` (optionally
/// under a `labels` field), a decisions document, or two-column CSV.
pub fn parse_labels(text: &str) -> Result<Labels, EvaluationError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| EvaluationError::BadLabels(e.to_string()))?;
        if value.get("decisions").is_some() {
            let set: DecisionSet = serde_json::from_value(value)
                .map_err(|e| EvaluationError::BadLabels(e.to_string()))?;
            return labels_from_decisions(&set);
        }
        let map = value.get("labels").unwrap_or(&value);
        let obj = map.as_object().ok_or_else(|| EvaluationError::BadLabels("expected an object".into()))?;
        return obj
            .iter()
            .filter(|(k, _)| k.as_str() != "schema")
            .map(|(k, v)| {
                v.as_str()
                    .and_then(Label::parse)
                    .map(|l| (k.clone(), l))
                    .ok_or_else(|| EvaluationError::BadLabels(format!("bad label for `{k}`")))
            })
            .collect();
    }
    let mut labels = Labels::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.splitn(2, ',');
        let key = cols.next().unwrap_or("").trim();
        let label = cols.next().unwrap_or("").trim();
        match Label::parse(label) {
            Some(l) => {
                labels.insert(key.to_string(), l);
            }
            // header row
            None if n == 0 => {}
            None => return Err(EvaluationError::BadLabels(format!("line {}: `{line}`", n + 1))),
        }
    }
    Ok(labels)
}

/// One subject's outcome: time taken and confusion counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectResult {
    pub subject_id: String,
    pub time_minutes: f64,
    #[serde(flatten)]
    pub counts: Confusion,
}

impl SubjectResult {
    pub fn new(subject_id: impl Into<String>, time_minutes: f64, counts: Confusion) -> Self {
        SubjectResult { subject_id: subject_id.into(), time_minutes, counts }
    }

    pub fn total_evaluated(&self) -> usize {
        self.counts.total()
    }

    pub fn percent_correct(&self) -> f64 {
        self.counts.percent_correct()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (divisor n - 1); 0 for a single value.
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 };
        let stddev = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Some(Summary { mean, median, stddev, min: sorted[0], max: sorted[n - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub subjects: usize,
    pub time_minutes: Summary,
    pub correct: Summary,
    pub incorrect: Summary,
}

pub fn summarize_group(results: &[SubjectResult]) -> Result<GroupSummary, EvaluationError> {
    let col = |f: &dyn Fn(&SubjectResult) -> f64| -> Result<Summary, EvaluationError> {
        Summary::of(&results.iter().map(f).collect::<Vec<_>>()).ok_or(EvaluationError::EmptyGroup)
    };
    Ok(GroupSummary {
        subjects: results.len(),
        time_minutes: col(&|r| r.time_minutes)?,
        correct: col(&|r| r.counts.correct() as f64)?,
        incorrect: col(&|r| r.counts.incorrect() as f64)?,
    })
}

/// Text table with one row per subject and summary rows per group.
pub fn format_table(groups: &[(String, Vec<SubjectResult>)]) -> String {
    let mut out = String::new();
    out.push_str("Group     Subject  Time(min)  CorrInc  CorrExc  Correct (%)     IncInc  IncExc  Incorrect\n");
    for (name, results) in groups {
        for r in results {
            let c = &r.counts;
            out.push_str(&format!(
                "{:<9} {:<8} {:>9.1}  {:>7}  {:>7}  {:>2} ({:>5.1}%)  {:>7}  {:>6}  {:>9}\n",
                name,
                r.subject_id,
                r.time_minutes,
                c.correctly_included,
                c.correctly_excluded,
                c.correct(),
                100.0 * r.percent_correct(),
                c.incorrectly_included,
                c.incorrectly_excluded,
                c.incorrect(),
            ));
        }
        if let Ok(s) = summarize_group(results) {
            out.push_str(&format!(
                "{:<9} mean {:>13.2}  {:>28.2}  {:>26.2}\n",
                name, s.time_minutes.mean, s.correct.mean, s.incorrect.mean
            ));
            out.push_str(&format!(
                "{:<9} median {:>11.2}  {:>28.2}  {:>26.2}\n",
                name, s.time_minutes.median, s.correct.median, s.incorrect.median
            ));
            out.push_str(&format!(
                "{:<9} stddev {:>11.2}  {:>28.2}  {:>26.2}\n",
                name, s.time_minutes.stddev, s.correct.stddev, s.incorrect.stddev
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(pairs: &[(&str, Label)]) -> Labels {
        pairs.iter().map(|(k, l)| (k.to_string(), *l)).collect()
    }

    #[test]
    fn perfect_match() {
        let oracle: Labels = (0..13)
            .map(|i| (format!("n{i:02}"), if i < 6 { Label::Include } else { Label::Exclude }))
            .collect();
        let c = score_against_oracle(&oracle, &oracle).unwrap();
        assert_eq!(c, Confusion::new(6, 7, 0, 0));
        assert_eq!(c.percent_correct(), 1.0);
    }

    #[test]
    fn all_wrong() {
        let oracle = labels(&[("a", Label::Include), ("b", Label::Exclude)]);
        let verdicts = labels(&[("a", Label::Exclude), ("b", Label::Include)]);
        let c = score_against_oracle(&verdicts, &oracle).unwrap();
        assert_eq!(c, Confusion::new(0, 0, 1, 1));
        assert_eq!(c.percent_correct(), 0.0);
    }

    #[test]
    fn mismatch_and_empty() {
        let oracle = labels(&[("a", Label::Include)]);
        let verdicts = labels(&[("b", Label::Include)]);
        assert_eq!(
            score_against_oracle(&verdicts, &oracle),
            Err(EvaluationError::KeyMismatch { missing: vec!["a".into()], extra: vec!["b".into()] })
        );
        assert_eq!(score_against_oracle(&verdicts, &Labels::new()), Err(EvaluationError::EmptyOracle));
    }

    #[test]
    fn median_and_stddev_conventions() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 10.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(Summary::of(&[4.0]).unwrap().stddev, 0.0);
        assert!(Summary::of(&[]).is_none());
        assert_eq!(summarize_group(&[]), Err(EvaluationError::EmptyGroup));
    }

    #[test]
    fn label_files() {
        let csv = "key,label\na, include\nb,Exclude\n";
        assert_eq!(parse_labels(csv).unwrap(), labels(&[("a", Label::Include), ("b", Label::Exclude)]));
        let json = r#"{"schema": "srmap.labels/v1", "labels": {"a": "include"}}"#;
        assert_eq!(parse_labels(json).unwrap(), labels(&[("a", Label::Include)]));
        assert!(parse_labels("a,include\nb,maybe").is_err());
    }
}

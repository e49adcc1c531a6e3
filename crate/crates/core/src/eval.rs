//! Answer extraction and accuracy scoring of model outputs.
//!
//! Predictions are JSONL objects `{"id": N, "raw_output": "..."}` where `N`
//! is the 0-based index of the gold record in its file.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fragments::verify_against;
use crate::smiles::parse;
use crate::tasks::{TaskKind, TaskRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: u64,
    pub raw_output: String,
}

/// Normalized answer pulled out of free text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extracted {
    Answer(String),
    Failed,
}

impl Extracted {
    pub fn answer(&self) -> Option<&str> {
        match self {
            Extracted::Answer(a) => Some(a),
            Extracted::Failed => None,
        }
    }
}

/// Numeric tasks take the last standalone decimal integer, the group task
/// the last whole-word "yes"/"no" (any case), SMILES tasks the last
/// whitespace-separated token that parses, first as written and then with
/// surrounding punctuation removed.
pub fn extract_answer(raw_output: &str, task: TaskKind) -> Extracted {
    let found = match task {
        TaskKind::RingCount | TaskKind::ChainLength => last_integer(raw_output),
        TaskKind::FunctionalGroup => last_yes_no(raw_output),
        TaskKind::Canonicalization | TaskKind::FragmentAssembly => last_smiles(raw_output),
    };
    found.map_or(Extracted::Failed, Extracted::Answer)
}

fn last_integer(text: &str) -> Option<String> {
    let b = text.as_bytes();
    let word = |c: u8| c.is_ascii_alphanumeric() || c == b'_';
    let mut best = None;
    let mut i = 0;
    while i < b.len() {
        if !b[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        let before_ok = start == 0
            || !(word(b[start - 1])
                || (b[start - 1] == b'.' && start >= 2 && b[start - 2].is_ascii_digit()));
        let after_ok = i == b.len()
            || !(word(b[i]) || (b[i] == b'.' && i + 1 < b.len() && b[i + 1].is_ascii_digit()));
        if before_ok && after_ok {
            let digits = &text[start..i];
            let trimmed = digits.trim_start_matches('0');
            best = Some(if trimmed.is_empty() {
                "0".to_string()
            } else {
                trimmed.to_string()
            });
        }
    }
    best
}

fn last_yes_no(text: &str) -> Option<String> {
    text.rsplit(|c: char| !c.is_alphanumeric()).find_map(|w| {
        let w = w.to_ascii_lowercase();
        (w == "yes" || w == "no").then_some(w)
    })
}

const PUNCTUATION: &[char] = &['.', ',', ';', ':', '!', '?', '"', '\'', '`'];

fn last_smiles(text: &str) -> Option<String> {
    text.split_whitespace().rev().find_map(|token| {
        let stripped = token.trim_matches(PUNCTUATION);
        let bracketless = stripped
            .trim_start_matches('(')
            .trim_end_matches(')')
            .trim_matches(PUNCTUATION);
        [token, stripped, bracketless]
            .into_iter()
            .find(|t| !t.is_empty() && parse(t).is_ok())
            .map(str::to_string)
    })
}

/// Canonicalization needs the exact canonical string; assembly accepts any
/// rendering of the parent molecule; the rest compare normalized strings.
pub fn score_record(pred: &Extracted, gold: &TaskRecord) -> bool {
    let Some(answer) = pred.answer() else {
        return false;
    };
    match gold.task {
        TaskKind::FragmentAssembly => verify_against(&gold.answer, answer).is_correct(),
        _ => answer == gold.answer,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskAccuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub missing: usize,
    /// SMILES tasks: outputs with no parseable SMILES token.
    pub invalid_smiles: usize,
    /// Other tasks: outputs with no integer / yes-no to extract.
    pub unextractable: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub tasks: BTreeMap<TaskKind, TaskAccuracy>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub missing: usize,
    pub invalid_smiles: usize,
    pub unextractable: usize,
}

fn ratio(correct: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

impl AccuracyReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<20}{:>9}{:>9}{:>10}{:>9}{:>9}{:>9}",
            "task", "correct", "total", "accuracy", "missing", "invalid", "no_ans"
        );
        let mut row = |name: &str, a: &TaskAccuracy| {
            let _ = writeln!(
                s,
                "{:<20}{:>9}{:>9}{:>10.4}{:>9}{:>9}{:>9}",
                name, a.correct, a.total, a.accuracy, a.missing, a.invalid_smiles, a.unextractable
            );
        };
        for (task, a) in &self.tasks {
            row(task.name(), a);
        }
        row(
            "overall",
            &TaskAccuracy {
                correct: self.correct,
                total: self.total,
                accuracy: self.accuracy,
                missing: self.missing,
                invalid_smiles: self.invalid_smiles,
                unextractable: self.unextractable,
            },
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignmentError {
    #[error("prediction ids not present in the gold file: {0:?}")]
    UnknownIds(Vec<u64>),
    #[error("prediction ids given more than once: {0:?}")]
    DuplicateIds(Vec<u64>),
}

/// Scores predictions against gold records aligned by id. Gold records
/// without a prediction count as wrong and as missing.
pub fn score_dataset(
    preds: &[Prediction],
    golds: &[TaskRecord],
) -> Result<AccuracyReport, AlignmentError> {
    let mut by_id: HashMap<u64, &str> = HashMap::with_capacity(preds.len());
    let mut unknown = Vec::new();
    let mut duplicate = Vec::new();
    for p in preds {
        if p.id as usize >= golds.len() {
            unknown.push(p.id);
        } else if by_id.insert(p.id, &p.raw_output).is_some() {
            duplicate.push(p.id);
        }
    }
    if !unknown.is_empty() {
        unknown.sort_unstable();
        return Err(AlignmentError::UnknownIds(unknown));
    }
    if !duplicate.is_empty() {
        duplicate.sort_unstable();
        duplicate.dedup();
        return Err(AlignmentError::DuplicateIds(duplicate));
    }

    #[derive(Clone, Copy)]
    enum Outcome {
        Missing,
        Failed,
        Scored(bool),
    }
    let outcomes: Vec<Outcome> = golds
        .par_iter()
        .enumerate()
        .map(|(i, gold)| match by_id.get(&(i as u64)) {
            None => Outcome::Missing,
            Some(raw) => match extract_answer(raw, gold.task) {
                Extracted::Failed => Outcome::Failed,
                e => Outcome::Scored(score_record(&e, gold)),
            },
        })
        .collect();

    let mut tasks: BTreeMap<TaskKind, TaskAccuracy> = BTreeMap::new();
    for (gold, outcome) in golds.iter().zip(outcomes) {
        let a = tasks.entry(gold.task).or_default();
        a.total += 1;
        match outcome {
            Outcome::Missing => a.missing += 1,
            Outcome::Failed if gold.task.is_smiles_answer() => a.invalid_smiles += 1,
            Outcome::Failed => a.unextractable += 1,
            Outcome::Scored(ok) => a.correct += ok as usize,
        }
    }
    for a in tasks.values_mut() {
        a.accuracy = ratio(a.correct, a.total);
    }
    let sum = |f: fn(&TaskAccuracy) -> usize| tasks.values().map(f).sum::<usize>();
    let (correct, total) = (sum(|a| a.correct), sum(|a| a.total));
    Ok(AccuracyReport {
        correct,
        total,
        accuracy: ratio(correct, total),
        missing: sum(|a| a.missing),
        invalid_smiles: sum(|a| a.invalid_smiles),
        unextractable: sum(|a| a.unextractable),
        tasks,
    })
}

#[derive(Debug, Error)]
pub enum PredictionFileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed predictions on line(s) {}", .0.iter().map(|(l, _)| l.to_string()).collect::<Vec<_>>().join(", "))]
    Schema(Vec<(usize, String)>),
}

pub fn parse_predictions(text: &str) -> Result<Vec<Prediction>, PredictionFileError> {
    let mut preds = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(p) => preds.push(p),
            Err(e) => errors.push((i + 1, e.to_string())),
        }
    }
    if errors.is_empty() {
        Ok(preds)
    } else {
        Err(PredictionFileError::Schema(errors))
    }
}

pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>, PredictionFileError> {
    parse_predictions(&fs::read_to_string(path)?)
}

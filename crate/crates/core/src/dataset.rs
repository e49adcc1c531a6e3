//! Corpus → scored, pruned, curriculum-ordered JSONL dataset.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::canonical::canonicalize;
use crate::curation::{arrange, sort_keyed, BandBounds, EmptyBandError, PruneBand};
use crate::graph::{default_library, load_group_library, ConfigError};
use crate::rng::SplitMix64;
use crate::smiles::{parse, Molecule};
use crate::tasks::{Skip, TaskGenerator, TaskKind, TaskRecord, TemplateError, TemplateSet};

/// Molecules processed per parallel batch while filling a task's candidate
/// pool. Only affects speed, never output.
const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split {s:?}, expected train or test")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub input: PathBuf,
    pub tasks: Vec<TaskKind>,
    pub per_task: usize,
    pub seed: u64,
    pub band: PruneBand,
    pub split: Split,
    /// Molecules sampled for a test build.
    pub test_size: usize,
    /// If set, the corpus is partitioned by a hash of each molecule's
    /// canonical SMILES: that fraction goes to test, the rest to train.
    pub holdout: Option<f64>,
    /// Candidates generated per task, as a multiple of `per_task`.
    pub overgeneration: usize,
    pub interleave: bool,
    pub templates: Option<PathBuf>,
    pub groups: Option<PathBuf>,
}

impl BuildConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        BuildConfig {
            input: input.into(),
            tasks: TaskKind::ALL.to_vec(),
            per_task: 50_000,
            seed: 42,
            band: PruneBand::default(),
            split: Split::Train,
            test_size: 10_000,
            holdout: None,
            overgeneration: 3,
            interleave: false,
            templates: None,
            groups: None,
        }
    }

    fn validate(&self) -> Result<(), DatasetError> {
        let bad = |m: &str| Err(DatasetError::Config(m.to_string()));
        if self.tasks.is_empty() {
            return bad("at least one task is required");
        }
        if self.per_task == 0 {
            return bad("per_task must be at least 1");
        }
        if self.overgeneration == 0 {
            return bad("over-generation factor must be at least 1");
        }
        if let Some(h) = self.holdout {
            if !(h > 0.0 && h < 1.0) {
                return bad("holdout fraction must lie strictly between 0 and 1");
            }
        }
        Ok(())
    }

    pub fn generator(&self) -> Result<TaskGenerator, DatasetError> {
        let templates = match &self.templates {
            Some(p) => TemplateSet::load(p)?,
            None => TemplateSet::default_set(),
        };
        let library = match &self.groups {
            Some(p) => load_group_library(p)?,
            None => default_library(),
        };
        if library.is_empty() {
            return Err(DatasetError::Config("group library is empty".into()));
        }
        Ok(TaskGenerator::new(library, templates))
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("group library line {}: {}", .0.line, .0.message)]
    Groups(#[from] ConfigError),
    #[error(transparent)]
    Insufficient(#[from] InsufficientCorpusError),
    #[error(transparent)]
    EmptyBand(#[from] EmptyBandError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("corpus too small: {}", .shortfall.iter().map(|(t, need, have)| format!("{t} has {have} of {need}")).collect::<Vec<_>>().join(", "))]
pub struct InsufficientCorpusError {
    /// (task, wanted, available)
    pub shortfall: Vec<(TaskKind, usize, usize)>,
}

/// A parsed, deduplicated corpus.
#[derive(Debug, Default)]
pub struct Corpus {
    /// (source line text, molecule, canonical SMILES)
    pub molecules: Vec<(String, Molecule, String)>,
    pub parse_failures: usize,
    pub duplicates: usize,
}

impl Corpus {
    /// Parses `.smi` lines: SMILES, then an optional whitespace-separated id.
    /// Blank lines and `#` comments are ignored; unparseable lines are logged
    /// and counted.
    pub fn from_lines<S: AsRef<str> + Sync>(lines: &[S]) -> Corpus {
        type Parsed = Option<Result<(String, Molecule, String), ()>>;
        let parsed: Vec<Parsed> = lines
            .par_iter()
            .enumerate()
            .map(|(i, line)| {
                let line = line.as_ref().trim();
                if line.is_empty() || line.starts_with('#') {
                    return None;
                }
                let smiles = line.split_whitespace().next().unwrap();
                Some(match parse(smiles) {
                    Ok(m) => {
                        let canon = canonicalize(&m);
                        Ok((smiles.to_string(), m, canon))
                    }
                    Err(e) => {
                        warn!("line {}: skipping {smiles:?}: {e}", i + 1);
                        Err(())
                    }
                })
            })
            .collect();
        let mut corpus = Corpus::default();
        let mut seen = HashSet::new();
        for entry in parsed.into_iter().flatten() {
            match entry {
                Ok(m) if seen.insert(m.2.clone()) => corpus.molecules.push(m),
                Ok(_) => corpus.duplicates += 1,
                Err(()) => corpus.parse_failures += 1,
            }
        }
        corpus
    }

    pub fn read(path: &Path) -> Result<Corpus, DatasetError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let lines: Vec<&str> = text.lines().collect();
        Ok(Corpus::from_lines(&lines))
    }
}

/// Which side of a hash partition a canonical SMILES falls on.
pub fn hash_split(canonical: &str, holdout: f64) -> Split {
    let digest = Sha256::digest(canonical.as_bytes());
    let head = u64::from_be_bytes(digest[..8].try_into().unwrap());
    if (head as f64) < holdout * (u64::MAX as f64) {
        Split::Test
    } else {
        Split::Train
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultySummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl DifficultySummary {
    fn of(scores: &[f64]) -> Option<Self> {
        if scores.is_empty() {
            return None;
        }
        let mut s = scores.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        let median = if n % 2 == 1 {
            s[n / 2]
        } else {
            (s[n / 2 - 1] + s[n / 2]) / 2.0
        };
        Some(DifficultySummary {
            min: s[0],
            median,
            max: s[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub split: Split,
    pub seed: u64,
    pub band: String,
    pub per_task: usize,
    pub total: usize,
    pub counts: BTreeMap<TaskKind, usize>,
    /// Generation skips by task and reason, over the molecules consumed.
    pub skips: BTreeMap<TaskKind, BTreeMap<String, usize>>,
    /// Corpus lines dropped before generation, by reason.
    pub input_skips: BTreeMap<String, usize>,
    pub difficulty: BTreeMap<TaskKind, DifficultySummary>,
    pub content_sha256: String,
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub records: Vec<TaskRecord>,
    pub manifest: DatasetManifest,
}

/// Reads `config.input` and runs [`build_from_corpus`].
pub fn build(config: &BuildConfig) -> Result<BuildOutput, DatasetError> {
    config.validate()?;
    let corpus = Corpus::read(&config.input)?;
    build_from_corpus(config, &corpus)
}

/// Parse → generate → score → prune → sort → truncate, per task, then lay
/// the task blocks out in the fixed task order.
pub fn build_from_corpus(
    config: &BuildConfig,
    corpus: &Corpus,
) -> Result<BuildOutput, DatasetError> {
    config.validate()?;
    let generator = config.generator()?;

    let mut input_skips = BTreeMap::from([
        ("parse_error".to_string(), corpus.parse_failures),
        ("duplicate_molecule".to_string(), corpus.duplicates),
    ]);
    let pool: Vec<usize> = match config.holdout {
        Some(h) => {
            let (keep, away): (Vec<usize>, Vec<usize>) = (0..corpus.molecules.len())
                .partition(|&i| hash_split(&corpus.molecules[i].2, h) == config.split);
            input_skips.insert("other_split".into(), away.len());
            keep
        }
        None => (0..corpus.molecules.len()).collect(),
    };
    info!(
        "{} molecules available for the {} split",
        pool.len(),
        config.split
    );

    let mut tasks = config.tasks.clone();
    tasks.sort();
    tasks.dedup();

    let test_sample: Option<Vec<usize>> = (config.split == Split::Test).then(|| {
        let mut sample = pool.clone();
        SplitMix64::stream(config.seed, u64::MAX, 0).shuffle(&mut sample);
        sample.truncate(config.test_size);
        sample
    });

    let mut keyed_all: Vec<(String, TaskRecord)> = Vec::new();
    let mut skips = BTreeMap::new();
    let mut shortfall = Vec::new();
    let mut empty_band = Vec::new();
    for &task in &tasks {
        let (order, target) = match &test_sample {
            Some(sample) => (sample.clone(), sample.len()),
            None => {
                let mut order = pool.clone();
                SplitMix64::stream(config.seed, task.id(), 0).shuffle(&mut order);
                (order, config.per_task.saturating_mul(config.overgeneration))
            }
        };
        let (candidates, task_skips) =
            fill_pool(&generator, corpus, task, &order, target, config.seed);
        skips.insert(task, task_skips);
        debug!("{task}: {} candidates", candidates.len());

        let kept = if test_sample.is_some() || candidates.is_empty() {
            candidates
        } else {
            let scores: Vec<f64> = candidates.iter().map(|(_, r)| r.difficulty).collect();
            let bounds = BandBounds::from_scores(&scores, config.band);
            let kept: Vec<_> = candidates
                .into_iter()
                .filter(|(_, r)| bounds.contains(r.difficulty))
                .collect();
            if kept.is_empty() {
                empty_band.push(task);
            }
            kept
        };
        let mut sorted = sort_keyed(kept);
        if test_sample.is_none() {
            if sorted.len() < config.per_task {
                shortfall.push((task, config.per_task, sorted.len()));
            }
            sorted.truncate(config.per_task);
        }
        info!("{task}: {} records", sorted.len());
        keyed_all.extend(sorted);
    }
    if !empty_band.is_empty() {
        return Err(EmptyBandError { tasks: empty_band }.into());
    }
    if !shortfall.is_empty() {
        return Err(InsufficientCorpusError { shortfall }.into());
    }

    let records = arrange(
        keyed_all.into_iter().map(|(_, r)| r).collect(),
        config.interleave,
    );
    let mut counts = BTreeMap::new();
    let mut by_task: BTreeMap<TaskKind, Vec<f64>> = BTreeMap::new();
    for r in &records {
        *counts.entry(r.task).or_insert(0) += 1;
        by_task.entry(r.task).or_default().push(r.difficulty);
    }
    let difficulty = by_task
        .iter()
        .filter_map(|(&t, s)| DifficultySummary::of(s).map(|d| (t, d)))
        .collect();
    let manifest = DatasetManifest {
        split: config.split,
        seed: config.seed,
        band: config.band.to_string(),
        per_task: config.per_task,
        total: records.len(),
        counts,
        skips,
        input_skips,
        difficulty,
        content_sha256: content_hash(&records),
    };
    Ok(BuildOutput { records, manifest })
}

/// Generates `task` records over `order` until `target` are collected.
/// Batches run in parallel but are consumed strictly in `order`, so the
/// result does not depend on the thread count.
fn fill_pool(
    generator: &TaskGenerator,
    corpus: &Corpus,
    task: TaskKind,
    order: &[usize],
    target: usize,
    seed: u64,
) -> (Vec<(String, TaskRecord)>, BTreeMap<String, usize>) {
    let mut out = Vec::new();
    let mut skips: BTreeMap<String, usize> = BTreeMap::new();
    let mut seen = HashSet::new();
    'outer: for batch in order.chunks(BATCH) {
        let results: Vec<Result<TaskRecord, Skip>> = batch
            .par_iter()
            .map(|&i| {
                let (source, mol, _) = &corpus.molecules[i];
                let mut rng = SplitMix64::stream(seed, i as u64, 1 + task.id());
                generator.generate(task, mol, source, &mut rng)
            })
            .collect();
        for (&i, result) in batch.iter().zip(results) {
            if out.len() >= target {
                break 'outer;
            }
            match result {
                Ok(r) => {
                    let key = (
                        r.source_smiles.clone(),
                        serde_json::to_string(&r.meta).unwrap(),
                    );
                    if seen.insert(key) {
                        out.push((corpus.molecules[i].2.clone(), r));
                    } else {
                        *skips.entry("duplicate_record".into()).or_default() += 1;
                    }
                }
                Err(skip) => *skips.entry(skip.name().into()).or_default() += 1,
            }
        }
    }
    (out, skips)
}

/// The exact bytes [`emit_jsonl`] writes.
pub fn to_jsonl(records: &[TaskRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("records always serialize"));
        s.push('\n');
    }
    s
}

pub fn content_hash(records: &[TaskRecord]) -> String {
    hex::encode(Sha256::digest(to_jsonl(records).as_bytes()))
}

/// Writes one JSON object per line; returns the line count.
pub fn emit_jsonl(records: &[TaskRecord], path: &Path) -> Result<usize, DatasetError> {
    fs::write(path, to_jsonl(records)).map_err(io_err(path))?;
    Ok(records.len())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes the dataset and its `<out>.manifest.json` sidecar.
pub fn write_output(output: &BuildOutput, out: &Path) -> Result<(), DatasetError> {
    emit_jsonl(&output.records, out)?;
    let path = manifest_path(out);
    let mut text = serde_json::to_string_pretty(&output.manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed records on line(s) {}", .errors.iter().map(|(l, _)| l.to_string()).collect::<Vec<_>>().join(", "))]
pub struct SchemaError {
    /// (1-based line, message)
    pub errors: Vec<(usize, String)>,
}

/// Inverse of [`to_jsonl`]. Blank lines are ignored.
pub fn parse_jsonl(text: &str) -> Result<Vec<TaskRecord>, SchemaError> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<TaskRecord>(line) {
            Ok(r) => records.push(r),
            Err(e) => errors.push((i + 1, e.to_string())),
        }
    }
    if errors.is_empty() {
        Ok(records)
    } else {
        Err(SchemaError { errors })
    }
}

pub fn load_jsonl(path: &Path) -> Result<Vec<TaskRecord>, DatasetError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut text = String::new();
    for line in BufReader::new(file).lines() {
        text.push_str(&line.map_err(io_err(path))?);
        text.push('\n');
    }
    Ok(parse_jsonl(&text)?)
}

//! Difficulty scoring, percentile-band pruning and curriculum ordering.
//!
//! The per-task measures are size- or string-based:
//!
//! | task | score |
//! |---|---|
//! | functional_group | heavy atoms |
//! | ring_count | SSSR rings + fused (atom-sharing) ring pairs |
//! | chain_length | largest token distance between consecutive chain atoms |
//! | canonicalization | heavy atoms + deepest branch nesting |
//! | fragment_assembly | heavy atoms of both fragments |

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::canonical::canonicalize;
use crate::fragments::assemble_serialized;
use crate::graph::{longest_carbon_chain, perceive_rings};
use crate::smiles::{parse, parse_fragments, tokenize, Molecule, SmilesError, TokenKind};
use crate::tasks::{TaskKind, TaskRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct DifficultyScore {
    pub value: f64,
    pub components: BTreeMap<String, f64>,
}

impl DifficultyScore {
    fn single(name: &str, value: usize) -> Self {
        let value = value as f64;
        DifficultyScore {
            value,
            components: BTreeMap::from([(name.to_string(), value)]),
        }
    }
}

/// Scores a record from its task and source string.
pub fn difficulty(record: &TaskRecord) -> Result<DifficultyScore, SmilesError> {
    let mol = match record.task {
        TaskKind::FragmentAssembly => parse_fragments(&record.source_smiles)?,
        _ => parse(&record.source_smiles)?,
    };
    Ok(score_parsed(record.task, &record.source_smiles, &mol))
}

/// `mol` must carry the heavy atoms the source shows; for the chain task it
/// must be `parse(source)` itself so atom indices line up with tokens.
pub(crate) fn score_parsed(task: TaskKind, source: &str, mol: &Molecule) -> DifficultyScore {
    match task {
        TaskKind::FunctionalGroup | TaskKind::FragmentAssembly => {
            DifficultyScore::single("heavy_atoms", mol.heavy_atom_count())
        }
        TaskKind::RingCount => {
            let rings = perceive_rings(mol);
            let (n, fused) = (rings.len(), rings.fused_pairs());
            DifficultyScore {
                value: (n + fused) as f64,
                components: BTreeMap::from([
                    ("rings".to_string(), n as f64),
                    ("fused_pairs".to_string(), fused as f64),
                ]),
            }
        }
        TaskKind::ChainLength => {
            let positions = atom_token_positions(source);
            let path = longest_carbon_chain(mol).path;
            let gap = path
                .windows(2)
                .map(|w| positions[w[0]].abs_diff(positions[w[1]]))
                .max()
                .unwrap_or(0);
            DifficultyScore::single("max_token_gap", gap)
        }
        TaskKind::Canonicalization => {
            let heavy = mol.heavy_atom_count();
            let depth = branch_depth(source);
            DifficultyScore {
                value: (heavy + depth) as f64,
                components: BTreeMap::from([
                    ("heavy_atoms".to_string(), heavy as f64),
                    ("branch_depth".to_string(), depth as f64),
                ]),
            }
        }
    }
}

/// Token index of each atom, in atom order.
fn atom_token_positions(source: &str) -> Vec<usize> {
    tokenize(source)
        .map(|toks| {
            toks.iter()
                .enumerate()
                .filter(|(_, t)| t.is_atom())
                .map(|(i, _)| i)
                .collect()
        })
        .unwrap_or_default()
}

/// Deepest parenthesis nesting.
pub fn branch_depth(source: &str) -> usize {
    let Ok(tokens) = tokenize(source) else {
        return 0;
    };
    let (mut depth, mut max) = (0usize, 0usize);
    for t in tokens {
        match t.kind {
            TokenKind::BranchOpen => {
                depth += 1;
                max = max.max(depth);
            }
            TokenKind::BranchClose => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    max
}

/// Percentile band `(low, high]`; `low == 0` keeps the minimum too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneBand {
    low: f64,
    high: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BandError {
    #[error("band bounds must satisfy 0 <= low < high <= 1, got {low}:{high}")]
    Range { low: f64, high: f64 },
    #[error("band must look like LOW:HIGH, got {0:?}")]
    Syntax(String),
}

impl PruneBand {
    pub const FULL: PruneBand = PruneBand {
        low: 0.0,
        high: 1.0,
    };

    pub fn new(low: f64, high: f64) -> Result<Self, BandError> {
        if !(0.0..1.0).contains(&low) || !(high > low && high <= 1.0) {
            return Err(BandError::Range { low, high });
        }
        Ok(PruneBand { low, high })
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }
}

impl Default for PruneBand {
    fn default() -> Self {
        PruneBand {
            low: 0.2,
            high: 0.8,
        }
    }
}

impl fmt::Display for PruneBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.low, self.high)
    }
}

impl FromStr for PruneBand {
    type Err = BandError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || BandError::Syntax(s.to_string());
        let (lo, hi) = s.split_once(':').ok_or_else(syntax)?;
        let lo: f64 = lo.trim().parse().map_err(|_| syntax())?;
        let hi: f64 = hi.trim().parse().map_err(|_| syntax())?;
        PruneBand::new(lo, hi)
    }
}

/// Nearest-rank percentile of ascending `sorted`: the value at 1-based rank
/// `ceil(p * n)`, clamped to at least 1.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    // guard against 0.7 * 10 = 7.000000000000001
    let rank = (p * sorted.len() as f64 - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("band retains no records for task(s): {}", .tasks.iter().map(|t| t.name()).collect::<Vec<_>>().join(", "))]
pub struct EmptyBandError {
    pub tasks: Vec<TaskKind>,
}

/// Per-task cut points: `(P(low), P(high))`, with no lower cut when
/// `low == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandBounds {
    pub low: Option<f64>,
    pub high: f64,
}

impl BandBounds {
    /// `scores` need not be sorted; must be non-empty.
    pub fn from_scores(scores: &[f64], band: PruneBand) -> Self {
        let mut s = scores.to_vec();
        s.sort_by(f64::total_cmp);
        BandBounds {
            low: (band.low > 0.0).then(|| nearest_rank(&s, band.low)),
            high: nearest_rank(&s, band.high),
        }
    }

    pub fn contains(&self, score: f64) -> bool {
        self.low.is_none_or(|l| score > l) && score <= self.high
    }
}

/// Keeps records whose difficulty lies in `(P(low), P(high)]`, percentiles
/// taken per task. Survivors keep their input order.
pub fn prune(records: Vec<TaskRecord>, band: PruneBand) -> Result<Vec<TaskRecord>, EmptyBandError> {
    let mut scores: BTreeMap<TaskKind, Vec<f64>> = BTreeMap::new();
    for r in &records {
        scores.entry(r.task).or_default().push(r.difficulty);
    }
    let bounds: HashMap<TaskKind, BandBounds> = scores
        .iter()
        .map(|(&task, s)| (task, BandBounds::from_scores(s, band)))
        .collect();
    let mut kept_per_task: BTreeMap<TaskKind, usize> = scores.keys().map(|&t| (t, 0)).collect();
    let kept: Vec<TaskRecord> = records
        .into_iter()
        .filter(|r| {
            let keep = bounds[&r.task].contains(r.difficulty);
            if keep {
                *kept_per_task.get_mut(&r.task).unwrap() += 1;
            }
            keep
        })
        .collect();
    let empty: Vec<TaskKind> = kept_per_task
        .into_iter()
        .filter(|&(_, n)| n == 0)
        .map(|(t, _)| t)
        .collect();
    if empty.is_empty() {
        Ok(kept)
    } else {
        Err(EmptyBandError { tasks: empty })
    }
}

/// Canonical SMILES of the molecule a record is about; the source string
/// itself if it no longer parses.
pub fn source_canonical(record: &TaskRecord) -> String {
    let mol = match record.task {
        TaskKind::FragmentAssembly => assemble_serialized(&record.source_smiles).ok(),
        _ => parse(&record.source_smiles).ok(),
    };
    mol.map(|m| canonicalize(&m))
        .unwrap_or_else(|| record.source_smiles.clone())
}

/// Stable ascending sort by (difficulty, canonical source).
pub fn curriculum_sort(records: Vec<TaskRecord>) -> Vec<TaskRecord> {
    let keys: Vec<String> = records.par_iter().map(source_canonical).collect();
    sort_keyed(keys.into_iter().zip(records).collect())
        .into_iter()
        .map(|(_, r)| r)
        .collect()
}

/// [`curriculum_sort`] with the canonical keys already known.
pub(crate) fn sort_keyed(mut keyed: Vec<(String, TaskRecord)>) -> Vec<(String, TaskRecord)> {
    keyed.sort_by(|(ka, a), (kb, b)| {
        a.difficulty
            .total_cmp(&b.difficulty)
            .then_with(|| ka.cmp(kb))
    });
    keyed
}

/// Groups records into per-task blocks in the fixed task order, keeping
/// relative order inside each block. With `interleave`, takes one record from
/// each block in turn instead.
pub fn arrange(records: Vec<TaskRecord>, interleave: bool) -> Vec<TaskRecord> {
    let mut blocks: BTreeMap<TaskKind, Vec<TaskRecord>> = BTreeMap::new();
    for r in records {
        blocks.entry(r.task).or_default().push(r);
    }
    if !interleave {
        return blocks.into_values().flatten().collect();
    }
    let mut iters: Vec<_> = blocks.into_values().map(Vec::into_iter).collect();
    let mut out = Vec::new();
    loop {
        let before = out.len();
        out.extend(iters.iter_mut().filter_map(Iterator::next));
        if out.len() == before {
            return out;
        }
    }
}

/// True when difficulties never decrease within any task.
pub fn is_curriculum_ordered(records: &[TaskRecord]) -> bool {
    let mut last: HashMap<TaskKind, f64> = HashMap::new();
    records.iter().all(|r| {
        let prev = last.insert(r.task, r.difficulty);
        prev.is_none_or(|p| p.total_cmp(&r.difficulty) != Ordering::Greater)
    })
}

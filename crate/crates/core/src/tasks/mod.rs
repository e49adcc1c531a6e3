//! The five instruction tasks and their record format.

mod template;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub use template::{
    parse_templates, render_prompt, PromptFields, PromptTemplate, TemplateError, TemplateSet,
};

use crate::canonical::{canonicalize, randomized_smiles};
use crate::curation::score_parsed;
use crate::fragments::{assemble_serialized, cut, enumerate_cut_bonds};
use crate::graph::{
    count_rings_of_size, longest_carbon_chain, match_pattern, FunctionalGroupPattern,
};
use crate::rng::SplitMix64;
use crate::smiles::{parse, Molecule};

/// Ring sizes sampled for ring-count questions.
pub const RING_QUERY_SIZES: std::ops::RangeInclusive<usize> = 3..=8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    FunctionalGroup,
    RingCount,
    ChainLength,
    Canonicalization,
    FragmentAssembly,
}

impl TaskKind {
    pub const ALL: [TaskKind; 5] = [
        TaskKind::FunctionalGroup,
        TaskKind::RingCount,
        TaskKind::ChainLength,
        TaskKind::Canonicalization,
        TaskKind::FragmentAssembly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::FunctionalGroup => "functional_group",
            TaskKind::RingCount => "ring_count",
            TaskKind::ChainLength => "chain_length",
            TaskKind::Canonicalization => "canonicalization",
            TaskKind::FragmentAssembly => "fragment_assembly",
        }
    }

    /// Stable numeric id, used to key RNG streams.
    pub fn id(self) -> u64 {
        self as u64
    }

    pub fn is_smiles_answer(self) -> bool {
        matches!(
            self,
            TaskKind::Canonicalization | TaskKind::FragmentAssembly
        )
    }

    pub(crate) fn required_placeholders(self) -> &'static [&'static str] {
        match self {
            TaskKind::FunctionalGroup => &["smiles", "group"],
            TaskKind::RingCount => &["smiles", "k"],
            _ => &["smiles"],
        }
    }

    pub(crate) fn allowed_placeholders(self) -> &'static [&'static str] {
        match self {
            TaskKind::FunctionalGroup => &["smiles", "group"],
            TaskKind::RingCount => &["smiles", "k"],
            TaskKind::ChainLength | TaskKind::Canonicalization => &["smiles"],
            TaskKind::FragmentAssembly => &["smiles", "frag_a", "frag_b"],
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown task {0:?}")]
pub struct UnknownTask(pub String);

impl FromStr for TaskKind {
    type Err = UnknownTask;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownTask(s.to_string()))
    }
}

/// One instruction instance. Field order is the JSONL key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: TaskKind,
    pub source_smiles: String,
    pub prompt: String,
    pub answer: String,
    pub difficulty: f64,
    pub meta: Map<String, Value>,
}

/// Why a molecule produced no record for a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Error)]
pub enum Skip {
    #[error("no functional group available on either side")]
    NoGroupAvailable,
    #[error("no acyclic carbon")]
    NoAcyclicCarbon,
    #[error("no qualifying cut bond")]
    NoQualifyingCut,
}

impl Skip {
    pub fn name(self) -> &'static str {
        match self {
            Skip::NoGroupAvailable => "no_group_available",
            Skip::NoAcyclicCarbon => "no_acyclic_carbon",
            Skip::NoQualifyingCut => "no_qualifying_cut",
        }
    }
}

/// Generates records given a group library and templates.
#[derive(Debug, Clone)]
pub struct TaskGenerator {
    pub library: Vec<FunctionalGroupPattern>,
    pub templates: TemplateSet,
}

impl TaskGenerator {
    pub fn new(library: Vec<FunctionalGroupPattern>, templates: TemplateSet) -> Self {
        assert!(!library.is_empty(), "group library must not be empty");
        TaskGenerator { library, templates }
    }

    fn finish(
        &self,
        task: TaskKind,
        fields: PromptFields,
        answer: String,
        scored: &Molecule,
        mut meta: Map<String, Value>,
    ) -> TaskRecord {
        let prompt = render_prompt(self.templates.get(task), &fields)
            .expect("validated templates resolve every task field");
        let score = score_parsed(task, &fields.smiles, scored);
        meta.insert(
            "difficulty_components".into(),
            Value::Object(
                score
                    .components
                    .iter()
                    .map(|(k, v)| (k.clone(), json!(v)))
                    .collect(),
            ),
        );
        TaskRecord {
            task,
            source_smiles: fields.smiles,
            prompt,
            answer,
            difficulty: score.value,
            meta,
        }
    }

    /// `mol` must be `parse(source)`; the source string is shown verbatim for
    /// the functional-group, ring and chain tasks.
    pub fn generate(
        &self,
        task: TaskKind,
        mol: &Molecule,
        source: &str,
        rng: &mut SplitMix64,
    ) -> Result<TaskRecord, Skip> {
        match task {
            TaskKind::FunctionalGroup => self.gen_functional_group(mol, source, rng),
            TaskKind::RingCount => Ok(self.gen_ring_count(mol, source, rng)),
            TaskKind::ChainLength => self.gen_chain_length(mol, source),
            TaskKind::Canonicalization => Ok(self.gen_canonicalization(mol, rng)),
            TaskKind::FragmentAssembly => self.gen_fragment_assembly(mol, rng),
        }
    }

    /// Picks "present" or "absent" with a fair coin and a uniform group from
    /// that side; an empty side falls back to the other, noted in `meta`.
    pub fn gen_functional_group(
        &self,
        mol: &Molecule,
        source: &str,
        rng: &mut SplitMix64,
    ) -> Result<TaskRecord, Skip> {
        let (present, absent): (Vec<&FunctionalGroupPattern>, Vec<_>) =
            self.library.iter().partition(|g| match_pattern(mol, g));
        let want_present = rng.coin();
        let (side, is_present, fallback) =
            match (want_present, present.is_empty(), absent.is_empty()) {
                (_, true, true) => return Err(Skip::NoGroupAvailable),
                (true, false, _) => (&present, true, false),
                (true, true, false) => (&absent, false, true),
                (false, _, false) => (&absent, false, false),
                (false, false, true) => (&present, true, true),
            };
        let group = side[rng.index(side.len())];
        Ok(self.functional_group_record(mol, source, group, is_present, fallback))
    }

    /// Record for a fixed group.
    pub fn functional_group_record(
        &self,
        mol: &Molecule,
        source: &str,
        group: &FunctionalGroupPattern,
        present: bool,
        fallback: bool,
    ) -> TaskRecord {
        debug_assert_eq!(present, match_pattern(mol, group));
        let mut meta = Map::new();
        meta.insert("group".into(), json!(group.name));
        meta.insert("fallback".into(), json!(fallback));
        let fields = PromptFields {
            group: Some(group.name.replace('_', " ")),
            ..PromptFields::smiles(source)
        };
        let answer = if present { "yes" } else { "no" };
        self.finish(TaskKind::FunctionalGroup, fields, answer.into(), mol, meta)
    }

    pub fn gen_ring_count(&self, mol: &Molecule, source: &str, rng: &mut SplitMix64) -> TaskRecord {
        let sizes = RING_QUERY_SIZES;
        let k = sizes.start() + rng.index(sizes.end() - sizes.start() + 1);
        self.ring_count_record(mol, source, k)
    }

    pub fn ring_count_record(&self, mol: &Molecule, source: &str, k: usize) -> TaskRecord {
        let count = count_rings_of_size(mol, k).expect("sampled sizes are in range");
        let mut meta = Map::new();
        meta.insert("k".into(), json!(k));
        let fields = PromptFields {
            k: Some(k),
            ..PromptFields::smiles(source)
        };
        self.finish(TaskKind::RingCount, fields, count.to_string(), mol, meta)
    }

    pub fn gen_chain_length(&self, mol: &Molecule, source: &str) -> Result<TaskRecord, Skip> {
        let chain = longest_carbon_chain(mol);
        if chain.length == 0 {
            return Err(Skip::NoAcyclicCarbon);
        }
        Ok(self.finish(
            TaskKind::ChainLength,
            PromptFields::smiles(source),
            chain.length.to_string(),
            mol,
            Map::new(),
        ))
    }

    pub fn gen_canonicalization(&self, mol: &Molecule, rng: &mut SplitMix64) -> TaskRecord {
        let source = randomized_smiles(mol, rng);
        self.finish(
            TaskKind::Canonicalization,
            PromptFields::smiles(source),
            canonicalize(mol),
            mol,
            Map::new(),
        )
    }

    pub fn gen_fragment_assembly(
        &self,
        mol: &Molecule,
        rng: &mut SplitMix64,
    ) -> Result<TaskRecord, Skip> {
        let cuts = enumerate_cut_bonds(mol);
        if cuts.is_empty() {
            return Err(Skip::NoQualifyingCut);
        }
        let bond = cuts[rng.index(cuts.len())];
        let pair = cut(mol, bond).expect("enumerated bonds are valid cuts");
        let frag_a = canonicalize(&pair.frag_a);
        let frag_b = canonicalize(&pair.frag_b);
        let mut meta = Map::new();
        meta.insert("frag_a".into(), json!(frag_a));
        meta.insert("frag_b".into(), json!(frag_b));
        meta.insert("cut_bond".into(), json!([pair.cut_bond.0, pair.cut_bond.1]));
        let fields = PromptFields {
            smiles: format!("{frag_a}.{frag_b}"),
            group: None,
            k: None,
            frag_a: Some(frag_a),
            frag_b: Some(frag_b),
        };
        Ok(self.finish(
            TaskKind::FragmentAssembly,
            fields,
            pair.parent_canonical,
            mol,
            meta,
        ))
    }

    /// Recomputes a record's answer from its source string and meta alone.
    pub fn regenerate_answer(&self, record: &TaskRecord) -> Result<String, RegenerateError> {
        let meta_str = |key: &str| {
            record
                .meta
                .get(key)
                .and_then(Value::as_str)
                .ok_or_else(|| RegenerateError::Meta(key.to_string()))
        };
        match record.task {
            TaskKind::FunctionalGroup => {
                let name = meta_str("group")?;
                let group = self
                    .library
                    .iter()
                    .find(|g| g.name == name)
                    .ok_or_else(|| RegenerateError::Meta("group".into()))?;
                let mol = parse(&record.source_smiles)?;
                Ok(if match_pattern(&mol, group) {
                    "yes"
                } else {
                    "no"
                }
                .into())
            }
            TaskKind::RingCount => {
                let k = record
                    .meta
                    .get("k")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| RegenerateError::Meta("k".into()))?;
                let mol = parse(&record.source_smiles)?;
                count_rings_of_size(&mol, k as usize)
                    .map(|c| c.to_string())
                    .map_err(|_| RegenerateError::Meta("k".into()))
            }
            TaskKind::ChainLength => Ok(longest_carbon_chain(&parse(&record.source_smiles)?)
                .length
                .to_string()),
            TaskKind::Canonicalization => Ok(canonicalize(&parse(&record.source_smiles)?)),
            TaskKind::FragmentAssembly => {
                let mol = assemble_serialized(&record.source_smiles)
                    .map_err(|e| RegenerateError::Fragment(e.to_string()))?;
                Ok(canonicalize(&mol))
            }
        }
    }
}

impl Default for TaskGenerator {
    fn default() -> Self {
        TaskGenerator::new(crate::graph::default_library(), TemplateSet::default_set())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegenerateError {
    #[error("record meta lacks a valid {0:?}")]
    Meta(String),
    #[error(transparent)]
    Smiles(#[from] crate::smiles::SmilesError),
    #[error("fragment assembly failed: {0}")]
    Fragment(String),
}

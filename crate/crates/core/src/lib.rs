//! Deterministic SMILES parsing tasks: a SMILES reader/writer, molecular graph
//! analysis (rings, chains, functional groups), canonical ranking, fragment
//! cutting and assembly, instruction-record generation, difficulty-based
//! curation, dataset building and accuracy scoring.

pub mod canonical;
pub mod curation;
pub mod dataset;
pub mod element;
pub mod eval;
pub mod fragments;
pub mod graph;
pub mod rng;
pub mod smiles;
pub mod synth;
pub mod tasks;

pub use canonical::{canonical_ranks, canonicalize, randomized_smiles, AtomRanking};
pub use element::Element;
pub use rng::SplitMix64;
pub use smiles::{
    parse, parse_fragments, tokenize, write, Atom, Bond, BondOrder, Molecule, SmilesError,
};
pub use tasks::{TaskKind, TaskRecord};

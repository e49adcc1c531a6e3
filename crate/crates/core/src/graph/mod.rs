//! Ring perception, carbon chains and functional-group matching.

mod chain;
mod pattern;
mod rings;

pub use chain::{longest_carbon_chain, ChainResult};
pub use pattern::{
    default_library, find_match, load_group_library, match_pattern, parse_group_library,
    AtomConstraint, BondConstraint, ConfigError, FunctionalGroupPattern, MAX_PATTERN_ATOMS,
};
pub use rings::{
    count_in, count_rings_of_size, perceive_rings, RangeError, RingSet, MAX_QUERY_RING,
    MIN_QUERY_RING,
};

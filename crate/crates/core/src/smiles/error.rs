use std::fmt;

use thiserror::Error;

/// Failure while reading or validating a SMILES string. Every variant carries
/// the 0-based character offset it refers to.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("lex error at offset {offset}: unexpected character {found:?}")]
    Lex { offset: usize, found: char },
    #[error("unsupported stereochemistry marker {marker:?} at offset {offset}")]
    Stereo { offset: usize, marker: char },
    #[error("parse error at offset {offset}: {kind}")]
    Parse { offset: usize, kind: ParseErrorKind },
    #[error(
        "valence error at offset {offset}: atom {atom} ({element}) has bond order sum {bond_sum}"
    )]
    Valence {
        offset: usize,
        atom: usize,
        element: String,
        bond_sum: u8,
    },
}

impl SmilesError {
    pub fn offset(&self) -> usize {
        match self {
            SmilesError::Lex { offset, .. }
            | SmilesError::Stereo { offset, .. }
            | SmilesError::Parse { offset, .. }
            | SmilesError::Valence { offset, .. } => *offset,
        }
    }

    pub(crate) fn parse(offset: usize, kind: ParseErrorKind) -> Self {
        SmilesError::Parse { offset, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnclosedBracket,
    InvalidBracketAtom(String),
    UnmatchedRingClosure(u8),
    UnbalancedOpenParen,
    UnbalancedCloseParen,
    EmptyBranch,
    DanglingBond,
    BondWithoutAtom,
    ConsecutiveBonds,
    ConflictingRingBond(u8),
    DuplicateBond,
    SelfBond,
    DotDisconnected,
    AromaticBondOnAliphaticAtom,
    AromaticOutsideRing,
    AromaticNotAllowed(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            Empty => write!(f, "empty input"),
            UnclosedBracket => write!(f, "unclosed '['"),
            InvalidBracketAtom(s) => write!(f, "invalid bracket atom [{s}]"),
            UnmatchedRingClosure(l) => write!(f, "ring closure {l} is never closed"),
            UnbalancedOpenParen => write!(f, "'(' without matching ')'"),
            UnbalancedCloseParen => write!(f, "')' without matching '('"),
            EmptyBranch => write!(f, "empty branch"),
            DanglingBond => write!(f, "bond symbol not followed by an atom"),
            BondWithoutAtom => write!(f, "bond symbol without a preceding atom"),
            ConsecutiveBonds => write!(f, "two consecutive bond symbols"),
            ConflictingRingBond(l) => write!(f, "conflicting bond symbols on ring closure {l}"),
            DuplicateBond => write!(f, "atoms are already bonded"),
            SelfBond => write!(f, "ring closure bonds an atom to itself"),
            DotDisconnected => write!(f, "'.' (disconnected structure) not allowed here"),
            AromaticBondOnAliphaticAtom => write!(f, "aromatic bond between non-aromatic atoms"),
            AromaticOutsideRing => write!(f, "aromatic atom is not in a ring"),
            AromaticNotAllowed(s) => write!(f, "element {s} cannot be aromatic"),
        }
    }
}

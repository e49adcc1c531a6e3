//! Reading and writing SMILES.

mod error;
mod molecule;
mod parse;
mod token;
mod write;

pub use error::{ParseErrorKind, SmilesError};
pub use molecule::{Atom, AtomSpec, Bond, BondOrder, Molecule, MoleculeBuilder};
pub use parse::{parse, parse_fragments};
pub use token::{tokenize, Token, TokenKind};
pub use write::{write, OrderError};

use std::collections::BTreeMap;

use super::error::{ParseErrorKind, SmilesError};
use super::molecule::{AtomSpec, BondOrder, Molecule, MoleculeBuilder};
use super::token::{tokenize, Token, TokenKind};
use crate::element::Element;

/// Parses a single connected molecule. A `.` is rejected.
pub fn parse(text: &str) -> Result<Molecule, SmilesError> {
    parse_with(text, false)
}

/// Parses a string that may contain several `.`-separated components, as
/// used for fragment pairs.
pub fn parse_fragments(text: &str) -> Result<Molecule, SmilesError> {
    parse_with(text, true)
}

fn bond_symbol(text: &str) -> BondOrder {
    match text {
        "=" => BondOrder::Double,
        "#" => BondOrder::Triple,
        ":" => BondOrder::Aromatic,
        _ => BondOrder::Single,
    }
}

struct RingOpening {
    atom: usize,
    order: Option<BondOrder>,
    offset: usize,
}

fn parse_with(text: &str, allow_dot: bool) -> Result<Molecule, SmilesError> {
    if text.is_empty() {
        return Err(SmilesError::parse(0, ParseErrorKind::Empty));
    }
    let tokens = tokenize(text)?;
    let mut builder = MoleculeBuilder::new();
    let mut prev: Option<usize> = None;
    let mut pending: Option<(BondOrder, usize)> = None;
    // atom at '(' plus offset of the '('
    let mut branches: Vec<(usize, usize)> = Vec::new();
    let mut rings: BTreeMap<u8, RingOpening> = BTreeMap::new();
    let mut last_kind: Option<TokenKind> = None;

    for tok in &tokens {
        let at = tok.position;
        match tok.kind {
            TokenKind::OrganicAtom | TokenKind::BracketAtom => {
                let spec = if tok.kind == TokenKind::OrganicAtom {
                    organic_spec(tok)
                } else {
                    bracket_spec(tok)?
                };
                let idx = builder.add_atom_at(spec, at);
                if let Some(p) = prev {
                    let order = match pending.take() {
                        Some((o, _)) => o,
                        None => default_order(b_aromatic(&builder, p), b_aromatic(&builder, idx)),
                    };
                    builder
                        .add_bond(p, idx, order)
                        .map_err(|k| SmilesError::parse(at, k))?;
                }
                prev = Some(idx);
            }
            TokenKind::Bond => {
                if prev.is_none() {
                    return Err(SmilesError::parse(at, ParseErrorKind::BondWithoutAtom));
                }
                if pending.is_some() {
                    return Err(SmilesError::parse(at, ParseErrorKind::ConsecutiveBonds));
                }
                pending = Some((bond_symbol(tok.text), at));
            }
            TokenKind::BranchOpen => {
                let Some(p) = prev else {
                    return Err(SmilesError::parse(at, ParseErrorKind::BondWithoutAtom));
                };
                if let Some((_, off)) = pending {
                    return Err(SmilesError::parse(off, ParseErrorKind::DanglingBond));
                }
                branches.push((p, at));
            }
            TokenKind::BranchClose => {
                if last_kind == Some(TokenKind::BranchOpen) {
                    return Err(SmilesError::parse(at, ParseErrorKind::EmptyBranch));
                }
                if let Some((_, off)) = pending {
                    return Err(SmilesError::parse(off, ParseErrorKind::DanglingBond));
                }
                let Some((p, _)) = branches.pop() else {
                    return Err(SmilesError::parse(at, ParseErrorKind::UnbalancedCloseParen));
                };
                prev = Some(p);
            }
            TokenKind::RingBond => {
                let Some(p) = prev else {
                    return Err(SmilesError::parse(at, ParseErrorKind::BondWithoutAtom));
                };
                let label = tok
                    .ring_label()
                    .expect("lexer only emits numeric ring labels");
                let here = pending.take().map(|(o, _)| o);
                match rings.remove(&label) {
                    Some(open) => {
                        let order = match (open.order, here) {
                            (Some(a), Some(b)) if a != b => {
                                return Err(SmilesError::parse(
                                    at,
                                    ParseErrorKind::ConflictingRingBond(label),
                                ))
                            }
                            (Some(a), _) | (None, Some(a)) => a,
                            (None, None) => default_order(
                                b_aromatic(&builder, open.atom),
                                b_aromatic(&builder, p),
                            ),
                        };
                        builder
                            .add_bond(open.atom, p, order)
                            .map_err(|k| SmilesError::parse(at, k))?;
                    }
                    None => {
                        rings.insert(
                            label,
                            RingOpening {
                                atom: p,
                                order: here,
                                offset: at,
                            },
                        );
                    }
                }
            }
            TokenKind::Dot => {
                if !allow_dot {
                    return Err(SmilesError::parse(at, ParseErrorKind::DotDisconnected));
                }
                if prev.is_none() {
                    return Err(SmilesError::parse(at, ParseErrorKind::BondWithoutAtom));
                }
                if let Some((_, off)) = pending {
                    return Err(SmilesError::parse(off, ParseErrorKind::DanglingBond));
                }
                if let Some(&(_, off)) = branches.last() {
                    return Err(SmilesError::parse(off, ParseErrorKind::UnbalancedOpenParen));
                }
                prev = None;
            }
        }
        last_kind = Some(tok.kind);
    }
    if let Some((_, off)) = pending {
        return Err(SmilesError::parse(off, ParseErrorKind::DanglingBond));
    }
    if let Some(&(_, off)) = branches.last() {
        return Err(SmilesError::parse(off, ParseErrorKind::UnbalancedOpenParen));
    }
    if let Some(open) = rings.values().min_by_key(|o| o.offset) {
        let label = rings
            .iter()
            .find(|(_, o)| o.offset == open.offset)
            .map(|(l, _)| *l)
            .unwrap_or_default();
        return Err(SmilesError::parse(
            open.offset,
            ParseErrorKind::UnmatchedRingClosure(label),
        ));
    }
    if last_kind == Some(TokenKind::Dot) {
        return Err(SmilesError::parse(
            text.len() - 1,
            ParseErrorKind::DanglingBond,
        ));
    }
    builder.build()
}

fn b_aromatic(builder: &MoleculeBuilder, i: usize) -> bool {
    builder.atom_spec(i).aromatic
}

fn default_order(a_aromatic: bool, b_aromatic: bool) -> BondOrder {
    if a_aromatic && b_aromatic {
        BondOrder::Aromatic
    } else {
        BondOrder::Single
    }
}

fn organic_spec(tok: &Token<'_>) -> AtomSpec {
    let aromatic = tok.text.chars().all(|c| c.is_ascii_lowercase());
    if tok.text == "*" {
        return AtomSpec::wildcard();
    }
    let symbol = capitalize(tok.text);
    let element = Element::from_symbol(&symbol).expect("lexer only emits organic symbols");
    AtomSpec::organic(element, aromatic)
}

fn capitalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    if let Some(c) = chars.next() {
        out.push(c.to_ascii_uppercase());
    }
    out.extend(chars);
    out
}

/// `[` isotope? symbol hcount? charge? `]`
fn bracket_spec(tok: &Token<'_>) -> Result<AtomSpec, SmilesError> {
    let inner = &tok.text[1..tok.text.len() - 1];
    let invalid = || {
        SmilesError::parse(
            tok.position,
            ParseErrorKind::InvalidBracketAtom(inner.to_string()),
        )
    };
    let bytes = inner.as_bytes();

    let digits_end = |from: usize| {
        from + bytes[from..]
            .iter()
            .take_while(|b| b.is_ascii_digit())
            .count()
    };

    let iso_end = digits_end(0);
    let isotope = if iso_end > 0 {
        Some(inner[..iso_end].parse::<u16>().map_err(|_| invalid())?)
    } else {
        None
    };
    let mut i = iso_end;

    let (element, aromatic, len) = bracket_symbol(&inner[i..]).ok_or_else(invalid)?;
    i += len;

    let mut hcount = 0u8;
    if bytes.get(i) == Some(&b'H') {
        i += 1;
        let end = digits_end(i);
        hcount = if end > i {
            inner[i..end].parse().map_err(|_| invalid())?
        } else {
            1
        };
        i = end;
    }

    let mut charge: i32 = 0;
    if let Some(&sign) = bytes.get(i).filter(|b| **b == b'+' || **b == b'-') {
        let unit = if sign == b'+' { 1 } else { -1 };
        i += 1;
        let end = digits_end(i);
        if end > i {
            charge = unit * inner[i..end].parse::<i32>().map_err(|_| invalid())?;
            i = end;
        } else {
            charge = unit;
            while bytes.get(i) == Some(&sign) {
                charge += unit;
                i += 1;
            }
        }
    }
    if i != bytes.len() || !(-15..=15).contains(&charge) {
        return Err(invalid());
    }
    if element.is_wildcard() && (hcount != 0 || charge != 0) {
        return Err(invalid());
    }
    Ok(AtomSpec {
        element,
        aromatic,
        formal_charge: charge as i8,
        isotope,
        explicit_h: Some(hcount),
    })
}

fn bracket_symbol(s: &str) -> Option<(Element, bool, usize)> {
    let bytes = s.as_bytes();
    let first = *bytes.first()?;
    if first == b'*' {
        return Some((Element::WILDCARD, false, 1));
    }
    if first.is_ascii_lowercase() {
        for sym in ["se", "as", "b", "c", "n", "o", "p", "s"] {
            if s.starts_with(sym) {
                return Some((Element::from_symbol(&capitalize(sym))?, true, sym.len()));
            }
        }
        return None;
    }
    if !first.is_ascii_uppercase() {
        return None;
    }
    if let Some(&second) = bytes.get(1).filter(|b| b.is_ascii_lowercase()) {
        let two = [first as char, second as char].iter().collect::<String>();
        if let Some(e) = Element::from_symbol(&two) {
            return Some((e, false, 2));
        }
    }
    Element::from_symbol(&(first as char).to_string()).map(|e| (e, false, 1))
}

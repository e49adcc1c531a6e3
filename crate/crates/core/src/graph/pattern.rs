use std::collections::HashSet;
use std::path::Path;

use thiserror::Error;

use crate::element::Element;
use crate::smiles::{BondOrder, Molecule};

pub const MAX_PATTERN_ATOMS: usize = 8;

const DEFAULT_LIBRARY: &str = include_str!("../../data/groups.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("group library line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomConstraint {
    /// Allowed elements; empty means any.
    pub elements: Vec<Element>,
    pub aromatic: Option<bool>,
    pub charge: Option<i8>,
    pub min_degree: usize,
    pub max_degree: Option<usize>,
    pub min_h: Option<u8>,
    pub max_h: Option<u8>,
}

impl Default for AtomConstraint {
    fn default() -> Self {
        AtomConstraint {
            elements: Vec::new(),
            aromatic: None,
            charge: Some(0),
            min_degree: 0,
            max_degree: None,
            min_h: None,
            max_h: None,
        }
    }
}

impl AtomConstraint {
    pub fn matches(&self, mol: &Molecule, i: usize) -> bool {
        let atom = mol.atom(i);
        let degree = mol.degree(i);
        let h = atom.total_h();
        (self.elements.is_empty() || self.elements.contains(&atom.element))
            && self.aromatic.is_none_or(|a| a == atom.aromatic)
            && self.charge.is_none_or(|c| c == atom.formal_charge)
            && degree >= self.min_degree
            && self.max_degree.is_none_or(|d| degree <= d)
            && self.min_h.is_none_or(|m| h >= m)
            && self.max_h.is_none_or(|m| h <= m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondConstraint {
    pub a: usize,
    pub b: usize,
    /// `None` accepts any order.
    pub order: Option<BondOrder>,
}

/// A named structural motif: atom constraints plus the bonds among them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalGroupPattern {
    pub name: String,
    pub atoms: Vec<AtomConstraint>,
    pub bonds: Vec<BondConstraint>,
}

impl FunctionalGroupPattern {
    fn validate(&self) -> Result<(), String> {
        if self.atoms.is_empty() || self.atoms.len() > MAX_PATTERN_ATOMS {
            return Err(format!(
                "pattern {} must have 1..={MAX_PATTERN_ATOMS} atoms, has {}",
                self.name,
                self.atoms.len()
            ));
        }
        let mut pairs = HashSet::new();
        for bond in &self.bonds {
            if bond.a >= self.atoms.len() || bond.b >= self.atoms.len() {
                return Err(format!(
                    "bond {}-{} refers to a missing atom",
                    bond.a, bond.b
                ));
            }
            if bond.a == bond.b || !pairs.insert((bond.a.min(bond.b), bond.a.max(bond.b))) {
                return Err(format!(
                    "bond {}-{} is a self or duplicate bond",
                    bond.a, bond.b
                ));
            }
        }
        let mut seen = vec![false; self.atoms.len()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for bond in &self.bonds {
                for (x, y) in [(bond.a, bond.b), (bond.b, bond.a)] {
                    if x == u && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(format!("pattern {} is not connected", self.name));
        }
        Ok(())
    }
}

/// True iff some injective map of pattern atoms onto molecule atoms satisfies
/// every atom and bond constraint.
pub fn match_pattern(mol: &Molecule, pattern: &FunctionalGroupPattern) -> bool {
    find_match(mol, pattern).is_some()
}

/// Backtracking search. Pattern atoms are placed rarest first (fewest
/// molecule atoms satisfying the constraint), then by growing the matched
/// region through pattern bonds, again preferring the rarest frontier atom.
pub fn find_match(mol: &Molecule, pattern: &FunctionalGroupPattern) -> Option<Vec<usize>> {
    let k = pattern.atoms.len();
    let candidates: Vec<Vec<usize>> = pattern
        .atoms
        .iter()
        .map(|c| {
            (0..mol.atom_count())
                .filter(|&i| c.matches(mol, i))
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let bond_to = |p: usize, q: usize| {
        pattern
            .bonds
            .iter()
            .find(|b| (b.a == p && b.b == q) || (b.a == q && b.b == p))
    };

    // placement order with an anchor (already placed pattern neighbor) per step
    let mut order: Vec<(usize, Option<usize>)> = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    let first = (0..k).min_by_key(|&p| (candidates[p].len(), p)).unwrap();
    order.push((first, None));
    placed[first] = true;
    while order.len() < k {
        let next = (0..k)
            .filter(|&p| !placed[p])
            .filter_map(|p| {
                order
                    .iter()
                    .find(|(q, _)| bond_to(p, *q).is_some())
                    .map(|&(q, _)| (p, q))
            })
            .min_by_key(|&(p, _)| (candidates[p].len(), p))?;
        placed[next.0] = true;
        order.push((next.0, Some(next.1)));
    }

    let mut mapping = vec![usize::MAX; k];
    let mut used = vec![false; mol.atom_count()];
    if extend(mol, pattern, &order, 0, &mut mapping, &mut used, &bond_to) {
        Some(mapping)
    } else {
        None
    }
}

fn extend<'p>(
    mol: &Molecule,
    pattern: &'p FunctionalGroupPattern,
    order: &[(usize, Option<usize>)],
    depth: usize,
    mapping: &mut Vec<usize>,
    used: &mut Vec<bool>,
    bond_to: &dyn Fn(usize, usize) -> Option<&'p BondConstraint>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let (p, anchor) = order[depth];
    let pool: Vec<usize> = match anchor {
        Some(q) => mol.neighbors(mapping[q]).iter().map(|&(v, _)| v).collect(),
        None => (0..mol.atom_count()).collect(),
    };
    for m in pool {
        if used[m] || !pattern.atoms[p].matches(mol, m) {
            continue;
        }
        let consistent = order[..depth].iter().all(|&(q, _)| match bond_to(p, q) {
            None => true,
            Some(bc) => mol
                .bond_between(m, mapping[q])
                .is_some_and(|bond| bc.order.is_none_or(|o| o == bond.order)),
        });
        if !consistent {
            continue;
        }
        mapping[p] = m;
        used[m] = true;
        if extend(mol, pattern, order, depth + 1, mapping, used, bond_to) {
            return true;
        }
        used[m] = false;
        mapping[p] = usize::MAX;
    }
    false
}

pub fn default_library() -> Vec<FunctionalGroupPattern> {
    parse_group_library(DEFAULT_LIBRARY).expect("embedded group library is valid")
}

pub fn load_group_library(
    path: impl AsRef<Path>,
) -> Result<Vec<FunctionalGroupPattern>, ConfigError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| ConfigError {
        line: 0,
        message: format!("cannot read {}: {e}", path.as_ref().display()),
    })?;
    parse_group_library(&text)
}

/// Parses the block format:
///
/// ```text
/// # comment
/// [carboxylic_acid]
/// atom = C aromatic=false
/// atom = O max_degree=1
/// atom = O h=1 max_degree=1
/// bond = 0 1 double
/// bond = 0 2 single
/// ```
///
/// The first token of `atom` is `any` or `|`-separated element symbols.
/// Attributes: `aromatic=true|false|any`, `charge=<int>|any` (default 0),
/// `min_degree`, `max_degree`, `h` (exact total hydrogens), `min_h`, `max_h`.
/// Bond orders: `single`, `double`, `triple`, `aromatic`, `any`.
pub fn parse_group_library(text: &str) -> Result<Vec<FunctionalGroupPattern>, ConfigError> {
    let mut groups: Vec<(FunctionalGroupPattern, usize)> = Vec::new();
    let err = |line: usize, message: String| ConfigError { line, message };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
            {
                return Err(err(line_no, format!("invalid group name {name:?}")));
            }
            if groups.iter().any(|(g, _)| g.name == name) {
                return Err(err(line_no, format!("duplicate group name {name}")));
            }
            groups.push((
                FunctionalGroupPattern {
                    name: name.to_string(),
                    atoms: Vec::new(),
                    bonds: Vec::new(),
                },
                line_no,
            ));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(
                line_no,
                format!("expected `key = value`, got {line:?}"),
            ));
        };
        let Some((group, _)) = groups.last_mut() else {
            return Err(err(line_no, "entry before the first [group] header".into()));
        };
        match key.trim() {
            "atom" => group
                .atoms
                .push(parse_atom(value.trim()).map_err(|m| err(line_no, m))?),
            "bond" => group
                .bonds
                .push(parse_bond(value.trim()).map_err(|m| err(line_no, m))?),
            other => return Err(err(line_no, format!("unknown key {other:?}"))),
        }
    }
    if groups.is_empty() {
        return Err(err(text.lines().count().max(1), "no groups defined".into()));
    }
    groups
        .into_iter()
        .map(|(g, line)| g.validate().map(|_| g).map_err(|m| err(line, m)))
        .collect()
}

fn parse_atom(value: &str) -> Result<AtomConstraint, String> {
    let mut parts = value.split_whitespace();
    let elements = parts.next().ok_or("atom needs an element")?;
    let mut c = AtomConstraint::default();
    if elements != "any" {
        c.elements = elements
            .split('|')
            .map(|s| Element::from_symbol(s).ok_or_else(|| format!("unknown element {s:?}")))
            .collect::<Result<_, _>>()?;
    }
    for attr in parts {
        let (k, v) = attr
            .split_once('=')
            .ok_or_else(|| format!("expected attr=value, got {attr:?}"))?;
        let num = |v: &str| {
            v.parse::<u8>()
                .map_err(|_| format!("bad number {v:?} for {k}"))
        };
        match k {
            "aromatic" => {
                c.aromatic = match v {
                    "true" => Some(true),
                    "false" => Some(false),
                    "any" => None,
                    _ => return Err(format!("bad aromatic value {v:?}")),
                }
            }
            "charge" => {
                c.charge = if v == "any" {
                    None
                } else {
                    Some(v.parse().map_err(|_| format!("bad charge {v:?}"))?)
                }
            }
            "min_degree" => c.min_degree = num(v)?.into(),
            "max_degree" => c.max_degree = Some(num(v)?.into()),
            "h" => {
                let h = num(v)?;
                c.min_h = Some(h);
                c.max_h = Some(h);
            }
            "min_h" => c.min_h = Some(num(v)?),
            "max_h" => c.max_h = Some(num(v)?),
            _ => return Err(format!("unknown atom attribute {k:?}")),
        }
    }
    Ok(c)
}

fn parse_bond(value: &str) -> Result<BondConstraint, String> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let [a, b, order] = parts.as_slice() else {
        return Err(format!("bond needs `i j order`, got {value:?}"));
    };
    let idx = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| format!("bad atom index {s:?}"))
    };
    let order = match *order {
        "single" => Some(BondOrder::Single),
        "double" => Some(BondOrder::Double),
        "triple" => Some(BondOrder::Triple),
        "aromatic" => Some(BondOrder::Aromatic),
        "any" => None,
        o => return Err(format!("unknown bond order {o:?}")),
    };
    Ok(BondConstraint {
        a: idx(a)?,
        b: idx(b)?,
        order,
    })
}

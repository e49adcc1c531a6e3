use std::collections::HashSet;

use super::error::{ParseErrorKind, SmilesError};
use crate::element::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Integer contribution outside aromatic systems.
    pub fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    pub formal_charge: i8,
    pub isotope: Option<u16>,
    /// Hydrogen count written inside brackets; `Some` exactly for bracket atoms.
    pub explicit_h: Option<u8>,
    pub implicit_h: u8,
    pub index: usize,
}

impl Atom {
    pub fn is_bracket(&self) -> bool {
        self.explicit_h.is_some()
    }

    pub fn total_h(&self) -> u8 {
        self.explicit_h.unwrap_or(0) + self.implicit_h
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub in_ring: bool,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if atom == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// An immutable molecular graph. Atom indices follow the order in which the
/// atoms were added (for parsed molecules, the SMILES writing order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Molecule {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// `(neighbor, bond index)` pairs of atom `i`, in bond creation order.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|(n, _)| *n == b)
            .map(|&(_, bi)| &self.bonds[bi])
    }

    pub fn atom_in_ring(&self, i: usize) -> bool {
        self.adjacency[i]
            .iter()
            .any(|&(_, b)| self.bonds[b].in_ring)
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.element.is_heavy()).count()
    }

    /// Connected components as sorted atom-index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.atoms.is_empty() || self.components().len() == 1
    }

    /// Copies the atoms in `keep` (and the bonds among them) into a new builder.
    /// Returns the builder together with the old→new index map.
    pub fn to_builder(&self, keep: &[usize]) -> (MoleculeBuilder, Vec<Option<usize>>) {
        let mut map = vec![None; self.atoms.len()];
        let mut builder = MoleculeBuilder::new();
        for &i in keep {
            map[i] = Some(builder.add_atom(AtomSpec::from(&self.atoms[i])));
        }
        for bond in &self.bonds {
            if let (Some(a), Some(b)) = (map[bond.a], map[bond.b]) {
                builder
                    .add_bond(a, b, bond.order)
                    .expect("bonds of a valid molecule are unique");
            }
        }
        (builder, map)
    }

    /// Hydrogen count an unbracketed atom with this element, aromaticity and
    /// bonding would receive, or `None` if it cannot be written unbracketed.
    pub(crate) fn organic_implicit_h(&self, i: usize) -> Option<u8> {
        let atom = &self.atoms[i];
        if !atom.element.is_organic_subset() {
            return None;
        }
        let (aromatic_bonds, other) = bond_sums(&self.bonds, &self.adjacency[i]);
        fill_hydrogens(atom.element, atom.aromatic, aromatic_bonds, other)
    }
}

fn bond_sums(bonds: &[Bond], adjacency: &[(usize, usize)]) -> (u8, u8) {
    let mut aromatic = 0u8;
    let mut other = 0u8;
    for &(_, b) in adjacency {
        match bonds[b].order {
            BondOrder::Aromatic => aromatic += 1,
            o => other += o.valence(),
        }
    }
    (aromatic, other)
}

/// Implicit hydrogens for an organic-subset atom: lowest default valence at or
/// above the bond-order sum, minus that sum. An aromatic atom counts each
/// aromatic bond as 1 plus one extra for the delocalized system; O, S and Se
/// never take the extra, and other atoms drop it when no valence admits it.
pub(crate) fn fill_hydrogens(
    element: Element,
    aromatic: bool,
    aromatic_bonds: u8,
    other: u8,
) -> Option<u8> {
    let base = aromatic_bonds + other;
    let fill = |sum: u8| -> Option<u8> {
        let limit = element.fill_limit()?;
        let valences = element.default_valences();
        if let Some(v) = valences.iter().find(|&&v| v >= sum && v <= limit) {
            Some(v - sum)
        } else if valences.contains(&sum) {
            Some(0)
        } else {
            None
        }
    };
    if aromatic && aromatic_bonds > 0 {
        let donor = matches!(element, Element::O | Element::S | Element::SE);
        if !donor {
            if let Some(h) = fill(base + 1) {
                return Some(h);
            }
        }
    }
    fill(base)
}

/// Atom description accepted by [`MoleculeBuilder`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSpec {
    pub element: Element,
    pub aromatic: bool,
    pub formal_charge: i8,
    pub isotope: Option<u16>,
    /// `None` for organic-subset atoms whose hydrogens are inferred.
    pub explicit_h: Option<u8>,
}

impl AtomSpec {
    pub fn organic(element: Element, aromatic: bool) -> Self {
        AtomSpec {
            element,
            aromatic,
            formal_charge: 0,
            isotope: None,
            explicit_h: None,
        }
    }

    pub fn wildcard() -> Self {
        AtomSpec {
            element: Element::WILDCARD,
            aromatic: false,
            formal_charge: 0,
            isotope: None,
            explicit_h: Some(0),
        }
    }
}

impl From<&Atom> for AtomSpec {
    fn from(a: &Atom) -> Self {
        AtomSpec {
            element: a.element,
            aromatic: a.aromatic,
            formal_charge: a.formal_charge,
            isotope: a.isotope,
            explicit_h: a.explicit_h,
        }
    }
}

/// Incremental construction of a [`Molecule`]; `build` assigns implicit
/// hydrogens, flags ring bonds and validates valences.
#[derive(Debug, Clone, Default)]
pub struct MoleculeBuilder {
    atoms: Vec<AtomSpec>,
    offsets: Vec<usize>,
    bonds: Vec<(usize, usize, BondOrder)>,
    pairs: HashSet<(usize, usize)>,
}

impl MoleculeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn add_atom(&mut self, spec: AtomSpec) -> usize {
        let offset = self.atoms.len();
        self.add_atom_at(spec, offset)
    }

    pub(crate) fn add_atom_at(&mut self, spec: AtomSpec, offset: usize) -> usize {
        self.atoms.push(spec);
        self.offsets.push(offset);
        self.atoms.len() - 1
    }

    pub fn atom_spec(&self, i: usize) -> &AtomSpec {
        &self.atoms[i]
    }

    pub fn has_bond(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a.min(b), a.max(b)))
    }

    /// Adds a bond; rejects self bonds and duplicates.
    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<(), ParseErrorKind> {
        if a == b {
            return Err(ParseErrorKind::SelfBond);
        }
        if !self.pairs.insert((a.min(b), a.max(b))) {
            return Err(ParseErrorKind::DuplicateBond);
        }
        self.bonds.push((a, b, order));
        Ok(())
    }

    pub fn build(self) -> Result<Molecule, SmilesError> {
        let n = self.atoms.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut bonds = Vec::with_capacity(self.bonds.len());
        for (i, &(a, b, order)) in self.bonds.iter().enumerate() {
            if order == BondOrder::Aromatic && !(self.atoms[a].aromatic && self.atoms[b].aromatic) {
                return Err(SmilesError::parse(
                    self.offsets[a.max(b)],
                    ParseErrorKind::AromaticBondOnAliphaticAtom,
                ));
            }
            adjacency[a].push((b, i));
            adjacency[b].push((a, i));
            bonds.push(Bond {
                a,
                b,
                order,
                in_ring: false,
            });
        }
        for bridge_free in ring_bonds(n, &bonds, &adjacency) {
            bonds[bridge_free].in_ring = true;
        }

        let mut atoms = Vec::with_capacity(n);
        for (i, spec) in self.atoms.into_iter().enumerate() {
            let offset = self.offsets[i];
            if spec.aromatic && !spec.element.is_aromatic_eligible() {
                return Err(SmilesError::parse(
                    offset,
                    ParseErrorKind::AromaticNotAllowed(spec.element.symbol().to_string()),
                ));
            }
            if spec.aromatic && !adjacency[i].iter().any(|&(_, b)| bonds[b].in_ring) {
                return Err(SmilesError::parse(
                    offset,
                    ParseErrorKind::AromaticOutsideRing,
                ));
            }
            let (aromatic_bonds, other) = bond_sums(&bonds, &adjacency[i]);
            let valence_error = |bond_sum| SmilesError::Valence {
                offset,
                atom: i,
                element: spec.element.symbol().to_string(),
                bond_sum,
            };
            let implicit_h = match spec.explicit_h {
                None => fill_hydrogens(spec.element, spec.aromatic, aromatic_bonds, other)
                    .ok_or_else(|| valence_error(aromatic_bonds + other))?,
                Some(h) => {
                    let sum = aromatic_bonds + other + h;
                    if let Some(allowed) = spec.element.charged_valences(spec.formal_charge) {
                        if allowed.last().is_some_and(|&max| sum > max) {
                            return Err(valence_error(aromatic_bonds + other));
                        }
                    }
                    0
                }
            };
            atoms.push(Atom {
                element: spec.element,
                aromatic: spec.aromatic,
                formal_charge: spec.formal_charge,
                isotope: spec.isotope,
                explicit_h: spec.explicit_h,
                implicit_h,
                index: i,
            });
        }
        Ok(Molecule {
            atoms,
            bonds,
            adjacency,
        })
    }
}

/// Indices of bonds that lie on at least one cycle (the non-bridges).
fn ring_bonds(n: usize, bonds: &[Bond], adjacency: &[Vec<(usize, usize)>]) -> Vec<usize> {
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_bridge = vec![false; bonds.len()];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (atom, parent bond, next neighbor slot)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(frame) = stack.last_mut() {
            let (u, parent_bond, slot) = *frame;
            if slot < adjacency[u].len() {
                frame.2 += 1;
                let (v, b) = adjacency[u][slot];
                if b == parent_bond {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, b, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        is_bridge[parent_bond] = true;
                    }
                }
            }
        }
    }
    (0..bonds.len()).filter(|&b| !is_bridge[b]).collect()
}

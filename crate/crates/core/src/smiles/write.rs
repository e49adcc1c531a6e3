use std::fmt::Write as _;

use thiserror::Error;

use super::molecule::{BondOrder, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("atom order must be a permutation of 0..{expected}")]
pub struct OrderError {
    pub expected: usize,
}

/// Renders `mol` as SMILES. `order` is a permutation of atom indices giving
/// traversal priority: the depth-first walk starts at `order[0]` and at every
/// atom visits unvisited neighbors in the order they appear in `order`.
/// Disconnected components are joined with `.`, each rooted at its earliest
/// atom in `order`. Ring-closure labels are assigned smallest-available-first.
pub fn write(mol: &Molecule, order: &[usize]) -> Result<String, OrderError> {
    let n = mol.atom_count();
    let err = OrderError { expected: n };
    if order.len() != n {
        return Err(err);
    }
    let mut priority = vec![usize::MAX; n];
    for (pos, &atom) in order.iter().enumerate() {
        if atom >= n || priority[atom] != usize::MAX {
            return Err(err);
        }
        priority[atom] = pos;
    }
    Ok(Writer::new(mol, &priority).run(order))
}

struct Writer<'m> {
    mol: &'m Molecule,
    sorted_neighbors: Vec<Vec<(usize, usize)>>,
    visited: Vec<bool>,
    bond_used: Vec<bool>,
    children: Vec<Vec<(usize, usize)>>,
    /// closure bond indices opened at each atom, in discovery order
    opens: Vec<Vec<usize>>,
    closes: Vec<Vec<usize>>,
    labels: Vec<Option<u8>>,
    in_use: Vec<bool>,
    out: String,
}

impl<'m> Writer<'m> {
    fn new(mol: &'m Molecule, priority: &[usize]) -> Self {
        let n = mol.atom_count();
        let sorted_neighbors = (0..n)
            .map(|i| {
                let mut nb = mol.neighbors(i).to_vec();
                nb.sort_by_key(|&(v, _)| priority[v]);
                nb
            })
            .collect();
        Writer {
            mol,
            sorted_neighbors,
            visited: vec![false; n],
            bond_used: vec![false; mol.bond_count()],
            children: vec![Vec::new(); n],
            opens: vec![Vec::new(); n],
            closes: vec![Vec::new(); n],
            labels: vec![None; mol.bond_count()],
            in_use: (0..100).map(|l| l == 0).collect(),
            out: String::new(),
        }
    }

    fn run(mut self, order: &[usize]) -> String {
        let mut roots = Vec::new();
        for &root in order {
            if !self.visited[root] {
                roots.push(root);
                self.discover(root, usize::MAX);
            }
        }
        for (i, &root) in roots.iter().enumerate() {
            if i > 0 {
                self.out.push('.');
            }
            self.emit(root, None);
        }
        self.out
    }

    fn discover(&mut self, u: usize, parent_bond: usize) {
        self.visited[u] = true;
        for k in 0..self.sorted_neighbors[u].len() {
            let (v, b) = self.sorted_neighbors[u][k];
            if b == parent_bond || self.bond_used[b] {
                continue;
            }
            self.bond_used[b] = true;
            if self.visited[v] {
                // v is an ancestor still on the walk
                self.opens[v].push(b);
                self.closes[u].push(b);
            } else {
                self.children[u].push((v, b));
                self.discover(v, b);
            }
        }
    }

    fn emit(&mut self, u: usize, via: Option<usize>) {
        if let Some(b) = via {
            self.push_bond(b);
        }
        self.push_atom(u);
        let closing = std::mem::take(&mut self.closes[u]);
        for &b in &closing {
            let label = self.labels[b].expect("closure opened before it closes");
            push_label(&mut self.out, label);
        }
        for b in std::mem::take(&mut self.opens[u]) {
            let label = self
                .in_use
                .iter()
                .position(|used| !used)
                .expect("fewer than 100 simultaneous ring closures") as u8;
            self.in_use[usize::from(label)] = true;
            self.labels[b] = Some(label);
            self.push_bond(b);
            push_label(&mut self.out, label);
        }
        for b in closing {
            let label = self.labels[b].unwrap();
            self.in_use[usize::from(label)] = false;
        }
        let children = std::mem::take(&mut self.children[u]);
        let last = children.len().saturating_sub(1);
        for (i, (v, b)) in children.into_iter().enumerate() {
            if i < last {
                self.out.push('(');
                self.emit(v, Some(b));
                self.out.push(')');
            } else {
                self.emit(v, Some(b));
            }
        }
    }

    fn push_bond(&mut self, b: usize) {
        let bond = self.mol.bond(b);
        let both_aromatic = self.mol.atom(bond.a).aromatic && self.mol.atom(bond.b).aromatic;
        match bond.order {
            BondOrder::Single if both_aromatic => self.out.push('-'),
            BondOrder::Single | BondOrder::Aromatic => {}
            BondOrder::Double => self.out.push('='),
            BondOrder::Triple => self.out.push('#'),
        }
    }

    fn push_atom(&mut self, i: usize) {
        let atom = self.mol.atom(i);
        let organic = atom.formal_charge == 0
            && atom.isotope.is_none()
            && self.mol.organic_implicit_h(i) == Some(atom.total_h());
        let symbol = atom.element.symbol();
        if organic {
            push_symbol(&mut self.out, symbol, atom.aromatic);
            return;
        }
        self.out.push('[');
        if let Some(iso) = atom.isotope {
            let _ = write!(self.out, "{iso}");
        }
        push_symbol(&mut self.out, symbol, atom.aromatic);
        match atom.total_h() {
            0 => {}
            1 => self.out.push('H'),
            h => {
                let _ = write!(self.out, "H{h}");
            }
        }
        match atom.formal_charge {
            0 => {}
            1 => self.out.push('+'),
            -1 => self.out.push('-'),
            c if c > 0 => {
                let _ = write!(self.out, "+{c}");
            }
            c => {
                let _ = write!(self.out, "-{}", -i32::from(c));
            }
        }
        self.out.push(']');
    }
}

fn push_symbol(out: &mut String, symbol: &str, aromatic: bool) {
    if aromatic {
        out.push_str(&symbol.to_ascii_lowercase());
    } else {
        out.push_str(symbol);
    }
}

fn push_label(out: &mut String, label: u8) {
    if label < 10 {
        out.push(char::from(b'0' + label));
    } else {
        let _ = write!(out, "%{label}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse;

    #[test]
    fn ethanol_from_oxygen() {
        let m = parse("CCO").unwrap();
        assert_eq!(write(&m, &[2, 1, 0]).unwrap(), "OCC");
        assert_eq!(write(&m, &[1, 0, 2]).unwrap(), "C(C)O");
    }

    #[test]
    fn ring_labels_reused() {
        let m = parse("C1CC1C1CC1").unwrap();
        let order: Vec<usize> = (0..6).collect();
        assert_eq!(write(&m, &order).unwrap(), "C1CC1C1CC1");
    }

    #[test]
    fn cyclohexane_rotations() {
        let m = parse("C1CCCCC1").unwrap();
        for r in 0..6 {
            let order: Vec<usize> = (0..6).map(|i| (i + r) % 6).collect();
            let s = write(&m, &order).unwrap();
            let back = parse(&s).unwrap();
            assert_eq!((back.atom_count(), back.bond_count()), (6, 6));
            assert!(back.bonds().iter().all(|b| b.in_ring));
        }
    }

    #[test]
    fn brackets_and_charges() {
        let m = parse("C[N+](=O)[O-]").unwrap();
        assert_eq!(write(&m, &[0, 1, 2, 3]).unwrap(), "C[N+](=O)[O-]");
        let m = parse("[CH4]").unwrap();
        assert_eq!(write(&m, &[0]).unwrap(), "C");
        let m = parse("[CH3]").unwrap();
        assert_eq!(write(&m, &[0]).unwrap(), "[CH3]");
        let m = parse("c1cc[nH]c1").unwrap();
        assert_eq!(write(&m, &[0, 1, 2, 3, 4]).unwrap(), "c1cc[nH]c1");
        let m = parse("[2H]C[Fe+3]").unwrap();
        assert_eq!(write(&m, &[0, 1, 2]).unwrap(), "[2H]C[Fe+3]");
    }

    #[test]
    fn aromatic_single_bond_is_explicit() {
        let m = parse("c1ccccc1-c1ccccc1").unwrap();
        let order: Vec<usize> = (0..12).collect();
        let s = write(&m, &order).unwrap();
        assert!(s.contains('-'));
        assert_eq!(parse(&s).unwrap().bonds(), m.bonds());
    }

    #[test]
    fn rejects_non_permutation() {
        let m = parse("CCO").unwrap();
        assert!(write(&m, &[0, 0, 1]).is_err());
        assert!(write(&m, &[0, 1]).is_err());
        assert!(write(&m, &[0, 1, 3]).is_err());
    }

    #[test]
    fn disconnected_components() {
        let m = crate::smiles::parse_fragments("CC[*].[*]O").unwrap();
        assert_eq!(write(&m, &[0, 1, 2, 3, 4]).unwrap(), "CC[*].[*]O");
    }
}

//! Brute-force reference implementations shared by the oracle and
//! acceptance tests. Deliberately naive: nothing here reuses the library's
//! search code.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use smitask::graph::FunctionalGroupPattern;
use smitask::synth::{synthesize, SynthConfig};
use smitask::{parse, Element, Molecule};

/// Small-molecule config for oracle corpora.
pub fn small_config(max_heavy_atoms: usize) -> SynthConfig {
    SynthConfig {
        max_linkers: 4,
        branch_probability: 0.3,
        max_depth: 1,
        max_heavy_atoms,
    }
}

pub fn corpus(n: usize, seed: u64, cfg: SynthConfig) -> Vec<String> {
    synthesize(n, seed, cfg)
}

pub fn molecules(smiles: &[String]) -> Vec<Molecule> {
    smiles.iter().map(|s| parse(s).unwrap()).collect()
}

/// Ring systems that stress cycle-basis selection.
pub const HARD_RING_CASES: &[&str] = &[
    "C12C3C4C1C5C2C3C45",
    "C1C2CC3CC1CC(C2)C3",
    "C1CC2CCC1C2",
    "C1CC2CCC1CC2",
    "C1CCC2(CC1)CCCC2",
    "C1CC1C1CC1",
    "c1ccc2cc3ccccc3cc2c1",
    "c1cc2ccc3cccc4ccc(c1)c2c34",
    "C1CC2C3CCC4CC(C4)C3CCC2C1",
    "C1C2CC3C1C23",
];

/// Size → count over a minimum cycle basis, found by listing every simple
/// cycle and greedily keeping the shortest independent ones over GF(2).
pub fn brute_ring_counts(mol: &Molecule) -> BTreeMap<usize, usize> {
    assert!(mol.bond_count() <= 128);
    let n = mol.atom_count();
    let mut cycles: HashSet<(usize, u128)> = HashSet::new();
    for start in 0..n {
        // cycles whose smallest atom is `start`
        let mut path = vec![start];
        let mut edges = 0u128;
        extend(mol, start, &mut path, &mut edges, &mut cycles);
    }
    let mut sorted: Vec<(usize, u128)> = cycles.into_iter().collect();
    sorted.sort();
    let mut basis: Vec<u128> = Vec::new();
    let mut counts = BTreeMap::new();
    for (len, set) in sorted {
        let mut v = set;
        for &b in &basis {
            let pivot = 127 - b.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
            // distinct leading bits, so value order is pivot order
            basis.sort_by(|a, b| b.cmp(a));
            *counts.entry(len).or_insert(0) += 1;
        }
    }
    counts
}

fn extend(
    mol: &Molecule,
    start: usize,
    path: &mut Vec<usize>,
    edges: &mut u128,
    out: &mut HashSet<(usize, u128)>,
) {
    let u = *path.last().unwrap();
    for &(v, bond) in mol.neighbors(u) {
        let bit = 1u128 << bond;
        if *edges & bit != 0 {
            continue;
        }
        if v == start && path.len() >= 3 {
            out.insert((path.len(), *edges | bit));
        } else if v > start && !path.contains(&v) {
            path.push(v);
            *edges |= bit;
            extend(mol, start, path, edges, out);
            *edges &= !bit;
            path.pop();
        }
    }
}

/// Longest simple path (in atoms) over non-ring carbons, by trying every
/// path from every start.
pub fn brute_chain(mol: &Molecule) -> usize {
    let ok = |i: usize| mol.atom(i).element == Element::C && !mol.atom_in_ring(i);
    fn walk(mol: &Molecule, ok: &dyn Fn(usize) -> bool, path: &mut Vec<usize>) -> usize {
        let u = *path.last().unwrap();
        let mut best = path.len();
        for &(v, _) in mol.neighbors(u) {
            if ok(v) && !path.contains(&v) {
                path.push(v);
                best = best.max(walk(mol, ok, path));
                path.pop();
            }
        }
        best
    }
    (0..mol.atom_count())
        .filter(|&i| ok(i))
        .map(|i| walk(mol, &ok, &mut vec![i]))
        .max()
        .unwrap_or(0)
}

/// Tries every injective assignment of pattern atoms to molecule atoms and
/// checks all constraints only once the assignment is complete.
pub fn brute_match(mol: &Molecule, pattern: &FunctionalGroupPattern) -> bool {
    fn atom_ok(mol: &Molecule, pattern: &FunctionalGroupPattern, p: usize, i: usize) -> bool {
        let c = &pattern.atoms[p];
        let a = mol.atom(i);
        let degree = mol.neighbors(i).len();
        let h = a.total_h();
        if !c.elements.is_empty() && !c.elements.contains(&a.element) {
            return false;
        }
        if let Some(ar) = c.aromatic {
            if ar != a.aromatic {
                return false;
            }
        }
        if let Some(q) = c.charge {
            if q != a.formal_charge {
                return false;
            }
        }
        if degree < c.min_degree || c.max_degree.is_some_and(|d| degree > d) {
            return false;
        }
        !(c.min_h.is_some_and(|m| h < m) || c.max_h.is_some_and(|m| h > m))
    }
    fn full_ok(mol: &Molecule, pattern: &FunctionalGroupPattern, map: &[usize]) -> bool {
        (0..map.len()).all(|p| atom_ok(mol, pattern, p, map[p]))
            && pattern.bonds.iter().all(|b| {
                mol.bonds().iter().any(|mb| {
                    let same = (mb.a == map[b.a] && mb.b == map[b.b])
                        || (mb.a == map[b.b] && mb.b == map[b.a]);
                    same && b.order.is_none_or(|o| o == mb.order)
                })
            })
    }
    fn assign(mol: &Molecule, pattern: &FunctionalGroupPattern, map: &mut Vec<usize>) -> bool {
        if map.len() == pattern.atoms.len() {
            return full_ok(mol, pattern, map);
        }
        for i in 0..mol.atom_count() {
            if !map.contains(&i) {
                map.push(i);
                if assign(mol, pattern, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    assign(mol, pattern, &mut Vec::new())
}

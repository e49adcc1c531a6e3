//! Canonical atom ranking and canonical / randomized SMILES.
//!
//! Ranks start from per-atom invariants and are refined by the sorted
//! multiset of `(neighbor rank, bond order)` until the number of classes
//! stops growing. Remaining ties are broken by doubling every rank, lowering
//! the smallest-index atom of the lowest tied class by one, and refining
//! again, until all ranks are distinct. The canonical string is the
//! depth-first rendering rooted at rank 1 visiting neighbors by ascending rank.

use crate::rng::SplitMix64;
use crate::smiles::{write, Molecule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomRanking {
    /// 1-based rank per atom index; a permutation of `1..=atom_count`.
    pub rank: Vec<usize>,
    pub refinement_rounds: usize,
}

impl AtomRanking {
    /// Atom indices sorted by ascending rank.
    pub fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.rank.len()).collect();
        order.sort_by_key(|&i| self.rank[i]);
        order
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Invariant {
    atomic_number: u8,
    isotope: u16,
    degree: usize,
    charge: i8,
    hydrogens: u8,
    aromatic: bool,
    in_ring: bool,
    bond_orders: Vec<u8>,
}

fn invariant(mol: &Molecule, i: usize) -> Invariant {
    let atom = mol.atom(i);
    let mut bond_orders: Vec<u8> = mol
        .neighbors(i)
        .iter()
        .map(|&(_, b)| mol.bond(b).order.code())
        .collect();
    bond_orders.sort_unstable();
    Invariant {
        atomic_number: atom.element.atomic_number(),
        isotope: atom.isotope.unwrap_or(0),
        degree: mol.degree(i),
        charge: atom.formal_charge,
        hydrogens: atom.total_h(),
        aromatic: atom.aromatic,
        in_ring: mol.atom_in_ring(i),
        bond_orders,
    }
}

/// Dense 1-based ranks from sort keys: equal keys share a rank.
fn dense_ranks<K: Ord>(keys: &[K]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0; keys.len()];
    let mut current = 0;
    for (pos, &i) in idx.iter().enumerate() {
        if pos == 0 || keys[i] != keys[idx[pos - 1]] {
            current += 1;
        }
        ranks[i] = current;
    }
    ranks
}

fn class_count(ranks: &[usize]) -> usize {
    ranks.iter().copied().max().unwrap_or(0)
}

/// Refines until stable; returns the number of rounds that split a class.
fn refine(mol: &Molecule, ranks: &mut Vec<usize>) -> usize {
    let mut rounds = 0;
    loop {
        let keys: Vec<(usize, Vec<(usize, u8)>)> = (0..mol.atom_count())
            .map(|i| {
                let mut nb: Vec<(usize, u8)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(v, b)| (ranks[v], mol.bond(b).order.code()))
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let next = dense_ranks(&keys);
        if class_count(&next) == class_count(ranks) {
            return rounds;
        }
        *ranks = next;
        rounds += 1;
    }
}

pub fn canonical_ranks(mol: &Molecule) -> AtomRanking {
    let n = mol.atom_count();
    let invariants: Vec<Invariant> = (0..n).map(|i| invariant(mol, i)).collect();
    let mut ranks = dense_ranks(&invariants);
    let mut rounds = refine(mol, &mut ranks);
    while class_count(&ranks) < n {
        let mut counts = vec![0usize; n + 1];
        for &r in &ranks {
            counts[r] += 1;
        }
        let tied = (1..=n)
            .find(|&r| counts[r] > 1)
            .expect("some class is tied");
        let chosen = (0..n).find(|&i| ranks[i] == tied).unwrap();
        let keys: Vec<usize> = (0..n)
            .map(|i| 2 * ranks[i] - usize::from(i == chosen))
            .collect();
        ranks = dense_ranks(&keys);
        rounds += refine(mol, &mut ranks);
    }
    AtomRanking {
        rank: ranks,
        refinement_rounds: rounds,
    }
}

pub fn canonicalize(mol: &Molecule) -> String {
    let order = canonical_ranks(mol).order();
    write(mol, &order).expect("rank order is a permutation")
}

/// A random valid rendering: uniformly random root and neighbor order drawn
/// from `rng`. When the result equals the canonical string it is redrawn, at
/// most 10 times, after which the last draw is accepted.
pub fn randomized_smiles(mol: &Molecule, rng: &mut SplitMix64) -> String {
    let canonical = canonicalize(mol);
    let mut order: Vec<usize> = (0..mol.atom_count()).collect();
    let mut out = String::new();
    for _ in 0..=10 {
        rng.shuffle(&mut order);
        out = write(mol, &order).expect("shuffle keeps a permutation");
        if out != canonical {
            break;
        }
    }
    out
}

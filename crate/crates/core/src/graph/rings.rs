use std::collections::{BTreeMap, HashSet, VecDeque};

use thiserror::Error;

use crate::smiles::Molecule;

pub const MIN_QUERY_RING: usize = 3;
pub const MAX_QUERY_RING: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ring size {0} outside supported range {MIN_QUERY_RING}..={MAX_QUERY_RING}")]
pub struct RangeError(pub usize);

/// Smallest set of smallest rings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RingSet {
    /// Each ring as atom indices in cycle order, starting at its smallest
    /// index and continuing toward the smaller of that atom's two ring neighbors.
    pub rings: Vec<Vec<usize>>,
    pub by_size: BTreeMap<usize, usize>,
}

impl RingSet {
    pub fn len(&self) -> usize {
        self.rings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rings.is_empty()
    }

    /// Number of unordered ring pairs that share at least one atom.
    pub fn fused_pairs(&self) -> usize {
        let sets: Vec<HashSet<usize>> = self
            .rings
            .iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        let mut count = 0;
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if !sets[i].is_disjoint(&sets[j]) {
                    count += 1;
                }
            }
        }
        count
    }
}

/// GF(2) vectors over bond indices, kept in reduced echelon form keyed by
/// pivot bit.
pub(crate) struct CycleSpace {
    words: usize,
    basis: Vec<(usize, Vec<u64>)>,
}

impl CycleSpace {
    pub(crate) fn new(bonds: usize) -> Self {
        CycleSpace {
            words: bonds.div_ceil(64).max(1),
            basis: Vec::new(),
        }
    }

    pub(crate) fn vector(&self, bond_indices: impl IntoIterator<Item = usize>) -> Vec<u64> {
        let mut v = vec![0u64; self.words];
        for b in bond_indices {
            v[b / 64] ^= 1 << (b % 64);
        }
        v
    }

    /// Adds `v` if it is independent of the current basis.
    pub(crate) fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (pivot, row) in &self.basis {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        let Some(pivot) = (0..self.words * 64).find(|&bit| v[bit / 64] >> (bit % 64) & 1 == 1)
        else {
            return false;
        };
        for (_, row) in self.basis.iter_mut() {
            if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&v) {
                    *a ^= b;
                }
            }
        }
        self.basis.push((pivot, v));
        true
    }

    pub(crate) fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Rotates a cycle to start at its smallest atom, heading toward the smaller
/// neighbor.
fn normalize_cycle(mut cycle: Vec<usize>) -> Vec<usize> {
    let (pos, _) = cycle.iter().enumerate().min_by_key(|(_, a)| **a).unwrap();
    cycle.rotate_left(pos);
    if cycle.len() > 2 && cycle[cycle.len() - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

/// Minimum cycle basis from the Horton candidate set: for every ring atom `v`
/// and ring bond `(x, y)`, the cycle formed by shortest paths `v→x`, `v→y`
/// (lowest-index BFS tree) and the bond, when the two paths meet only at `v`.
/// Candidates are taken in order of (size, sorted atom tuple) and kept when
/// linearly independent over GF(2).
pub fn perceive_rings(mol: &Molecule) -> RingSet {
    let n = mol.atom_count();
    let ring_bonds: Vec<usize> = (0..mol.bond_count())
        .filter(|&b| mol.bond(b).in_ring)
        .collect();
    if ring_bonds.is_empty() {
        return RingSet::default();
    }
    let mut ring_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &b in &ring_bonds {
        let bond = mol.bond(b);
        ring_adj[bond.a].push((bond.b, b));
        ring_adj[bond.b].push((bond.a, b));
    }
    for adj in ring_adj.iter_mut() {
        adj.sort_unstable();
    }
    let ring_atoms: Vec<usize> = (0..n).filter(|&i| !ring_adj[i].is_empty()).collect();
    let components = {
        let mut seen = vec![false; n];
        let mut c = 0;
        for &s in &ring_atoms {
            if seen[s] {
                continue;
            }
            c += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(v, _) in &ring_adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        c
    };
    let needed = ring_bonds.len() + components - ring_atoms.len();

    let mut candidates: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> = Vec::new();
    let mut seen_edge_sets: HashSet<Vec<usize>> = HashSet::new();
    for &v in &ring_atoms {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![(usize::MAX, usize::MAX); n];
        dist[v] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &(w, b) in &ring_adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = (u, b);
                    queue.push_back(w);
                }
            }
        }
        let path = |mut x: usize| {
            let mut atoms = vec![x];
            let mut bonds = Vec::new();
            while x != v {
                let (p, b) = parent[x];
                bonds.push(b);
                atoms.push(p);
                x = p;
            }
            (atoms, bonds)
        };
        for &b in &ring_bonds {
            let bond = mol.bond(b);
            let (x, y) = (bond.a, bond.b);
            if dist[x] == usize::MAX || dist[y] == usize::MAX {
                continue;
            }
            if parent[x].1 == b || parent[y].1 == b {
                continue;
            }
            let (px, bx) = path(x);
            let (py, by) = path(y);
            let sx: HashSet<usize> = px.iter().copied().collect();
            if py.iter().filter(|a| sx.contains(a)).count() != 1 {
                continue;
            }
            // cycle order: v .. x, y .. (back to v)
            let mut cycle: Vec<usize> = px.iter().rev().copied().collect();
            cycle.extend(py.iter().take(py.len() - 1));
            let mut edges: Vec<usize> = bx.into_iter().chain(by).chain([b]).collect();
            edges.sort_unstable();
            if !seen_edge_sets.insert(edges.clone()) {
                continue;
            }
            let mut sorted = cycle.clone();
            sorted.sort_unstable();
            candidates.push((sorted, normalize_cycle(cycle), edges));
        }
    }
    candidates.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));

    let mut space = CycleSpace::new(mol.bond_count());
    let mut set = RingSet::default();
    for (_, cycle, edges) in candidates {
        if space.rank() == needed {
            break;
        }
        if space.insert(space.vector(edges)) {
            *set.by_size.entry(cycle.len()).or_insert(0) += 1;
            set.rings.push(cycle);
        }
    }
    debug_assert_eq!(set.rings.len(), needed);
    set
}

pub fn count_rings_of_size(mol: &Molecule, k: usize) -> Result<usize, RangeError> {
    count_in(&perceive_rings(mol), k)
}

pub fn count_in(rings: &RingSet, k: usize) -> Result<usize, RangeError> {
    if !(MIN_QUERY_RING..=MAX_QUERY_RING).contains(&k) {
        return Err(RangeError(k));
    }
    Ok(rings.by_size.get(&k).copied().unwrap_or(0))
}

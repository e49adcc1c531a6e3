//! Two-fragment cuts across acyclic single bonds, with `[*]` attachment
//! markers, and the inverse assembly.

use thiserror::Error;

use crate::canonical::canonicalize;
use crate::smiles::{parse, parse_fragments, AtomSpec, BondOrder, Molecule, SmilesError};

/// Minimum heavy atoms on each side of a cut.
pub const MIN_FRAGMENT_HEAVY_ATOMS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("bond {0}-{1} is not a qualifying cut bond")]
    Cut(usize, usize),
    #[error("fragment {fragment} has {count} attachment points, expected exactly one of degree 1")]
    Wildcards { fragment: char, count: usize },
    #[error("expected two fragments, found {0}")]
    FragmentCount(usize),
    #[error("assembled molecule is invalid: {0}")]
    Invalid(#[from] SmilesError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentPair {
    /// Side containing the lower-index endpoint of the cut bond.
    pub frag_a: Molecule,
    pub frag_b: Molecule,
    pub parent_canonical: String,
    pub cut_bond: (usize, usize),
}

impl FragmentPair {
    /// Canonical fragment strings joined by `.`.
    pub fn serialize(&self) -> String {
        format!(
            "{}.{}",
            canonicalize(&self.frag_a),
            canonicalize(&self.frag_b)
        )
    }
}

/// Single, non-ring bonds between heavy atoms whose removal leaves at least
/// [`MIN_FRAGMENT_HEAVY_ATOMS`] heavy atoms on both sides, as `(low, high)`
/// endpoint pairs in ascending order.
pub fn enumerate_cut_bonds(mol: &Molecule) -> Vec<(usize, usize)> {
    let mut cuts: Vec<(usize, usize)> = (0..mol.bond_count())
        .filter(|&b| {
            let bond = mol.bond(b);
            bond.order == BondOrder::Single
                && !bond.in_ring
                && mol.atom(bond.a).element.is_heavy()
                && mol.atom(bond.b).element.is_heavy()
        })
        .filter(|&b| {
            let side = side_of(mol, b);
            let heavy_a = side
                .iter()
                .enumerate()
                .filter(|&(i, &s)| s && mol.atom(i).element.is_heavy())
                .count();
            let heavy_b = mol.heavy_atom_count() - heavy_a;
            heavy_a >= MIN_FRAGMENT_HEAVY_ATOMS && heavy_b >= MIN_FRAGMENT_HEAVY_ATOMS
        })
        .map(|b| {
            let bond = mol.bond(b);
            (bond.a.min(bond.b), bond.a.max(bond.b))
        })
        .collect();
    cuts.sort_unstable();
    cuts
}

/// Atoms reachable from the lower endpoint of bond `b` without crossing it.
fn side_of(mol: &Molecule, b: usize) -> Vec<bool> {
    let bond = mol.bond(b);
    let start = bond.a.min(bond.b);
    let mut seen = vec![false; mol.atom_count()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &(v, bi) in mol.neighbors(u) {
            if bi != b && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

pub fn cut(mol: &Molecule, bond: (usize, usize)) -> Result<FragmentPair, FragmentError> {
    let (lo, hi) = (bond.0.min(bond.1), bond.0.max(bond.1));
    if !enumerate_cut_bonds(mol).contains(&(lo, hi)) {
        return Err(FragmentError::Cut(bond.0, bond.1));
    }
    let b = mol
        .neighbors(lo)
        .iter()
        .find(|&&(v, _)| v == hi)
        .map(|&(_, bi)| bi)
        .expect("cut bond exists");
    let side = side_of(mol, b);
    let build = |keep_side: bool, anchor: usize| -> Result<Molecule, FragmentError> {
        let keep: Vec<usize> = (0..mol.atom_count())
            .filter(|&i| side[i] == keep_side)
            .collect();
        let (mut builder, map) = mol.to_builder(&keep);
        let star = builder.add_atom(AtomSpec::wildcard());
        builder
            .add_bond(map[anchor].expect("anchor kept"), star, BondOrder::Single)
            .expect("wildcard bond is new");
        Ok(builder.build()?)
    };
    Ok(FragmentPair {
        frag_a: build(true, lo)?,
        frag_b: build(false, hi)?,
        parent_canonical: canonicalize(mol),
        cut_bond: (lo, hi),
    })
}

fn single_wildcard(frag: &Molecule, name: char) -> Result<(usize, usize), FragmentError> {
    let stars: Vec<usize> = (0..frag.atom_count())
        .filter(|&i| frag.atom(i).element.is_wildcard())
        .collect();
    match stars.as_slice() {
        [s] if frag.degree(*s) == 1 => Ok((*s, frag.neighbors(*s)[0].0)),
        _ => Err(FragmentError::Wildcards {
            fragment: name,
            count: stars.len(),
        }),
    }
}

/// Removes the wildcard of each fragment and joins their former neighbors
/// with a single bond.
pub fn assemble(frag_a: &Molecule, frag_b: &Molecule) -> Result<Molecule, FragmentError> {
    let (star_a, anchor_a) = single_wildcard(frag_a, 'a')?;
    let (star_b, anchor_b) = single_wildcard(frag_b, 'b')?;
    let keep_a: Vec<usize> = (0..frag_a.atom_count()).filter(|&i| i != star_a).collect();
    let (mut builder, map_a) = frag_a.to_builder(&keep_a);
    let mut map_b = vec![None; frag_b.atom_count()];
    for i in (0..frag_b.atom_count()).filter(|&i| i != star_b) {
        map_b[i] = Some(builder.add_atom(AtomSpec::from(frag_b.atom(i))));
    }
    for bond in frag_b.bonds() {
        if let (Some(a), Some(b)) = (map_b[bond.a], map_b[bond.b]) {
            builder
                .add_bond(a, b, bond.order)
                .expect("fragment bonds are unique");
        }
    }
    builder
        .add_bond(
            map_a[anchor_a].unwrap(),
            map_b[anchor_b].unwrap(),
            BondOrder::Single,
        )
        .expect("joining bond is new");
    Ok(builder.build()?)
}

/// Splits a `.`-separated pair string into its two fragments and assembles them.
pub fn assemble_serialized(pair: &str) -> Result<Molecule, FragmentError> {
    let parts = split_components(&parse_fragments(pair)?);
    match parts.as_slice() {
        [a, b] => assemble(a, b),
        _ => Err(FragmentError::FragmentCount(parts.len())),
    }
}

/// One molecule per connected component, in order of smallest atom index.
pub fn split_components(mol: &Molecule) -> Vec<Molecule> {
    mol.components()
        .into_iter()
        .map(|comp| {
            mol.to_builder(&comp)
                .0
                .build()
                .expect("component of a valid molecule is valid")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Correct,
    Incorrect,
    /// The candidate did not parse as a molecule.
    Invalid,
}

impl Verdict {
    pub fn is_correct(self) -> bool {
        self == Verdict::Correct
    }
}

pub fn verify_assembly(pair: &FragmentPair, candidate: &str) -> Verdict {
    verify_against(&pair.parent_canonical, candidate)
}

/// Compares the candidate's canonical form with a known canonical parent.
pub fn verify_against(parent_canonical: &str, candidate: &str) -> Verdict {
    match parse(candidate) {
        Ok(m) if canonicalize(&m) == parent_canonical => Verdict::Correct,
        Ok(_) => Verdict::Incorrect,
        Err(_) => Verdict::Invalid,
    }
}

use crate::element::Element;
use crate::smiles::Molecule;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainResult {
    /// Number of atoms on the chain.
    pub length: usize,
    pub path: Vec<usize>,
}

/// Longest simple path through carbons that are not ring members. Atoms are
/// counted, not bonds. Ties go to the lexicographically smallest index
/// sequence.
pub fn longest_carbon_chain(mol: &Molecule) -> ChainResult {
    let n = mol.atom_count();
    let eligible: Vec<bool> = (0..n)
        .map(|i| mol.atom(i).element == Element::C && !mol.atom_in_ring(i))
        .collect();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut nb: Vec<usize> = mol
                .neighbors(i)
                .iter()
                .map(|&(v, _)| v)
                .filter(|&v| eligible[v])
                .collect();
            nb.sort_unstable();
            nb
        })
        .collect();

    let mut best: Vec<usize> = Vec::new();
    // the eligible subgraph has no ring bonds, so it is a forest and the path
    // between two atoms is unique
    for start in (0..n).filter(|&i| eligible[i]) {
        let mut stack: Vec<(usize, usize, usize)> = vec![(start, usize::MAX, 0)];
        let mut path = vec![start];
        consider(&mut best, &path);
        while let Some(frame) = stack.last_mut() {
            let (u, parent, slot) = *frame;
            if slot < adj[u].len() {
                frame.2 += 1;
                let v = adj[u][slot];
                if v == parent {
                    continue;
                }
                path.push(v);
                consider(&mut best, &path);
                stack.push((v, u, 0));
            } else {
                stack.pop();
                path.pop();
            }
        }
    }
    ChainResult {
        length: best.len(),
        path: best,
    }
}

fn consider(best: &mut Vec<usize>, path: &[usize]) {
    if path.len() > best.len() || (path.len() == best.len() && path < best.as_slice()) {
        best.clear();
        best.extend_from_slice(path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse;

    fn chain(s: &str) -> ChainResult {
        longest_carbon_chain(&parse(s).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(chain("CCCC").length, 4);
        assert_eq!(chain("CC(C)CC").length, 4);
        assert_eq!(chain("CC(C)CC").path, vec![0, 1, 3, 4]);
        assert_eq!(chain("C1CCCCC1CCC").length, 3);
        assert_eq!(chain("C").length, 1);
        assert_eq!(chain("c1ccccc1").length, 0);
        assert_eq!(chain("O").length, 0);
        // heteroatoms break chains
        assert_eq!(chain("CCOCCC").length, 3);
        // the chain may run through a ring-attached carbon
        assert_eq!(chain("CC(C1CC1)CC").length, 4);
    }
}

//! Deterministic generator of drug-like SMILES, used to build test corpora
//! when no real molecule file is at hand.
//!
//! Molecules are a backbone of linker units (chains, hetero atoms, carbonyls,
//! rings, fused rings) ending in a terminal group, with optional nested side
//! branches. `{b}` in a unit marks where a side branch may be attached and
//! ring digits are renumbered per molecule.

use std::collections::HashSet;

use crate::canonical::canonicalize;
use crate::rng::SplitMix64;
use crate::smiles::parse;

const LINKERS: &[&str] = &[
    "C{b}",
    "C{b}",
    "CC{b}",
    "C{b}C",
    "CCC",
    "O",
    "N{b}",
    "C(=O)",
    "C(=O)N",
    "NC(=O)",
    "C(=O)O",
    "S(=O)(=O)",
    "S",
    "C=C",
    "C(C){b}",
    "C(C)(C)",
    "c1ccccc1",
    "c1cccc{b}c1",
    "c1ccc{b}cc1",
    "c1ccncc1",
    "c1cc{b}ncc1",
    "c1ccsc1",
    "c1ccoc1",
    "C1CCCCC1",
    "C1CCC{b}CC1",
    "C1CCNCC1",
    "C1CCN(CC1)",
    "C1CC1",
    "C1CCC1",
    "C1CCCC1",
    "c1ccc2ccccc2c1",
    "c1ccc2ncccc2c1",
    "C1CCC2CCCCC2C1",
    "c1nc2ccccc2n1",
    "N1CCOCC1",
];

const TERMINALS: &[&str] = &[
    "C",
    "C",
    "CC",
    "O",
    "N",
    "F",
    "Cl",
    "Br",
    "I",
    "C(=O)O",
    "C(=O)N",
    "C#N",
    "[N+](=O)[O-]",
    "S",
    "C(F)(F)F",
    "OC",
    "c1ccccc1",
    "c1ccc{b}cc1",
    "C1CC1",
    "S(=O)(=O)N",
    "C=O",
    "N(C)C",
    "CCCC",
    "CC(C)C",
    "c1ccncc1",
    "C1CCOC1",
    "N1CCCC1",
    "OC(=O)C",
    "C(=O)OC",
    "c1nc2ccccc2[nH]1",
];

/// Shape knobs for [`synthesize`].
#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub max_linkers: usize,
    pub branch_probability: f64,
    pub max_depth: usize,
    /// Molecules above this many heavy atoms are redrawn.
    pub max_heavy_atoms: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_linkers: 6,
            branch_probability: 0.35,
            max_depth: 2,
            max_heavy_atoms: 50,
        }
    }
}

struct Builder<'a> {
    rng: &'a mut SplitMix64,
    cfg: SynthConfig,
    next_label: u32,
    out: String,
}

impl Builder<'_> {
    fn push_unit(&mut self, unit: &str, depth: usize) {
        let mut map: [Option<u32>; 10] = [None; 10];
        let mut chars = unit.chars().peekable();
        let mut in_bracket = false;
        while let Some(c) = chars.next() {
            match c {
                '[' => {
                    in_bracket = true;
                    self.out.push(c);
                }
                ']' => {
                    in_bracket = false;
                    self.out.push(c);
                }
                '0'..='9' if !in_bracket => {
                    let d = c.to_digit(10).unwrap() as usize;
                    let label = *map[d].get_or_insert_with(|| {
                        self.next_label += 1;
                        self.next_label
                    });
                    if label < 10 {
                        self.out.push(char::from_digit(label, 10).unwrap());
                    } else {
                        self.out.push_str(&format!("%{label}"));
                    }
                }
                '{' => {
                    for _ in 0..2 {
                        chars.next();
                    }
                    if depth < self.cfg.max_depth && self.rng_f64() < self.cfg.branch_probability {
                        self.out.push('(');
                        self.chain(depth + 1);
                        self.out.push(')');
                    }
                }
                _ => self.out.push(c),
            }
        }
    }

    fn rng_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn chain(&mut self, depth: usize) {
        let max = (self.cfg.max_linkers >> depth).max(1);
        let n = 1 + self.rng.index(max);
        for _ in 0..n {
            let unit = LINKERS[self.rng.index(LINKERS.len())];
            self.push_unit(unit, depth);
        }
        let tail = TERMINALS[self.rng.index(TERMINALS.len())];
        self.push_unit(tail, depth);
    }
}

/// One random molecule. Not checked; see [`synthesize`].
pub fn random_smiles(rng: &mut SplitMix64, cfg: SynthConfig) -> String {
    let mut b = Builder {
        rng,
        cfg,
        next_label: 0,
        out: String::new(),
    };
    b.chain(0);
    b.out
}

/// `n` distinct (by canonical form) parseable molecules, deterministic in
/// `seed`.
pub fn synthesize(n: usize, seed: u64, cfg: SynthConfig) -> Vec<String> {
    let mut rng = SplitMix64::new(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s = random_smiles(&mut rng, cfg);
        let Ok(mol) = parse(&s) else { continue };
        if mol.heavy_atom_count() > cfg.max_heavy_atoms {
            continue;
        }
        if seen.insert(canonicalize(&mol)) {
            out.push(s);
        }
    }
    out
}

/// Renders molecules as a `.smi` file body: `SMILES<TAB>id` lines.
pub fn to_smi(smiles: &[String]) -> String {
    let mut s = String::new();
    for (i, m) in smiles.iter().enumerate() {
        s.push_str(m);
        s.push_str(&format!("\tsynth_{:06}\n", i + 1));
    }
    s
}

//! Periodic-table lookup and the valence model used for implicit hydrogens.

const SYMBOLS: [&str; 118] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

/// A chemical element identified by atomic number. Atomic number 0 is the
/// `*` wildcard used for attachment points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(u8);

impl Element {
    pub const WILDCARD: Element = Element(0);
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const AS: Element = Element(33);
    pub const SE: Element = Element(34);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        (usize::from(z) <= SYMBOLS.len()).then_some(Element(z))
    }

    /// Looks up a capitalized element symbol (`"Cl"`, not `"cl"`). `"*"` maps
    /// to the wildcard.
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        if symbol == "*" {
            return Some(Element::WILDCARD);
        }
        SYMBOLS
            .iter()
            .position(|s| *s == symbol)
            .map(|i| Element(i as u8 + 1))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        if self.0 == 0 {
            "*"
        } else {
            SYMBOLS[usize::from(self.0) - 1]
        }
    }

    pub fn is_wildcard(self) -> bool {
        self.0 == 0
    }

    /// Anything that is neither hydrogen nor a wildcard.
    pub fn is_heavy(self) -> bool {
        self.0 > 1
    }

    /// Elements that may be written without brackets.
    pub fn is_organic_subset(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 9 | 15 | 16 | 17 | 35 | 53)
    }

    /// Elements allowed to carry the aromatic flag.
    pub fn is_aromatic_eligible(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 15 | 16 | 33 | 34)
    }

    /// Default valences for bracket-free atoms, ascending.
    pub fn default_valences(self) -> &'static [u8] {
        match self.0 {
            5 => &[3],
            6 => &[4],
            // only the neutral valence is filled with hydrogens; 5 is accepted
            // when the bonds already reach it
            7 => &[3, 5],
            8 => &[2],
            15 => &[3, 5],
            16 => &[2, 4, 6],
            9 | 17 | 35 | 53 => &[1],
            _ => &[],
        }
    }

    /// Highest valence a default-valence atom can be auto-filled up to.
    pub(crate) fn fill_limit(self) -> Option<u8> {
        match self.0 {
            7 => Some(3),
            _ => self.default_valences().last().copied(),
        }
    }

    /// Valences accepted for a (possibly charged) bracket atom. `None` means
    /// the element/charge combination is outside the checked table.
    pub(crate) fn charged_valences(self, charge: i8) -> Option<&'static [u8]> {
        let v: &'static [u8] = match (self.0, charge) {
            (5, 0) => &[3],
            (5, -1) => &[4],
            (6, 0) => &[4],
            (6, 1) | (6, -1) => &[3],
            (7, 0) => &[3, 5],
            (7, 1) => &[4],
            (7, -1) => &[2],
            (8, 0) => &[2],
            (8, 1) => &[3],
            (8, -1) => &[1],
            (15, 0) => &[3, 5],
            (15, 1) => &[4],
            (15, -1) => &[2, 4, 6],
            (16, 0) => &[2, 4, 6],
            (16, 1) => &[3, 5],
            (16, -1) => &[1, 3, 5],
            (9 | 17 | 35 | 53, 0) => &[1],
            (9 | 17 | 35 | 53, -1) => &[0],
            _ => return None,
        };
        Some(v)
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

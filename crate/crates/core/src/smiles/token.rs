use super::error::SmilesError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    OrganicAtom,
    BracketAtom,
    Bond,
    BranchOpen,
    BranchClose,
    RingBond,
    Dot,
}

/// A lexical unit of a SMILES string, borrowing its text from the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// Byte (= character, input is ASCII) offset of the first character.
    pub position: usize,
}

impl Token<'_> {
    pub fn is_atom(&self) -> bool {
        matches!(self.kind, TokenKind::OrganicAtom | TokenKind::BracketAtom)
    }

    /// Closure label of a ring-bond token (`1`, `%12`).
    pub fn ring_label(&self) -> Option<u8> {
        if self.kind != TokenKind::RingBond {
            return None;
        }
        self.text.trim_start_matches('%').parse().ok()
    }
}

/// Splits a SMILES string into tokens. Concatenating the token texts
/// reproduces the input exactly.
pub fn tokenize(text: &str) -> Result<Vec<Token<'_>>, SmilesError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::with_capacity(text.len());
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if !c.is_ascii() {
            let found = text[i..].chars().next().unwrap_or('\u{fffd}');
            return Err(SmilesError::Lex { offset: i, found });
        }
        let (kind, len) = match c {
            b'B' if bytes.get(i + 1) == Some(&b'r') => (TokenKind::OrganicAtom, 2),
            b'C' if bytes.get(i + 1) == Some(&b'l') => (TokenKind::OrganicAtom, 2),
            b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I' | b'b' | b'c' | b'n' | b'o'
            | b'p' | b's' | b'*' => (TokenKind::OrganicAtom, 1),
            b'[' => {
                let close = bytes[i..].iter().position(|&b| b == b']');
                let Some(close) = close else {
                    return Err(SmilesError::parse(
                        i,
                        super::ParseErrorKind::UnclosedBracket,
                    ));
                };
                if let Some(at) = bytes[i..i + close].iter().position(|&b| b == b'@') {
                    return Err(SmilesError::Stereo {
                        offset: i + at,
                        marker: '@',
                    });
                }
                if let Some(bad) = bytes[i..i + close].iter().position(|&b| !b.is_ascii()) {
                    let found = text[i + bad..].chars().next().unwrap_or('\u{fffd}');
                    return Err(SmilesError::Lex {
                        offset: i + bad,
                        found,
                    });
                }
                (TokenKind::BracketAtom, close + 1)
            }
            b'-' | b'=' | b'#' | b':' => (TokenKind::Bond, 1),
            b'/' | b'\\' | b'@' => {
                return Err(SmilesError::Stereo {
                    offset: i,
                    marker: c as char,
                })
            }
            b'(' => (TokenKind::BranchOpen, 1),
            b')' => (TokenKind::BranchClose, 1),
            b'.' => (TokenKind::Dot, 1),
            b'0'..=b'9' => (TokenKind::RingBond, 1),
            b'%' => {
                let two = bytes.get(i + 1..i + 3);
                match two {
                    Some(d) if d.iter().all(u8::is_ascii_digit) => (TokenKind::RingBond, 3),
                    _ => {
                        return Err(SmilesError::Lex {
                            offset: i,
                            found: '%',
                        })
                    }
                }
            }
            _ => {
                return Err(SmilesError::Lex {
                    offset: i,
                    found: c as char,
                })
            }
        };
        tokens.push(Token {
            kind,
            text: &text[i..i + len],
            position: i,
        });
        i += len;
    }
    Ok(tokens)
}

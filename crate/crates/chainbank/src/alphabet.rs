//! The declared transliteration alphabet.
//!
//! Every template, surface form, and root is written in a one-symbol-per-
//! phoneme transliteration scheme. The inventory is data, not code: it is
//! loaded from a small table at startup so that multi-character symbols such
//! as the feminine marker `(h)` stay single slots everywhere downstream.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::enums::SymbolClass;
use crate::error::{Error, Result};

/// Characters reserved by template and root syntax; they can never be
/// alphabet symbols.
const RESERVED: &[char] = &['+', '.', '#', '0', '1', '2', '3', '4', '5', '6', '7', '8', '9'];

#[derive(Debug, Clone)]
pub struct Alphabet {
    /// Symbols sorted longest-first so prefix matching is greedy.
    symbols: Vec<(String, SymbolClass)>,
    classes: HashMap<String, SymbolClass>,
}

impl Alphabet {
    /// Parses the `symbol<TAB>class` table. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut classes = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut cells = trimmed.split('\t');
            let symbol = cells.next().unwrap_or_default().trim();
            let class = cells.next().map(str::trim).ok_or(Error::AlphabetLine {
                line,
                msg: "expected <symbol>\\t<class>".into(),
            })?;
            if symbol.is_empty() {
                return Err(Error::AlphabetLine {
                    line,
                    msg: "empty symbol".into(),
                });
            }
            if symbol.chars().any(|c| RESERVED.contains(&c) || c.is_whitespace()) {
                return Err(Error::AlphabetLine {
                    line,
                    msg: format!("symbol {symbol:?} uses a reserved character"),
                });
            }
            let class: SymbolClass = class.parse().map_err(|e| Error::AlphabetLine {
                line,
                msg: format!("{e}"),
            })?;
            if classes.insert(symbol.to_string(), class).is_some() {
                return Err(Error::DuplicateSymbol {
                    symbol: symbol.to_string(),
                });
            }
            symbols.push((symbol.to_string(), class));
        }
        symbols.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(Self { symbols, classes })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn class_of(&self, symbol: &str) -> Option<SymbolClass> {
        self.classes.get(symbol).copied()
    }

    pub fn is_consonant(&self, symbol: &str) -> bool {
        self.class_of(symbol) == Some(SymbolClass::Consonant)
    }

    /// Consonant symbols in declaration-independent sorted order.
    pub fn consonants(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .symbols
            .iter()
            .filter(|(_, c)| *c == SymbolClass::Consonant)
            .map(|(s, _)| s.as_str())
            .collect();
        out.sort_unstable();
        out
    }

    /// Longest declared symbol that is a prefix of `input`.
    pub(crate) fn match_prefix<'a>(&self, input: &'a str) -> Option<&'a str> {
        for (sym, _) in &self.symbols {
            if input.starts_with(sym.as_str()) {
                return Some(&input[..sym.len()]);
            }
        }
        None
    }

    /// Splits `text` into declared symbols, greedy longest match.
    pub fn tokenize<'a>(&self, text: &'a str) -> Result<Vec<&'a str>> {
        let mut out = Vec::new();
        let mut rest = text;
        let mut at = 0;
        while !rest.is_empty() {
            match self.match_prefix(rest) {
                Some(sym) => {
                    out.push(sym);
                    at += sym.len();
                    rest = &rest[sym.len()..];
                }
                None => {
                    let ch: String = rest.chars().take(1).collect();
                    return Err(Error::UnknownSymbol { at, text: ch });
                }
            }
        }
        Ok(out)
    }
}

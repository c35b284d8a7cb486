//! Roots, abstract pattern templates, and the interdigitation engine.
//!
//! A template is a slot sequence mixing numbered radical references, literal
//! alphabet symbols, and `+` affix boundaries (`1a2A3`, `ma12uw3+a(h)`).
//! Interdigitating a root into a template substitutes each radical reference
//! with the corresponding root consonant; matching runs the other way and
//! recovers the radical assignment from a surface form.
//!
//! All functions here are pure and operate on immutable inputs, so they are
//! safe to call from any number of worker threads.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// One position of a parsed template.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// Reference to radical `k` (1-based, at most 4).
    Radical(u8),
    /// A literal alphabet symbol, including markers such as `~` and `(h)`.
    Literal(String),
    /// `+`: boundary before a derivational affix. Dropped from surfaces.
    Boundary,
}

/// A parsed abstract pattern, e.g. `1a2A3` or `1i23+iy~`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternTemplate {
    slots: Vec<Slot>,
    source: String,
}

impl PatternTemplate {
    /// Parses `source` against the declared alphabet.
    ///
    /// Radical references must be introduced in order: the first `2` may only
    /// appear after a `1`, and so on. This guarantees that references are
    /// contiguous `1..=max`, for quadriliterals as well.
    pub fn parse(source: &str, alphabet: &Alphabet) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::EmptyTemplate);
        }
        let mut slots = Vec::new();
        let mut max_seen = 0u8;
        let mut rest = source;
        let mut at = 0usize;
        while !rest.is_empty() {
            let ch = rest.chars().next().unwrap();
            if ch.is_ascii_digit() {
                let index = ch as u8 - b'0';
                if !(1..=4).contains(&index) {
                    return Err(Error::RadicalIndex { index });
                }
                if index > max_seen + 1 {
                    return Err(Error::RadicalOrder { index });
                }
                max_seen = max_seen.max(index);
                slots.push(Slot::Radical(index));
                at += 1;
                rest = &rest[1..];
            } else if ch == '+' {
                slots.push(Slot::Boundary);
                at += 1;
                rest = &rest[1..];
            } else {
                match alphabet.match_prefix(rest) {
                    Some(sym) => {
                        slots.push(Slot::Literal(sym.to_string()));
                        at += sym.len();
                        rest = &rest[sym.len()..];
                    }
                    None => {
                        return Err(Error::UnknownSymbol {
                            at,
                            text: ch.to_string(),
                        })
                    }
                }
            }
        }
        Ok(Self {
            slots,
            source: source.to_string(),
        })
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn source_text(&self) -> &str {
        &self.source
    }

    /// Highest radical index referenced; 0 for literal-only templates.
    pub fn max_radical(&self) -> u8 {
        self.slots
            .iter()
            .filter_map(|s| match s {
                Slot::Radical(k) => Some(*k),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Slots up to (not including) the first affix boundary.
    pub fn stem(&self) -> PatternTemplate {
        let slots: Vec<Slot> = self
            .slots
            .iter()
            .take_while(|s| !matches!(s, Slot::Boundary))
            .cloned()
            .collect();
        let source = render(&slots);
        PatternTemplate { slots, source }
    }

    /// The template with all affix boundaries removed; what the surface form
    /// actually realizes.
    pub fn without_boundaries(&self) -> PatternTemplate {
        let slots: Vec<Slot> = self
            .slots
            .iter()
            .filter(|s| !matches!(s, Slot::Boundary))
            .cloned()
            .collect();
        let source = render(&slots);
        PatternTemplate { slots, source }
    }

    /// Number of surface symbols this template produces.
    pub fn surface_len(&self) -> usize {
        self.slots
            .iter()
            .filter(|s| !matches!(s, Slot::Boundary))
            .count()
    }
}

fn render(slots: &[Slot]) -> String {
    let mut out = String::new();
    for slot in slots {
        match slot {
            Slot::Radical(k) => out.push((b'0' + k) as char),
            Slot::Literal(sym) => out.push_str(sym),
            Slot::Boundary => out.push('+'),
        }
    }
    out
}

impl fmt::Display for PatternTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for PatternTemplate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.source)
    }
}

/// A transliterated lemma or inflected form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurfaceForm(String);

impl SurfaceForm {
    /// Validates that `text` is non-empty and tokenizes in the alphabet.
    pub fn new(text: impl Into<String>, alphabet: &Alphabet) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::EmptySurface);
        }
        alphabet.tokenize(&text)?;
        Ok(Self(text))
    }

    /// Wraps without validation. Used for engine-internal labels (the family
    /// root node carries the dotted root here) and for re-reading our own
    /// output files.
    pub fn raw(text: impl Into<String>) -> Self {
        Self(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SurfaceForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An ordered radical sequence of 2-4 consonants, the apex of a derivational
/// family. Identity (equality, ordering, hashing) is the radical sequence;
/// the gloss is an annotation.
#[derive(Debug, Clone)]
pub struct Root {
    radicals: Vec<String>,
    gloss: Option<String>,
}

impl Root {
    pub fn new(radicals: Vec<String>, alphabet: &Alphabet) -> Result<Self> {
        if !(2..=4).contains(&radicals.len()) {
            return Err(Error::RootArity {
                count: radicals.len(),
            });
        }
        for r in &radicals {
            if !alphabet.is_consonant(r) {
                return Err(Error::RadicalNotConsonant { symbol: r.clone() });
            }
        }
        Ok(Self {
            radicals,
            gloss: None,
        })
    }

    /// Parses the dotted notation `b.d.ع`.
    pub fn parse(dotted: &str, alphabet: &Alphabet) -> Result<Self> {
        let radicals: Vec<String> = dotted.split('.').map(str::to_string).collect();
        Self::new(radicals, alphabet)
    }

    /// Construction from symbols already known to be consonants.
    pub(crate) fn from_symbols(radicals: Vec<String>) -> Self {
        Self {
            radicals,
            gloss: None,
        }
    }

    pub fn with_gloss(mut self, gloss: Option<String>) -> Self {
        self.gloss = gloss;
        self
    }

    pub fn radicals(&self) -> &[String] {
        &self.radicals
    }

    pub fn arity(&self) -> usize {
        self.radicals.len()
    }

    pub fn gloss(&self) -> Option<&str> {
        self.gloss.as_deref()
    }

    pub fn dotted(&self) -> String {
        self.radicals.join(".")
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dotted())
    }
}

impl PartialEq for Root {
    fn eq(&self, other: &Self) -> bool {
        self.radicals == other.radicals
    }
}

impl Eq for Root {}

impl PartialOrd for Root {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Root {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.radicals.cmp(&other.radicals)
    }
}

impl std::hash::Hash for Root {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.radicals.hash(state);
    }
}

impl Serialize for Root {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.dotted())
    }
}

impl<'de> Deserialize<'de> for Root {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Root::from_symbols(s.split('.').map(str::to_string).collect()))
    }
}

#[cfg(test)]
impl Root {
    /// Test constructor bypassing alphabet validation.
    pub(crate) fn from_test_symbols(symbols: &[&str]) -> Root {
        Root::from_symbols(symbols.iter().map(|s| s.to_string()).collect())
    }
}

/// Substitutes the root's radicals into the template. Affix boundaries are
/// dropped from the surface text.
pub fn interdigitate(root: &Root, template: &PatternTemplate) -> Result<SurfaceForm> {
    let max = template.max_radical();
    if max as usize > root.arity() {
        return Err(Error::RadicalOutOfRange {
            index: max,
            arity: root.arity(),
        });
    }
    let mut out = String::new();
    for slot in template.slots() {
        match slot {
            Slot::Radical(k) => out.push_str(&root.radicals()[*k as usize - 1]),
            Slot::Literal(sym) => out.push_str(sym),
            Slot::Boundary => {}
        }
    }
    Ok(SurfaceForm::raw(out))
}

/// Recovers every radical assignment `r` with `interdigitate(r, template) ==
/// surface`. At most one assignment exists because slots are positional; the
/// empty set means no match. The returned root's arity is the template's
/// highest radical index, and every bound symbol must be a declared
/// consonant.
pub fn match_surface(
    surface: &SurfaceForm,
    template: &PatternTemplate,
    alphabet: &Alphabet,
) -> BTreeSet<Root> {
    let mut out = BTreeSet::new();
    let Ok(symbols) = alphabet.tokenize(surface.as_str()) else {
        return out;
    };
    let arity = template.max_radical() as usize;
    if !(2..=4).contains(&arity) {
        return out;
    }
    let slots: Vec<&Slot> = template
        .slots()
        .iter()
        .filter(|s| !matches!(s, Slot::Boundary))
        .collect();
    if slots.len() != symbols.len() {
        return out;
    }
    let mut bound: [Option<&str>; 4] = [None; 4];
    for (slot, sym) in slots.iter().zip(symbols.iter()) {
        match slot {
            Slot::Literal(lit) => {
                if lit != sym {
                    return out;
                }
            }
            Slot::Radical(k) => {
                if !alphabet.is_consonant(sym) {
                    return out;
                }
                match bound[*k as usize - 1] {
                    None => bound[*k as usize - 1] = Some(sym),
                    Some(prev) if prev != *sym => return out,
                    Some(_) => {}
                }
            }
            Slot::Boundary => unreachable!(),
        }
    }
    // Parsing guarantees references are contiguous 1..=arity, so all slots
    // below `arity` are bound here.
    let radicals: Vec<String> = bound[..arity]
        .iter()
        .map(|s| s.expect("contiguous radicals").to_string())
        .collect();
    out.insert(Root::from_symbols(radicals));
    out
}

/// Templates in `inventory` under which `surface` yields exactly `root`.
pub fn infer_templates<'a, I>(
    surface: &SurfaceForm,
    root: &Root,
    inventory: I,
    alphabet: &Alphabet,
) -> BTreeSet<&'a PatternTemplate>
where
    I: IntoIterator<Item = &'a PatternTemplate>,
{
    inventory
        .into_iter()
        .filter(|t| match_surface(surface, t, alphabet).contains(root))
        .collect()
}

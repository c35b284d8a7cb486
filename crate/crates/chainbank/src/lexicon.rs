//! Lexicon loading: JSON Lines, one lemma per line.
//!
//! Structurally broken lines are hard errors (with line numbers); entries
//! that parse but fail semantic validation — alphabet violations, a template
//! that does not reproduce the lemma from the root, unknown labels — are
//! quarantined, reported, and skipped so one bad row never sinks a build.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::enums::{BaseFormRequirement, DerivClass, Pos};
use crate::error::{Error, Result};
use crate::pattern::{infer_templates, interdigitate, PatternTemplate, Root, SurfaceForm};

#[derive(Debug, Clone, Default)]
pub struct InflectedForms {
    pub feminine_singular: Option<SurfaceForm>,
    pub broken_plural: Option<SurfaceForm>,
}

impl InflectedForms {
    /// The stored form a requirement refers to; `Lemma` has no entry here.
    pub fn get(&self, requirement: BaseFormRequirement) -> Option<&SurfaceForm> {
        match requirement {
            BaseFormRequirement::Lemma => None,
            BaseFormRequirement::FeminineSingular => self.feminine_singular.as_ref(),
            BaseFormRequirement::BrokenPlural => self.broken_plural.as_ref(),
        }
    }
}

/// A validated lexicon entry. Identity is `(lemma, gloss, template)`: two
/// homographs with different glosses are distinct entries with distinct keys.
#[derive(Debug, Clone)]
pub struct LexEntry {
    pub key: String,
    pub lemma: SurfaceForm,
    pub root: Root,
    pub template: PatternTemplate,
    pub pos: Pos,
    pub deriv_class: Option<DerivClass>,
    pub gloss: Option<String>,
    pub inflected: InflectedForms,
}

impl LexEntry {
    fn make_key(lemma: &str, template: &str, gloss: Option<&str>) -> String {
        format!("{lemma}|{template}|{}", gloss.unwrap_or(""))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Quarantined {
    pub line: usize,
    pub lemma: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct LexiconLoad {
    pub entries: Vec<LexEntry>,
    pub quarantined: Vec<Quarantined>,
}

#[derive(Debug, Deserialize)]
struct RawInflected {
    #[serde(default)]
    feminine_singular: Option<String>,
    #[serde(default)]
    broken_plural: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawEntry {
    lemma: String,
    root: String,
    #[serde(default)]
    root_gloss: Option<String>,
    #[serde(default)]
    template: Option<String>,
    pos: String,
    #[serde(default)]
    deriv_class: Option<String>,
    #[serde(default)]
    gloss: Option<String>,
    #[serde(default)]
    inflected_forms: Option<RawInflected>,
}

pub fn load_lexicon(
    path: &Path,
    alphabet: &Alphabet,
    inference_inventory: &[&PatternTemplate],
) -> Result<LexiconLoad> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_lexicon_str(&text, alphabet, inference_inventory)
}

pub fn load_lexicon_str(
    text: &str,
    alphabet: &Alphabet,
    inference_inventory: &[&PatternTemplate],
) -> Result<LexiconLoad> {
    let mut load = LexiconLoad::default();
    let mut seen_keys = std::collections::BTreeSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let raw: RawEntry = serde_json::from_str(raw_line).map_err(|e| Error::LexiconLine {
            line,
            msg: format!("{e}"),
        })?;
        let lemma_text = raw.lemma.clone();
        match validate_entry(raw, alphabet, inference_inventory) {
            Ok(entry) => {
                if !seen_keys.insert(entry.key.clone()) {
                    load.quarantined.push(Quarantined {
                        line,
                        lemma: lemma_text,
                        reason: format!("duplicate entry identity {}", entry.key),
                    });
                } else {
                    load.entries.push(entry);
                }
            }
            Err(reason) => load.quarantined.push(Quarantined {
                line,
                lemma: lemma_text,
                reason,
            }),
        }
    }
    Ok(load)
}

/// Semantic validation of one parsed line; an `Err` is a quarantine reason.
fn validate_entry(
    raw: RawEntry,
    alphabet: &Alphabet,
    inference_inventory: &[&PatternTemplate],
) -> std::result::Result<LexEntry, String> {
    let lemma = SurfaceForm::new(raw.lemma, alphabet).map_err(|e| format!("lemma: {e}"))?;
    let root = Root::parse(&raw.root, alphabet)
        .map_err(|e| format!("root: {e}"))?
        .with_gloss(raw.root_gloss);
    let pos: Pos = raw.pos.parse().map_err(|e| format!("{e}"))?;
    let deriv_class: Option<DerivClass> = match raw.deriv_class {
        Some(c) => Some(c.parse().map_err(|e| format!("{e}"))?),
        None => None,
    };
    if let Some(class) = deriv_class {
        if !class.allowed_pos().contains(&pos) {
            return Err(format!("class {class} does not allow pos {pos}"));
        }
    }

    let template = match raw.template {
        Some(t) => {
            let template =
                PatternTemplate::parse(&t, alphabet).map_err(|e| format!("template {t:?}: {e}"))?;
            let generated = interdigitate(&root, &template).map_err(|e| format!("{e}"))?;
            if generated != lemma {
                return Err(format!(
                    "lemma {lemma} does not match {root} x {t} = {generated}"
                ));
            }
            template
        }
        None => {
            // No annotated pattern: infer one, but only if it is unambiguous.
            let candidates =
                infer_templates(&lemma, &root, inference_inventory.iter().copied(), alphabet);
            match candidates.len() {
                1 => (*candidates.iter().next().unwrap()).clone(),
                0 => return Err("no template in the inventory derives this lemma".into()),
                n => {
                    let mut alts: Vec<&str> =
                        candidates.iter().map(|t| t.source_text()).collect();
                    alts.sort_unstable();
                    return Err(format!("ambiguous template ({n} candidates: {})", alts.join(", ")));
                }
            }
        }
    };

    let mut inflected = InflectedForms::default();
    if let Some(forms) = raw.inflected_forms {
        if let Some(f) = forms.feminine_singular {
            inflected.feminine_singular =
                Some(SurfaceForm::new(f, alphabet).map_err(|e| format!("feminine_singular: {e}"))?);
        }
        if let Some(p) = forms.broken_plural {
            inflected.broken_plural =
                Some(SurfaceForm::new(p, alphabet).map_err(|e| format!("broken_plural: {e}"))?);
        }
    }

    let key = LexEntry::make_key(lemma.as_str(), template.source_text(), raw.gloss.as_deref());
    Ok(LexEntry {
        key,
        lemma,
        root,
        template,
        pos,
        deriv_class,
        gloss: raw.gloss,
        inflected,
    })
}

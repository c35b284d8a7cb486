//! The abstract pattern network: a rule graph whose nodes are abstract
//! patterns tagged with class and part of speech, and whose edges are
//! derivational relations between them.
//!
//! Three tables feed the network. The canonical table is hand-written and
//! covers verb forms plus their derived nominal patterns. The affixational
//! table is generated by appending derivational affixes to canonical entries.
//! The semantic-specification table is generated from class-level constraints
//! and models class/pos shifts that keep the main pattern, optionally routed
//! through an inflected base form (feminine singular or broken plural).
//!
//! Edges are generated from class-level rules and never filtered by whether a
//! combination is attested; unattested entries simply never match a lemma.
//!
//! The network is built single-threaded and then compiled into an immutable
//! [`AbstractNetwork`] that concurrent readers share.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::enums::{BaseFormRequirement, Canonicality, DerivClass, Pos, Relation, SourceTable};
use crate::error::{Error, Result};
use crate::pattern::{PatternTemplate, Slot};

/// Distinguished id of the network root. It is not a pattern entry; edges
/// from it attach unaugmented verbs and primary nouns directly to the root
/// of each derivational family.
pub const ROOT_ID: &str = "ROOT";

/// Distinguished pattern id used for force-attached orphan nodes.
pub const UNKNOWN_ID: &str = "UNKNOWN";

/// The regular feminine-singular suffix, appended when a semantic
/// specification builds on the feminine form of its base.
pub const FEMININE_SUFFIX: &str = "+a(h)";

#[derive(Debug, Clone, Serialize)]
pub struct PatternEntry {
    pub id: String,
    pub tag: String,
    pub deriv_class: DerivClass,
    pub pos: Pos,
    pub template: PatternTemplate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub augmentation_form: Option<String>,
    pub canonicality: Canonicality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivEdge {
    pub parent_id: String,
    pub child_id: String,
    pub relation: Relation,
    pub source_table: SourceTable,
    pub base_form_requirement: BaseFormRequirement,
}

/// Mutable entry/edge sets while the tables are loaded and expanded.
#[derive(Debug, Clone, Default)]
pub struct NetworkDraft {
    pub entries: BTreeMap<String, PatternEntry>,
    pub edges: Vec<DerivEdge>,
}

impl NetworkDraft {
    fn insert_entry(&mut self, entry: PatternEntry) -> Result<()> {
        check_class_pos(&entry)?;
        if entry.id == ROOT_ID || entry.id == UNKNOWN_ID {
            return Err(Error::DuplicateEntryId { id: entry.id });
        }
        if self.entries.contains_key(&entry.id) {
            return Err(Error::DuplicateEntryId { id: entry.id });
        }
        self.entries.insert(entry.id.clone(), entry);
        Ok(())
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

fn check_class_pos(entry: &PatternEntry) -> Result<()> {
    if !entry.deriv_class.allowed_pos().contains(&entry.pos) {
        return Err(Error::ClassPosMismatch {
            id: entry.id.clone(),
            class: entry.deriv_class.to_string(),
            pos: entry.pos.to_string(),
        });
    }
    Ok(())
}

/// Rows of a tab-separated table with a mandatory header line. `#` comments
/// and blank lines are skipped.
fn read_table(text: &str, path: &str, header: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let cells: Vec<String> = raw.split('\t').map(|c| c.trim().to_string()).collect();
        if !saw_header {
            if cells != header {
                return Err(Error::Table {
                    path: path.to_string(),
                    line,
                    msg: format!("expected header {:?}", header.join("\t")),
                });
            }
            saw_header = true;
            continue;
        }
        if cells.len() != header.len() {
            return Err(Error::Table {
                path: path.to_string(),
                line,
                msg: format!("expected {} columns, got {}", header.len(), cells.len()),
            });
        }
        rows.push((line, cells));
    }
    // A file with no rows (or nothing but comments) is a valid empty table.
    Ok(rows)
}

const CANONICAL_HEADER: &[&str] = &[
    "id",
    "tag",
    "deriv_class",
    "pos",
    "template",
    "augmentation_form",
    "canonicality",
    "parent_id",
    "relation",
];

/// Loads the canonical table: one pattern entry per row and one derivational
/// edge per declared parent link. Referential integrity and acyclicity are
/// validated before the draft is returned.
pub fn load_canonical(path: &Path, alphabet: &Alphabet) -> Result<NetworkDraft> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_canonical_str(&text, &path.display().to_string(), alphabet)
}

pub fn load_canonical_str(text: &str, path: &str, alphabet: &Alphabet) -> Result<NetworkDraft> {
    let mut draft = NetworkDraft::default();
    let table_err = |line: usize, msg: String| Error::Table {
        path: path.to_string(),
        line,
        msg,
    };
    for (line, cells) in read_table(text, path, CANONICAL_HEADER)? {
        let [id, tag, class, pos, template, aug, canon, parent, relation] =
            <[String; 9]>::try_from(cells).expect("column count checked");
        let deriv_class: DerivClass = class.parse().map_err(|e| table_err(line, format!("{e}")))?;
        let pos: Pos = pos.parse().map_err(|e| table_err(line, format!("{e}")))?;
        let template = PatternTemplate::parse(&template, alphabet)
            .map_err(|e| table_err(line, format!("template {template:?}: {e}")))?;
        let canonicality: Canonicality =
            canon.parse().map_err(|e| table_err(line, format!("{e}")))?;
        let relation: Relation = relation.parse().map_err(|e| table_err(line, format!("{e}")))?;
        if parent.is_empty() {
            return Err(table_err(line, format!("entry {id:?} has no parent_id")));
        }
        draft.insert_entry(PatternEntry {
            id: id.clone(),
            tag,
            deriv_class,
            pos,
            template,
            augmentation_form: (!aug.is_empty()).then_some(aug),
            canonicality,
        })?;
        draft.edges.push(DerivEdge {
            parent_id: parent,
            child_id: id,
            relation,
            source_table: SourceTable::Canonical,
            base_form_requirement: BaseFormRequirement::Lemma,
        });
    }
    check_integrity(&draft)?;
    check_acyclic(&draft)?;
    Ok(draft)
}

fn check_integrity(draft: &NetworkDraft) -> Result<()> {
    for edge in &draft.edges {
        if edge.parent_id != ROOT_ID && !draft.entries.contains_key(&edge.parent_id) {
            return Err(Error::DanglingParent {
                id: edge.child_id.clone(),
                parent: edge.parent_id.clone(),
            });
        }
        if !draft.entries.contains_key(&edge.child_id) {
            return Err(Error::DanglingParent {
                id: edge.parent_id.clone(),
                parent: edge.child_id.clone(),
            });
        }
        if edge.parent_id == edge.child_id {
            return Err(Error::Cycle {
                path: vec![edge.parent_id.clone(), edge.child_id.clone()],
            });
        }
    }
    Ok(())
}

/// Depth-first cycle check over the edge set; reports the offending id path.
fn check_acyclic(draft: &NetworkDraft) -> Result<()> {
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for edge in &draft.edges {
        children
            .entry(edge.parent_id.as_str())
            .or_default()
            .push(edge.child_id.as_str());
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    let mut stack_path: Vec<&str> = Vec::new();

    fn visit<'a>(
        id: &'a str,
        children: &BTreeMap<&'a str, Vec<&'a str>>,
        state: &mut BTreeMap<&'a str, u8>,
        stack_path: &mut Vec<&'a str>,
    ) -> Result<()> {
        match state.get(id).copied().unwrap_or(0) {
            1 => {
                let start = stack_path.iter().position(|x| *x == id).unwrap_or(0);
                let mut path: Vec<String> =
                    stack_path[start..].iter().map(|s| s.to_string()).collect();
                path.push(id.to_string());
                return Err(Error::Cycle { path });
            }
            2 => return Ok(()),
            _ => {}
        }
        state.insert(id, 1);
        stack_path.push(id);
        if let Some(kids) = children.get(id) {
            for kid in kids {
                visit(kid, children, state, stack_path)?;
            }
        }
        stack_path.pop();
        state.insert(id, 2);
        Ok(())
    }

    for id in draft.entries.keys() {
        visit(id.as_str(), &children, &mut state, &mut stack_path)?;
    }
    Ok(())
}

/// A derivational affix rule: append `affix` to every entry of an applicable
/// class, producing a new entry of the result class.
#[derive(Debug, Clone)]
pub struct AffixRule {
    pub affix: String,
    pub applicable_classes: BTreeSet<DerivClass>,
    pub result_class: DerivClass,
    pub result_pos: Pos,
    pub relation: Relation,
}

const AFFIX_HEADER: &[&str] = &[
    "affix",
    "applicable_classes",
    "result_class",
    "result_pos",
    "relation",
];

pub fn load_affix_rules(path: &Path, alphabet: &Alphabet) -> Result<Vec<AffixRule>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_affix_rules_str(&text, &path.display().to_string(), alphabet)
}

pub fn load_affix_rules_str(text: &str, path: &str, alphabet: &Alphabet) -> Result<Vec<AffixRule>> {
    let mut rules = Vec::new();
    for (line, cells) in read_table(text, path, AFFIX_HEADER)? {
        let [affix, classes, result_class, result_pos, relation] =
            <[String; 5]>::try_from(cells).expect("column count checked");
        let rule = AffixRule {
            affix,
            applicable_classes: parse_class_list(&classes)?,
            result_class: result_class.parse()?,
            result_pos: result_pos.parse()?,
            relation: relation.parse()?,
        };
        validate_affix_rule(&rule, alphabet).map_err(|e| Error::Table {
            path: path.to_string(),
            line,
            msg: format!("{e}"),
        })?;
        rules.push(rule);
    }
    Ok(rules)
}

fn parse_class_list(text: &str) -> Result<BTreeSet<DerivClass>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn validate_affix_rule(rule: &AffixRule, alphabet: &Alphabet) -> Result<()> {
    if !rule.affix.starts_with('+') {
        return Err(Error::InvalidAffixRule {
            msg: format!("affix {:?} must begin with '+'", rule.affix),
        });
    }
    let fragment = PatternTemplate::parse(&rule.affix, alphabet).map_err(|e| {
        Error::InvalidAffixRule {
            msg: format!("affix {:?}: {e}", rule.affix),
        }
    })?;
    if fragment.slots().iter().any(|s| matches!(s, Slot::Radical(_))) {
        return Err(Error::InvalidAffixRule {
            msg: format!("affix {:?} must not reference radicals", rule.affix),
        });
    }
    if rule.applicable_classes.is_empty() {
        return Err(Error::InvalidAffixRule {
            msg: "empty applicable_classes".into(),
        });
    }
    if !rule.result_class.allowed_pos().contains(&rule.result_pos) {
        return Err(Error::InvalidAffixRule {
            msg: format!(
                "result class {} does not allow pos {}",
                rule.result_class, rule.result_pos
            ),
        });
    }
    Ok(())
}

/// Generates affixational entries: for every entry whose class is applicable,
/// a new entry with the affix appended to its template and an edge from the
/// base. Generated ids are the base id plus the affix text. Existing entries
/// and edges are never touched.
pub fn expand_affixational(
    draft: &NetworkDraft,
    rules: &[AffixRule],
    alphabet: &Alphabet,
) -> Result<NetworkDraft> {
    let mut out = draft.clone();
    for (id, base) in &draft.entries {
        for rule in rules {
            if !rule.applicable_classes.contains(&base.deriv_class) {
                continue;
            }
            let source = format!("{}{}", base.template.source_text(), rule.affix);
            let template =
                PatternTemplate::parse(&source, alphabet).map_err(|e| Error::AffixConcat {
                    base_id: id.clone(),
                    affix: rule.affix.clone(),
                    source: Box::new(e),
                })?;
            let new_id = format!("{}{}", id, rule.affix);
            out.insert_entry(PatternEntry {
                id: new_id.clone(),
                tag: format!("{}{}", base.tag, rule.affix),
                deriv_class: rule.result_class,
                pos: rule.result_pos,
                template,
                augmentation_form: base.augmentation_form.clone(),
                canonicality: base.canonicality,
            })?;
            out.edges.push(DerivEdge {
                parent_id: id.clone(),
                child_id: new_id,
                relation: rule.relation,
                source_table: SourceTable::Affixational,
                base_form_requirement: BaseFormRequirement::Lemma,
            });
        }
    }
    Ok(out)
}

/// A semantic-specification rule. `base_classes`/`base_pos` filter the base
/// entries; the result is a class/pos shift with the stated relation,
/// optionally anchored to an inflected form of the base lemma.
#[derive(Debug, Clone)]
pub struct SemSpecRule {
    pub base_classes: BTreeSet<DerivClass>,
    pub base_pos: Option<Pos>,
    pub result_pos: Pos,
    pub result_class: DerivClass,
    pub base_form_requirement: BaseFormRequirement,
    pub relation: Relation,
}

const SEMSPEC_HEADER: &[&str] = &[
    "base_classes",
    "base_pos",
    "result_pos",
    "result_class",
    "base_form_requirement",
    "relation",
];

pub fn load_semspec_rules(path: &Path) -> Result<Vec<SemSpecRule>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_semspec_rules_str(&text, &path.display().to_string())
}

pub fn load_semspec_rules_str(text: &str, path: &str) -> Result<Vec<SemSpecRule>> {
    let mut rules = Vec::new();
    for (line, cells) in read_table(text, path, SEMSPEC_HEADER)? {
        let [classes, base_pos, result_pos, result_class, requirement, relation] =
            <[String; 6]>::try_from(cells).expect("column count checked");
        let rule = SemSpecRule {
            base_classes: parse_class_list(&classes)?,
            base_pos: if base_pos.is_empty() {
                None
            } else {
                Some(base_pos.parse()?)
            },
            result_pos: result_pos.parse()?,
            result_class: result_class.parse()?,
            base_form_requirement: requirement.parse()?,
            relation: relation.parse()?,
        };
        validate_semspec_rule(&rule).map_err(|e| Error::Table {
            path: path.to_string(),
            line,
            msg: format!("{e}"),
        })?;
        rules.push(rule);
    }
    Ok(rules)
}

fn validate_semspec_rule(rule: &SemSpecRule) -> Result<()> {
    if rule.base_classes.is_empty() {
        return Err(Error::InvalidSemSpecRule {
            msg: "empty base_classes".into(),
        });
    }
    if !rule.result_class.allowed_pos().contains(&rule.result_pos) {
        return Err(Error::InvalidSemSpecRule {
            msg: format!(
                "result class {} does not allow pos {}",
                rule.result_class, rule.result_pos
            ),
        });
    }
    // The shift must change class or pos; a rule whose result equals its own
    // base filter would duplicate entries in place.
    let pos_unchanged = rule.base_pos.is_none() || rule.base_pos == Some(rule.result_pos);
    if rule.base_classes.contains(&rule.result_class) && pos_unchanged {
        return Err(Error::InvalidSemSpecRule {
            msg: format!(
                "rule does not shift class or pos for base class {}",
                rule.result_class
            ),
        });
    }
    Ok(())
}

/// Generates semantic-specification entries from the canonical and
/// affixational entries already in `draft`.
///
/// For `lemma` and `feminine_singular` requirements the child template is the
/// base template, with the feminine suffix appended in the latter case. For
/// `broken_plural` the child pattern is not derivable from the base (plural
/// patterns are lexical), so the rule pairs every filtered base with every
/// existing entry of the result class/pos and duplicates that entry's
/// template under the base.
pub fn expand_semantic_spec(
    draft: &NetworkDraft,
    rules: &[SemSpecRule],
    alphabet: &Alphabet,
) -> Result<NetworkDraft> {
    let mut out = draft.clone();
    for (ridx, rule) in rules.iter().enumerate() {
        let bases: Vec<&PatternEntry> = draft
            .entries
            .values()
            .filter(|e| {
                rule.base_classes.contains(&e.deriv_class)
                    && rule.base_pos.is_none_or(|p| p == e.pos)
            })
            .collect();
        match rule.base_form_requirement {
            BaseFormRequirement::Lemma | BaseFormRequirement::FeminineSingular => {
                let suffix = if rule.base_form_requirement == BaseFormRequirement::FeminineSingular
                {
                    FEMININE_SUFFIX
                } else {
                    ""
                };
                for base in &bases {
                    let source = format!("{}{}", base.template.source_text(), suffix);
                    let template = PatternTemplate::parse(&source, alphabet).map_err(|e| {
                        Error::AffixConcat {
                            base_id: base.id.clone(),
                            affix: suffix.to_string(),
                            source: Box::new(e),
                        }
                    })?;
                    let new_id = format!("{}:spec{}", base.id, ridx);
                    out.insert_entry(PatternEntry {
                        id: new_id.clone(),
                        tag: format!("{}:spec{}", base.tag, ridx),
                        deriv_class: rule.result_class,
                        pos: rule.result_pos,
                        template,
                        augmentation_form: base.augmentation_form.clone(),
                        canonicality: base.canonicality,
                    })?;
                    out.edges.push(DerivEdge {
                        parent_id: base.id.clone(),
                        child_id: new_id,
                        relation: rule.relation,
                        source_table: SourceTable::SemanticSpec,
                        base_form_requirement: rule.base_form_requirement,
                    });
                }
            }
            BaseFormRequirement::BrokenPlural => {
                let donors: Vec<&PatternEntry> = draft
                    .entries
                    .values()
                    .filter(|e| e.deriv_class == rule.result_class && e.pos == rule.result_pos)
                    .collect();
                for base in &bases {
                    for donor in &donors {
                        let new_id = format!("{}:spec{}:{}", base.id, ridx, donor.id);
                        out.insert_entry(PatternEntry {
                            id: new_id.clone(),
                            tag: format!("{}:spec{}", donor.tag, ridx),
                            deriv_class: rule.result_class,
                            pos: rule.result_pos,
                            template: donor.template.clone(),
                            augmentation_form: None,
                            canonicality: donor.canonicality,
                        })?;
                        out.edges.push(DerivEdge {
                            parent_id: base.id.clone(),
                            child_id: new_id,
                            relation: rule.relation,
                            source_table: SourceTable::SemanticSpec,
                            base_form_requirement: BaseFormRequirement::BrokenPlural,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The frozen, queryable network.
#[derive(Debug, Clone)]
pub struct AbstractNetwork {
    entries: BTreeMap<String, PatternEntry>,
    edges: Vec<DerivEdge>,
    /// Template source text of a child entry -> indexes of its incoming edges.
    child_index: BTreeMap<String, Vec<usize>>,
}

/// Freezes a draft: verifies referential integrity, single-source rootedness,
/// reachability, acyclicity, and that unaugmented verbs attach only to the
/// root; then builds the child template index.
pub fn compile(draft: NetworkDraft) -> Result<AbstractNetwork> {
    check_integrity(&draft)?;
    check_acyclic(&draft)?;

    let mut incoming: BTreeMap<&str, usize> = BTreeMap::new();
    for edge in &draft.edges {
        *incoming.entry(edge.child_id.as_str()).or_default() += 1;
        if draft
            .entries
            .get(&edge.child_id)
            .is_some_and(|e| e.deriv_class == DerivClass::UnaugmentedVerb)
            && edge.parent_id != ROOT_ID
        {
            return Err(Error::UnaugmentedNotAtRoot {
                id: edge.child_id.clone(),
            });
        }
    }
    for id in draft.entries.keys() {
        if !incoming.contains_key(id.as_str()) {
            return Err(Error::SecondSource { id: id.clone() });
        }
    }

    // Reachability from ROOT.
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for edge in &draft.edges {
        children
            .entry(edge.parent_id.as_str())
            .or_default()
            .push(edge.child_id.as_str());
    }
    let mut reached: BTreeSet<&str> = BTreeSet::new();
    let mut frontier = vec![ROOT_ID];
    while let Some(id) = frontier.pop() {
        if let Some(kids) = children.get(id) {
            for kid in kids {
                if reached.insert(kid) {
                    frontier.push(kid);
                }
            }
        }
    }
    for id in draft.entries.keys() {
        if !reached.contains(id.as_str()) {
            return Err(Error::UnreachableEntry { id: id.clone() });
        }
    }

    let mut child_index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (idx, edge) in draft.edges.iter().enumerate() {
        let template = draft.entries[&edge.child_id].template.source_text();
        child_index.entry(template.to_string()).or_default().push(idx);
    }

    Ok(AbstractNetwork {
        entries: draft.entries,
        edges: draft.edges,
        child_index,
    })
}

impl AbstractNetwork {
    pub fn entry(&self, id: &str) -> Option<&PatternEntry> {
        self.entries.get(id)
    }

    pub fn entries(&self) -> impl Iterator<Item = &PatternEntry> {
        self.entries.values()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn edges(&self) -> &[DerivEdge] {
        &self.edges
    }

    /// Incoming edges of every entry whose template serializes to `template`.
    pub fn child_edges(&self, template: &str) -> &[usize] {
        self.child_index.get(template).map_or(&[], Vec::as_slice)
    }

    pub fn child_index(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.child_index
    }

    /// Deduplicated templates of all entries, for inference and sampling.
    pub fn templates(&self) -> Vec<&PatternTemplate> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for entry in self.entries.values() {
            if seen.insert(entry.template.source_text()) {
                out.push(&entry.template);
            }
        }
        out
    }

    /// Deterministic JSON export: entries sorted by id, edges in generation
    /// order. Identical inputs serialize byte-identically.
    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct Export<'a> {
            entries: Vec<&'a PatternEntry>,
            edges: &'a [DerivEdge],
        }
        let export = Export {
            entries: self.entries.values().collect(),
            edges: &self.edges,
        };
        let mut out = serde_json::to_string_pretty(&export).expect("network serialization");
        out.push('\n');
        out
    }

    /// One-line description for logs.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{} pattern entries, {} edges, {} distinct child templates",
            self.entries.len(),
            self.edges.len(),
            self.child_index.len()
        );
        out
    }
}

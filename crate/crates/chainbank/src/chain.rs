//! The concrete level: aligning a derivational family (all lemmas of one
//! root) against the abstract network.
//!
//! Construction is a monotone fixpoint. Starting from the family-root node,
//! every lemma is attached once per candidate pairing — a pairing being an
//! already-attached parent node plus a network edge whose child entry matches
//! the lemma's template, pos, and class. A lemma licensed by several pairings
//! is duplicated, one node per pairing. Passes repeat until nothing new
//! attaches; because the state only grows and pairings depend only on the
//! reached set, the result is independent of lexicon order. Lemmas that never
//! attach become orphans, which are data, not errors.
//!
//! Node ids are assigned canonically after the fixpoint (root, lemma, ordinal
//! over duplicates), so serialized trees are byte-stable across runs and
//! input permutations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::alphabet::Alphabet;
use crate::enums::{BaseFormRequirement, DerivClass, Pos, Relation};
use crate::eval::round_half_up2;
use crate::lexicon::LexEntry;
use crate::network::{AbstractNetwork, DerivEdge, ROOT_ID, UNKNOWN_ID};
use crate::pattern::{match_surface, Root, SurfaceForm};

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Force-attach otherwise disconnected lemmas to the family root with an
    /// `unknown` relation instead of listing them as orphans.
    pub attach_orphans: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainNode {
    pub node_id: String,
    /// The family-root node carries the dotted root here as a label.
    pub lemma: SurfaceForm,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub entry_ref: Option<String>,
    pub pattern_id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub deriv_class: Option<DerivClass>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pos: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChainEdge {
    pub parent: String,
    pub child: String,
    pub relation: Relation,
    pub base_form_used: BaseFormRequirement,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyTree {
    pub root: Root,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub root_gloss: Option<String>,
    pub nodes: Vec<ChainNode>,
    pub edges: Vec<ChainEdge>,
    pub orphans: Vec<String>,
}

impl FamilyTree {
    pub fn root_node_id(&self) -> String {
        self.root.dotted()
    }

    pub fn node(&self, node_id: &str) -> Option<&ChainNode> {
        self.nodes.iter().find(|n| n.node_id == node_id)
    }

    /// Edges as `(child lemma, parent lemma, relation)` text triples,
    /// force-attached orphans excluded.
    pub fn relation_triples(&self) -> Vec<(SurfaceForm, SurfaceForm, Relation)> {
        let by_id: BTreeMap<&str, &ChainNode> =
            self.nodes.iter().map(|n| (n.node_id.as_str(), n)).collect();
        self.edges
            .iter()
            .filter(|e| e.relation != Relation::Unknown)
            .filter_map(|e| {
                let child = by_id.get(e.child.as_str())?;
                let parent = by_id.get(e.parent.as_str())?;
                Some((child.lemma.clone(), parent.lemma.clone(), e.relation))
            })
            .collect()
    }

    /// Lexicon entry keys attached through a real (non-`unknown`) pairing.
    pub fn detected_entries(&self) -> BTreeSet<&str> {
        self.nodes
            .iter()
            .filter(|n| n.pattern_id != UNKNOWN_ID)
            .filter_map(|n| n.entry_ref.as_deref())
            .collect()
    }

    /// Deterministic pretty JSON, newline-terminated.
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("tree serialization");
        out.push('\n');
        out
    }
}

/// One admissible attachment of a lemma: a parent node plus the licensing
/// network edge.
#[derive(Debug, Clone)]
pub struct Pairing<'n> {
    pub parent_node_id: String,
    pub edge: &'n DerivEdge,
    pub base_form_used: BaseFormRequirement,
}

/// All pairings of `entry` against the attached nodes, per the matching
/// contract: the entry's template string equals the child entry's template,
/// pos and (when annotated) class agree, the parent node realizes the edge's
/// parent pattern, and an edge with an inflected-base requirement matches
/// only if the parent lemma supplies that form and the entry's template
/// re-derives the root from it.
pub fn candidate_pairings<'n>(
    entry: &LexEntry,
    attached: &[ChainNode],
    entries: &[LexEntry],
    network: &'n AbstractNetwork,
    alphabet: &Alphabet,
) -> Vec<Pairing<'n>> {
    let lookup: BTreeMap<&str, &LexEntry> =
        entries.iter().map(|e| (e.key.as_str(), e)).collect();
    let views: Vec<(usize, &str, Option<&str>)> = attached
        .iter()
        .enumerate()
        .map(|(i, n)| (i, n.pattern_id.as_str(), n.entry_ref.as_deref()))
        .collect();
    let mut out: Vec<Pairing<'n>> = pairings_against(entry, &views, &lookup, network, alphabet)
        .into_iter()
        .map(|(idx, edge_idx, used)| Pairing {
            parent_node_id: attached[idx].node_id.clone(),
            edge: &network.edges()[edge_idx],
            base_form_used: used,
        })
        .collect();
    out.sort_by(|a, b| {
        a.parent_node_id
            .cmp(&b.parent_node_id)
            .then_with(|| a.edge.child_id.cmp(&b.edge.child_id))
    });
    out
}

/// Core matcher shared by the public op and the fixpoint. `views` is one
/// `(tag, pattern_id, entry_key)` triple per attached node.
fn pairings_against<T: Copy>(
    entry: &LexEntry,
    views: &[(T, &str, Option<&str>)],
    lookup: &BTreeMap<&str, &LexEntry>,
    network: &AbstractNetwork,
    alphabet: &Alphabet,
) -> Vec<(T, usize, BaseFormRequirement)> {
    let mut out = Vec::new();
    for &edge_idx in network.child_edges(entry.template.source_text()) {
        let edge = &network.edges()[edge_idx];
        let child = network
            .entry(&edge.child_id)
            .expect("compiled network integrity");
        if child.pos != entry.pos {
            continue;
        }
        if let Some(class) = entry.deriv_class {
            if class != child.deriv_class {
                continue;
            }
        }
        for &(tag, pattern_id, entry_key) in views {
            if pattern_id != edge.parent_id {
                continue;
            }
            match edge.base_form_requirement {
                BaseFormRequirement::Lemma => {
                    out.push((tag, edge_idx, BaseFormRequirement::Lemma));
                }
                requirement => {
                    // Inflection as an intermediary stage: the parent lemma
                    // must supply the form, and the relevant part of the
                    // child template must re-derive the root from it. The
                    // feminine form realizes the whole template (its marker
                    // included); a broken plural realizes the pre-affix stem.
                    let Some(parent) = entry_key.and_then(|k| lookup.get(k)) else {
                        continue;
                    };
                    let Some(form) = parent.inflected.get(requirement) else {
                        continue;
                    };
                    let probe = match requirement {
                        BaseFormRequirement::FeminineSingular => {
                            entry.template.without_boundaries()
                        }
                        BaseFormRequirement::BrokenPlural => entry.template.stem(),
                        BaseFormRequirement::Lemma => unreachable!(),
                    };
                    if match_surface(form, &probe, alphabet).contains(&entry.root) {
                        out.push((tag, edge_idx, requirement));
                    }
                }
            }
        }
    }
    out
}

struct BuildNode {
    /// Canonical path key: parent path + entry key + relation + child
    /// pattern. Independent of discovery order.
    path: String,
    entry_idx: Option<usize>,
    pattern_id: String,
    parent: Option<usize>,
    relation: Option<Relation>,
    base_form_used: BaseFormRequirement,
}

/// Grows the family tree for one root to its fixpoint. All entries must
/// share `root`.
pub fn build_family(
    root: &Root,
    entries: &[LexEntry],
    network: &AbstractNetwork,
    alphabet: &Alphabet,
    options: BuildOptions,
) -> FamilyTree {
    debug_assert!(entries.iter().all(|e| e.root == *root));
    let lookup: BTreeMap<&str, &LexEntry> =
        entries.iter().map(|e| (e.key.as_str(), e)).collect();

    let mut nodes = vec![BuildNode {
        path: root.dotted(),
        entry_idx: None,
        pattern_id: ROOT_ID.to_string(),
        parent: None,
        relation: None,
        base_form_used: BaseFormRequirement::Lemma,
    }];
    let mut seen: BTreeSet<String> = BTreeSet::new();
    seen.insert(root.dotted());

    loop {
        let mut changed = false;
        for (entry_idx, entry) in entries.iter().enumerate() {
            let views: Vec<(usize, &str, Option<&str>)> = nodes
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    (
                        i,
                        n.pattern_id.as_str(),
                        n.entry_idx.map(|j| entries[j].key.as_str()),
                    )
                })
                .collect();
            let pairings = pairings_against(entry, &views, &lookup, network, alphabet);
            for (parent_idx, edge_idx, used) in pairings {
                let edge = &network.edges()[edge_idx];
                let path = format!(
                    "{}/{}@{}#{}",
                    nodes[parent_idx].path, entry.key, edge.relation, edge.child_id
                );
                if seen.insert(path.clone()) {
                    nodes.push(BuildNode {
                        path,
                        entry_idx: Some(entry_idx),
                        pattern_id: edge.child_id.clone(),
                        parent: Some(parent_idx),
                        relation: Some(edge.relation),
                        base_form_used: used,
                    });
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let attached: BTreeSet<usize> = nodes.iter().filter_map(|n| n.entry_idx).collect();
    let mut orphans: Vec<String> = entries
        .iter()
        .enumerate()
        .filter(|(i, _)| !attached.contains(i))
        .map(|(_, e)| e.key.clone())
        .collect();
    orphans.sort();

    if options.attach_orphans {
        for (entry_idx, entry) in entries.iter().enumerate() {
            if attached.contains(&entry_idx) {
                continue;
            }
            nodes.push(BuildNode {
                path: format!("{}/{}@{}#{}", root.dotted(), entry.key, Relation::Unknown, UNKNOWN_ID),
                entry_idx: Some(entry_idx),
                pattern_id: UNKNOWN_ID.to_string(),
                parent: Some(0),
                relation: Some(Relation::Unknown),
                base_form_used: BaseFormRequirement::Lemma,
            });
        }
        orphans.clear();
    }

    finalize(root, entries, network, nodes, orphans)
}

/// Canonical renumbering and serialization-ready assembly.
fn finalize(
    root: &Root,
    entries: &[LexEntry],
    network: &AbstractNetwork,
    nodes: Vec<BuildNode>,
    orphans: Vec<String>,
) -> FamilyTree {
    let lemma_of = |n: &BuildNode| -> &str {
        n.entry_idx
            .map(|i| entries[i].lemma.as_str())
            .unwrap_or_default()
    };

    let mut order: Vec<usize> = (1..nodes.len()).collect();
    order.sort_by(|&a, &b| {
        lemma_of(&nodes[a])
            .cmp(lemma_of(&nodes[b]))
            .then_with(|| nodes[a].path.cmp(&nodes[b].path))
    });

    let mut ids: Vec<String> = vec![String::new(); nodes.len()];
    ids[0] = root.dotted();
    let mut per_lemma: BTreeMap<&str, usize> = BTreeMap::new();
    for &i in &order {
        let lemma = lemma_of(&nodes[i]);
        let ordinal = per_lemma.entry(lemma).or_insert(0);
        *ordinal += 1;
        ids[i] = format!("{}:{}:{}", root.dotted(), lemma, ordinal);
    }

    let mut out_nodes = Vec::with_capacity(nodes.len());
    out_nodes.push(ChainNode {
        node_id: ids[0].clone(),
        lemma: SurfaceForm::raw(root.dotted()),
        entry_ref: None,
        pattern_id: ROOT_ID.to_string(),
        deriv_class: None,
        pos: None,
    });
    let mut out_edges = Vec::with_capacity(nodes.len().saturating_sub(1));
    for &i in &order {
        let node = &nodes[i];
        let entry = &entries[node.entry_idx.expect("non-root node has an entry")];
        let (deriv_class, pos) = match network.entry(&node.pattern_id) {
            Some(p) => (Some(p.deriv_class), Some(p.pos)),
            // Force-attached orphan: fall back to the lexicon annotation.
            None => (entry.deriv_class, Some(entry.pos)),
        };
        out_nodes.push(ChainNode {
            node_id: ids[i].clone(),
            lemma: entry.lemma.clone(),
            entry_ref: Some(entry.key.clone()),
            pattern_id: node.pattern_id.clone(),
            deriv_class,
            pos,
        });
        out_edges.push(ChainEdge {
            parent: ids[node.parent.expect("non-root node has a parent")].clone(),
            child: ids[i].clone(),
            relation: node.relation.expect("non-root node has a relation"),
            base_form_used: node.base_form_used,
        });
    }
    out_edges.sort();

    let root_gloss = entries
        .iter()
        .find_map(|e| e.root.gloss().map(str::to_string))
        .or_else(|| root.gloss().map(str::to_string));

    FamilyTree {
        root: root.clone(),
        root_gloss,
        nodes: out_nodes,
        edges: out_edges,
        orphans,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankStats {
    pub root_count: usize,
    pub lemma_count: usize,
    pub detected_lemma_count: usize,
    pub relation_count: usize,
    pub detected_pct: f64,
    pub quarantined_count: usize,
}

#[derive(Debug, Clone)]
pub struct Bank {
    pub trees: Vec<FamilyTree>,
    pub stats: BankStats,
}

impl Bank {
    pub fn with_quarantined(mut self, count: usize) -> Self {
        self.stats.quarantined_count = count;
        self
    }

    /// Flat `(child, parent, relation)` TSV over all trees, one line per
    /// chain edge, ordered by root.
    pub fn relations_tsv(&self) -> String {
        let mut out = String::from("# child\tparent\trelation\n");
        for tree in &self.trees {
            let mut triples = tree.relation_triples();
            triples.sort();
            for (child, parent, relation) in triples {
                out.push_str(child.as_str());
                out.push('\t');
                out.push_str(parent.as_str());
                out.push('\t');
                out.push_str(relation.as_str());
                out.push('\n');
            }
        }
        out
    }
}

fn group_by_root(entries: Vec<LexEntry>) -> BTreeMap<String, (Root, Vec<LexEntry>)> {
    let mut groups: BTreeMap<String, (Root, Vec<LexEntry>)> = BTreeMap::new();
    for entry in entries {
        let key = entry.root.dotted();
        groups
            .entry(key)
            .or_insert_with(|| (entry.root.clone(), Vec::new()))
            .1
            .push(entry);
    }
    groups
}

fn assemble(trees: Vec<FamilyTree>, lemma_count: usize) -> Bank {
    let detected: usize = trees.iter().map(|t| t.detected_entries().len()).sum();
    let relations: usize = trees
        .iter()
        .map(|t| t.edges.iter().filter(|e| e.relation != Relation::Unknown).count())
        .sum();
    let stats = BankStats {
        root_count: trees.len(),
        lemma_count,
        detected_lemma_count: detected,
        relation_count: relations,
        detected_pct: if lemma_count == 0 {
            0.0
        } else {
            round_half_up2(100.0 * detected as f64 / lemma_count as f64)
        },
        quarantined_count: 0,
    };
    Bank { trees, stats }
}

/// Builds one family tree per root, ordered by root. With the `parallel`
/// feature the families are built on a rayon pool; collection preserves root
/// order, so output is identical to the sequential path.
pub fn build_bank(
    entries: Vec<LexEntry>,
    network: &AbstractNetwork,
    alphabet: &Alphabet,
    options: BuildOptions,
) -> Bank {
    let lemma_count = entries.len();
    let groups: Vec<(Root, Vec<LexEntry>)> = group_by_root(entries).into_values().collect();

    #[cfg(feature = "parallel")]
    let trees: Vec<FamilyTree> = groups
        .par_iter()
        .map(|(root, members)| build_family(root, members, network, alphabet, options))
        .collect();

    #[cfg(not(feature = "parallel"))]
    let trees: Vec<FamilyTree> = groups
        .iter()
        .map(|(root, members)| build_family(root, members, network, alphabet, options))
        .collect();

    assemble(trees, lemma_count)
}

/// Sequential reference path; always available for comparison benchmarks.
pub fn build_bank_sequential(
    entries: Vec<LexEntry>,
    network: &AbstractNetwork,
    alphabet: &Alphabet,
    options: BuildOptions,
) -> Bank {
    let lemma_count = entries.len();
    let groups = group_by_root(entries);
    let trees: Vec<FamilyTree> = groups
        .values()
        .map(|(root, members)| build_family(root, members, network, alphabet, options))
        .collect();
    assemble(trees, lemma_count)
}

/// Adds a single network edge by id and recompiles; test support for
/// monotonicity checks.
#[doc(hidden)]
pub fn with_extra_edge(
    network: &AbstractNetwork,
    parent_id: &str,
    child_id: &str,
    relation: Relation,
) -> crate::error::Result<AbstractNetwork> {
    let mut draft = crate::network::NetworkDraft {
        entries: network.entries().map(|e| (e.id.clone(), e.clone())).collect(),
        edges: network.edges().to_vec(),
    };
    draft.edges.push(DerivEdge {
        parent_id: parent_id.to_string(),
        child_id: child_id.to_string(),
        relation,
        source_table: crate::enums::SourceTable::Canonical,
        base_form_requirement: BaseFormRequirement::Lemma,
    });
    crate::network::compile(draft)
}

/// Post-hoc checker, independent of the fixpoint: every chain edge must be
/// licensed by a network edge with matching relation, parent pattern, child
/// pattern, pos, and class; inflected-base edges are re-verified against the
/// parent entry's stored form. Scans the raw edge list rather than the child
/// index.
pub fn verify_pairing_soundness(
    tree: &FamilyTree,
    entries: &[LexEntry],
    network: &AbstractNetwork,
    alphabet: &Alphabet,
) -> std::result::Result<(), String> {
    let by_id: BTreeMap<&str, &ChainNode> =
        tree.nodes.iter().map(|n| (n.node_id.as_str(), n)).collect();
    let by_key: BTreeMap<&str, &LexEntry> = entries.iter().map(|e| (e.key.as_str(), e)).collect();
    for edge in &tree.edges {
        if edge.relation == Relation::Unknown {
            continue;
        }
        let child_node = by_id
            .get(edge.child.as_str())
            .ok_or_else(|| format!("edge child {} missing", edge.child))?;
        let parent_node = by_id
            .get(edge.parent.as_str())
            .ok_or_else(|| format!("edge parent {} missing", edge.parent))?;
        let entry_key = child_node
            .entry_ref
            .as_deref()
            .ok_or_else(|| format!("non-root node {} lacks an entry", child_node.node_id))?;
        let entry = by_key
            .get(entry_key)
            .ok_or_else(|| format!("unknown entry {entry_key}"))?;

        let licensed = network.edges().iter().any(|n| {
            if n.parent_id != parent_node.pattern_id
                || n.child_id != child_node.pattern_id
                || n.relation != edge.relation
                || n.base_form_requirement != edge.base_form_used
            {
                return false;
            }
            let Some(child_pattern) = network.entry(&n.child_id) else {
                return false;
            };
            if child_pattern.template.source_text() != entry.template.source_text()
                || child_pattern.pos != entry.pos
                || entry.deriv_class.is_some_and(|c| c != child_pattern.deriv_class)
            {
                return false;
            }
            match n.base_form_requirement {
                BaseFormRequirement::Lemma => true,
                requirement => {
                    let Some(parent_entry) = parent_node
                        .entry_ref
                        .as_deref()
                        .and_then(|k| by_key.get(k))
                    else {
                        return false;
                    };
                    let Some(form) = parent_entry.inflected.get(requirement) else {
                        return false;
                    };
                    let probe = match requirement {
                        BaseFormRequirement::FeminineSingular => {
                            entry.template.without_boundaries()
                        }
                        BaseFormRequirement::BrokenPlural => entry.template.stem(),
                        BaseFormRequirement::Lemma => unreachable!(),
                    };
                    match_surface(form, &probe, alphabet).contains(&entry.root)
                }
            }
        });
        if !licensed {
            return Err(format!(
                "edge {} -[{}]-> {} has no licensing network pair",
                edge.parent, edge.relation, edge.child
            ));
        }
    }
    // Reachability and acyclicity.
    let root_id = tree.root_node_id();
    let mut parents: BTreeMap<&str, &str> = BTreeMap::new();
    for edge in &tree.edges {
        parents.insert(edge.child.as_str(), edge.parent.as_str());
    }
    for node in &tree.nodes {
        let mut cursor = node.node_id.as_str();
        let mut hops = 0;
        while cursor != root_id {
            match parents.get(cursor) {
                Some(next) => cursor = next,
                None => return Err(format!("node {} unreachable from root", node.node_id)),
            }
            hops += 1;
            if hops > tree.nodes.len() {
                return Err(format!("cycle through {}", node.node_id));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::load_lexicon;
    use crate::network::{
        compile, expand_affixational, expand_semantic_spec, load_affix_rules, load_canonical,
        load_semspec_rules,
    };
    use std::path::{Path, PathBuf};

    fn fixture(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures")
            .join(name)
    }

    struct World {
        alphabet: Alphabet,
        network: AbstractNetwork,
        entries: Vec<LexEntry>,
    }

    fn world() -> World {
        let alphabet = Alphabet::load(&fixture("alphabet.tsv")).unwrap();
        let canonical = load_canonical(&fixture("canonical.tsv"), &alphabet).unwrap();
        let affix = load_affix_rules(&fixture("affix_rules.tsv"), &alphabet).unwrap();
        let semspec = load_semspec_rules(&fixture("semspec_rules.tsv")).unwrap();
        let draft = expand_affixational(&canonical, &affix, &alphabet).unwrap();
        let draft = expand_semantic_spec(&draft, &semspec, &alphabet).unwrap();
        let network = compile(draft).unwrap();
        let load = load_lexicon(&fixture("lexicon.jsonl"), &alphabet, &[]).unwrap();
        assert!(load.quarantined.is_empty(), "{:?}", load.quarantined);
        World {
            alphabet,
            network,
            entries: load.entries,
        }
    }

    fn family(w: &World, root: &str) -> (Root, Vec<LexEntry>) {
        let entries: Vec<LexEntry> = w
            .entries
            .iter()
            .filter(|e| e.root.dotted() == root)
            .cloned()
            .collect();
        (entries[0].root.clone(), entries)
    }

    #[test]
    fn empty_family_is_root_only() {
        let w = world();
        let root = Root::parse("b.d.ع", &w.alphabet).unwrap();
        let tree = build_family(&root, &[], &w.network, &w.alphabet, BuildOptions::default());
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.nodes[0].node_id, "b.d.ع");
        assert!(tree.edges.is_empty());
        assert!(tree.orphans.is_empty());
    }

    #[test]
    fn figure_chain_unit() {
        let w = world();
        let (root, entries) = family(&w, "b.d.ع");
        let tree = build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default());
        let lemmas: Vec<&str> = tree.nodes.iter().map(|n| n.lemma.as_str()).collect();
        assert_eq!(lemmas, vec!["b.d.ع", "AibdaAع", "AibdaAعiy~", "badaع", "Âbdaع"]);
        let triples = tree.relation_triples();
        assert_eq!(triples.len(), 4);
        assert!(tree.orphans.is_empty());
        assert_eq!(tree.root_gloss.as_deref(), Some("innovation related"));
    }

    #[test]
    fn candidate_pairings_masdar_example() {
        let w = world();
        let (root, entries) = family(&w, "b.d.ع");
        let tree = build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default());
        let masdar = entries
            .iter()
            .find(|e| e.lemma.as_str() == "AibdaAع")
            .unwrap();
        let pairings = candidate_pairings(masdar, &tree.nodes, &entries, &w.network, &w.alphabet);
        assert_eq!(pairings.len(), 1);
        assert_eq!(pairings[0].edge.relation, Relation::MasdarOf);
        let parent = tree.node(&pairings[0].parent_node_id).unwrap();
        assert_eq!(parent.lemma.as_str(), "Âbdaع");
    }

    #[test]
    fn candidate_pairings_broken_plural_example() {
        let w = world();
        let (root, entries) = family(&w, "H.d.d");
        let tree = build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default());
        let attributive = entries
            .iter()
            .find(|e| e.lemma.as_str() == "Huduwdiy~")
            .unwrap();
        let pairings =
            candidate_pairings(attributive, &tree.nodes, &entries, &w.network, &w.alphabet);
        assert_eq!(pairings.len(), 1);
        assert_eq!(pairings[0].base_form_used, BaseFormRequirement::BrokenPlural);
        let parent = tree.node(&pairings[0].parent_node_id).unwrap();
        assert_eq!(parent.lemma.as_str(), "Had~");
    }

    #[test]
    fn candidate_pairings_unknown_template_is_empty() {
        let w = world();
        let (root, mut entries) = family(&w, "D.r.b");
        // Retag the masdar with a template absent from the network.
        let unusual = crate::pattern::PatternTemplate::parse("1a2a3iy~", &w.alphabet).unwrap();
        entries[1].template = unusual;
        let tree = build_family(&root, &entries[..1], &w.network, &w.alphabet, BuildOptions::default());
        let pairings =
            candidate_pairings(&entries[1], &tree.nodes, &entries, &w.network, &w.alphabet);
        assert!(pairings.is_empty());
    }

    #[test]
    fn homograph_masdars_attach_to_both_verbs() {
        let w = world();
        let (root, entries) = family(&w, "f.l.H");
        let tree = build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default());
        let count = |lemma: &str| tree.nodes.iter().filter(|n| n.lemma.as_str() == lemma).count();
        assert_eq!(count("falaH"), 2);
        assert_eq!(count("falAH"), 2);
        assert_eq!(count("filAHa(h)"), 2);
        assert_eq!(tree.edges.len(), 6);
        // Duplication exactness: pairings against the final node set equal
        // the node count per entry.
        let masdar = entries.iter().find(|e| e.lemma.as_str() == "falAH").unwrap();
        let pairings = candidate_pairings(masdar, &tree.nodes, &entries, &w.network, &w.alphabet);
        assert_eq!(pairings.len(), 2);
    }

    #[test]
    fn inflected_intermediary_requires_the_form() {
        let w = world();
        let (root, mut entries) = family(&w, "H.d.d");
        let tree = build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default());
        assert!(tree.orphans.is_empty());
        let edge = tree
            .edges
            .iter()
            .find(|e| e.base_form_used == BaseFormRequirement::BrokenPlural)
            .unwrap();
        assert_eq!(edge.relation, Relation::AttributiveOf);

        // Dropping the stored plural orphans the attributive.
        for e in &mut entries {
            e.inflected.broken_plural = None;
        }
        let tree = build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default());
        assert_eq!(tree.orphans.len(), 1);
        assert!(tree.orphans[0].starts_with("Huduwdiy~|"));
    }

    #[test]
    fn feminine_intermediary_chain() {
        let w = world();
        let (root, entries) = family(&w, "ع.l.m");
        let tree = build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default());
        assert!(tree.orphans.is_empty());
        let triples = tree.relation_triples();
        assert!(triples.iter().any(|(c, p, r)| c.as_str() == "maعluwma(h)"
            && p.as_str() == "maعluwm"
            && *r == Relation::SemanticSpecificationOf));
        let fem_edge = tree
            .edges
            .iter()
            .find(|e| e.base_form_used == BaseFormRequirement::FeminineSingular);
        assert!(fem_edge.is_some());
    }

    #[test]
    fn fixpoint_is_order_independent() {
        let w = world();
        let (root, entries) = family(&w, "f.l.H");
        let baseline = build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default())
            .to_json_string();
        let mut rotated = entries.clone();
        rotated.rotate_left(2);
        let other = build_family(&root, &rotated, &w.network, &w.alphabet, BuildOptions::default())
            .to_json_string();
        assert_eq!(baseline, other);
    }

    #[test]
    fn bank_over_fixture_lexicon() {
        let w = world();
        let bank = build_bank(
            w.entries.clone(),
            &w.network,
            &w.alphabet,
            BuildOptions::default(),
        );
        assert_eq!(bank.stats.root_count, 9);
        assert_eq!(bank.stats.lemma_count, 35);
        assert_eq!(bank.stats.detected_lemma_count, 35);
        assert_eq!(bank.stats.detected_pct, 100.0);
        // Edge instances: duplicated lemmas contribute one relation each.
        assert_eq!(bank.stats.relation_count, 37);

        let sequential = build_bank_sequential(
            w.entries.clone(),
            &w.network,
            &w.alphabet,
            BuildOptions::default(),
        );
        let a: Vec<String> = bank.trees.iter().map(|t| t.to_json_string()).collect();
        let b: Vec<String> = sequential.trees.iter().map(|t| t.to_json_string()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn single_root_bank() {
        let w = world();
        let (_, entries) = family(&w, "š.m.s");
        let bank = build_bank(entries, &w.network, &w.alphabet, BuildOptions::default());
        assert_eq!(bank.trees.len(), 1);
        assert_eq!(bank.stats.root_count, 1);
    }

    #[test]
    fn soundness_checker_accepts_fixture_bank() {
        let w = world();
        let bank = build_bank(
            w.entries.clone(),
            &w.network,
            &w.alphabet,
            BuildOptions::default(),
        );
        for tree in &bank.trees {
            let members: Vec<LexEntry> = w
                .entries
                .iter()
                .filter(|e| e.root == tree.root)
                .cloned()
                .collect();
            verify_pairing_soundness(tree, &members, &w.network, &w.alphabet).unwrap();
        }
    }

    #[test]
    fn soundness_checker_rejects_forged_edge() {
        let w = world();
        let (root, entries) = family(&w, "D.r.b");
        let mut tree =
            build_family(&root, &entries, &w.network, &w.alphabet, BuildOptions::default());
        // Forge a relation the network does not license.
        let forged = tree.edges[0].clone();
        tree.edges.push(ChainEdge {
            relation: Relation::FormXOf,
            ..forged
        });
        assert!(verify_pairing_soundness(&tree, &entries, &w.network, &w.alphabet).is_err());
    }

    #[test]
    fn adding_a_network_edge_never_reduces_relations() {
        let w = world();
        let baseline = build_bank(
            w.entries.clone(),
            &w.network,
            &w.alphabet,
            BuildOptions::default(),
        );
        // License 1a23 masdars under the i-vocalism verb as well.
        let bigger = with_extra_edge(&w.network, "form-I.i", "I.a.masdar.1a23", Relation::MasdarOf)
            .unwrap();
        let grown = build_bank(w.entries.clone(), &bigger, &w.alphabet, BuildOptions::default());
        assert!(grown.stats.relation_count >= baseline.stats.relation_count);
    }

    #[test]
    fn attach_orphans_flag() {
        let w = world();
        let (root, mut entries) = family(&w, "H.d.d");
        for e in &mut entries {
            e.inflected.broken_plural = None;
        }
        let forced = build_family(
            &root,
            &entries,
            &w.network,
            &w.alphabet,
            BuildOptions { attach_orphans: true },
        );
        assert!(forced.orphans.is_empty());
        let unknown: Vec<&ChainEdge> = forced
            .edges
            .iter()
            .filter(|e| e.relation == Relation::Unknown)
            .collect();
        assert_eq!(unknown.len(), 1);
        assert_eq!(unknown[0].parent, "H.d.d");
        let node = forced.node(&unknown[0].child).unwrap();
        assert_eq!(node.pattern_id, UNKNOWN_ID);
        assert_eq!(node.lemma.as_str(), "Huduwdiy~");
        // Forced attachments are not detections.
        assert_eq!(forced.detected_entries().len(), 1);
    }
}

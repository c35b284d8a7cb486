//! Scoring predicted family trees against gold trees.
//!
//! Per gold lemma: it is *detected* when at least one predicted relation has
//! it as child. Among detected lemmas, *single correct* means exactly one
//! predicted relation and it matches gold; *multiple correct* means several
//! predicted relations (a duplicated lemma) of which at least one matches;
//! everything else detected is *no correct*. Percentages are detected/lemmas
//! and each bucket/detected, rounded half-up to two decimals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::chain::FamilyTree;
use crate::enums::Relation;
use crate::error::{Error, Result};
use crate::pattern::{Root, SurfaceForm};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoldRelation {
    pub child: SurfaceForm,
    pub parent: SurfaceForm,
    pub relation: Relation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldTree {
    pub root: Root,
    pub relations: BTreeSet<GoldRelation>,
}

impl GoldTree {
    /// Treats a predicted tree as gold: deduplicated text triples, force-
    /// attached orphans excluded.
    pub fn from_family(tree: &FamilyTree) -> GoldTree {
        let relations = tree
            .relation_triples()
            .into_iter()
            .map(|(child, parent, relation)| GoldRelation {
                child,
                parent,
                relation,
            })
            .collect();
        GoldTree {
            root: tree.root.clone(),
            relations,
        }
    }

    /// Lemmas the tree expects to be detected: all children of relations.
    pub fn lemmas(&self) -> BTreeSet<&SurfaceForm> {
        self.relations.iter().map(|r| &r.child).collect()
    }

    /// The relation set must form a DAG over lemmas.
    pub fn validate(&self) -> Result<()> {
        let mut parents: BTreeMap<&SurfaceForm, Vec<&SurfaceForm>> = BTreeMap::new();
        for rel in &self.relations {
            if rel.child == rel.parent {
                return Err(Error::GoldCycle {
                    root: self.root.dotted(),
                    cycle: vec![rel.child.to_string(), rel.parent.to_string()],
                });
            }
            parents.entry(&rel.child).or_default().push(&rel.parent);
        }
        // Walk upward from every lemma; a repeat within one walk is a cycle.
        for start in parents.keys() {
            let mut frontier = vec![(*start, vec![start.to_string()])];
            while let Some((lemma, path)) = frontier.pop() {
                if let Some(ups) = parents.get(lemma) {
                    for up in ups {
                        if path.contains(&up.to_string()) {
                            let mut cycle = path.clone();
                            cycle.push(up.to_string());
                            return Err(Error::GoldCycle {
                                root: self.root.dotted(),
                                cycle,
                            });
                        }
                        let mut next = path.clone();
                        next.push(up.to_string());
                        frontier.push((up, next));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Loads gold trees from a single JSON file (one tree or an array) or a
/// directory of `.json` files, one per root.
pub fn load_gold(path: &Path) -> Result<Vec<GoldTree>> {
    let gold_err = |msg: String| Error::Gold {
        path: path.display().to_string(),
        msg,
    };
    let mut trees: Vec<GoldTree> = Vec::new();
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|r| r.ok().map(|d| d.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        files.sort();
        for file in files {
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let tree: GoldTree = serde_json::from_str(&text).map_err(|e| Error::Gold {
                path: file.display().to_string(),
                msg: format!("{e}"),
            })?;
            trees.push(tree);
        }
    } else {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if text.trim_start().starts_with('[') {
            trees = serde_json::from_str(&text).map_err(|e| gold_err(format!("{e}")))?;
        } else {
            trees.push(serde_json::from_str(&text).map_err(|e| gold_err(format!("{e}")))?);
        }
    }
    let mut seen = BTreeSet::new();
    for tree in &trees {
        if !seen.insert(tree.root.dotted()) {
            return Err(Error::DuplicateGoldRoot {
                root: tree.root.dotted(),
            });
        }
        tree.validate()?;
    }
    Ok(trees)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Match on parent lemma alone, ignoring the relation label.
    pub parent_only: bool,
    /// Count a duplicated lemma as multiple-correct only when exactly one of
    /// its predicted relations matches gold.
    pub strict_multiple: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub roots: usize,
    pub lemmas: usize,
    pub detected: usize,
    pub single_correct: usize,
    pub multiple_correct: usize,
    pub no_correct: usize,
    pub detected_pct: f64,
    pub single_pct: f64,
    pub multiple_pct: f64,
    pub no_correct_pct: f64,
}

/// Half-up rounding to two decimals, the precision used everywhere counts
/// are reported.
pub fn round_half_up2(x: f64) -> f64 {
    (x * 100.0 + 0.5).floor() / 100.0
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        round_half_up2(100.0 * num as f64 / den as f64)
    }
}

impl MetricsReport {
    /// The formatter: raw counts in, percentages out. `detected` is scored
    /// against `lemmas`; the three buckets against `detected`, and they must
    /// partition it.
    pub fn from_counts(
        roots: usize,
        lemmas: usize,
        detected: usize,
        single_correct: usize,
        multiple_correct: usize,
        no_correct: usize,
    ) -> Self {
        debug_assert_eq!(single_correct + multiple_correct + no_correct, detected);
        MetricsReport {
            roots,
            lemmas,
            detected,
            single_correct,
            multiple_correct,
            no_correct,
            detected_pct: pct(detected, lemmas),
            single_pct: pct(single_correct, detected),
            multiple_pct: pct(multiple_correct, detected),
            no_correct_pct: pct(no_correct, detected),
        }
    }

    /// `"87.63 / 90.73 / 9.07 / 0.20"`: detected, single, multiple, none.
    pub fn percent_summary(&self) -> String {
        format!(
            "{:.2} / {:.2} / {:.2} / {:.2}",
            self.detected_pct, self.single_pct, self.multiple_pct, self.no_correct_pct
        )
    }

    /// Aligned text table.
    pub fn text_table(&self) -> String {
        let rows: [(&str, usize, Option<f64>); 6] = [
            ("Roots", self.roots, None),
            ("Lemmas", self.lemmas, None),
            ("Detected Relations", self.detected, Some(self.detected_pct)),
            ("Single Relation Correct", self.single_correct, Some(self.single_pct)),
            ("Multiple Relation Correct", self.multiple_correct, Some(self.multiple_pct)),
            ("No Correct Relation", self.no_correct, Some(self.no_correct_pct)),
        ];
        let mut out = String::new();
        for (label, count, pct) in rows {
            match pct {
                Some(p) => out.push_str(&format!("{label:<27} {count:>7}  ({p:.2}%)\n")),
                None => out.push_str(&format!("{label:<27} {count:>7}\n")),
            }
        }
        out
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Counts {
    lemmas: usize,
    detected: usize,
    single: usize,
    multiple: usize,
    none: usize,
}

impl Counts {
    fn add(self, other: Counts) -> Counts {
        Counts {
            lemmas: self.lemmas + other.lemmas,
            detected: self.detected + other.detected,
            single: self.single + other.single,
            multiple: self.multiple + other.multiple,
            none: self.none + other.none,
        }
    }
}

fn score_root(gold: &GoldTree, predicted: Option<&FamilyTree>, options: EvalOptions) -> Counts {
    // Predicted relations per child lemma, duplicates preserved: each chain
    // node contributes one relation instance.
    let mut predictions: BTreeMap<SurfaceForm, Vec<(SurfaceForm, Relation)>> = BTreeMap::new();
    if let Some(tree) = predicted {
        for (child, parent, relation) in tree.relation_triples() {
            predictions.entry(child).or_default().push((parent, relation));
        }
    }
    let mut counts = Counts::default();
    for lemma in gold.lemmas() {
        counts.lemmas += 1;
        let Some(instances) = predictions.get(lemma) else {
            continue;
        };
        counts.detected += 1;
        let matches = instances
            .iter()
            .filter(|(parent, relation)| {
                gold.relations.iter().any(|g| {
                    g.child == *lemma
                        && g.parent == *parent
                        && (options.parent_only || g.relation == *relation)
                })
            })
            .count();
        if instances.len() == 1 {
            if matches == 1 {
                counts.single += 1;
            } else {
                counts.none += 1;
            }
        } else {
            let multiple_ok = if options.strict_multiple {
                matches == 1
            } else {
                matches >= 1
            };
            if multiple_ok {
                counts.multiple += 1;
            } else {
                counts.none += 1;
            }
        }
    }
    counts
}

/// Scores predictions against gold trees. Gold roots with no predicted tree
/// count as fully undetected; predicted roots without gold are ignored.
pub fn evaluate(
    predicted: &[FamilyTree],
    gold: &[GoldTree],
    options: EvalOptions,
) -> Result<MetricsReport> {
    let mut seen = BTreeSet::new();
    for tree in gold {
        if !seen.insert(tree.root.dotted()) {
            return Err(Error::DuplicateGoldRoot {
                root: tree.root.dotted(),
            });
        }
        tree.validate()?;
    }
    let by_root: BTreeMap<String, &FamilyTree> = predicted
        .iter()
        .map(|t| (t.root.dotted(), t))
        .collect();

    #[cfg(feature = "parallel")]
    let total = gold
        .par_iter()
        .map(|g| score_root(g, by_root.get(&g.root.dotted()).copied(), options))
        .reduce(Counts::default, Counts::add);

    #[cfg(not(feature = "parallel"))]
    let total = gold
        .iter()
        .map(|g| score_root(g, by_root.get(&g.root.dotted()).copied(), options))
        .fold(Counts::default(), Counts::add);

    Ok(MetricsReport::from_counts(
        gold.len(),
        total.lemmas,
        total.detected,
        total.single,
        total.multiple,
        total.none,
    ))
}

/// Differences between one predicted tree and its gold tree.
#[derive(Debug, Clone, Serialize)]
pub struct TreeDelta {
    /// Gold relations with no predicted counterpart.
    pub missing: Vec<GoldRelation>,
    /// Predicted relations not in gold.
    pub spurious: Vec<GoldRelation>,
    /// Lemmas predicted with more than one relation.
    pub ambiguous: Vec<SurfaceForm>,
}

impl TreeDelta {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.spurious.is_empty() && self.ambiguous.is_empty()
    }
}

impl fmt::Display for TreeDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rel in &self.missing {
            writeln!(f, "missing: {} <- {} ({})", rel.child, rel.parent, rel.relation)?;
        }
        for rel in &self.spurious {
            writeln!(f, "spurious: {} <- {} ({})", rel.child, rel.parent, rel.relation)?;
        }
        for lemma in &self.ambiguous {
            writeln!(f, "ambiguous: {lemma}")?;
        }
        Ok(())
    }
}

/// Compares one predicted tree against gold for the same root.
pub fn diff_trees(predicted: &FamilyTree, gold: &GoldTree) -> Result<TreeDelta> {
    if predicted.root != gold.root {
        return Err(Error::RootMismatch {
            predicted: predicted.root.dotted(),
            gold: gold.root.dotted(),
        });
    }
    let mut lemma_counts: BTreeMap<SurfaceForm, usize> = BTreeMap::new();
    let mut predicted_set: BTreeSet<GoldRelation> = BTreeSet::new();
    for (child, parent, relation) in predicted.relation_triples() {
        *lemma_counts.entry(child.clone()).or_default() += 1;
        predicted_set.insert(GoldRelation {
            child,
            parent,
            relation,
        });
    }
    let missing: Vec<GoldRelation> = gold
        .relations
        .iter()
        .filter(|r| !predicted_set.contains(r))
        .cloned()
        .collect();
    let spurious: Vec<GoldRelation> = predicted_set
        .iter()
        .filter(|r| !gold.relations.contains(r))
        .cloned()
        .collect();
    let ambiguous: Vec<SurfaceForm> = lemma_counts
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|(l, _)| l)
        .collect();
    Ok(TreeDelta {
        missing,
        spurious,
        ambiguous,
    })
}

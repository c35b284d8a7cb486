//! Construction and evaluation of an Arabic derivational chain bank: per-root
//! trees that link derived lemmas to their bases through labelled
//! derivational relations.
//!
//! The pipeline has two levels. The abstract level ([`network`]) compiles
//! rule tables over abstract patterns (`1a2a3`, `ma12uw3`, ...) into a DAG of
//! pattern entries and derivational edges. The concrete level ([`chain`])
//! aligns a root-annotated lexicon against that network, growing one family
//! tree per root and duplicating nodes wherever a lemma pairs with several
//! bases. [`eval`] scores predicted trees against gold trees.
//!
//! Family construction is data-parallel across roots; the `parallel` feature
//! (on by default) runs it on a rayon pool, and disabling it falls back to an
//! identical sequential path.

pub mod alphabet;
pub mod chain;
pub mod enums;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod network;
pub mod pattern;
pub mod reference;
pub mod synth;

pub use alphabet::Alphabet;
pub use chain::{
    build_bank, build_bank_sequential, build_family, candidate_pairings, Bank, BankStats,
    BuildOptions, ChainEdge, ChainNode, FamilyTree,
};
pub use enums::{
    BaseFormRequirement, Canonicality, DerivClass, Pos, Relation, SourceTable, SymbolClass,
};
pub use error::{Error, Result};
pub use eval::{diff_trees, evaluate, EvalOptions, GoldRelation, GoldTree, MetricsReport, TreeDelta};
pub use lexicon::{load_lexicon, InflectedForms, LexEntry, LexiconLoad, Quarantined};
pub use network::{
    compile, expand_affixational, expand_semantic_spec, load_affix_rules, load_canonical,
    load_semspec_rules, AbstractNetwork, AffixRule, DerivEdge, NetworkDraft, PatternEntry,
    SemSpecRule, ROOT_ID, UNKNOWN_ID,
};
pub use pattern::{infer_templates, interdigitate, match_surface, PatternTemplate, Root, Slot, SurfaceForm};

/// Runs `f` on a rayon pool with `threads` workers when the `parallel`
/// feature is enabled; otherwise runs it directly.
#[cfg(feature = "parallel")]
pub fn run_with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn run_with_threads<R: Send>(_threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

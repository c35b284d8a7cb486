//! Shared fixture loading for integration tests.
#![allow(dead_code)] // each test binary uses a different subset

use std::path::{Path, PathBuf};

use chainbank::network::{
    compile, expand_affixational, expand_semantic_spec, load_affix_rules, load_semspec_rules,
};
use chainbank::{AbstractNetwork, Alphabet, LexEntry};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub struct World {
    pub alphabet: Alphabet,
    pub network: AbstractNetwork,
    pub entries: Vec<LexEntry>,
}

pub fn world() -> World {
    let alphabet = Alphabet::load(&fixture("alphabet.tsv")).unwrap();
    let network = compile_fixture_network(&alphabet, None);
    let load = chainbank::load_lexicon(&fixture("lexicon.jsonl"), &alphabet, &[]).unwrap();
    assert!(load.quarantined.is_empty(), "{:?}", load.quarantined);
    World {
        alphabet,
        network,
        entries: load.entries,
    }
}

/// Compiles the fixture tables, optionally dropping canonical rows whose id
/// matches `drop_ids` (dependent generated entries disappear with them).
pub fn compile_fixture_network(alphabet: &Alphabet, drop_ids: Option<&[&str]>) -> AbstractNetwork {
    let text = std::fs::read_to_string(fixture("canonical.tsv")).unwrap();
    let filtered = match drop_ids {
        None => text,
        Some(ids) => text
            .lines()
            .filter(|line| {
                let id = line.split('\t').next().unwrap_or_default();
                !ids.contains(&id)
            })
            .collect::<Vec<_>>()
            .join("\n"),
    };
    let canonical =
        chainbank::network::load_canonical_str(&filtered, "canonical.tsv", alphabet).unwrap();
    let affix = load_affix_rules(&fixture("affix_rules.tsv"), alphabet).unwrap();
    let semspec = load_semspec_rules(&fixture("semspec_rules.tsv")).unwrap();
    let draft = expand_affixational(&canonical, &affix, alphabet).unwrap();
    let draft = expand_semantic_spec(&draft, &semspec, alphabet).unwrap();
    compile(draft).unwrap()
}

pub fn family(world: &World, root: &str) -> Vec<LexEntry> {
    world
        .entries
        .iter()
        .filter(|e| e.root.dotted() == root)
        .cloned()
        .collect()
}

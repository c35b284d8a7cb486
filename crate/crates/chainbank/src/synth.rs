//! Synthetic lexicon generation: random roots interdigitated through the
//! compiled network's own patterns. Used by the scale tests and the
//! benchmarks; every generated lemma is attachable by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::enums::BaseFormRequirement;
use crate::lexicon::{InflectedForms, LexEntry};
use crate::network::{AbstractNetwork, ROOT_ID};
use crate::pattern::{interdigitate, Root};

/// Generates `n_roots` random families. Per root, a random connected slice
/// of the network is instantiated: start at the root-level entries and walk
/// down lemma-requirement edges, keeping each child with fixed probability.
/// Deterministic for a given seed.
pub fn synthetic_lexicon(
    network: &AbstractNetwork,
    alphabet: &Alphabet,
    n_roots: usize,
    seed: u64,
) -> Vec<LexEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let consonants = alphabet.consonants();
    let mut roots: Vec<Root> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    while roots.len() < n_roots {
        let radicals: Vec<String> = (0..3)
            .map(|_| consonants[rng.random_range(0..consonants.len())].to_string())
            .collect();
        let root = Root::from_symbols(radicals);
        if seen.insert(root.dotted()) {
            roots.push(root);
        }
    }

    let mut out = Vec::new();
    for root in &roots {
        // Frontier of attached pattern ids, walked top-down.
        let mut frontier: Vec<&str> = vec![ROOT_ID];
        let mut included: Vec<&str> = Vec::new();
        while let Some(parent_id) = frontier.pop() {
            for edge in network.edges() {
                if edge.parent_id != parent_id
                    || edge.base_form_requirement != BaseFormRequirement::Lemma
                {
                    continue;
                }
                let keep_p = if parent_id == ROOT_ID { 0.5 } else { 0.4 };
                if rng.random_range(0.0..1.0) >= keep_p {
                    continue;
                }
                let entry = network.entry(&edge.child_id).expect("network integrity");
                if entry.template.max_radical() as usize > root.arity() {
                    continue;
                }
                if included.contains(&entry.id.as_str()) {
                    continue;
                }
                included.push(&entry.id);
                frontier.push(&entry.id);
            }
        }
        for id in included {
            let entry = network.entry(id).expect("network integrity");
            let lemma = interdigitate(root, &entry.template).expect("arity checked");
            out.push(LexEntry {
                key: format!("{lemma}|{}|{id}", entry.template.source_text()),
                lemma,
                root: root.clone(),
                template: entry.template.clone(),
                pos: entry.pos,
                deriv_class: Some(entry.deriv_class),
                gloss: Some(id.to_string()),
                inflected: InflectedForms::default(),
            });
        }
    }
    out
}

//! Reference statistics of the released ChainBank v1.0 resource, built over
//! the full CamelMorph lexicon. Reproducing them requires that external
//! data; they are recorded here for documentation and sanity comparison, not
//! asserted by any test.

/// Root count as printed in the release's results table.
pub const CHAINBANK_V1_ROOTS_TABLE: usize = 4_924;

/// Root count as stated in the release description; the two figures disagree
/// by two and both are kept verbatim.
pub const CHAINBANK_V1_ROOTS_REPORTED: usize = 4_926;

/// Lemmas aligned against the abstract network.
pub const CHAINBANK_V1_LEMMAS: usize = 34_453;

/// Derivational connections in the released bank.
pub const CHAINBANK_V1_RELATIONS: usize = 23_333;

/// Detected-relation percentage over all roots.
pub const CHAINBANK_V1_DETECTED_PCT: f64 = 67.72;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while loading rule tables, parsing patterns,
/// or evaluating trees.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("alphabet line {line}: {msg}")]
    AlphabetLine { line: usize, msg: String },

    #[error("alphabet: duplicate symbol {symbol:?}")]
    DuplicateSymbol { symbol: String },

    #[error("empty template")]
    EmptyTemplate,

    #[error("empty surface form")]
    EmptySurface,

    #[error("unknown symbol {text:?} at byte {at}")]
    UnknownSymbol { at: usize, text: String },

    #[error("radical index {index} outside 1-4")]
    RadicalIndex { index: u8 },

    #[error("radical {index} referenced before all lower radicals")]
    RadicalOrder { index: u8 },

    #[error("template references radical {index} but root has {arity} radicals")]
    RadicalOutOfRange { index: u8, arity: usize },

    #[error("root must have 2-4 radicals, got {count}")]
    RootArity { count: usize },

    #[error("radical {symbol:?} is not a declared consonant")]
    RadicalNotConsonant { symbol: String },

    #[error("{path}:{line}: {msg}")]
    Table {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("duplicate pattern entry id {id:?}")]
    DuplicateEntryId { id: String },

    #[error("entry {id:?} references unknown parent {parent:?}")]
    DanglingParent { id: String, parent: String },

    #[error("cycle in pattern network: {}", path.join(" -> "))]
    Cycle { path: Vec<String> },

    #[error("entry {id:?} has no parent link; the network root must be the only source")]
    SecondSource { id: String },

    #[error("entry {id:?} is not reachable from the network root")]
    UnreachableEntry { id: String },

    #[error("entry {id:?}: class {class} does not allow pos {pos}")]
    ClassPosMismatch {
        id: String,
        class: String,
        pos: String,
    },

    #[error("unaugmented verb entry {id:?} must attach directly to the network root")]
    UnaugmentedNotAtRoot { id: String },

    #[error("invalid affix rule: {msg}")]
    InvalidAffixRule { msg: String },

    #[error("invalid semantic-specification rule: {msg}")]
    InvalidSemSpecRule { msg: String },

    #[error("expanding {base_id:?} with affix {affix:?}: {source}")]
    AffixConcat {
        base_id: String,
        affix: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown {kind} label {text:?}")]
    UnknownLabel { kind: &'static str, text: String },

    #[error("lexicon line {line}: {msg}")]
    LexiconLine { line: usize, msg: String },

    #[error("gold tree file {path}: {msg}")]
    Gold { path: String, msg: String },

    #[error("duplicate gold tree for root {root}")]
    DuplicateGoldRoot { root: String },

    #[error("gold tree for {root} is not a DAG over lemmas: {}", cycle.join(" -> "))]
    GoldCycle { root: String, cycle: Vec<String> },

    #[error("tree root mismatch: predicted {predicted}, gold {gold}")]
    RootMismatch { predicted: String, gold: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

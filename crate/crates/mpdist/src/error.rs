//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed Newick: {0}")]
    MalformedNewick(String),
    #[error("duplicate taxon '{0}'")]
    DuplicateTaxon(String),
    #[error("tree is not an unrooted binary tree: {0}")]
    NonBinary(String),
    #[error("malformed character file line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("taxon '{0}' has no state assigned")]
    MissingTaxon(String),
    #[error("unknown taxon '{0}'")]
    UnknownTaxon(String),
    #[error("empty taxon set")]
    EmptySet,
    #[error("trees have different leaf sets")]
    LeafSetMismatch,
    #[error("a quartet must consist of exactly 4 distinct taxa")]
    BadQuartetSize,
    #[error("blocks are not pairwise disjoint")]
    OverlappingBlocks,
    #[error("extension does not assign a state to every vertex")]
    PartialExtension,
    #[error("character does not assign a state to every taxon")]
    PartialCharacter,
    #[error("tree too small for this operation (need at least {0} taxa)")]
    TooSmall(usize),
    #[error("instance exceeds the cap for exact computation ({size} > {cap})")]
    TooLarge { size: usize, cap: usize },
    #[error("degenerate degree bounds: d1*d2 - d1 - d2 must be positive (got d1={d1}, d2={d2})")]
    DegenerateDegrees { d1: usize, d2: usize },
    #[error("too few taxa for partition: need at least {need}, have {have}")]
    TooFewTaxa { need: usize, have: usize },
    #[error("too few blocks: need at least {need}, have {have}")]
    TooFewBlocks { need: usize, have: usize },
    #[error("internal bound violation: {0}")]
    InternalBoundViolation(String),
    #[error("induced subtrees on the given set are equal; no conflicting quartet exists")]
    NoConflict,
    #[error("quartet {0:?} is not conflicting")]
    NotConflicting(Vec<String>),
    #[error("quartets {first:?} and {second:?} are not spanning-disjoint in T{tree}")]
    NotSpanningDisjoint {
        tree: usize,
        first: Vec<String>,
        second: Vec<String>,
    },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("trees are identical; the approximation ratio is undefined for distance 0")]
    IdenticalTrees,
    #[error("kernel has {size} taxa, above the exact-solve cap {cap}")]
    ExactCapExceeded { size: usize, cap: usize },
    #[error("invalid instance spec: {0}")]
    BadSpec(String),
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("permutation size {0} exceeds the configured limit {1}")]
    TooLarge(usize, usize),
    #[error("coloring must have exactly one gray edge, found {0}")]
    NotSingleGray(usize),
    #[error("gray edge ({0},{1}) touches the right boundary; reduction to an arc pair is undefined")]
    GrayAtBoundary(usize, usize),
    #[error("arc {0} out of range for size {1}")]
    ArcOutOfRange(usize, usize),
    #[error("operator parameter out of range: {0}")]
    RangeError(String),
    #[error("the arc labels lie in the same cycle")]
    SameCycle,
    #[error("the arc labels lie in distinct cycles")]
    DistinctCycles,
    #[error("permutation is not standard")]
    NotStandard,
    #[error("permutation is not irreducible")]
    NotIrreducible,
    #[error("cycle invariant contains a part of length 1; class counting is undefined")]
    UnsupportedCycleOne,
    #[error("sliding operator cannot act on the anchor edge (1,1)")]
    EdgeIsAnchor,
    #[error("expected rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("search budget exceeded in {0}")]
    SearchBudgetExceeded(String),
    #[error("structural helper failed: {0}")]
    HelperFailure(String),
    #[error("permutations are not connected: {0}")]
    NotConnected(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("lattice requires 2 <= K <= L, got K={k}, L={l}")]
    BadDims { k: usize, l: usize },
    #[error("spin value {spin} outside 1..={q}")]
    BadSpin { spin: u8, q: u8 },
    #[error("transpose requires K = L, got K={k}, L={l}")]
    NotSquare { k: usize, l: usize },
    #[error("config text malformed: {0}")]
    BadText(String),
    #[error("state space {states} exceeds the enumeration guard {guard}")]
    SpaceTooLarge { states: u128, guard: u64 },
    #[error("text format supports q <= 9, got q={0}")]
    TextQTooLarge(u8),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("chain is not irreducible (state {0} unreachable)")]
    NotIrreducible(usize),
    #[error("linear system is singular or failed to converge (residual {0:.3e})")]
    SingularSystem(f64),
    #[error("P and Q must be non-empty and disjoint")]
    BadBoundary,
    #[error("start state must lie outside the target set")]
    StartInTargets,
    #[error("exponent fit needs >= 4 samples with positive values and distinct beta")]
    InsufficientSamples,
    #[error("path invalid: {0}")]
    PathInvalid(String),
    #[error("supplied stationary weights do not balance (residual {0:.3e})")]
    BadStationaryWeights(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandscapeError {
    #[error("not a path: zero forward rate at step {0}")]
    NotAPath(usize),
    #[error("{0}")]
    Lattice(#[from] LatticeError),
    #[error("restricted BFS frontier exceeded {0} states")]
    FrontierTooLarge(usize),
    #[error("invalid canonical-path choices: {0}")]
    InvalidChoices(String),
    #[error("profile index {m} outside 0..{max}")]
    OutOfRange { m: usize, max: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LadderError {
    #[error("ladder enumeration supports 3 <= K <= 16, got {0}")]
    KTooLarge(usize),
    #[error("{0}")]
    Chain(#[from] ChainError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TestFnError {
    #[error("bulk families degenerate for L={0} < 5; use the materialized small-lattice build")]
    DegenerateBulk(usize),
    #[error("missing ladder solve for the requested dynamics")]
    MissingLadderSolve,
    #[error("family unavailable: {0}")]
    FamilyUnavailable(String),
    #[error("{0}")]
    Chain(#[from] ChainError),
    #[error("{0}")]
    Lattice(#[from] LatticeError),
    #[error("{0}")]
    Ladder(#[from] LadderError),
    #[error("{0}")]
    Landscape(#[from] LandscapeError),
}

use thiserror::Error;

/// Errors raised by the spin, phase-space and measurement routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid direction: theta={theta}, phi={phi}")]
    InvalidDirection { theta: f64, phi: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("slot width {delta_m} outside 1..={max}")]
    DeltaMOutOfRange { delta_m: usize, max: usize },
    #[error("slot index {index} out of range ({count} slots)")]
    SlotOutOfRange { index: usize, count: usize },
    #[error("slot {index} has probability {probability:e}; cannot condition on it")]
    ZeroProbabilitySlot { index: usize, probability: f64 },
    #[error("j = {j} exceeds the P-function cap {cap}")]
    JAboveCap { j: f64, cap: f64 },
    #[error("grid exact to degree {have} but degree {need} is required")]
    GridTooCoarse { need: usize, have: usize },
    #[error("maps are sampled on different grids")]
    GridMismatch,
    #[error("expectation value has imaginary part {0:e}")]
    ComplexExpectation(f64),
    #[error("partition needs at least {need} slots, has {have}")]
    TooFewSlots { need: usize, have: usize },
    #[error("invalid precession axis {0:?}")]
    InvalidAxis([f64; 3]),
    #[error("times must be strictly increasing")]
    NonIncreasingTimes,
    #[error("{0}")]
    Config(String),
    #[error("malformed map CSV at line {line}: {message}")]
    MapCsv { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

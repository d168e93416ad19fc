use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QecError {
    #[error("length mismatch: {0} qubits vs {1} qubits")]
    LengthMismatch(usize, usize),

    #[error("invalid Pauli string {0:?}: {1}")]
    ParsePauli(String, String),

    #[error("Pauli strings of {0} qubits are not supported (1..=64)")]
    UnsupportedWidth(usize),

    #[error("generators {0} and {1} anticommute")]
    NonCommutingGenerators(usize, usize),

    #[error("generators are linearly dependent")]
    DependentGenerators,

    #[error("invalid code definition: {0}")]
    InvalidCode(String),

    #[error("unknown code {0:?}")]
    UnknownCode(String),

    #[error("unknown noise family {0:?} (expected depolarizing, indep-flips, phase-flip or two-axis)")]
    UnknownFamily(String),

    #[error("parameter {param} outside the valid range of the {family} family")]
    FamilyRange { family: &'static str, param: f64 },

    #[error("not a Pauli channel: component {index} is {value:e}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("channel weight must be positive, got {0:e}")]
    NonPositiveWeight(f64),

    #[error("block noise entry {qubit} is not normalized (weight {weight})")]
    Unnormalized { qubit: usize, weight: f64 },

    #[error("{what} is limited to {limit} qubits; got {n}")]
    TooLarge { what: &'static str, n: usize, limit: usize },

    #[error("superoperator does not preserve Hermiticity")]
    NotHermiticityPreserving,

    #[error("exact level needs about {needed:.3e} coset maps, over the budget of {budget:.3e}; use Monte Carlo")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("entropy does not straddle the target {target}: H({lo}) = {h_lo}, H({hi}) = {hi_h}")]
    NoStraddle { lo: f64, hi: f64, h_lo: f64, hi_h: f64, target: f64 },

    #[error("no convergence transition of the iterated blind map on [{lo}, {hi}]: it {behavior} at both ends")]
    NoTransition { lo: f64, hi: f64, behavior: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, QecError>;

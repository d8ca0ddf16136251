use thiserror::Error;

/// Errors produced by group arithmetic, solvers, gates and the simulator.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("moduli list must be nonempty")]
    EmptyModuli,
    #[error("modulus at position {0} must be >= 1")]
    InvalidModulus(usize),
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("element has {got} residues but the group has rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("lists must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("matrix column {0} violates the homomorphism condition")]
    NotAHomomorphism(usize),
    #[error("matrix has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("automorphism matrix is not invertible")]
    NonInvertibleAutomorphism,
    #[error("inconsistent quadratic encoding at {0}")]
    InconsistentQuadratic(String),
    #[error("factor index {0} out of range")]
    FactorOutOfRange(usize),
    #[error("multiplier is not coprime to the factor modulus")]
    NonCoprimeMultiplier,
    #[error("generators {0} and {1} do not commute")]
    NonCommutingGenerators(usize, usize),
    #[error("stabilizer group has empty support")]
    EmptySupport,
    #[error("stabilizer code dimension exceeds one; not a stabilizer state")]
    NotAStabilizerState,
    #[error("forced outcome has probability zero")]
    ZeroProbabilityOutcome,
    #[error("register {0:?} is not defined at this point of the program")]
    UnknownRegister(String),
    #[error("register {0:?} is declared more than once")]
    DuplicateRegister(String),
    #[error("outcome of register {0:?} is not determined; supply it explicitly")]
    IndeterminatePrefix(String),
    #[error("register {0:?} does not hold a standard-basis outcome")]
    NotABasisOutcome(String),
    #[error("coset correction system has no solution")]
    CorrectionUnsolvable,
    #[error("dense oracle cap exceeded: group order {order} > {cap}")]
    DenseCapExceeded { order: String, cap: u64 },
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

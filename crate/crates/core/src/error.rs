use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("field size {0} is not a prime")]
    NotPrime(u32),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("value {value} is outside F_{q}")]
    ValueOutOfRange { value: u64, q: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is singular")]
    Singular,

    #[error("monomial of total degree {degree} exceeds declared bound {bound}")]
    DegreeExceeded { degree: u32, bound: u32 },

    #[error("Reed-Muller precondition violated: need d < m(q-1), got d={d}, m={m}, q={q}")]
    DegreeTooLarge { d: u32, m: usize, q: u32 },

    #[error("answers do not cover an information set")]
    NotInformationSet,

    #[error("no information set among responding workers")]
    NoInformationSetAvailable,

    #[error("{stragglers} stragglers exceed budget S={budget}")]
    StragglerBudgetExceeded { stragglers: usize, budget: usize },

    #[error("conditioning on an event of probability zero")]
    NullEvent,

    #[error("enumeration of {outcomes} outcomes exceeds cap {cap}")]
    EnumerationCap { outcomes: u128, cap: u64 },

    #[error("probabilities must be non-negative and sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("computation phase has not run")]
    NoComputation,
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lcm is undefined for a zero operand")]
    ZeroLcmOperand,

    #[error("cannot factorize {0}: input must be at least 2")]
    FactorizeTooSmall(String),

    #[error("base must be at least 2, got {0}")]
    InvalidBase(String),

    #[error("dividend must be positive")]
    ZeroDividend,

    #[error("rational with zero denominator")]
    ZeroDenominator,

    #[error("u0 and r must be positive, got u0={u0}, r={r}")]
    NonPositiveProgression { u0: u64, r: u64 },

    #[error("u0 and r must be coprime (u0={u0}, r={r}, gcd={gcd})")]
    NotCoprime { u0: u64, r: u64, gcd: u64 },

    #[error("window index k={k} exceeds n={n}")]
    WindowOutOfRange { n: u64, k: u64 },

    #[error("n must be at least 1")]
    ZeroPrefixIndex,

    /// `L_{n,k} / C_{n,k}` was not an integer. Only reachable through an
    /// arithmetic bug.
    #[error("integrality violation: {0}")]
    Integrality(String),

    #[error("bound hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid bound parameters: {0}")]
    InvalidParams(String),

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

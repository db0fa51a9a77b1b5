use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("alphabet must contain at least two letters, got {0}")]
    TrivialAlphabet(usize),

    #[error("partial quotient must be positive")]
    ZeroQuotient,

    #[error("empty continued fraction word")]
    EmptyWord,

    #[error("partial quotient {0} is not in the alphabet")]
    LetterNotInAlphabet(u64),

    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,

    #[error("numerator and denominator must satisfy 1 <= b <= d, got b={b}, d={d}")]
    NotProperFraction { b: u128, d: u128 },

    #[error("gcd({b}, {d}) = {gcd}, expected coprime arguments")]
    NotCoprime { b: u128, d: u128, gcd: u128 },

    #[error("{what} exceeds the budget of {limit}")]
    Budget { what: &'static str, limit: u64 },

    #[error("parameter {name} out of range: {detail}")]
    Param { name: &'static str, detail: String },

    #[error("ladder depth J = {depth} is below 10; need log(log N) >= {min_log_log_n:.6}")]
    LadderTooShort { depth: i64, min_log_log_n: f64 },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("grid did not stabilise: relative change {change:.3e} after {doublings} doublings")]
    GridUnstable { change: f64, doublings: usize },

    #[error("empty histogram")]
    EmptyHistogram,

    #[error("hypothesis fails at subset size {k}: prefix sum {sum} > {bound}")]
    HypothesisViolated { k: usize, sum: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, detail: impl Into<String>) -> Error {
    Error::Param {
        name,
        detail: detail.into(),
    }
}

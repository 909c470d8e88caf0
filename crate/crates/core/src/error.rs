use num_bigint::BigUint;
use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: domain errors (bad input, violated
/// preconditions) and budget errors (a configured resource cap was hit before
/// an answer could be certified). The CLI maps them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("moduli {a} and {b} are not coprime")]
    NotCoprime { a: BigUint, b: BigUint },

    #[error("precision cap of {cap_bits} bits reached before the enclosure was decided")]
    PrecisionExhausted { cap_bits: u32 },

    #[error("factorization budget exhausted; unfactored cofactor {cofactor}")]
    FactorizationBudget { cofactor: BigUint },

    #[error("exact discrepancy for s={dim}, N={len} is over the exact-mode budget; opt into the lower-bound estimator")]
    ExactModeBudget { dim: usize, len: usize },

    #[error("prime budget exhausted while building family for h={h}: primes up to {limit} bring the product only to {reached:.6} (target <= {target:.6})")]
    PrimeBudget {
        h: u64,
        limit: u64,
        reached: f64,
        target: f64,
    },

    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),
}

impl Error {
    /// Short machine-readable code used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidExponent(_) => "E_EXPONENT",
            Error::Domain(_) => "E_DOMAIN",
            Error::NotCoprime { .. } => "E_NOT_COPRIME",
            Error::PrecisionExhausted { .. } => "E_PRECISION_BUDGET",
            Error::FactorizationBudget { .. } => "E_FACTOR_BUDGET",
            Error::ExactModeBudget { .. } => "E_EXACT_BUDGET",
            Error::PrimeBudget { .. } => "E_PRIME_BUDGET",
            Error::EnumerationBudget(_) => "E_ENUM_BUDGET",
        }
    }

    /// True for errors caused by a resource cap rather than invalid input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. }
                | Error::FactorizationBudget { .. }
                | Error::ExactModeBudget { .. }
                | Error::PrimeBudget { .. }
                | Error::EnumerationBudget(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("valuation of zero undefined")]
    ZeroValuation,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("{value} has negative {prime}-adic valuation; clear the scaling first")]
    NegativeValuation { value: String, prime: u64 },

    #[error("singular form")]
    SingularForm,

    #[error("gram matrix is not symmetric")]
    NotSymmetric,

    #[error("non-integral lattice at p = {0}")]
    NonIntegral(u64),

    #[error("target is zero: use isotropy test")]
    ZeroTarget,

    #[error("gap undefined: lattice is isotropic at p = {0}")]
    GapUndefined(u64),

    #[error("form is not positive definite")]
    NotPositiveDefinite,

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("form is not classically integral (odd cross term in the doubled gram matrix)")]
    NotClassicallyIntegral,

    #[error("determinant {0} exceeds the factorization limit 10^12")]
    DeterminantTooLarge(String),

    #[error("{target} is represented at p = {prime}; no progression witness exists")]
    Represented { target: String, prime: u64 },

    #[error("residue modulus {prime}^{exponent} exceeds the 62-bit search range")]
    PrecisionExceeded { prime: u64, exponent: u32 },

    #[error("scaling by {0} leaves the doubled gram matrix non-integral")]
    NonIntegralScaling(String),

    #[error("invalid form description: {field}: {message}")]
    Description { field: String, message: String },

    #[error("invalid target {0:?}")]
    Target(String),
}

impl Error {
    pub(crate) fn description(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Description {
            field: field.into(),
            message: message.into(),
        }
    }
}

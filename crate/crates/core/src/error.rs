use alloc::string::String;

/// Errors raised by the numerical routes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(#[from] DomainError),

    #[error("configuration error: {0}")]
    Config(String),

    /// The real part of a Gaussian exponent is not positive definite, so the
    /// integral diverges.
    #[error("gaussian integral does not converge: {0}")]
    Convergence(&'static str),

    #[error("singular gaussian form: {0}")]
    Singular(String),

    #[error("monomial degree {degree} exceeds limit {limit}")]
    Degree { degree: u32, limit: u32 },
}

/// Inputs that lie outside the model's domain.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("unstable: λ₋ = μ − 2β = {lambda_minus} must be positive")]
    Unstable { lambda_minus: f64 },

    #[error("noise: C = {c} must be non-negative and at least |B| = {b_abs}")]
    Noise { c: f64, b_abs: f64 },

    #[error("invalid parameter {name} = {value}")]
    Parameter { name: &'static str, value: f64 },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("zero denominator: stationary occupation ⟨α*α⟩ is zero")]
    ZeroDenominator,

    #[error("invalid moment state: {0}")]
    MomentState(&'static str),

    #[error("invalid Q-function: {0}")]
    QFunction(&'static str),

    #[error("invalid correlation curve: {0}")]
    Curve(&'static str),

    #[error("missing anti-normal moment ⟨a^{m} a†^{l}⟩")]
    MissingMoment { l: u32, m: u32 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

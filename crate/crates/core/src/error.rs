use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "Gauss-Jacobi root finder did not converge (a = {a}, b = {b}, k = {k}, node {index})"
    )]
    NoConvergence { a: f64, b: f64, k: usize, index: usize },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("rule degree {rule_degree} is below the required {required} for an operator of degree {n}")]
    DegreeDeficiency {
        rule_degree: usize,
        required: usize,
        n: usize,
    },

    #[error("non-finite value {value} at node {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("point lies outside the unit ball (norm {norm})")]
    OutsideBall { norm: f64 },

    #[error("Gram matrix numerically singular at monomial {index} (residual ratio {ratio:e}); try a lower degree")]
    SingularGram { index: usize, ratio: f64 },

    #[error("orthonormal basis failed its Gram check (max deviation {deviation:e})")]
    GramCheck { deviation: f64 },

    #[error("growth fit: {0}")]
    Fit(String),

    #[error("rule file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

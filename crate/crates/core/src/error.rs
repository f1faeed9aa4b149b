use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The kernel is infinite at a puncture.
    #[error("kernel diverges at puncture (leading exponent {exponent})")]
    Divergent { exponent: f64 },

    /// A series hit its term cap before the truncation rule was met.
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    /// Adaptive quadrature failed for the norm of z^j.
    #[error("quadrature failed for index j = {j}: {reason}")]
    Quadrature { j: i64, reason: String },

    /// The omitted tail of an infinite basis sum could not be bounded.
    #[error("basis tail not certified at j = {j}: {reason}")]
    TailNotCertified { j: i64, reason: String },

    /// A verification sweep was configured so that nothing could be checked.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

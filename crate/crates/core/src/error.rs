use thiserror::Error;

/// Library error type. Variants mirror the failure classes of the public
/// contracts: configuration, dimension mismatch, truncation health, numeric
/// domain, and propagation aborts.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("truncation error: {msg} (suggested oscillator cutoff: {suggested_dim})")]
    Truncation { msg: String, suggested_dim: usize },

    #[error("operator contract violated: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("truncation abort: leakage {leakage:.3e} exceeded threshold {threshold:.3e} at t={t}")]
    LeakageAbort { leakage: f64, threshold: f64, t: f64 },

    #[error("accuracy abort: step-halving disagreement {distance:.3e} > {tol:.3e}; recommended dt <= {recommended_dt:.3e}")]
    AccuracyAbort {
        distance: f64,
        tol: f64,
        recommended_dt: f64,
    },

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;

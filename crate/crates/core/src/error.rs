use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("singular integrand at s = {s}: 1 + mu*s vanishes")]
    Singularity { s: f64 },

    #[error("nonlinearity evaluation failed at t = {t}: {message}")]
    Evaluation { t: f64, message: String },

    #[error("no admissible solution for k = {k} >= 2 with mu = {mu} < 0")]
    Admissibility { k: usize, mu: f64 },

    #[error("Picard iteration did not converge in {iterations} iterations (last change {distance:e})")]
    NonConvergence { iterations: usize, distance: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("refinement study failed: {0}")]
    Refinement(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

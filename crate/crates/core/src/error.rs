use thiserror::Error;

use crate::modifier::CoercivityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("adaptive quadrature did not converge on [{lo}, {hi}] within {budget} panels")]
    QuadratureNonConvergence { lo: f64, hi: f64, budget: usize },

    #[error("fixed-point iteration from {start} did not converge in {max_iter} iterations (last step {last_step:e})")]
    NoConvergence {
        start: f64,
        max_iter: usize,
        last_step: f64,
    },

    #[error("could not bracket f(m) = {target} with |m| <= {limit:e}")]
    BracketNotFound { target: f64, limit: f64 },

    #[error("critical temperature not bracketed: {0}")]
    PredicateNotBracketed(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("all {0} replicas failed; first error: {1}")]
    AllReplicasFailed(usize, String),

    #[error("infeasible transition band for r (parameter {0})")]
    InfeasibleBump(f64),

    #[error("modifier verification failed (eta = {:e}, unique critical point = {})", .0.eta_measured, .0.unique_critical_point)]
    VerificationFailed(Box<CoercivityReport>),

    #[error("numerical blow-up at t = {time} (|x| > 1e6 or non-finite); reduce dt")]
    NumericalBlowup { time: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {message}")]
    File { path: String, message: String },

    #[error("sample lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("empty input")]
    EmptyInput,

    #[error("bad range [{0}, {1}]")]
    BadRange(f64, f64),
}

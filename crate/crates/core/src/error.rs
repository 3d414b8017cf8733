use thiserror::Error;

use crate::phase_retrieval::RecoveryReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("input magnitude {0:e} is below the genericity floor")]
    ZeroInput(f64),

    #[error("non-generic input: {0}")]
    NonGenericInput(String),

    #[error("inversion residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("recovered signal is not real (imaginary residue {imag:e} relative to norm)")]
    NotRealSignal { imag: f64 },

    #[error("magnitude vectors violate Parseval: sum(y) = {time:e}, sum(z)/N = {freq:e}")]
    InconsistentMagnitudes { time: f64, freq: f64 },

    #[error("phase retrieval did not converge (best residual {:e})", .0.residual)]
    NoConvergence(Box<RecoveryReport>),

    #[error("global phase cannot be resolved: {0}")]
    PhaseUnresolvable(String),

    #[error("inconsistent invariants: {0}")]
    InconsistentInvariants(String),
}

pub(crate) fn check_order(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::OrderMismatch { left, right })
    }
}

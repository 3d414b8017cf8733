use std::fmt;
use std::fs;
use std::path::Path;

use heisenberg_invariants::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub const SUCCESS: i32 = 0;
pub const NEGATIVE: i32 = 1;
pub const BAD_INPUT: i32 = 2;
pub const DEGENERATE: i32 = 3;
pub const NO_CONVERGENCE: i32 = 4;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: i32, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        Self::new(BAD_INPUT, anyhow::anyhow!("{msg}"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OrderMismatch { .. } | Error::InvalidInput(_) => BAD_INPUT,
            Error::NoConvergence(_) => NO_CONVERGENCE,
            Error::ZeroInput(_)
            | Error::NonGenericInput(_)
            | Error::ResidualTooLarge { .. }
            | Error::NotRealSignal { .. }
            | Error::InconsistentMagnitudes { .. }
            | Error::PhaseUnresolvable(_)
            | Error::InconsistentInvariants(_) => DEGENERATE,
        };
        Self::new(code, e)
    }
}

pub type CmdResult = std::result::Result<i32, Failure>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::result::Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::new(BAD_INPUT, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

use std::fmt;

use evidential_magdm::Error as CoreError;

pub const CHECKS_FAILED: u8 = 1;
pub const INPUT: u8 = 2;
pub const NUMERIC: u8 = 3;
pub const CONFIG: u8 = 4;

/// An error paired with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type CliResult<T> = Result<T, Failure>;

impl Failure {
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: INPUT,
            error: error.into(),
        }
    }

    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: CONFIG,
            error: error.into(),
        }
    }

    /// Numeric degeneracies exit with 3, invalid parameters with 4, and
    /// everything else (shapes, expert counts) is treated as bad input.
    pub fn core(error: CoreError) -> Self {
        let code = if error.is_numeric_degeneracy() {
            NUMERIC
        } else if matches!(error, CoreError::InvalidParameter(_)) {
            CONFIG
        } else {
            INPUT
        };
        Self {
            code,
            error: error.into(),
        }
    }

    pub fn context(mut self, what: impl fmt::Display + Send + Sync + 'static) -> Self {
        self.error = self.error.context(what);
        self
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::core(e)
    }
}

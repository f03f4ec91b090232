use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied an invalid argument (bad vertex, bad factor, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A model is not defined for the requested query.
    #[error("configuration error: {0}")]
    Config(String),

    /// A path does not satisfy the adjacency / length rules of the scenario.
    #[error("invalid path: {0}")]
    Path(String),

    /// No solution path of the requested length exists.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Exhaustive enumeration refused because the instance is too large.
    #[error("instance too large: {walks} walks exceed the cap of {cap}")]
    Size { walks: u128, cap: u128 },

    /// A domain invariant does not hold; `invariant` names it.
    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    /// Malformed input document, anchored at a line when one is known.
    #[error("{}:{}: {message}", file.display(), line.map(|l| l.to_string()).unwrap_or_else(|| "?".into()))]
    Parse {
        file: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            invariant,
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 1,
            _ => 2,
        }
    }
}

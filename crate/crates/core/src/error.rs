use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: expected one of [{}], found {found}", expected.join(", "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("unknown token {token:?} at {line}:{column}")]
    UnknownToken {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("task compilation failed: {0}")]
    Compile(String),

    #[error("no solution for letter {letter:#b}")]
    UnsatisfiableLetter { letter: u32 },

    #[error("degenerate belief: total mass {0}")]
    DegenerateBelief(f64),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

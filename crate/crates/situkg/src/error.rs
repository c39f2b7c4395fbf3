//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A term violates an RDF well-formedness rule (empty IRI, whitespace, ...).
    #[error("invalid term: {0}")]
    InvalidTerm(String),

    /// Syntax error while parsing a text format, with 1-based position.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    /// An annotation document failed schema validation.
    #[error("invalid document {index}{}: field `{field}`: {msg}", source_suffix(.file))]
    Document {
        file: Option<PathBuf>,
        index: usize,
        field: String,
        msg: String,
    },

    /// An id (image, entity, anchor, ...) is not known to the component.
    #[error("unknown {kind}: {id}")]
    UnknownId { kind: &'static str, id: String },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// Two stores that must cover the same items do not.
    #[error("id mismatch: {0}")]
    IdMismatch(String),

    #[error("invalid config: {0}")]
    Config(String),

    /// The anti-leakage guard found a forbidden label among trainable entities.
    #[error("leakage guard: {0}")]
    Leakage(String),

    #[error("bad checkpoint: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Invalid(String),
}

fn source_suffix(file: &Option<PathBuf>) -> String {
    match file {
        Some(p) => format!(" of {}", p.display()),
        None => String::new(),
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

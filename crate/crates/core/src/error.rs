use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The model document is malformed or references unknown names.
    #[error("schema error: {0}")]
    Schema(String),

    /// A CDGA axiom fails; `witness` names the basis elements involved.
    #[error("algebra error: {axiom} (witness: {witness})")]
    Algebra { axiom: String, witness: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid twist: {0}")]
    Twist(String),

    #[error("failed to parse expression `{expr}`: {reason}")]
    Expr { expr: String, reason: String },

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("vector is not in the ambient space of the quotient")]
    NotInAmbient,

    #[error("class is not on page E_{page}: {detail}")]
    NotOnPage { page: usize, detail: String },

    #[error("Massey product undefined: {0}")]
    MasseyUndefined(String),

    /// Defining-system condition violation at entry (i, j), 1-based.
    #[error("defining system violates {condition} at ({i},{j}): {detail}")]
    DefiningSystem {
        condition: &'static str,
        i: usize,
        j: usize,
        detail: String,
    },

    #[error("{0}")]
    Inhomogeneous(String),
}

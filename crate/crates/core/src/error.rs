use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("line {line} (byte {offset}): {message}")]
    Syntax { line: u64, offset: u64, message: String },

    #[error("invalid triple: {0}")]
    InvalidTriple(String),

    #[error("profile `{profile}` matched no classes; check its type/subclass/marker predicates")]
    EmptyOntology { profile: String },

    #[error("invalid extraction profile: {0}")]
    Profile(String),

    #[error("unknown extraction profile `{0}`")]
    UnknownProfile(String),

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("operation is not defined for the root class `{0}`")]
    RootClass(String),

    #[error("ontology graph has no root; run root synthesis first")]
    NotRooted,

    #[error("ontology graph has subclass cycles; condense them first")]
    Cyclic,

    #[error("invalid generator parameters: {0}")]
    Params(String),

    #[error("oracle refuses graphs with {classes} classes (limit {limit})")]
    OracleLimit { classes: usize, limit: usize },
}

use rsa_datalog::EngineError;
use thiserror::Error;

use crate::io::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Parse(Vec<ParseError>),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("axiom is not supported here: {0}")]
    UnsupportedAxiom(String),
    #[error("ontology contains disjunctive axioms; shift them first")]
    Disjunctive,
    #[error("ontology is not RSA")]
    NotRsa,
    #[error("ontology is unsatisfiable")]
    Unsatisfiable,
    #[error("engine: {0}")]
    Engine(#[from] EngineError),
    #[error("approximation: {0}")]
    Approximation(String),
    #[error("internal: {0}")]
    Internal(String),
    #[error("oracle: {0}")]
    Oracle(String),
}

impl From<Vec<ParseError>> for Error {
    fn from(e: Vec<ParseError>) -> Self {
        Error::Parse(e)
    }
}

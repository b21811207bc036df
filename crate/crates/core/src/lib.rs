//! Conjunctive query answering over Horn-ALCHOIQ ontologies by the
//! combined approach: approximate to RSA, materialize a canonical model
//! once, and filter spurious matches per query.
//!
//! ```
//! use std::sync::Arc;
//! use rsacomb::{io, pipeline, filter::FilterMode};
//!
//! let o = io::parse_ontology(
//!     "@prefix : <http://ex.org/> .\nfact :A(:a) .\nfact :A(:b) .\nexists :A -> :R :B .",
//! ).unwrap();
//! let q = io::parse_query(
//!     "PREFIX : <http://ex.org/>\nSELECT ?x ?z WHERE { ?x :R ?y . ?z :R ?y }",
//! ).unwrap();
//! let prepared = pipeline::prepare(&o, false).unwrap();
//! let cm = prepared.canonical_model(Arc::new(Default::default())).unwrap();
//! let answers = prepared.answer(&cm, &q, FilterMode::Packed).unwrap();
//! assert_eq!(answers.rows.len(), 2);
//! ```

pub mod approx;
pub mod canonical;
pub mod error;
pub mod filter;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod profile;

pub use error::Error;
pub use filter::{AnswerSet, FilterMode};
pub use model::{Axiom, Concept, ConjunctiveQuery, Ontology, Role};
pub use rsa_datalog as datalog;

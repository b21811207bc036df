//! Stratified datalog with negation as failure, function terms, packed
//! tuple keys and partitioned materialization.
//!
//! ```
//! use rsa_datalog::{parse_program, Store};
//!
//! let store = Store::default();
//! let p = store.create_partition("tc", &[]).unwrap();
//! let rules = parse_program(
//!     "edge(a, b) . edge(b, c) .
//!      path(?x, ?y) :- edge(?x, ?y) .
//!      path(?x, ?z) :- path(?x, ?y), edge(?y, ?z) .",
//! )
//! .unwrap();
//! store.assert(p, rules).unwrap();
//! store.materialize(p).unwrap();
//! assert_eq!(store.facts(p, "path", 2).unwrap().len(), 3);
//! ```

mod db;
pub mod equality;
mod error;
mod eval;
mod rule;
mod store;
mod stratify;
mod term;
mod text;

pub use equality::{axiomatize_top_equality, vocab};
pub use error::EngineError;
pub use rule::{Builtin, Rule};
pub use store::{EngineConfig, MaterializeStats, PartitionId, Store, StoreStats, Strategy, DEFAULT_DEPTH_BOUND};
pub use stratify::{stratify, PredKey, Strata};
pub use term::{atom, Atom, Label, Sym, Term};
pub use text::{format_program, parse_atom, parse_program, parse_rule};

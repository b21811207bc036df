//! Fixture loading shared by the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rsacomb::canonical::{build_canonical_model, CanonicalModel};
use rsacomb::datalog::Store;
use rsacomb::io::{parse_ontology, parse_queries};
use rsacomb::{ConjunctiveQuery, Ontology};

pub const CHASE_DEPTH: usize = 8;

pub struct Fixture {
    pub name: String,
    pub path: PathBuf,
    pub ontology: Ontology,
    pub queries: Vec<ConjunctiveQuery>,
}

pub fn fixture_dir(kind: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(kind)
}

pub fn load(kind: &str) -> Vec<Fixture> {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixture_dir(kind))
        .unwrap_or_else(|e| panic!("fixture dir {kind}: {e}"))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "nha"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).unwrap();
            let ontology = parse_ontology(&text).unwrap_or_else(|e| panic!("{}: {e:?}", path.display()));
            let cq = path.with_extension("cq");
            let queries = if cq.exists() {
                parse_queries(&fs::read_to_string(&cq).unwrap()).unwrap_or_else(|e| panic!("{}: {e:?}", cq.display()))
            } else {
                Vec::new()
            };
            Fixture {
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                path,
                ontology,
                queries,
            }
        })
        .collect()
}

pub fn fixture(kind: &str, name: &str) -> Fixture {
    load(kind).into_iter().find(|f| f.name == name).unwrap_or_else(|| panic!("no fixture {kind}/{name}"))
}

pub fn model(o: &Ontology) -> CanonicalModel {
    build_canonical_model(Arc::new(Store::default()), o).unwrap()
}

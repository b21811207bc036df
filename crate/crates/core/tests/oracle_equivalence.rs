//! Filtered canonical-model answers against the chase on RSA fixtures.

mod common;

use std::time::{Duration, Instant};

use common::{load, model, CHASE_DEPTH};
use rsacomb::filter::{answer, FilterMode};
use rsacomb::oracle::{certain_answers_chase, chase};
use rsacomb::profile::is_rsa;
use rsacomb::Error;

const CASE_BUDGET: Duration = Duration::from_secs(5);

#[test]
fn rsa_fixtures_are_rsa_and_terminate() {
    let fixtures = load("rsa");
    assert!(fixtures.len() >= 20);
    for f in fixtures {
        assert!(is_rsa(&f.ontology).unwrap().is_rsa, "{} is not RSA", f.name);
        assert!(chase(&f.ontology, CHASE_DEPTH).unwrap().terminated, "{} chase does not terminate", f.name);
        assert!(f.queries.len() >= 3, "{} has fewer than three queries", f.name);
    }
}

#[test]
fn answers_match_chase() {
    let mut failures = Vec::new();
    for f in load("rsa") {
        let start = Instant::now();
        let cm = model(&f.ontology);
        let satisfiable = chase(&f.ontology, CHASE_DEPTH).unwrap().satisfiable();
        assert_eq!(cm.satisfiable, satisfiable, "{}", f.name);
        for (i, q) in f.queries.iter().enumerate() {
            let expected = certain_answers_chase(&f.ontology, q, CHASE_DEPTH).unwrap();
            assert!(expected.exact);
            for mode in [FilterMode::Packed, FilterMode::Reference] {
                match answer(&cm, q, mode) {
                    Ok(got) if got.rows == expected.rows => {}
                    Err(Error::Unsatisfiable) if !satisfiable => {}
                    other => failures.push(format!("{} q{i} {mode:?}: got {:?}, chase {:?}", f.name, other.map(|a| a.rows), expected.rows)),
                }
            }
        }
        assert!(start.elapsed() < CASE_BUDGET, "{} took {:?}", f.name, start.elapsed());
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn fork_example() {
    let f = common::fixture("rsa", "fork");
    let expected = certain_answers_chase(&f.ontology, &f.queries[0], CHASE_DEPTH).unwrap();
    let rows: Vec<Vec<String>> = expected.rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    assert_eq!(
        rows,
        vec![vec!["http://ex.org/a", "http://ex.org/a"], vec!["http://ex.org/b", "http://ex.org/b"]]
    );
    assert!(expected.exact);
}

#[test]
fn empty_ontology_has_no_answers() {
    let q = rsacomb::io::parse_query("PREFIX : <http://ex.org/>\nSELECT ?x WHERE { ?x a :C }").unwrap();
    let o = rsacomb::Ontology::new();
    let a = certain_answers_chase(&o, &q, CHASE_DEPTH).unwrap();
    assert!(a.rows.is_empty() && a.exact);
    assert!(answer(&model(&o), &q, FilterMode::Packed).unwrap().rows.is_empty());
}

#[test]
fn depth_is_monotone() {
    for f in load("cyclic").into_iter().chain(load("rsa")) {
        let mut prev = chase(&f.ontology, 0).unwrap();
        for d in 1..5 {
            let next = chase(&f.ontology, d).unwrap();
            assert!(prev.concept_facts().is_subset(&next.concept_facts()), "{} depth {d}", f.name);
            assert!(prev.role_facts().is_subset(&next.role_facts()), "{} depth {d}", f.name);
            prev = next;
        }
    }
}

#[test]
fn non_terminating_chase_is_flagged() {
    let f = common::fixture("cyclic", "self_loop");
    let r = chase(&f.ontology, 3).unwrap();
    assert!(!r.terminated);
    let a = certain_answers_chase(&f.ontology, &f.queries[3], 3).unwrap();
    assert!(!a.exact);
    assert_eq!(a.rows.len(), 1);
}

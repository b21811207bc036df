//! Soundness and dominance of the RSA approximation.

mod common;

use std::collections::BTreeSet;

use common::{load, model, CHASE_DEPTH};
use rsacomb::approx::{approximate_to_rsa, drop_t5_baseline};
use rsacomb::filter::{answer, FilterMode};
use rsacomb::model::AxiomKind;
use rsacomb::oracle::{certain_answers_chase, chase};
use rsacomb::profile::is_rsa;

#[test]
fn approximation_is_sound_and_rsa() {
    let fixtures = load("nonrsa");
    assert!(fixtures.len() >= 20);
    for f in fixtures {
        assert!(!is_rsa(&f.ontology).unwrap().is_rsa, "{} is RSA", f.name);
        assert!(chase(&f.ontology, CHASE_DEPTH).unwrap().terminated, "{}", f.name);
        let (o, prov) = approximate_to_rsa(&f.ontology).unwrap();
        assert!(is_rsa(&o).unwrap().is_rsa, "{}", f.name);
        assert!(!prov.is_identity());
        assert!(o.axioms().all(|a| f.ontology.contains(a)), "{}: approximation added axioms", f.name);
        let cm = model(&o);
        for (i, q) in f.queries.iter().enumerate() {
            let certain = certain_answers_chase(&f.ontology, q, CHASE_DEPTH).unwrap();
            let lower = answer(&cm, q, FilterMode::Packed).unwrap();
            assert!(lower.row_set().is_subset(&certain.row_set()), "{} q{i}: {:?} not within {:?}", f.name, lower.rows, certain.rows);
        }
    }
}

#[test]
fn rsa_input_is_unchanged() {
    for f in load("rsa") {
        let (o, prov) = approximate_to_rsa(&f.ontology).unwrap();
        assert_eq!(o, f.ontology, "{}", f.name);
        assert!(prov.is_identity());
        assert_eq!(prov.iterations, 1);
    }
}

#[test]
fn two_cycle_loses_one_t5() {
    let f = common::fixture("cyclic", "two_cycle");
    let report = is_rsa(&f.ontology).unwrap();
    assert!(!report.is_rsa);
    assert_eq!(report.forest_violation.as_ref().map(Vec::len), Some(2));
    assert_eq!(report.graph.edges.len(), 2);
    let (o, prov) = approximate_to_rsa(&f.ontology).unwrap();
    assert_eq!(prov.removed_t5.len(), 1);
    assert_eq!(o.of_kind(AxiomKind::T5).count() + 1, f.ontology.of_kind(AxiomKind::T5).count());
    assert!(is_rsa(&o).unwrap().is_rsa);
}

#[test]
fn baseline_is_dominated() {
    let mut strict = BTreeSet::new();
    for f in load("nonrsa") {
        let (o, prov) = approximate_to_rsa(&f.ontology).unwrap();
        if !prov.removed_t4.is_empty() || !prov.removed_r2.is_empty() {
            continue;
        }
        let full = model(&o);
        let base = model(&drop_t5_baseline(&f.ontology));
        for q in &f.queries {
            let l = answer(&base, q, FilterMode::Packed).unwrap().row_set();
            let r = answer(&full, q, FilterMode::Packed).unwrap().row_set();
            assert!(l.is_subset(&r), "{}", f.name);
            if l.len() < r.len() {
                strict.insert(f.name.clone());
            }
        }
    }
    assert!(strict.len() >= 3, "strict inclusion only on {strict:?}");
}

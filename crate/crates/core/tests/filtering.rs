//! Filtration behaviour: spurious matches, mode equivalence and query
//! independence over one sealed model.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{load, model, CHASE_DEPTH};
use rsacomb::approx::approximate_to_rsa;
use rsacomb::canonical::CanonicalModel;
use rsacomb::datalog::{Rule, Store, Term};
use rsacomb::filter::{answer, build_filter, preds, FilterMode};
use rsacomb::io::{emit_answers, AnswerFormat};
use rsacomb::oracle::certain_answers_chase;
use rsacomb::pipeline::prepare;
use rsacomb::ConjunctiveQuery;

/// Runs a filter program with `keep` applied to its rules and returns the
/// `Ans` facts of reference mode.
fn run_reference(cm: &CanonicalModel, q: &ConjunctiveQuery, keep: impl Fn(&Rule) -> bool) -> BTreeSet<Vec<Term>> {
    let p = build_filter(q, &cm.named_individuals, FilterMode::Reference);
    let pid = cm.store.create_partition("probe", &[cm.partition]).unwrap();
    cm.store.assert(pid, p.rules.into_iter().filter(|r| keep(r))).unwrap();
    cm.store.materialize(pid).unwrap();
    let out = cm.store.facts(pid, preds::ANS, q.answer_vars.len()).unwrap().into_iter().collect();
    cm.store.retract_partition(pid).unwrap();
    out
}

#[test]
fn fork_is_filtered() {
    let f = common::fixture("rsa", "fork");
    let cm = model(&f.ontology);
    let q = &f.queries[0];
    for mode in [FilterMode::Packed, FilterMode::Reference] {
        let a = answer(&cm, q, mode).unwrap();
        assert_eq!(a.stats.qm, 4);
        let rows: Vec<Vec<&str>> = a.rows.iter().map(|r| r.iter().map(|s| &**s).collect()).collect();
        assert_eq!(rows, vec![vec!["http://ex.org/a", "http://ex.org/a"], vec!["http://ex.org/b", "http://ex.org/b"]]);
    }
    let unfiltered = run_reference(&cm, q, |r| r.head[0].pred.as_ref() != preds::FK);
    assert_eq!(unfiltered.len(), 4);
}

#[test]
fn cycle_is_filtered() {
    let f = common::fixture("cyclic", "self_loop");
    let cm = model(&f.ontology);
    let reads_tq = |r: &Rule| r.head[0].pred.as_ref() == preds::SP && r.body.iter().any(|b| b.pred.as_ref() == preds::TQF || b.pred.as_ref() == preds::TQB);
    for q in &f.queries[..3] {
        let oracle = certain_answers_chase(&f.ontology, q, CHASE_DEPTH).unwrap();
        assert!(oracle.rows.is_empty());
        for mode in [FilterMode::Packed, FilterMode::Reference] {
            let a = answer(&cm, q, mode).unwrap();
            assert!(a.stats.qm > 0);
            assert!(a.rows.is_empty());
        }
        assert!(run_reference(&cm, q, |_| true).is_empty());
    }
    // the Boolean cycles survive without the cycle rule
    for q in &f.queries[..2] {
        assert_eq!(run_reference(&cm, q, |r| !reads_tq(r)).len(), 1);
    }
}

#[test]
fn id_merging_feeds_forks() {
    let f = common::fixture("rsa", "fork_chain");
    let cm = model(&f.ontology);
    let q = &f.queries[0];
    let merges = |r: &Rule| r.head[0].pred.as_ref() == preds::ID && r.body.iter().any(|b| b.pred.as_ref() == rsacomb::datalog::vocab::CONGRUENT);
    assert_eq!(run_reference(&cm, q, |r| !merges(r)).len(), 4);
    assert_eq!(run_reference(&cm, q, |_| true).len(), 2);
}

fn all_cases() -> Vec<(String, rsacomb::Ontology, Vec<ConjunctiveQuery>)> {
    let mut out = Vec::new();
    for f in load("rsa").into_iter().chain(load("cyclic")).chain(load("nonrsa")) {
        let o = approximate_to_rsa(&f.ontology).unwrap().0;
        out.push((f.name, o, f.queries));
    }
    out
}

#[test]
fn modes_agree() {
    let mut pairs = 0;
    for (name, o, queries) in all_cases() {
        let cm = model(&o);
        for q in &queries {
            let p = answer(&cm, q, FilterMode::Packed);
            let r = answer(&cm, q, FilterMode::Reference);
            match (p, r) {
                (Ok(p), Ok(r)) => assert_eq!(p, r, "{name}"),
                (Err(_), Err(_)) => {}
                (p, r) => panic!("{name}: {p:?} vs {r:?}"),
            }
            pairs += 1;
        }
    }
    assert!(pairs >= 60, "{pairs}");
}

#[test]
fn one_materialization_per_ontology() {
    let f = common::fixture("rsa", "university");
    assert!(f.queries.len() >= 5);
    let store = Arc::new(Store::default());
    let p = prepare(&f.ontology, false).unwrap();
    let cm = p.canonical_model(store.clone()).unwrap();
    let baseline = store.fact_count();
    for q in &f.queries {
        p.answer(&cm, q, FilterMode::Packed).unwrap();
        assert_eq!(store.fact_count(), baseline);
    }
    assert_eq!(store.runs(cm.partition).unwrap(), 1);
    assert_eq!(store.stats().materializations, 1 + f.queries.len());
}

#[test]
fn answers_are_stable() {
    let f = common::fixture("rsa", "university");
    let cm = model(&f.ontology);
    for q in &f.queries {
        for format in [AnswerFormat::Tsv, AnswerFormat::Json] {
            let a = emit_answers(&answer(&cm, q, FilterMode::Packed).unwrap(), format);
            let b = emit_answers(&answer(&cm, q, FilterMode::Packed).unwrap(), format);
            assert_eq!(a, b);
        }
    }
}

#[test]
fn concurrent_answers_match_sequential() {
    let f = common::fixture("rsa", "university");
    let cm = model(&f.ontology);
    let sequential: Vec<_> = f.queries.iter().map(|q| answer(&cm, q, FilterMode::Packed).unwrap()).collect();
    let parallel: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = f.queries.iter().map(|q| s.spawn(|| answer(&cm, q, FilterMode::Packed).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(sequential, parallel);
}

#[test]
fn answers_are_named_and_within_matches() {
    for (name, o, queries) in all_cases() {
        let cm = model(&o);
        if !cm.satisfiable {
            continue;
        }
        for q in &queries {
            let a = answer(&cm, q, FilterMode::Packed).unwrap();
            assert!(a.rows.iter().flatten().all(|i| cm.named_individuals.contains(i)), "{name}");
            let all = run_reference(&cm, q, |r| r.head[0].pred.as_ref() != preds::SP);
            let all: BTreeSet<Vec<String>> = all.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
            for row in &a.rows {
                let row: Vec<String> = row.iter().map(|s| Term::Const(s.clone()).to_string()).collect();
                assert!(all.contains(&row), "{name}: {row:?}");
            }
        }
    }
}

//! Randomized invariants over small generated ontologies.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rsacomb::approx::{approximate_to_rsa, shift_disjunctions};
use rsacomb::canonical::build_canonical_model;
use rsacomb::datalog::{Label, Store};
use rsacomb::filter::{answer, FilterMode};
use rsacomb::io::{parse_ontology, serialize_ontology};
use rsacomb::model::{ConjunctiveQuery, QAtom, QTerm};
use rsacomb::oracle::{cautious_consequences, certain_answers_chase, chase, ground_concept_program};
use rsacomb::profile::{classify_roles, is_oriented_forest, is_rsa, DependencyGraph};
use rsacomb::{Axiom, Concept, Ontology, Role};

const NS: &str = "http://ex.org/";
const DEPTH: usize = 5;

fn name(s: &str) -> String {
    format!("{NS}{s}")
}

fn concept() -> impl Strategy<Value = Concept> {
    prop_oneof![
        1 => Just(Concept::Top),
        6 => prop::sample::select(vec!["A", "B", "C", "D"]).prop_map(|n| Concept::named(name(n))),
    ]
}

fn named_concept() -> impl Strategy<Value = Concept> {
    prop::sample::select(vec!["A", "B", "C", "D"]).prop_map(|n| Concept::named(name(n)))
}

fn role() -> impl Strategy<Value = Role> {
    (prop::sample::select(vec!["R", "S"]), any::<bool>()).prop_map(|(n, inv)| {
        let r = Role::named(name(n));
        if inv {
            r.inv()
        } else {
            r
        }
    })
}

fn individual() -> impl Strategy<Value = rsacomb::datalog::Sym> {
    prop::sample::select(vec!["a", "b", "c"]).prop_map(|n| name(n).into())
}

fn tbox_axiom() -> impl Strategy<Value = Axiom> {
    prop_oneof![
        2 => (role(), role()).prop_filter("distinct", |(r, s)| r != s).prop_map(|(r, s)| Axiom::SubRole(r, s)),
        4 => (prop::collection::vec(concept(), 1..3), prop_oneof![4 => named_concept(), 1 => Just(Concept::Bottom)])
            .prop_map(|(b, h)| Axiom::SubClass(b, h)),
        1 => (concept(), individual()).prop_map(|(c, i)| Axiom::Nominal(c, i)),
        3 => (role(), concept(), named_concept()).prop_map(|(r, a, b)| Axiom::SomeLhs(r, a, b)),
        1 => (concept(), role(), concept()).prop_map(|(a, r, b)| Axiom::Max1(a, r, b)),
        3 => (named_concept(), role(), concept()).prop_map(|(a, r, b)| Axiom::Exists(a, r, b)),
    ]
}

fn abox_axiom() -> impl Strategy<Value = Axiom> {
    prop_oneof![
        (named_concept(), individual()).prop_map(|(c, i)| Axiom::ConceptFact(c, i)),
        (prop::sample::select(vec!["R", "S"]), individual(), individual()).prop_map(|(r, a, b)| Axiom::RoleFact(Role::named(name(r)), a, b)),
    ]
}

fn ontology() -> impl Strategy<Value = Ontology> {
    (prop::collection::vec(tbox_axiom(), 0..6), prop::collection::vec(abox_axiom(), 1..6))
        .prop_map(|(t, a)| t.into_iter().chain(a).collect())
}

fn qterm() -> impl Strategy<Value = QTerm> {
    prop_oneof![
        5 => prop::sample::select(vec!["x", "y", "z"]).prop_map(|v| QTerm::Var(v.into())),
        1 => individual().prop_map(QTerm::Const),
    ]
}

fn query() -> impl Strategy<Value = ConjunctiveQuery> {
    let atom = prop_oneof![
        1 => (named_concept(), qterm()).prop_map(|(c, t)| QAtom::Concept(c, t)),
        2 => (prop::sample::select(vec!["R", "S"]), qterm(), qterm()).prop_map(|(r, s, t)| QAtom::Role(name(r).into(), s, t)),
    ];
    (prop::collection::vec(atom, 1..4), prop::collection::vec(any::<bool>(), 3)).prop_filter_map("answer vars occur", |(atoms, pick)| {
        let occurring: BTreeSet<_> = atoms.iter().flat_map(|a| a.terms()).filter_map(|t| t.var().cloned()).collect();
        let answer = occurring.iter().zip(&pick).filter(|(_, p)| **p).map(|(v, _)| v.clone()).collect();
        ConjunctiveQuery::new(answer, atoms).ok()
    })
}

fn model(o: &Ontology) -> rsacomb::canonical::CanonicalModel {
    build_canonical_model(Arc::new(Store::default()), o).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rsa_answers_are_certain_answers(o in ontology(), qs in prop::collection::vec(query(), 1..4)) {
        let c = chase(&o, DEPTH).unwrap();
        prop_assume!(c.terminated);
        prop_assume!(is_rsa(&o).unwrap().is_rsa);
        let cm = model(&o);
        prop_assert_eq!(cm.satisfiable, c.satisfiable());
        for q in &qs {
            let expected = certain_answers_chase(&o, q, DEPTH).unwrap();
            for mode in [FilterMode::Packed, FilterMode::Reference] {
                match answer(&cm, q, mode) {
                    Ok(a) => prop_assert_eq!(&a.rows, &expected.rows, "{} / {:?}", serialize_ontology(&o), q),
                    Err(_) => prop_assert!(!c.satisfiable()),
                }
            }
        }
    }

    #[test]
    fn approximation_is_sound(o in ontology(), q in query()) {
        let c = chase(&o, DEPTH).unwrap();
        prop_assume!(c.terminated && c.satisfiable());
        let (approx, prov) = approximate_to_rsa(&o).unwrap();
        prop_assert!(is_rsa(&approx).unwrap().is_rsa);
        prop_assert!(approx.axioms().all(|a| o.contains(a)));
        if prov.is_identity() {
            prop_assert_eq!(&approx, &o);
        }
        let cm = model(&approx);
        prop_assert!(cm.satisfiable);
        let lower = answer(&cm, &q, FilterMode::Packed).unwrap().row_set();
        let certain = certain_answers_chase(&o, &q, DEPTH).unwrap().row_set();
        prop_assert!(lower.is_subset(&certain));
    }

    #[test]
    fn modes_agree(o in ontology(), q in query()) {
        let (approx, _) = approximate_to_rsa(&o).unwrap();
        let cm = model(&approx);
        let p = answer(&cm, &q, FilterMode::Packed).ok();
        let r = answer(&cm, &q, FilterMode::Reference).ok();
        prop_assert_eq!(p, r);
    }

    #[test]
    fn removing_axioms_keeps_safe_roles_safe(o in ontology(), drop in any::<prop::sample::Index>()) {
        prop_assume!(!o.is_empty());
        let victim = o.axioms().nth(drop.index(o.len())).unwrap().clone();
        let smaller = o.filtered(|a| *a != victim);
        let before = classify_roles(&o);
        let after = classify_roles(&smaller);
        for r in after.unsafe_roles.keys() {
            prop_assert!(before.is_unsafe(r));
        }
    }

    #[test]
    fn serialization_round_trips(o in ontology()) {
        let text = serialize_ontology(&o);
        prop_assert_eq!(parse_ontology(&text).unwrap(), o);
    }

    #[test]
    fn shifting_is_sound(
        disj in prop::collection::vec((named_concept(), prop::collection::vec(named_concept(), 2..4)), 1..3),
        horn in prop::collection::vec((prop::collection::vec(named_concept(), 1..3), prop_oneof![named_concept(), Just(Concept::Bottom)]), 0..4),
        facts in prop::collection::vec((named_concept(), prop::sample::select(vec!["a", "b"])), 1..4),
    ) {
        let o: Ontology = disj.into_iter().map(|(a, bs)| Axiom::Disj(a, bs))
            .chain(horn.into_iter().map(|(b, h)| Axiom::SubClass(b, h)))
            .chain(facts.into_iter().map(|(c, i)| Axiom::ConceptFact(c, name(i).into())))
            .collect();
        let ground = ground_concept_program(&o).unwrap();
        let cautious = cautious_consequences(&ground, 16).unwrap();
        let (shifted, _) = shift_disjunctions(&o);
        let c = chase(&shifted, DEPTH).unwrap();
        let original = o.signature().concepts;
        if c.satisfiable() {
            let derived: BTreeSet<_> = c.named_concept_facts().into_iter().filter(|(k, _)| original.contains(k)).collect();
            prop_assert!(derived.is_subset(&cautious));
        } else {
            let all: BTreeSet<_> = ground.iter().flat_map(|r| r.body.iter().chain(&r.head).cloned()).collect();
            prop_assert_eq!(cautious, all);
        }
    }

    #[test]
    fn forest_check_matches_edge_count(edges in prop::collection::vec((0u8..6, 0u8..6), 0..8)) {
        let l = |i: u8| Label::new(format!("n{i}"), "R", "B");
        let g = DependencyGraph::new([], edges.iter().map(|(a, b)| (l(*a), l(*b))));
        let (forest, witness) = is_oriented_forest(&g);
        // an undirected simple graph is a forest iff |E| = |V| - #components
        // the edge relation is a set; opposite arcs count as two undirected edges
        let arcs: BTreeSet<(u8, u8)> = edges.iter().copied().collect();
        let nodes: BTreeSet<u8> = arcs.iter().flat_map(|(a, b)| [*a, *b]).collect();
        let simple: BTreeSet<(u8, u8)> = arcs.iter().map(|(a, b)| (*a.min(b), *a.max(b))).collect();
        let has_loop_or_parallel = arcs.iter().any(|(a, b)| a == b) || simple.len() < arcs.len();
        let mut comp: Vec<u8> = (0..6).collect();
        fn find(c: &mut Vec<u8>, x: u8) -> u8 { if c[x as usize] == x { x } else { let r = find(c, c[x as usize]); c[x as usize] = r; r } }
        for (a, b) in &simple {
            let (ra, rb) = (find(&mut comp, *a), find(&mut comp, *b));
            comp[ra as usize] = rb;
        }
        let components: BTreeSet<u8> = nodes.iter().map(|n| find(&mut comp, *n)).collect();
        let expected = !has_loop_or_parallel && simple.len() + components.len() == nodes.len();
        prop_assert_eq!(forest, expected);
        prop_assert_eq!(witness.is_some(), !forest);
        if let Some(w) = witness {
            // consecutive witness nodes are adjacent
            let adj = |x: &Label, y: &Label| g.edges.iter().any(|(s, t)| (s == x && t == y) || (s == y && t == x));
            for i in 0..w.len() {
                prop_assert!(adj(&w[i], &w[(i + 1) % w.len()]));
            }
        }
    }
}

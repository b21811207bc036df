use std::collections::BTreeMap;

use rsa_datalog::{
    atom, axiomatize_top_equality, parse_atom, parse_program, stratify, vocab, Builtin, EngineConfig, EngineError, PredKey,
    Rule, Store, Strategy, Sym, Term,
};

fn c(s: &str) -> Term {
    Term::constant(s)
}

fn v(s: &str) -> Term {
    Term::var(s)
}

fn load(store: &Store, src: &str) -> rsa_datalog::PartitionId {
    let p = store.create_partition("test", &[]).unwrap();
    store.assert(p, parse_program(src).unwrap()).unwrap();
    p
}

#[test]
fn definite_program_has_one_stratum() {
    let rules = parse_program("p(?x) :- q(?x) . q(?x) :- p(?x) . q(a) .").unwrap();
    assert_eq!(stratify(&rules).unwrap().len(), 1);
}

#[test]
fn negation_splits_strata() {
    let rules = parse_program("b() . a() . c() :- a(), NOT b() .").unwrap();
    let s = stratify(&rules).unwrap();
    let d = |n: &str| s.stratum_of(&PredKey::new(n, 0)).unwrap();
    assert!(d("b") < d("c"));
    assert!(d("a") <= d("c"));
    assert_eq!(s.len(), 2);
}

#[test]
fn mutual_negation_is_rejected() {
    let rules = parse_program("b() :- NOT a() . a() :- NOT b() .").unwrap();
    // the parser accepts this, stratification does not
    match stratify(&rules) {
        Err(EngineError::NotStratifiable { cycle }) => assert!(cycle.len() >= 2),
        other => panic!("expected a stratification error, got {other:?}"),
    }
}

#[test]
fn minimal_number_of_strata() {
    // a chain of three negations needs exactly four strata
    let rules = parse_program("p(?x) :- e(?x) . q(?x) :- e(?x), NOT p(?x) . r(?x) :- e(?x), NOT q(?x) . s(?x) :- e(?x), NOT r(?x) .").unwrap();
    assert_eq!(stratify(&rules).unwrap().len(), 4);
}

#[test]
fn staged_assertions_are_sets() {
    let store = Store::default();
    let p = store.create_partition("p", &[]).unwrap();
    store.assert_facts(p, [atom("A", [c("a")])]).unwrap();
    assert_eq!(store.staged_count(p).unwrap(), 1);
    store.assert_facts(p, [atom("A", [c("a")])]).unwrap();
    assert_eq!(store.staged_count(p).unwrap(), 1);
    assert_eq!(store.partition_facts(p).unwrap(), 0, "nothing derived before materialize");
}

#[test]
fn sealed_partitions_reject_assertions() {
    let store = Store::default();
    let p = load(&store, "A(a) .");
    store.seal(p).unwrap();
    assert_eq!(
        store.assert_facts(p, [atom("A", [c("b")])]),
        Err(EngineError::SealedPartition(p))
    );
}

#[test]
fn transitive_closure() {
    let store = Store::default();
    let p = load(
        &store,
        "edge(n1, n2) . edge(n2, n3) . path(?x, ?y) :- edge(?x, ?y) . path(?x, ?z) :- path(?x, ?y), edge(?y, ?z) .",
    );
    let stats = store.materialize(p).unwrap();
    assert_eq!(stats.derived_count, 3);
    assert!(store.contains(p, &atom("path", [c("n1"), c("n3")])).unwrap());
    let again = store.materialize(p).unwrap();
    assert_eq!(again.derived_count, 0);
    assert_eq!(store.runs(p).unwrap(), 1);
}

#[test]
fn negation_as_failure() {
    let store = Store::default();
    let p = load(&store, "p(a) . p(b) . q(b) . r(?x) :- p(?x), NOT q(?x) .");
    store.materialize(p).unwrap();
    assert_eq!(store.facts(p, "r", 1).unwrap(), vec![vec![c("a")]]);
}

#[test]
fn depth_bound_is_enforced() {
    let store = Store::new(EngineConfig {
        depth_bound: 3,
        strategy: Strategy::SemiNaive,
    });
    let p = load(&store, "A(a) . A(f{A,R,A}(?x)) :- A(?x) .");
    match store.materialize(p) {
        Err(EngineError::DepthExceeded { bound, .. }) => assert_eq!(bound, 3),
        other => panic!("expected depth error, got {other:?}"),
    }
}

#[test]
fn function_terms_below_bound() {
    let store = Store::default();
    let p = load(&store, "A(a) . R(?x, f{A,R,B}(?x)), B(f{A,R,B}(?x)) :- A(?x) .");
    store.materialize(p).unwrap();
    let b = store.facts(p, "B", 1).unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0][0].to_string(), "f{A,R,B}(a)");
}

#[test]
fn retract_restores_baseline() {
    let store = Store::default();
    let base = load(&store, "A(a) . B(?x) :- A(?x) .");
    store.seal(base).unwrap();
    let baseline = store.fact_count();

    let run = || {
        let q = store.create_partition("filter", &[base]).unwrap();
        store
            .assert(q, parse_program("C(?x) :- B(?x) . D(?x, ?x) :- C(?x) .").unwrap())
            .unwrap();
        store.materialize(q).unwrap();
        let facts = (store.facts(q, "C", 1).unwrap(), store.facts(q, "D", 2).unwrap());
        assert!(store.fact_count() > baseline);
        store.retract_partition(q).unwrap();
        facts
    };
    let first = run();
    assert_eq!(store.fact_count(), baseline);
    let second = run();
    assert_eq!(first, second);
    assert_eq!(store.fact_count(), baseline);
}

#[test]
fn retract_unknown_partition_fails() {
    let store = Store::default();
    let p = store.create_partition("p", &[]).unwrap();
    store.retract_partition(p).unwrap();
    assert_eq!(store.retract_partition(p), Err(EngineError::UnknownPartition(p)));
}

#[test]
fn reading_unsealed_partition_fails() {
    let store = Store::default();
    let p = store.create_partition("p", &[]).unwrap();
    assert!(matches!(
        store.create_partition("q", &[p]),
        Err(EngineError::UnsealedRead(_, _))
    ));
}

#[test]
fn query_atoms_bindings() {
    let store = Store::default();
    let p = load(&store, "Ans(a) . R(a, b) . R(b, b) . R(c, d) .");
    store.materialize(p).unwrap();
    let got = store.query_atoms(p, &atom("Ans", [v("x")])).unwrap();
    let want: BTreeMap<Sym, Term> = [("x".into(), c("a"))].into_iter().collect();
    assert_eq!(got, vec![want]);
    assert!(store.query_atoms(p, &atom("Missing", [v("x")])).unwrap().is_empty());
    assert_eq!(store.query_atoms(p, &atom("R", [c("c"), v("y")])).unwrap().len(), 1);
    assert_eq!(store.query_atoms(p, &atom("R", [v("y"), v("y")])).unwrap().len(), 1);
    assert!(store.query_atoms(p, &atom("R", [c("zzz"), v("y")])).unwrap().is_empty());
}

#[test]
fn skolem_pack_and_unpack() {
    let store = Store::default();
    let p = load(
        &store,
        "Q(a, b) . Q(b, a) . Q3(a, b, c) .
         K(?k) :- Q(?x, ?y), SKOLEM(?x, ?y, ?k) .
         K3(?k) :- Q3(?x, ?y, ?z), SKOLEM(?x, ?y, ?z, ?k) .
         Back(?x, ?y, ?z) :- K3(?k), SKOLEM(?x, ?y, ?z, ?k) .
         Wrong(?x, ?y) :- K3(?k), SKOLEM(?x, ?y, ?k) .",
    );
    store.materialize(p).unwrap();
    let keys = store.facts(p, "K", 1).unwrap();
    assert_eq!(keys.len(), 2, "pack(a,b) and pack(b,a) differ");
    assert_eq!(keys[0][0], Term::Packed(vec![c("a"), c("b")]));
    assert_eq!(store.facts(p, "Back", 3).unwrap(), vec![vec![c("a"), c("b"), c("c")]]);
    assert!(store.facts(p, "Wrong", 2).unwrap().is_empty(), "width mismatch fails to match");
}

#[test]
fn pack_is_deterministic_across_partitions() {
    let store = Store::default();
    let src = "Q(a, b) . K(?k) :- Q(?x, ?y), SKOLEM(?x, ?y, ?k) .";
    let p1 = load(&store, src);
    let p2 = load(&store, src);
    store.materialize(p1).unwrap();
    store.materialize(p2).unwrap();
    assert_eq!(store.facts(p1, "K", 1).unwrap(), store.facts(p2, "K", 1).unwrap());
}

#[test]
fn bind_builtin() {
    let store = Store::default();
    let p = load(&store, "A(a) . R(?x, ?y) :- A(?x), BIND(?y, v0{A,R,B}) .");
    store.materialize(p).unwrap();
    let r = store.facts(p, "R", 2).unwrap();
    assert_eq!(r[0][1].to_string(), "v0{A,R,B}");
}

#[test]
fn unsafe_rules_are_rejected() {
    let store = Store::default();
    let p = store.create_partition("p", &[]).unwrap();
    let head_var = Rule::new(vec![atom("B", [v("y")])], vec![atom("A", [v("x")])]);
    assert!(matches!(store.assert(p, [head_var]), Err(EngineError::UnsafeRule { .. })));
    let neg_var = Rule::new(vec![atom("B", [v("x")])], vec![atom("A", [v("x")])]).with_negated(atom("C", [v("z")]));
    assert!(matches!(store.assert(p, [neg_var]), Err(EngineError::UnsafeRule { .. })));
    let unpack_only = Rule::new(vec![atom("B", [v("x")])], vec![])
        .with_builtin(Builtin::unpack(v("k"), vec![v("x")]));
    assert!(matches!(store.assert(p, [unpack_only]), Err(EngineError::UnsafeRule { .. })));
}

#[test]
fn axiomatization_counts() {
    let only_concept = axiomatize_top_equality(&["C".into()], &[]);
    assert_eq!(only_concept.len(), 1 + 3 + 1);
    let only_role = axiomatize_top_equality(&[], &["R".into()]);
    assert_eq!(only_role.len(), 1 + 3 + 2);
    assert_eq!(only_role[0].head.len(), 2, "two-head Top rule");
    for r in only_concept.iter().chain(&only_role) {
        r.check_safety().unwrap();
    }
}

#[test]
fn substitution_fires() {
    let store = Store::default();
    let p = store.create_partition("eq", &[]).unwrap();
    let mut rules = axiomatize_top_equality(&["C".into()], &["R".into()]);
    rules.extend(parse_program("C(x) . R(x, y) . R(z, x) .").unwrap());
    rules.push(Rule::fact(atom(vocab::CONGRUENT, [c("x"), c("a")])));
    store.assert(p, rules).unwrap();
    store.materialize(p).unwrap();
    assert!(store.contains(p, &parse_atom("C(a)").unwrap()).unwrap());
    assert!(store.contains(p, &parse_atom("R(a, y)").unwrap()).unwrap());
    assert!(store.contains(p, &parse_atom("R(z, a)").unwrap()).unwrap());
    assert!(store.contains(p, &atom(vocab::CONGRUENT, [c("a"), c("x")])).unwrap());
    assert!(store.contains(p, &atom(vocab::TOP, [c("a")])).unwrap());
}

#[test]
fn naive_and_semi_naive_agree_on_fixture() {
    let src = "e(a, b) . e(b, c) . e(c, a) . e(c, d) . s(a) .
        reach(?x) :- s(?x) . reach(?y) :- reach(?x), e(?x, ?y) .
        unreached(?x) :- e(?x, ?y), NOT reach(?x) .
        t(?x, ?z) :- e(?x, ?y), e(?y, ?z), reach(?z) .";
    let run = |strategy| {
        let store = Store::new(EngineConfig {
            strategy,
            ..Default::default()
        });
        let p = load(&store, src);
        store.materialize(p).unwrap();
        store
            .predicates(p)
            .unwrap()
            .into_iter()
            .map(|k| {
                let mut f = store.facts(p, &k.name, k.arity).unwrap();
                f.sort();
                (k, f)
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(Strategy::SemiNaive), run(Strategy::Naive));
}

#[test]
fn concurrent_filters_over_sealed_base() {
    let store = Store::default();
    let base = load(&store, "e(a, b) . e(b, c) . e(c, d) .");
    store.seal(base).unwrap();
    let results: Vec<usize> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let store = &store;
                s.spawn(move || {
                    let q = store.create_partition(&format!("q{i}"), &[base]).unwrap();
                    let mut rules = parse_program("p(?x, ?y) :- e(?x, ?y) . p(?x, ?z) :- p(?x, ?y), e(?y, ?z) .").unwrap();
                    rules.push(Rule::fact(atom("tag", [Term::Index(i)])));
                    store.assert(q, rules).unwrap();
                    store.materialize(q).unwrap();
                    let n = store.facts(q, "p", 2).unwrap().len();
                    store.retract_partition(q).unwrap();
                    n
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(results, vec![6; 4]);
}

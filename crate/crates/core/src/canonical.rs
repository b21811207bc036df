//! The canonical-model program and its sealed materialization.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::Instant;

use indexmap::IndexSet;
use rsa_datalog::{atom, axiomatize_top_equality, vocab, Atom, Label, MaterializeStats, PartitionId, Rule, Store, Sym, Term};
use serde_json::{json, Value};

use crate::error::Error;
use crate::model::{individual_top_facts, inverse_bridge, skolem, translate_with, Axiom, AxiomKind, Concept, Dir, Ontology, Role, RoleHierarchy};
use crate::profile::{analyze, report_from, Analysis};

/// `confl(R)`: role expressions `S` occurring in `o` with `R ⊑* T` and
/// `S ⊑* Inv(T)` for some `T`.
pub fn confl(r: &Role, o: &Ontology) -> BTreeSet<Role> {
    confl_in(r, &o.role_exprs(), &o.hierarchy())
}

fn confl_in(r: &Role, occurring: &BTreeSet<Role>, h: &RoleHierarchy) -> BTreeSet<Role> {
    let up = h.supers(r);
    occurring
        .iter()
        .filter(|s| h.supers(s).iter().any(|t| up.contains(&t.inv())))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct T5Triple {
    pub a: Concept,
    pub r: Role,
    pub b: Concept,
    pub safe: bool,
}

impl T5Triple {
    /// Strict total order key: `(A, R, B)` as predicate strings.
    pub fn label(&self) -> Label {
        Label {
            a: self.a.pred(),
            r: self.r.pred(),
            b: self.b.pred(),
        }
    }

    pub fn v(&self, i: u8) -> Term {
        Term::Vnode(self.label(), i)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnfoldSet {
    pub self_set: BTreeSet<Term>,
    pub cycle: BTreeSet<Term>,
}

impl UnfoldSet {
    pub fn unfold(&self) -> BTreeSet<Term> {
        self.self_set.union(&self.cycle).cloned().collect()
    }
}

pub fn t5_triples(o: &Ontology, an: &Analysis) -> Vec<T5Triple> {
    let mut out: Vec<T5Triple> = o
        .axioms()
        .filter_map(|ax| match ax {
            Axiom::Exists(a, r, b) => Some(T5Triple {
                a: a.clone(),
                r: r.clone(),
                b: b.clone(),
                safe: !an.safety.is_unsafe(r),
            }),
            _ => None,
        })
        .collect();
    out.sort_by_key(|t| t.label());
    out
}

/// `self` and `cycle` for one safe triple. `cycle` ranges only over the
/// triples of actual T5 axioms.
pub fn unfold(t: &T5Triple, triples: &[T5Triple], o: &Ontology, an: &Analysis) -> UnfoldSet {
    let mut set = UnfoldSet::default();
    let conf = confl(&t.r, o);
    if conf.contains(&t.r) {
        set.self_set.insert(t.v(0));
        set.self_set.insert(t.v(1));
    }
    let key = t.label();
    for other in triples.iter().filter(|o| conf.contains(&o.r)) {
        let okey = other.label();
        if other.safe {
            if key < okey {
                set.cycle.insert(other.v(0));
            }
            if okey < key {
                set.cycle.insert(other.v(1));
            }
        } else {
            let v0 = other.v(0);
            set.cycle.insert(skolem(&okey, v0.clone()));
            for third in triples.iter().filter(|x| !x.safe) {
                let tkey = third.label();
                if tkey != okey && an.unodes_congruent(&okey, &tkey) {
                    set.cycle.insert(skolem(&tkey, v0.clone()));
                }
            }
        }
    }
    set
}

fn set_id(label: &Label) -> Term {
    Term::constant(format!("urn:rsacomb:unfold:{}|{}|{}", label.a, label.r, label.b))
}

fn dir_atom(r: &Role, d: Dir, s: Term, t: Term) -> Atom {
    atom(&r.dir_pred(d), [s, t])
}

/// Binary predicates under the equality axiomatization: each role, its
/// inverse and their directional variants.
fn binary_preds(o: &Ontology) -> Vec<Sym> {
    o.role_closure()
        .into_iter()
        .flat_map(|r| [r.pred(), r.dir_pred(Dir::F), r.dir_pred(Dir::B)])
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct CanonicalProgram {
    pub rules: Vec<Rule>,
    pub unfold: BTreeMap<Label, UnfoldSet>,
    pub unsafe_roles: BTreeSet<Role>,
}

pub fn build_canonical_program(o: &Ontology) -> Result<CanonicalProgram, Error> {
    let an = analyze(o)?;
    if !report_from(o, &an).is_rsa {
        return Err(Error::NotRsa);
    }
    build_canonical_program_with(o, &an)
}

/// As [`build_canonical_program`], reusing an analysis of `o`.
pub fn build_canonical_program_with(o: &Ontology, an: &Analysis) -> Result<CanonicalProgram, Error> {
    let x = || Term::var("x");
    let y = || Term::var("y");
    let mut rules: IndexSet<Rule> = IndexSet::new();
    for ax in o.axioms().filter(|a| a.kind() != AxiomKind::T5) {
        rules.extend(translate_with(ax, |_, _, _| unreachable!("T5 filtered out"))?);
        if let Axiom::SubRole(r, s) = ax {
            for d in Dir::BOTH {
                rules.insert(Rule::new(vec![dir_atom(s, d, x(), y())], vec![dir_atom(r, d, x(), y())]));
            }
        }
    }
    for r in o.role_closure() {
        for d in Dir::BOTH {
            rules.insert(Rule::new(vec![atom(&r.pred(), [x(), y()])], vec![dir_atom(&r, d, x(), y())]));
        }
        rules.insert(Rule::new(vec![dir_atom(&r.inv(), Dir::B, y(), x())], vec![dir_atom(&r, Dir::F, x(), y())]));
        rules.insert(Rule::new(vec![dir_atom(&r.inv(), Dir::F, y(), x())], vec![dir_atom(&r, Dir::B, x(), y())]));
    }
    for n in o.signature().roles {
        rules.extend(inverse_bridge(&n));
    }

    let triples = t5_triples(o, an);
    let mut unfolds = BTreeMap::new();
    for t in &triples {
        let label = t.label();
        let (a, b) = (t.a.pred(), t.b.pred());
        if !t.safe {
            let f = skolem(&label, x());
            rules.insert(Rule::new(
                vec![dir_atom(&t.r, Dir::F, x(), f.clone()), atom(&b, [f])],
                vec![atom(&a, [x()])],
            ));
            continue;
        }
        let set = unfold(t, &triples, o, an);
        let id = set_id(&label);
        let v0 = t.v(0);
        rules.insert(
            Rule::new(vec![dir_atom(&t.r, Dir::F, x(), v0.clone()), atom(&b, [v0])], vec![atom(&a, [x()])])
                .with_negated(atom(vocab::IN, [x(), id.clone()])),
        );
        for m in set.unfold() {
            rules.insert(Rule::fact(atom(vocab::IN, [m, id.clone()])));
        }
        if !set.self_set.is_empty() {
            for i in 0..2u8 {
                let (vi, vn) = (t.v(i), t.v(i + 1));
                rules.insert(Rule::new(
                    vec![dir_atom(&t.r, Dir::F, vi.clone(), vn.clone()), atom(&b, [vn])],
                    vec![atom(&a, [vi])],
                ));
            }
        }
        for c in &set.cycle {
            let v1 = t.v(1);
            rules.insert(Rule::new(
                vec![dir_atom(&t.r, Dir::F, c.clone(), v1.clone()), atom(&b, [v1])],
                vec![atom(&a, [c.clone()])],
            ));
        }
        unfolds.insert(label, set);
    }

    rules.insert(Rule::new(
        vec![atom(vocab::NI, [y()])],
        vec![atom(vocab::NAMED, [x()]), atom(vocab::CONGRUENT, [x(), y()])],
    ));
    for i in o.signature().individuals {
        rules.insert(Rule::fact(atom(vocab::NAMED, [Term::Const(i)])));
    }
    let concepts: Vec<Sym> = o.signature().concepts.into_iter().collect();
    rules.extend(axiomatize_top_equality(&concepts, &binary_preds(o)));
    rules.extend(individual_top_facts(o));
    Ok(CanonicalProgram {
        rules: rules.into_iter().collect(),
        unfold: unfolds,
        unsafe_roles: an.safety.unsafe_roles.keys().cloned().collect(),
    })
}

#[derive(Clone, Debug)]
pub struct CanonicalModel {
    pub store: Arc<Store>,
    pub partition: PartitionId,
    pub unsafe_roles: BTreeSet<Role>,
    pub unfold: BTreeMap<Label, UnfoldSet>,
    pub satisfiable: bool,
    pub named_individuals: BTreeSet<Sym>,
    pub rules: usize,
    pub stats: MaterializeStats,
    pub elapsed_ms: u128,
}

impl CanonicalModel {
    pub fn stats_json(&self) -> Value {
        json!({
            "schema": 1,
            "facts": self.stats.facts,
            "rules": self.rules,
            "strata": self.stats.strata_count,
            "elapsed_ms": self.elapsed_ms as u64,
            "satisfiable": self.satisfiable,
        })
    }

    /// Concept facts about named individuals, excluding internal predicates.
    pub fn named_concept_facts(&self, o: &Ontology) -> Result<BTreeSet<(Sym, Sym)>, Error> {
        let mut out = BTreeSet::new();
        for c in o.signature().concepts {
            for f in self.store.facts(self.partition, &c, 1)? {
                if let Term::Const(i) = &f[0] {
                    if self.named_individuals.contains(i) {
                        out.insert((c.clone(), i.clone()));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Materializes the canonical-model program for an RSA ontology into a
/// fresh sealed partition of `store`.
pub fn build_canonical_model(store: Arc<Store>, o: &Ontology) -> Result<CanonicalModel, Error> {
    let start = Instant::now();
    let an = analyze(o)?;
    if !report_from(o, &an).is_rsa {
        return Err(Error::NotRsa);
    }
    let program = build_canonical_program_with(o, &an)?;
    let pid = store.create_partition("canonical", &[])?;
    let rules = program.rules.len();
    store.assert(pid, program.rules)?;
    let stats = store.materialize(pid)?;
    store.seal(pid)?;
    let satisfiable = store.facts(pid, vocab::BOTTOM, 1)?.is_empty();
    Ok(CanonicalModel {
        store,
        partition: pid,
        unsafe_roles: program.unsafe_roles,
        unfold: program.unfold,
        satisfiable,
        named_individuals: o.signature().individuals,
        rules,
        stats,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

pub fn check_satisfiability(cm: &CanonicalModel) -> bool {
    cm.satisfiable
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: &str) -> Role {
        Role::named(n)
    }

    fn onto(axioms: Vec<Axiom>) -> Ontology {
        axioms.into_iter().collect()
    }

    #[test]
    fn confl_cases() {
        let o = onto(vec![Axiom::Exists(Concept::named("A"), r("R"), Concept::named("B"))]);
        assert!(confl(&r("R"), &o).is_empty());
        let o = onto(vec![Axiom::SubRole(r("R"), r("R").inv())]);
        assert!(confl(&r("R"), &o).contains(&r("R")));
        let o = onto(vec![Axiom::SubRole(r("R"), r("T")), Axiom::SubRole(r("S"), r("T").inv())]);
        assert!(confl(&r("R"), &o).contains(&r("S")));
        assert!(confl(&r("S"), &o).contains(&r("R")));
    }
}

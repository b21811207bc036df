//! Query filtering over a sealed canonical model: the n-ary reference
//! program, the packed-key program, and answer extraction.

use std::collections::BTreeSet;

use rsa_datalog::{atom, vocab, Atom, Builtin, Rule, Sym, Term};

use crate::canonical::CanonicalModel;
use crate::error::Error;
use crate::model::{ConjunctiveQuery, Dir, QAtom, QTerm, Role};

/// Predicates private to a filtering partition.
pub mod preds {
    pub const QM: &str = "urn:rsacomb:filter:QM";
    pub const ID: &str = "urn:rsacomb:filter:id";
    pub const FK: &str = "urn:rsacomb:filter:fk";
    pub const SP: &str = "urn:rsacomb:filter:sp";
    pub const AQF: &str = "urn:rsacomb:filter:AQ^f";
    pub const AQB: &str = "urn:rsacomb:filter:AQ^b";
    pub const TQF: &str = "urn:rsacomb:filter:TQ^f";
    pub const TQB: &str = "urn:rsacomb:filter:TQ^b";
    pub const ANS: &str = "urn:rsacomb:filter:Ans";
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FilterMode {
    #[default]
    Packed,
    Reference,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterProgram {
    pub mode: FilterMode,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnswerStats {
    /// Distinct `QM` facts: matches before filtering.
    pub qm: usize,
    pub filter_rules: usize,
    pub derived: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnswerSet {
    pub vars: Vec<Sym>,
    /// Sorted, duplicate-free tuples of individuals.
    pub rows: Vec<Vec<Sym>>,
    pub exact: bool,
    pub stats: AnswerStats,
}

impl AnswerSet {
    pub fn new(vars: Vec<Sym>, rows: impl IntoIterator<Item = Vec<Sym>>, exact: bool) -> Self {
        let rows: BTreeSet<Vec<Sym>> = rows.into_iter().collect();
        AnswerSet {
            vars,
            rows: rows.into_iter().collect(),
            exact,
            stats: AnswerStats::default(),
        }
    }

    pub fn row_set(&self) -> BTreeSet<Vec<Sym>> {
        self.rows.iter().cloned().collect()
    }
}

fn qvar(v: &Sym) -> Term {
    Term::var(format!("v_{v}"))
}

fn qterm(t: &QTerm) -> Term {
    match t {
        QTerm::Var(v) => qvar(v),
        QTerm::Const(c) => Term::Const(c.clone()),
    }
}

fn ivar(n: &str) -> Term {
    Term::var(format!("__{n}"))
}

fn idx(i: u32) -> Term {
    Term::Index(i)
}

fn dir_atom(r: &Sym, d: Dir, s: Term, t: Term) -> Atom {
    atom(&Role::named(r.clone()).dir_pred(d), [s, t])
}

fn body(q: &ConjunctiveQuery) -> Vec<Atom> {
    q.atoms
        .iter()
        .map(|a| match a {
            QAtom::Concept(c, t) => atom(&c.pred(), [qterm(t)]),
            QAtom::Role(r, s, t) => atom(r, [qterm(s), qterm(t)]),
        })
        .collect()
}

/// A role atom of the query with each position resolved.
struct RoleAtom<'a> {
    r: &'a Sym,
    s: &'a QTerm,
    t: &'a QTerm,
}

fn role_atoms(q: &ConjunctiveQuery) -> Vec<RoleAtom<'_>> {
    q.atoms
        .iter()
        .filter_map(|a| match a {
            QAtom::Role(r, s, t) => Some(RoleAtom { r, s, t }),
            _ => None,
        })
        .collect()
}

/// Index of a bound variable term.
fn bound(q: &ConjunctiveQuery, t: &QTerm) -> Option<u32> {
    t.var().and_then(|v| q.bound_index(v))
}

/// The logical content shared by both encodings: one entry per rule of the
/// filtering program, with tuple-indexed atoms left abstract.
enum Shape {
    /// Identity seed for bound variable `i`.
    Diag(u32),
    /// Fork: two query-term atoms, the pair of indices, and `s`, `t`.
    Fork { first: Atom, second: Atom, i: u32, j: u32, s: Term, t: Term },
    /// Merge: two atoms, the `id` pair read, the congruent pair, the NI
    /// guard and the `id` pair written.
    Merge { first: Atom, second: Atom, read: (u32, u32), cong: (Term, Term), guard: Term, write: (u32, u32) },
    /// Arc between bound variables `y_i, y_j`, with direction.
    Arc { dir: Dir, atom: Atom, i: u32, j: u32 },
}

fn shapes(q: &ConjunctiveQuery) -> Vec<Shape> {
    let mut out: Vec<Shape> = (1..=q.bound_vars.len() as u32).map(Shape::Diag).collect();
    let atoms = role_atoms(q);
    for a in &atoms {
        for b in &atoms {
            // forward/forward: R(s, y_i), S(t, y_j)
            if let (Some(i), Some(j)) = (bound(q, a.t), bound(q, b.t)) {
                if a.s != b.s {
                    out.push(Shape::Fork {
                        first: dir_atom(a.r, Dir::F, qterm(a.s), qterm(a.t)),
                        second: dir_atom(b.r, Dir::F, qterm(b.s), qterm(b.t)),
                        i,
                        j,
                        s: qterm(a.s),
                        t: qterm(b.s),
                    });
                }
            }
            // forward/backward: R(s, y_i), S(y_j, t)
            if let (Some(i), Some(j)) = (bound(q, a.t), bound(q, b.s)) {
                if a.s != b.t {
                    out.push(Shape::Fork {
                        first: dir_atom(a.r, Dir::F, qterm(a.s), qterm(a.t)),
                        second: dir_atom(b.r, Dir::B, qterm(b.s), qterm(b.t)),
                        i,
                        j,
                        s: qterm(a.s),
                        t: qterm(b.t),
                    });
                }
            }
            // backward/backward: R(y_i, s), S(y_j, t)
            if let (Some(i), Some(j)) = (bound(q, a.s), bound(q, b.s)) {
                if a.t != b.t {
                    out.push(Shape::Fork {
                        first: dir_atom(a.r, Dir::B, qterm(a.s), qterm(a.t)),
                        second: dir_atom(b.r, Dir::B, qterm(b.s), qterm(b.t)),
                        i,
                        j,
                        s: qterm(a.t),
                        t: qterm(b.t),
                    });
                }
            }
            // merges: R(y_i, y_j), S(y_k, y_l)
            if let (Some(i), Some(j), Some(k), Some(l)) = (bound(q, a.s), bound(q, a.t), bound(q, b.s), bound(q, b.t)) {
                let (yi, yj, yk, yl) = (qterm(a.s), qterm(a.t), qterm(b.s), qterm(b.t));
                out.push(Shape::Merge {
                    first: dir_atom(a.r, Dir::F, yi.clone(), yj.clone()),
                    second: dir_atom(b.r, Dir::F, yk.clone(), yl.clone()),
                    read: (j, l),
                    cong: (yi.clone(), yk.clone()),
                    guard: yi.clone(),
                    write: (i, k),
                });
                out.push(Shape::Merge {
                    first: dir_atom(a.r, Dir::F, yi.clone(), yj.clone()),
                    second: dir_atom(b.r, Dir::B, yk.clone(), yl.clone()),
                    read: (j, k),
                    cong: (yi.clone(), yl.clone()),
                    guard: yi.clone(),
                    write: (i, l),
                });
                out.push(Shape::Merge {
                    first: dir_atom(a.r, Dir::B, yi.clone(), yj.clone()),
                    second: dir_atom(b.r, Dir::B, yk, yl.clone()),
                    read: (i, k),
                    cong: (yj.clone(), yl),
                    guard: yj,
                    write: (j, l),
                });
            }
        }
    }
    for a in &atoms {
        if let (Some(i), Some(j)) = (bound(q, a.s), bound(q, a.t)) {
            for dir in Dir::BOTH {
                out.push(Shape::Arc {
                    dir,
                    atom: dir_atom(a.r, dir, qterm(a.s), qterm(a.t)),
                    i,
                    j,
                });
            }
        }
    }
    out
}

fn aq(d: Dir) -> &'static str {
    match d {
        Dir::F => preds::AQF,
        Dir::B => preds::AQB,
    }
}

fn tq(d: Dir) -> &'static str {
    match d {
        Dir::F => preds::TQF,
        Dir::B => preds::TQB,
    }
}

fn named_facts(named: &BTreeSet<Sym>) -> impl Iterator<Item = Rule> + '_ {
    named.iter().map(|a| Rule::fact(atom(vocab::NAMED, [Term::Const(a.clone())])))
}

/// The n-ary filtering program. `named` lists the ontology's individuals.
pub fn build_filter_reference(q: &ConjunctiveQuery, named: &BTreeSet<Sym>) -> FilterProgram {
    let xs: Vec<Term> = q.answer_vars.iter().map(qvar).collect();
    let ys: Vec<Term> = q.bound_vars.iter().map(qvar).collect();
    let tuple: Vec<Term> = xs.iter().chain(&ys).cloned().collect();
    let with = |extra: &[Term]| -> Vec<Term> { tuple.iter().chain(extra).cloned().collect() };
    let qm = || atom(preds::QM, tuple.clone());
    let sp = || atom(preds::SP, tuple.clone());
    let id = |a: Term, b: Term| atom(preds::ID, with(&[a, b]));
    let (u, v, w) = (ivar("u"), ivar("v"), ivar("w"));

    let mut rules = vec![Rule::new(vec![qm()], body(q))];
    rules.extend(named_facts(named));
    let (mut any_fork, mut any_arc) = (false, false);
    for shape in shapes(q) {
        match shape {
            Shape::Diag(i) => {
                let yi = ys[i as usize - 1].clone();
                rules.push(Rule::new(vec![id(idx(i), idx(i))], vec![qm()]).with_negated(atom(vocab::NI, [yi])));
            }
            Shape::Fork { first, second, i, j, s, t } => {
                any_fork = true;
                rules.push(
                    Rule::new(vec![atom(preds::FK, tuple.clone())], vec![first, second, id(idx(i), idx(j))])
                        .with_negated(atom(vocab::CONGRUENT, [s, t])),
                );
            }
            Shape::Merge { first, second, read, cong, guard, write } => {
                rules.push(
                    Rule::new(
                        vec![id(idx(write.0), idx(write.1))],
                        vec![first, second, id(idx(read.0), idx(read.1)), atom(vocab::CONGRUENT, [cong.0, cong.1])],
                    )
                    .with_negated(atom(vocab::NI, [guard])),
                );
            }
            Shape::Arc { dir, atom: a, i, j } => {
                any_arc = true;
                rules.push(Rule::new(
                    vec![atom(aq(dir), with(&[v.clone(), w.clone()]))],
                    vec![a, id(idx(i), v.clone()), id(idx(j), w.clone())],
                ));
            }
        }
    }
    if !ys.is_empty() {
        rules.push(Rule::new(vec![id(v.clone(), u.clone())], vec![id(u.clone(), v.clone())]));
        rules.push(Rule::new(vec![id(u.clone(), w.clone())], vec![id(u.clone(), v.clone()), id(v.clone(), w.clone())]));
    }
    if any_arc {
        for d in Dir::BOTH {
            rules.push(Rule::new(vec![atom(tq(d), with(&[u.clone(), v.clone()]))], vec![atom(aq(d), with(&[u.clone(), v.clone()]))]));
            rules.push(Rule::new(
                vec![atom(tq(d), with(&[u.clone(), w.clone()]))],
                vec![atom(aq(d), with(&[u.clone(), v.clone()])), atom(tq(d), with(&[v.clone(), w.clone()]))],
            ));
        }
    }
    for x in &xs {
        rules.push(Rule::new(vec![sp()], vec![qm()]).with_negated(atom(vocab::NAMED, [x.clone()])));
    }
    if any_fork {
        rules.push(Rule::new(vec![sp()], vec![atom(preds::FK, tuple.clone())]));
    }
    if any_arc {
        for d in Dir::BOTH {
            rules.push(Rule::new(vec![sp()], vec![atom(tq(d), with(&[v.clone(), v.clone()]))]));
        }
    }
    rules.push(Rule::new(vec![atom(preds::ANS, xs.clone())], vec![qm()]).with_negated(sp()));
    FilterProgram {
        mode: FilterMode::Reference,
        rules,
    }
}

/// The same program with every predicate of arity above two keyed by a
/// packed tuple: `QM(k)` with `k = pack(x̄, ȳ)`, `id(k, j)` with
/// `j = pack(x̄, ȳ, u, v)`, `Ans(pack(x̄))`.
pub fn build_filter_packed(q: &ConjunctiveQuery, named: &BTreeSet<Sym>) -> FilterProgram {
    let xs: Vec<Term> = q.answer_vars.iter().map(qvar).collect();
    let ys: Vec<Term> = q.bound_vars.iter().map(qvar).collect();
    let tuple: Vec<Term> = xs.iter().chain(&ys).cloned().collect();
    let with = |extra: &[Term]| -> Vec<Term> { tuple.iter().chain(extra).cloned().collect() };
    let k = ivar("k");
    let key = |name: &str, extra: &[Term]| Builtin::pack(with(extra), ivar(name));
    let unpack_k = || Builtin::unpack(k.clone(), tuple.clone());
    let id = |name: &str| atom(preds::ID, [k.clone(), ivar(name)]);
    let qm = || atom(preds::QM, [k.clone()]);
    let sp = || atom(preds::SP, [k.clone()]);
    let (u, v, w) = (ivar("u"), ivar("v"), ivar("w"));

    let mut rules = vec![{
        let mut r = Rule::new(vec![qm()], body(q));
        r.builtins.push(Builtin::pack(tuple.clone(), k.clone()));
        r
    }];
    rules.extend(named_facts(named));
    let (mut any_fork, mut any_arc) = (false, false);
    for shape in shapes(q) {
        match shape {
            Shape::Diag(i) => {
                let yi = ys[i as usize - 1].clone();
                rules.push(
                    Rule::new(vec![id("j")], vec![qm()])
                        .with_builtin(unpack_k())
                        .with_negated(atom(vocab::NI, [yi]))
                        .with_builtin(key("j", &[idx(i), idx(i)])),
                );
            }
            Shape::Fork { first, second, i, j, s, t } => {
                any_fork = true;
                rules.push(
                    Rule::new(vec![atom(preds::FK, [k.clone()])], vec![first, second, id("m")])
                        .with_builtin(Builtin::unpack(ivar("m"), with(&[idx(i), idx(j)])))
                        .with_negated(atom(vocab::CONGRUENT, [s, t])),
                );
            }
            Shape::Merge { first, second, read, cong, guard, write } => {
                rules.push(
                    Rule::new(vec![id("t")], vec![first, second, id("m"), atom(vocab::CONGRUENT, [cong.0, cong.1])])
                        .with_builtin(Builtin::unpack(ivar("m"), with(&[idx(read.0), idx(read.1)])))
                        .with_negated(atom(vocab::NI, [guard]))
                        .with_builtin(key("t", &[idx(write.0), idx(write.1)])),
                );
            }
            Shape::Arc { dir, atom: a, i, j } => {
                any_arc = true;
                rules.push(
                    Rule::new(vec![atom(aq(dir), [k.clone(), ivar("c")])], vec![a, id("m1"), id("m2")])
                        .with_builtin(Builtin::unpack(ivar("m1"), with(&[idx(i), v.clone()])))
                        .with_builtin(Builtin::unpack(ivar("m2"), with(&[idx(j), w.clone()])))
                        .with_builtin(key("c", &[v.clone(), w.clone()])),
                );
            }
        }
    }
    if !ys.is_empty() {
        rules.push(
            Rule::new(vec![id("t")], vec![id("j")])
                .with_builtin(Builtin::unpack(ivar("j"), with(&[u.clone(), v.clone()])))
                .with_builtin(key("t", &[v.clone(), u.clone()])),
        );
        rules.push(
            Rule::new(vec![id("t")], vec![id("j"), id("l")])
                .with_builtin(Builtin::unpack(ivar("j"), with(&[u.clone(), v.clone()])))
                .with_builtin(Builtin::unpack(ivar("l"), with(&[v.clone(), w.clone()])))
                .with_builtin(key("t", &[u.clone(), w.clone()])),
        );
    }
    if any_arc {
        for d in Dir::BOTH {
            rules.push(Rule::new(vec![atom(tq(d), [k.clone(), ivar("c")])], vec![atom(aq(d), [k.clone(), ivar("c")])]));
            rules.push(
                Rule::new(vec![atom(tq(d), [k.clone(), ivar("e")])], vec![atom(aq(d), [k.clone(), ivar("c")]), atom(tq(d), [k.clone(), ivar("d")])])
                    .with_builtin(Builtin::unpack(ivar("c"), with(&[u.clone(), v.clone()])))
                    .with_builtin(Builtin::unpack(ivar("d"), with(&[v.clone(), w.clone()])))
                    .with_builtin(key("e", &[u.clone(), w.clone()])),
            );
        }
    }
    for x in &xs {
        rules.push(Rule::new(vec![sp()], vec![qm()]).with_builtin(unpack_k()).with_negated(atom(vocab::NAMED, [x.clone()])));
    }
    if any_fork {
        rules.push(Rule::new(vec![sp()], vec![atom(preds::FK, [k.clone()])]));
    }
    if any_arc {
        for d in Dir::BOTH {
            rules.push(
                Rule::new(vec![sp()], vec![atom(tq(d), [k.clone(), ivar("c")])])
                    .with_builtin(Builtin::unpack(ivar("c"), with(&[v.clone(), v.clone()]))),
            );
        }
    }
    rules.push(
        Rule::new(vec![atom(preds::ANS, [ivar("a")])], vec![qm()])
            .with_negated(sp())
            .with_builtin(unpack_k())
            .with_builtin(Builtin::pack(xs.clone(), ivar("a"))),
    );
    FilterProgram {
        mode: FilterMode::Packed,
        rules,
    }
}

pub fn build_filter(q: &ConjunctiveQuery, named: &BTreeSet<Sym>, mode: FilterMode) -> FilterProgram {
    match mode {
        FilterMode::Packed => build_filter_packed(q, named),
        FilterMode::Reference => build_filter_reference(q, named),
    }
}

/// Answers `q` over the canonical model in a private partition that is
/// retracted afterwards. The canonical partition is only read.
pub fn answer(cm: &CanonicalModel, q: &ConjunctiveQuery, mode: FilterMode) -> Result<AnswerSet, Error> {
    if !cm.satisfiable {
        return Err(Error::Unsatisfiable);
    }
    let program = build_filter(q, &cm.named_individuals, mode);
    let store = &cm.store;
    let pid = store.create_partition("filter", &[cm.partition])?;
    let result = (|| -> Result<AnswerSet, Error> {
        let filter_rules = program.rules.len();
        store.assert(pid, program.rules)?;
        let stats = store.materialize(pid)?;
        let width = match mode {
            FilterMode::Packed => 1,
            FilterMode::Reference => q.answer_vars.len(),
        };
        let qm_arity = match mode {
            FilterMode::Packed => 1,
            FilterMode::Reference => q.answer_vars.len() + q.bound_vars.len(),
        };
        let qm = store.facts(pid, preds::QM, qm_arity)?.len();
        let mut rows = BTreeSet::new();
        for f in store.facts(pid, preds::ANS, width)? {
            let tuple = match mode {
                FilterMode::Packed => match &f[0] {
                    Term::Packed(ts) => ts.clone(),
                    other => return Err(Error::Internal(format!("unexpected answer key {other}"))),
                },
                FilterMode::Reference => f,
            };
            let row: Option<Vec<Sym>> = tuple
                .iter()
                .map(|t| match t {
                    Term::Const(c) if cm.named_individuals.contains(c) => Some(c.clone()),
                    _ => None,
                })
                .collect();
            rows.extend(row);
        }
        let mut set = AnswerSet::new(q.answer_vars.clone(), rows, true);
        set.stats = AnswerStats {
            qm,
            filter_rules,
            derived: stats.derived_count,
        };
        Ok(set)
    })();
    store.retract_partition(pid)?;
    result
}

//! Bottom-up evaluation: compiled rules, greedy join plans, and the
//! stratum-by-stratum semi-naive (or naive) fixpoint.

use std::collections::HashMap;

use indexmap::IndexMap;

use crate::db::{Database, TermData, TermId, TermTable, Tuple};
use crate::error::EngineError;
use crate::rule::{Builtin, Rule};
use crate::store::{EngineConfig, Strategy};
use crate::stratify::{stratify, PredKey};
use crate::term::{Label, Sym, Term};

#[derive(Clone, Debug)]
enum CTerm {
    Var(usize),
    Const(TermId),
}

#[derive(Clone, Debug)]
enum HTerm {
    Var(usize),
    Const(TermId),
    Fn(Label, Vec<HTerm>),
    Packed(Vec<HTerm>),
}

#[derive(Clone, Debug)]
struct CAtom {
    pred: PredKey,
    args: Vec<CTerm>,
}

#[derive(Clone, Debug)]
struct HAtom {
    pred: PredKey,
    args: Vec<HTerm>,
}

#[derive(Clone, Debug)]
enum CBuiltin {
    Skolem { args: Vec<CTerm>, key: CTerm },
    Bind { var: usize, value: CTerm },
}

#[derive(Clone, Debug)]
struct CRule {
    head: Vec<HAtom>,
    body: Vec<CAtom>,
    neg: Vec<CAtom>,
    builtins: Vec<CBuiltin>,
    nvars: usize,
}

struct Compiler<'a> {
    terms: &'a TermTable,
    vars: IndexMap<Sym, usize>,
}

impl Compiler<'_> {
    fn var(&mut self, v: &Sym) -> usize {
        let n = self.vars.len();
        *self.vars.entry(v.clone()).or_insert(n)
    }

    fn body_term(&mut self, t: &Term) -> Result<CTerm, EngineError> {
        match t {
            Term::Var(v) => Ok(CTerm::Var(self.var(v))),
            ground => Ok(CTerm::Const(self.terms.intern(ground)?)),
        }
    }

    fn head_term(&mut self, t: &Term) -> Result<HTerm, EngineError> {
        if t.is_ground() {
            return Ok(HTerm::Const(self.terms.intern(t)?));
        }
        Ok(match t {
            Term::Var(v) => HTerm::Var(self.var(v)),
            Term::Fn(l, args) => HTerm::Fn(
                l.clone(),
                args.iter().map(|a| self.head_term(a)).collect::<Result<_, _>>()?,
            ),
            Term::Packed(args) => {
                HTerm::Packed(args.iter().map(|a| self.head_term(a)).collect::<Result<_, _>>()?)
            }
            _ => unreachable!("non-compound terms without variables are ground"),
        })
    }

    fn atom(&mut self, a: &crate::term::Atom) -> Result<CAtom, EngineError> {
        Ok(CAtom {
            pred: PredKey::of(a),
            args: a.args.iter().map(|t| self.body_term(t)).collect::<Result<_, _>>()?,
        })
    }

    fn compile(terms: &TermTable, rule: &Rule) -> Result<CRule, EngineError> {
        let mut c = Compiler {
            terms,
            vars: IndexMap::new(),
        };
        let body = rule.body.iter().map(|a| c.atom(a)).collect::<Result<Vec<_>, _>>()?;
        let builtins = rule
            .builtins
            .iter()
            .map(|b| {
                Ok(match b {
                    Builtin::Skolem { args, key } => CBuiltin::Skolem {
                        args: args.iter().map(|t| c.body_term(t)).collect::<Result<_, _>>()?,
                        key: c.body_term(key)?,
                    },
                    Builtin::Bind { var, value } => CBuiltin::Bind {
                        var: c.var(var),
                        value: c.body_term(value)?,
                    },
                })
            })
            .collect::<Result<Vec<_>, EngineError>>()?;
        let neg = rule.negated.iter().map(|a| c.atom(a)).collect::<Result<Vec<_>, _>>()?;
        let head = rule
            .head
            .iter()
            .map(|a| {
                Ok(HAtom {
                    pred: PredKey::of(a),
                    args: a.args.iter().map(|t| c.head_term(t)).collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<Vec<_>, EngineError>>()?;
        Ok(CRule {
            head,
            body,
            neg,
            builtins,
            nvars: c.vars.len(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Scan { atom: usize, delta: bool },
    Builtin(usize),
    Neg(usize),
}

fn is_bound(t: &CTerm, bound: &[bool]) -> bool {
    match t {
        CTerm::Var(v) => bound[*v],
        CTerm::Const(_) => true,
    }
}

fn mark(t: &CTerm, bound: &mut [bool]) {
    if let CTerm::Var(v) = t {
        bound[*v] = true;
    }
}

/// Greedy plan: the delta atom first, then repeatedly the atom with the most
/// bound arguments, ties broken by smaller relation and then written order.
/// Builtins and negations are scheduled as soon as their inputs are bound.
fn plan(rule: &CRule, delta_atom: Option<usize>, size: &dyn Fn(&PredKey) -> usize) -> Vec<Step> {
    let mut steps = Vec::with_capacity(rule.body.len() + rule.builtins.len() + rule.neg.len());
    let mut bound = vec![false; rule.nvars];
    let mut atom_done = vec![false; rule.body.len()];
    let mut builtin_done = vec![false; rule.builtins.len()];
    let mut neg_done = vec![false; rule.neg.len()];

    let flush = |steps: &mut Vec<Step>, bound: &mut Vec<bool>, builtin_done: &mut Vec<bool>, neg_done: &mut Vec<bool>| loop {
        let mut progress = false;
        for (i, b) in rule.builtins.iter().enumerate() {
            if builtin_done[i] {
                continue;
            }
            let ready = match b {
                CBuiltin::Skolem { args, key } => {
                    is_bound(key, bound) || args.iter().all(|a| is_bound(a, bound))
                }
                CBuiltin::Bind { value, .. } => is_bound(value, bound),
            };
            if ready {
                match b {
                    CBuiltin::Skolem { args, key } => {
                        mark(key, bound);
                        args.iter().for_each(|a| mark(a, bound));
                    }
                    CBuiltin::Bind { var, .. } => bound[*var] = true,
                }
                builtin_done[i] = true;
                steps.push(Step::Builtin(i));
                progress = true;
            }
        }
        for (i, a) in rule.neg.iter().enumerate() {
            if !neg_done[i] && a.args.iter().all(|t| is_bound(t, bound)) {
                neg_done[i] = true;
                steps.push(Step::Neg(i));
            }
        }
        if !progress {
            break;
        }
    };

    flush(&mut steps, &mut bound, &mut builtin_done, &mut neg_done);
    if let Some(d) = delta_atom {
        atom_done[d] = true;
        steps.push(Step::Scan { atom: d, delta: true });
        rule.body[d].args.iter().for_each(|a| mark(a, &mut bound));
        flush(&mut steps, &mut bound, &mut builtin_done, &mut neg_done);
    }
    while let Some(next) = (0..rule.body.len())
        .filter(|i| !atom_done[*i])
        .min_by_key(|&i| {
            let a = &rule.body[i];
            let nbound = a.args.iter().filter(|t| is_bound(t, &bound)).count();
            (std::cmp::Reverse(nbound.min(1)), size(&a.pred), std::cmp::Reverse(nbound), i)
        })
    {
        atom_done[next] = true;
        steps.push(Step::Scan { atom: next, delta: false });
        rule.body[next].args.iter().for_each(|a| mark(a, &mut bound));
        flush(&mut steps, &mut bound, &mut builtin_done, &mut neg_done);
    }
    steps
}

struct Exec<'a> {
    own: &'a Database,
    reads: &'a [&'a Database],
    terms: &'a TermTable,
    delta: &'a HashMap<PredKey, (usize, usize)>,
    depth_bound: usize,
}

type Bindings = Vec<Option<TermId>>;

impl Exec<'_> {
    fn value(&self, t: &CTerm, b: &Bindings) -> Option<TermId> {
        match t {
            CTerm::Const(c) => Some(*c),
            CTerm::Var(v) => b[*v],
        }
    }

    /// Binds or checks `t` against `v`; records fresh bindings in `trail`.
    fn unify(t: &CTerm, v: TermId, b: &mut Bindings, trail: &mut Vec<usize>) -> bool {
        match t {
            CTerm::Const(c) => *c == v,
            CTerm::Var(x) => match b[*x] {
                Some(y) => y == v,
                None => {
                    b[*x] = Some(v);
                    trail.push(*x);
                    true
                }
            },
        }
    }

    fn undo(b: &mut Bindings, trail: &[usize]) {
        for &x in trail {
            b[x] = None;
        }
    }

    fn run(
        &self,
        rule: &CRule,
        plan: &[Step],
        at: usize,
        b: &mut Bindings,
        out: &mut Vec<(PredKey, Tuple)>,
    ) -> Result<(), EngineError> {
        let Some(step) = plan.get(at) else {
            for h in &rule.head {
                let tuple = h
                    .args
                    .iter()
                    .map(|t| self.instantiate(t, b))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push((h.pred.clone(), tuple.into_boxed_slice()));
            }
            return Ok(());
        };
        match *step {
            Step::Neg(i) => {
                let a = &rule.neg[i];
                let tuple: Vec<TermId> = a.args.iter().map(|t| self.value(t, b).expect("bound by plan")).collect();
                let present = self.own.contains(&a.pred, &tuple) || self.reads.iter().any(|d| d.contains(&a.pred, &tuple));
                if !present {
                    self.run(rule, plan, at + 1, b, out)?;
                }
            }
            Step::Builtin(i) => {
                let mut trail = Vec::new();
                let ok = match &rule.builtins[i] {
                    CBuiltin::Skolem { args, key } => match self.value(key, b) {
                        Some(k) => match self.terms.unpack(k) {
                            Some(ids) if ids.len() == args.len() => args
                                .iter()
                                .zip(ids.iter())
                                .all(|(t, v)| Self::unify(t, *v, b, &mut trail)),
                            _ => false,
                        },
                        None => {
                            let ids: Box<[TermId]> = args.iter().map(|t| self.value(t, b).expect("bound by plan")).collect();
                            let depth = ids.iter().map(|i| self.terms.depth(*i)).max().unwrap_or(0);
                            let k = self.terms.intern_data(TermData::Packed(ids), depth);
                            Self::unify(key, k, b, &mut trail)
                        }
                    },
                    CBuiltin::Bind { var, value } => {
                        let v = self.value(value, b).expect("bound by plan");
                        Self::unify(&CTerm::Var(*var), v, b, &mut trail)
                    }
                };
                if ok {
                    self.run(rule, plan, at + 1, b, out)?;
                }
                Self::undo(b, &trail);
            }
            Step::Scan { atom, delta } => {
                let a = &rule.body[atom];
                let bound: Vec<(usize, TermId)> = a
                    .args
                    .iter()
                    .enumerate()
                    .filter_map(|(p, t)| self.value(t, b).map(|v| (p, v)))
                    .collect();
                let mut sources: Vec<(&crate::db::Relation, usize, usize)> = Vec::new();
                if delta {
                    if let (Some(rel), Some(&(lo, hi))) = (self.own.get(&a.pred), self.delta.get(&a.pred)) {
                        sources.push((rel, lo, hi));
                    }
                } else {
                    for d in self.reads.iter().copied().chain(std::iter::once(self.own)) {
                        if let Some(rel) = d.get(&a.pred) {
                            sources.push((rel, 0, rel.len()));
                        }
                    }
                }
                let mut trail = Vec::with_capacity(a.args.len());
                for (rel, lo, hi) in sources {
                    let mut visit = |idx: usize, b: &mut Bindings| -> Result<(), EngineError> {
                        let tuple = rel.get(idx);
                        trail.clear();
                        let ok = a
                            .args
                            .iter()
                            .zip(tuple.iter())
                            .all(|(t, v)| Self::unify(t, *v, b, &mut trail));
                        if ok {
                            self.run(rule, plan, at + 1, b, out)?;
                        }
                        Self::undo(b, &trail);
                        Ok(())
                    };
                    // the bound position with the shortest posting list
                    let key = bound.iter().copied().min_by_key(|(p, v)| rel.postings(*p, *v).len());
                    match key {
                        Some((pos, v)) => {
                            for &idx in rel.postings(pos, v) {
                                let idx = idx as usize;
                                if idx < lo {
                                    continue;
                                }
                                if idx >= hi {
                                    break;
                                }
                                visit(idx, b)?;
                            }
                        }
                        None => {
                            for idx in lo..hi {
                                visit(idx, b)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn instantiate(&self, t: &HTerm, b: &Bindings) -> Result<TermId, EngineError> {
        match t {
            HTerm::Const(c) => Ok(*c),
            HTerm::Var(v) => Ok(b[*v].expect("head variables are range restricted")),
            HTerm::Fn(label, args) => {
                let ids: Box<[TermId]> = args.iter().map(|a| self.instantiate(a, b)).collect::<Result<_, _>>()?;
                let depth = 1 + ids.iter().map(|i| self.terms.depth(*i)).max().unwrap_or(0);
                if depth as usize > self.depth_bound {
                    let shown = Term::Fn(label.clone(), ids.iter().map(|i| self.terms.decode(*i)).collect());
                    return Err(EngineError::DepthExceeded {
                        bound: self.depth_bound,
                        term: shown.to_string(),
                    });
                }
                Ok(self.terms.intern_data(TermData::Fn(label.clone(), ids), depth))
            }
            HTerm::Packed(args) => {
                let ids: Box<[TermId]> = args.iter().map(|a| self.instantiate(a, b)).collect::<Result<_, _>>()?;
                let depth = ids.iter().map(|i| self.terms.depth(*i)).max().unwrap_or(0);
                Ok(self.terms.intern_data(TermData::Packed(ids), depth))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub strata: usize,
    pub rounds: usize,
}

/// Computes the model of `rules` over `db` (which already holds the
/// extensional facts) and the read-only databases in `reads`.
pub(crate) fn evaluate(
    rules: &[Rule],
    db: &mut Database,
    reads: &[&Database],
    terms: &TermTable,
    config: &EngineConfig,
) -> Result<EvalStats, EngineError> {
    let strata = stratify(rules)?;
    let compiled = rules
        .iter()
        .map(|r| Compiler::compile(terms, r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut stats = EvalStats {
        strata: strata.len(),
        rounds: 0,
    };
    let no_delta = HashMap::new();
    for group in &strata.groups {
        let group: Vec<&CRule> = group.iter().map(|&i| &compiled[i]).collect();
        let mut delta: HashMap<PredKey, (usize, usize)> = HashMap::new();
        let mut first = true;
        loop {
            let mut out = Vec::new();
            {
                let size = |p: &PredKey| db.len_of(p) + reads.iter().map(|d| d.len_of(p)).sum::<usize>();
                let exec = Exec {
                    own: db,
                    reads,
                    terms,
                    delta: if first { &no_delta } else { &delta },
                    depth_bound: config.depth_bound,
                };
                for rule in &group {
                    let mut b = vec![None; rule.nvars];
                    if first || config.strategy == Strategy::Naive {
                        let p = plan(rule, None, &size);
                        exec.run(rule, &p, 0, &mut b, &mut out)?;
                    } else {
                        for (i, a) in rule.body.iter().enumerate() {
                            if delta.get(&a.pred).is_some_and(|(lo, hi)| lo < hi) {
                                let p = plan(rule, Some(i), &size);
                                exec.run(rule, &p, 0, &mut b, &mut out)?;
                            }
                        }
                    }
                }
            }
            stats.rounds += 1;
            first = false;
            let mut next: HashMap<PredKey, (usize, usize)> = HashMap::new();
            for (pred, tuple) in out {
                let before = db.len_of(&pred);
                if db.insert(&pred, tuple) {
                    next.entry(pred).or_insert((before, before)).1 = before + 1;
                }
            }
            if next.is_empty() {
                break;
            }
            delta = next;
        }
    }
    Ok(stats)
}

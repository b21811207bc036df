//! Brute-force reference semantics: a bounded skolem chase over the
//! axioms themselves and propositional model enumeration for ground
//! disjunctive programs. Shares no evaluation code with the engine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rsa_datalog::{Label, Sym};

use crate::error::Error;
use crate::filter::AnswerSet;
use crate::model::{Axiom, Concept, ConjunctiveQuery, Ontology, QAtom, QTerm, Role};

pub const DEFAULT_ATOM_LIMIT: usize = 16;

/// A chase term: an individual or a skolem application.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OTerm {
    Ind(Sym),
    Sk(Label, Box<OTerm>),
}

impl OTerm {
    pub fn depth(&self) -> usize {
        match self {
            OTerm::Ind(_) => 0,
            OTerm::Sk(_, t) => 1 + t.depth(),
        }
    }
}

impl fmt::Display for OTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OTerm::Ind(a) => write!(f, "{a}"),
            OTerm::Sk(l, t) => write!(f, "f{{{},{},{}}}({t})", l.a, l.r, l.b),
        }
    }
}

/// Saturated facts. Terms are grouped into equality classes; facts are
/// stored once per class, on its least member.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChaseResult {
    /// Every term created, including individuals.
    pub terms: BTreeSet<OTerm>,
    /// Class representative of each term that was merged with another.
    rep: BTreeMap<OTerm, OTerm>,
    /// `(concept IRI, representative)`.
    concepts: BTreeSet<(Sym, OTerm)>,
    /// `(role name, representative, representative)`; inverse atoms are
    /// stored swapped.
    roles: BTreeSet<(Sym, OTerm, OTerm)>,
    pub terminated: bool,
    pub depth_used: usize,
}

impl ChaseResult {
    pub fn find(&self, t: &OTerm) -> OTerm {
        let mut cur = t;
        while let Some(next) = self.rep.get(cur) {
            cur = next;
        }
        cur.clone()
    }

    fn union(&mut self, a: &OTerm, b: &OTerm) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.rep.insert(hi, lo);
        true
    }

    pub fn equal(&self, a: &OTerm, b: &OTerm) -> bool {
        self.find(a) == self.find(b)
    }

    /// Equality classes with more than one member.
    pub fn classes(&self) -> Vec<BTreeSet<OTerm>> {
        let mut out: BTreeMap<OTerm, BTreeSet<OTerm>> = BTreeMap::new();
        for t in &self.terms {
            out.entry(self.find(t)).or_default().insert(t.clone());
        }
        out.into_values().filter(|c| c.len() > 1).collect()
    }

    pub fn satisfiable(&self) -> bool {
        let bottom = Concept::Bottom.pred();
        !self.concepts.iter().any(|(c, _)| *c == bottom)
    }

    pub fn has_concept(&self, c: &Concept, t: &OTerm) -> bool {
        match c {
            Concept::Top => true,
            _ => self.concepts.contains(&(c.pred(), self.find(t))),
        }
    }

    pub fn has_role(&self, r: &Role, s: &OTerm, t: &OTerm) -> bool {
        let (s, t) = if r.inverse { (t, s) } else { (s, t) };
        self.roles.contains(&(r.name.clone(), self.find(s), self.find(t)))
    }

    /// `(concept IRI, term)` for every term, expanding equality classes.
    pub fn concept_facts(&self) -> BTreeSet<(Sym, OTerm)> {
        self.terms
            .iter()
            .flat_map(|t| {
                let r = self.find(t);
                self.concepts.iter().filter(move |(_, x)| *x == r).map(move |(c, _)| (c.clone(), t.clone()))
            })
            .collect()
    }

    /// `(role name, subject, object)` for every pair of terms, expanding
    /// equality classes.
    pub fn role_facts(&self) -> BTreeSet<(Sym, OTerm, OTerm)> {
        let mut members: BTreeMap<OTerm, Vec<&OTerm>> = BTreeMap::new();
        for t in &self.terms {
            members.entry(self.find(t)).or_default().push(t);
        }
        let mut out = BTreeSet::new();
        for (r, s, t) in &self.roles {
            for a in &members[s] {
                for b in &members[t] {
                    out.insert((r.clone(), (*a).clone(), (*b).clone()));
                }
            }
        }
        out
    }

    /// Concept facts about individuals, for comparison with other engines.
    pub fn named_concept_facts(&self) -> BTreeSet<(Sym, Sym)> {
        self.concept_facts()
            .into_iter()
            .filter_map(|(c, t)| match t {
                OTerm::Ind(a) => Some((c, a)),
                _ => None,
            })
            .collect()
    }

    pub fn fact_count(&self) -> usize {
        self.concepts.len() + self.roles.len()
    }

    fn canonicalize(&mut self) {
        let concepts = std::mem::take(&mut self.concepts);
        self.concepts = concepts.into_iter().map(|(c, t)| (c, self.find(&t))).collect();
        let roles = std::mem::take(&mut self.roles);
        self.roles = roles.into_iter().map(|(r, s, t)| (r, self.find(&s), self.find(&t))).collect();
    }
}

/// Breadth-first oblivious chase of `o`. Equality merges classes, which
/// amounts to the substitution rules of the equality axiomatization.
/// Stops at a fixpoint, or when a new skolem term would be deeper than
/// `depth`; then `terminated` is false.
pub fn chase(o: &Ontology, depth: usize) -> Result<ChaseResult, Error> {
    if o.has_disjunction() {
        return Err(Error::Disjunctive);
    }
    let top = Concept::Top.pred();
    let mut res = ChaseResult {
        terminated: true,
        ..ChaseResult::default()
    };
    for i in o.signature().individuals {
        res.terms.insert(OTerm::Ind(i));
    }
    loop {
        let mut concepts: Vec<(Sym, OTerm)> = Vec::new();
        let mut roles: Vec<(Sym, OTerm, OTerm)> = Vec::new();
        let mut merges: Vec<(OTerm, OTerm)> = Vec::new();
        let mut fresh: Vec<OTerm> = Vec::new();
        let mut cut = false;
        let reps: BTreeSet<OTerm> = res.terms.iter().map(|t| res.find(t)).collect();
        let pairs = |r: &Role| -> Vec<(OTerm, OTerm)> {
            res.roles
                .iter()
                .filter(|(n, _, _)| *n == r.name)
                .map(|(_, s, t)| if r.inverse { (t.clone(), s.clone()) } else { (s.clone(), t.clone()) })
                .collect()
        };
        let role_fact = |r: &Role, s: OTerm, t: OTerm| if r.inverse { (r.name.clone(), t, s) } else { (r.name.clone(), s, t) };
        for t in &reps {
            concepts.push((top.clone(), t.clone()));
        }
        for ax in o.axioms() {
            match ax {
                Axiom::SubRole(r, s) => roles.extend(pairs(r).into_iter().map(|(x, y)| role_fact(s, x, y))),
                Axiom::SubClass(body, h) => {
                    for t in reps.iter().filter(|t| body.iter().all(|c| res.has_concept(c, t))) {
                        concepts.push((h.pred(), t.clone()));
                    }
                }
                Axiom::Nominal(a, i) => {
                    for t in reps.iter().filter(|t| res.has_concept(a, t)) {
                        fresh.push(OTerm::Ind(i.clone()));
                        merges.push((t.clone(), OTerm::Ind(i.clone())));
                    }
                }
                Axiom::SomeLhs(r, a, b) => {
                    for (x, y) in pairs(r) {
                        if res.has_concept(a, &y) {
                            concepts.push((b.pred(), x));
                        }
                    }
                }
                Axiom::Max1(a, r, b) => {
                    let rs = pairs(r);
                    for (x, y1) in rs.iter().filter(|(x, y)| res.has_concept(a, x) && res.has_concept(b, y)) {
                        for (_, y2) in rs.iter().filter(|(x2, y2)| x2 == x && res.has_concept(b, y2)) {
                            merges.push((y1.clone(), y2.clone()));
                        }
                    }
                }
                Axiom::Exists(a, r, b) => {
                    let label = ax.t5_label().expect("T5 axiom has a label");
                    // every member of a class fires, not just its representative
                    for t in res.terms.iter().filter(|t| res.has_concept(a, t)) {
                        let f = OTerm::Sk(label.clone(), Box::new(t.clone()));
                        if f.depth() > depth {
                            cut = true;
                            continue;
                        }
                        roles.push(role_fact(r, t.clone(), f.clone()));
                        concepts.push((b.pred(), f.clone()));
                        fresh.push(f);
                    }
                }
                Axiom::Disj(..) => unreachable!("rejected above"),
                Axiom::ConceptFact(c, i) => concepts.push((c.pred(), OTerm::Ind(i.clone()))),
                Axiom::RoleFact(r, s, t) => roles.push(role_fact(r, OTerm::Ind(s.clone()), OTerm::Ind(t.clone()))),
            }
        }
        res.terminated &= !cut;
        let before = (res.terms.len(), res.rep.len(), res.concepts.len(), res.roles.len());
        res.terms.extend(fresh);
        for (c, t) in concepts {
            let t = res.find(&t);
            res.concepts.insert((c, t));
        }
        for (r, s, t) in roles {
            let (s, t) = (res.find(&s), res.find(&t));
            res.roles.insert((r, s, t));
        }
        for (a, b) in merges {
            res.union(&a, &b);
        }
        res.canonicalize();
        if before == (res.terms.len(), res.rep.len(), res.concepts.len(), res.roles.len()) {
            break;
        }
    }
    res.depth_used = res.terms.iter().map(OTerm::depth).max().unwrap_or(0);
    Ok(res)
}

fn matches(res: &ChaseResult, q: &ConjunctiveQuery, individuals: &BTreeSet<Sym>) -> BTreeSet<Vec<Sym>> {
    let reps: Vec<OTerm> = res.terms.iter().map(|t| res.find(t)).collect::<BTreeSet<_>>().into_iter().collect();
    let named: Vec<OTerm> = individuals.iter().map(|i| OTerm::Ind(i.clone())).collect();
    let mut out = BTreeSet::new();
    let mut binding: BTreeMap<Sym, OTerm> = BTreeMap::new();
    search(res, q, &reps, &named, 0, &mut binding, &mut out);
    out
}

fn resolve(t: &QTerm, b: &BTreeMap<Sym, OTerm>) -> Option<OTerm> {
    match t {
        QTerm::Const(c) => Some(OTerm::Ind(c.clone())),
        QTerm::Var(v) => b.get(v).cloned(),
    }
}

/// Backtracking homomorphism search. Answer variables range over the
/// individuals, other variables over class representatives.
fn search(
    res: &ChaseResult,
    q: &ConjunctiveQuery,
    reps: &[OTerm],
    named: &[OTerm],
    i: usize,
    b: &mut BTreeMap<Sym, OTerm>,
    out: &mut BTreeSet<Vec<Sym>>,
) {
    if i == q.atoms.len() {
        let row: Option<Vec<Sym>> = q
            .answer_vars
            .iter()
            .map(|v| match b.get(v) {
                Some(OTerm::Ind(a)) => Some(a.clone()),
                _ => None,
            })
            .collect();
        out.extend(row);
        return;
    }
    let atom = &q.atoms[i];
    let free = atom.terms().into_iter().find_map(|t| t.var().filter(|v| !b.contains_key(*v)).cloned());
    if let Some(v) = free {
        let domain = if q.answer_vars.contains(&v) { named } else { reps };
        for t in domain {
            b.insert(v.clone(), t.clone());
            search(res, q, reps, named, i, b, out);
            b.remove(&v);
        }
        return;
    }
    let ok = match atom {
        QAtom::Concept(c, t) => resolve(t, b).is_some_and(|t| res.has_concept(c, &t)),
        QAtom::Role(r, s, t) => match (resolve(s, b), resolve(t, b)) {
            (Some(s), Some(t)) => res.has_role(&Role::named(r.clone()), &s, &t),
            _ => false,
        },
    };
    if ok {
        search(res, q, reps, named, i + 1, b, out);
    }
}

/// Certain answers of `q` read off the chase. `exact` is the chase's
/// termination flag; an unsatisfiable ontology entails every tuple.
pub fn certain_answers_chase(o: &Ontology, q: &ConjunctiveQuery, depth: usize) -> Result<AnswerSet, Error> {
    let res = chase(o, depth)?;
    let individuals = o.signature().individuals;
    let rows = if res.terminated && !res.satisfiable() {
        all_tuples(&individuals, q.answer_vars.len())
    } else {
        matches(&res, q, &individuals)
    };
    Ok(AnswerSet::new(q.answer_vars.clone(), rows, res.terminated))
}

fn all_tuples(individuals: &BTreeSet<Sym>, n: usize) -> BTreeSet<Vec<Sym>> {
    let mut out = BTreeSet::from([Vec::new()]);
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|row| {
                individuals.iter().map(move |a| {
                    let mut r = row.clone();
                    r.push(a.clone());
                    r
                })
            })
            .collect();
    }
    out
}

/// `(concept IRI, individual)`.
pub type GroundAtom = (Sym, Sym);

/// `head₁ ∨ … ∨ headₙ :- body`; an empty head is `⊥`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundRule {
    pub body: Vec<GroundAtom>,
    pub head: Vec<GroundAtom>,
}

/// Grounds the T1, DISJ and A1 axioms of `o` over its individuals.
/// `owl:Thing` is dropped from bodies; rules with an `owl:Thing` head
/// disjunct are tautologies and skipped.
pub fn ground_concept_program(o: &Ontology) -> Result<Vec<GroundRule>, Error> {
    let individuals = o.signature().individuals;
    let mut out = BTreeSet::new();
    let lits = |cs: &[Concept], i: &Sym| -> Vec<GroundAtom> {
        cs.iter()
            .filter(|c| !matches!(c, Concept::Top | Concept::Bottom))
            .map(|c| (c.pred(), i.clone()))
            .collect()
    };
    for ax in o.axioms() {
        let (body, head): (Vec<Concept>, Vec<Concept>) = match ax {
            Axiom::SubClass(b, h) => (b.clone(), vec![h.clone()]),
            Axiom::Disj(a, hs) => (vec![a.clone()], hs.clone()),
            Axiom::ConceptFact(c, i) => {
                if *c != Concept::Top {
                    out.insert(GroundRule {
                        body: Vec::new(),
                        head: lits(std::slice::from_ref(c), i),
                    });
                }
                continue;
            }
            other => return Err(Error::Oracle(format!("cannot ground {other}"))),
        };
        if head.contains(&Concept::Top) {
            continue;
        }
        if body.contains(&Concept::Bottom) {
            continue;
        }
        for i in &individuals {
            out.insert(GroundRule {
                body: lits(&body, i),
                head: lits(&head, i),
            });
        }
    }
    Ok(out.into_iter().collect())
}

/// Atoms true in every model of `rules`; every atom when there is none.
pub fn cautious_consequences(rules: &[GroundRule], limit: usize) -> Result<BTreeSet<GroundAtom>, Error> {
    let atoms: Vec<GroundAtom> = rules
        .iter()
        .flat_map(|r| r.body.iter().chain(&r.head).cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if atoms.len() > limit {
        return Err(Error::Oracle(format!("{} ground atoms exceed the limit of {limit}", atoms.len())));
    }
    let index: BTreeMap<&GroundAtom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let compiled: Vec<(Vec<usize>, Vec<usize>)> = rules
        .iter()
        .map(|r| (r.body.iter().map(|a| index[a]).collect(), r.head.iter().map(|a| index[a]).collect()))
        .collect();
    let mut cautious: Option<u64> = None;
    for m in 0u64..(1u64 << atoms.len()) {
        let t = |i: &usize| m >> i & 1 == 1;
        if compiled.iter().all(|(b, h)| !b.iter().all(t) || h.iter().any(t)) {
            cautious = Some(cautious.map_or(m, |c| c & m));
        }
    }
    let mask = cautious.unwrap_or(u64::MAX);
    Ok(atoms.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a).collect())
}

/// Answers a query of concept atoms over the cautious consequences of a
/// ground program. Role atoms have no ground support and never match.
pub fn disjunctive_certain(rules: &[GroundRule], q: &ConjunctiveQuery, limit: usize) -> Result<AnswerSet, Error> {
    let facts = cautious_consequences(rules, limit)?;
    let individuals: BTreeSet<Sym> = rules.iter().flat_map(|r| r.body.iter().chain(&r.head).map(|(_, i)| i.clone())).collect();
    let mut res = ChaseResult::default();
    for (c, i) in facts {
        res.concepts.insert((c, OTerm::Ind(i)));
    }
    res.terms = individuals.iter().map(|i| OTerm::Ind(i.clone())).collect();
    Ok(AnswerSet::new(q.answer_vars.clone(), matches(&res, q, &individuals), true))
}

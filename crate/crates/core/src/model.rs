//! Normalized Horn-ALCHOIQ ontologies (plus right-hand disjunction),
//! roles, conjunctive queries, and the translation of axioms into rules.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use indexmap::IndexSet;
use rsa_datalog::{atom, vocab, Atom, Label, Rule, Sym, Term};

use crate::error::Error;

/// A role name or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    pub name: Sym,
    pub inverse: bool,
}

impl Role {
    pub fn named(name: impl Into<Sym>) -> Self {
        Role {
            name: name.into(),
            inverse: false,
        }
    }

    pub fn inverse_of(name: impl Into<Sym>) -> Self {
        Role {
            name: name.into(),
            inverse: true,
        }
    }

    pub fn inv(&self) -> Role {
        Role {
            name: self.name.clone(),
            inverse: !self.inverse,
        }
    }

    /// Datalog predicate holding the extension of this role.
    pub fn pred(&self) -> Sym {
        if self.inverse {
            format!("{}^-", self.name).into()
        } else {
            self.name.clone()
        }
    }

    /// Directional predicate `R^f` or `R^b`.
    pub fn dir_pred(&self, dir: Dir) -> Sym {
        format!("{}^{}", self.pred(), dir.suffix()).into()
    }
}

pub fn inv(r: &Role) -> Role {
    r.inv()
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>{}", self.name, if self.inverse { "-" } else { "" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    F,
    B,
}

impl Dir {
    pub const BOTH: [Dir; 2] = [Dir::F, Dir::B];

    pub fn suffix(self) -> &'static str {
        match self {
            Dir::F => "f",
            Dir::B => "b",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Named(Sym),
}

impl Concept {
    pub fn named(iri: impl Into<Sym>) -> Self {
        Concept::Named(iri.into())
    }

    pub fn pred(&self) -> Sym {
        match self {
            Concept::Top => vocab::TOP.into(),
            Concept::Bottom => vocab::BOTTOM.into(),
            Concept::Named(s) => s.clone(),
        }
    }

    pub fn name(&self) -> Option<&Sym> {
        match self {
            Concept::Named(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("TOP"),
            Concept::Bottom => f.write_str("BOTTOM"),
            Concept::Named(s) => write!(f, "<{s}>"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomKind {
    R2,
    T1,
    T2,
    T3,
    T4,
    T5,
    Disj,
    A1,
    A2,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// `R ⊑ S`
    SubRole(Role, Role),
    /// `A1 ⊓ … ⊓ An ⊑ B`
    SubClass(Vec<Concept>, Concept),
    /// `A ⊑ {a}`
    Nominal(Concept, Sym),
    /// `∃R.A ⊑ B`, stored as `(R, A, B)`
    SomeLhs(Role, Concept, Concept),
    /// `A ⊑ ≤1 R.B`
    Max1(Concept, Role, Concept),
    /// `A ⊑ ∃R.B`
    Exists(Concept, Role, Concept),
    /// `A ⊑ B1 ⊔ … ⊔ Bn`
    Disj(Concept, Vec<Concept>),
    /// `A(a)`
    ConceptFact(Concept, Sym),
    /// `R(a, b)`
    RoleFact(Role, Sym, Sym),
}

impl Axiom {
    pub fn kind(&self) -> AxiomKind {
        match self {
            Axiom::SubRole(..) => AxiomKind::R2,
            Axiom::SubClass(..) => AxiomKind::T1,
            Axiom::Nominal(..) => AxiomKind::T2,
            Axiom::SomeLhs(..) => AxiomKind::T3,
            Axiom::Max1(..) => AxiomKind::T4,
            Axiom::Exists(..) => AxiomKind::T5,
            Axiom::Disj(..) => AxiomKind::Disj,
            Axiom::ConceptFact(..) => AxiomKind::A1,
            Axiom::RoleFact(..) => AxiomKind::A2,
        }
    }

    pub fn is_abox(&self) -> bool {
        matches!(self.kind(), AxiomKind::A1 | AxiomKind::A2)
    }

    pub fn is_rbox(&self) -> bool {
        self.kind() == AxiomKind::R2
    }

    pub fn is_tbox(&self) -> bool {
        !self.is_abox() && !self.is_rbox()
    }

    pub fn concepts(&self) -> Vec<&Concept> {
        match self {
            Axiom::SubRole(..) | Axiom::RoleFact(..) => Vec::new(),
            Axiom::SubClass(lhs, b) => lhs.iter().chain([b]).collect(),
            Axiom::Nominal(a, _) | Axiom::ConceptFact(a, _) => vec![a],
            Axiom::SomeLhs(_, a, b) | Axiom::Max1(a, _, b) | Axiom::Exists(a, _, b) => vec![a, b],
            Axiom::Disj(a, bs) => [a].into_iter().chain(bs).collect(),
        }
    }

    pub fn roles(&self) -> Vec<&Role> {
        match self {
            Axiom::SubRole(r, s) => vec![r, s],
            Axiom::SomeLhs(r, ..) | Axiom::Max1(_, r, _) | Axiom::Exists(_, r, _) | Axiom::RoleFact(r, ..) => vec![r],
            _ => Vec::new(),
        }
    }

    pub fn individuals(&self) -> Vec<&Sym> {
        match self {
            Axiom::Nominal(_, a) | Axiom::ConceptFact(_, a) => vec![a],
            Axiom::RoleFact(_, a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    /// The `(A, R, B)` label of a T5 axiom.
    pub fn t5_label(&self) -> Option<Label> {
        match self {
            Axiom::Exists(a, r, b) => Some(Label {
                a: a.pred(),
                r: r.pred(),
                b: b.pred(),
            }),
            _ => None,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |cs: &[Concept], sep: &str| cs.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep);
        match self {
            Axiom::SubRole(r, s) => write!(f, "sub-role {r} {s} ."),
            Axiom::SubClass(lhs, b) => write!(f, "sub-class {} -> {b} .", join(lhs, " & ")),
            Axiom::Nominal(a, i) => write!(f, "nominal {a} -> <{i}> ."),
            Axiom::SomeLhs(r, a, b) => write!(f, "some {r} {a} -> {b} ."),
            Axiom::Max1(a, r, b) => write!(f, "max1 {a} {r} {b} ."),
            Axiom::Exists(a, r, b) => write!(f, "exists {a} -> {r} {b} ."),
            Axiom::Disj(a, bs) => write!(f, "sub-class {a} -> {} .", join(bs, " | ")),
            Axiom::ConceptFact(a, i) => write!(f, "fact {a}(<{i}>) ."),
            Axiom::RoleFact(r, a, b) => write!(f, "fact {r}(<{a}>, <{b}>) ."),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<Sym>,
    pub roles: BTreeSet<Sym>,
    pub individuals: BTreeSet<Sym>,
}

/// A set of axioms kept in insertion order. Equality ignores order and
/// prefix declarations.
#[derive(Clone, Debug, Default)]
pub struct Ontology {
    pub prefixes: Vec<(String, String)>,
    axioms: IndexSet<Axiom>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.axioms == other.axioms
    }
}

impl Eq for Ontology {}

impl FromIterator<Axiom> for Ontology {
    fn from_iter<I: IntoIterator<Item = Axiom>>(iter: I) -> Self {
        Ontology {
            prefixes: Vec::new(),
            axioms: iter.into_iter().collect(),
        }
    }
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, ax: Axiom) -> bool {
        self.axioms.insert(ax)
    }

    pub fn remove(&mut self, ax: &Axiom) -> bool {
        self.axioms.shift_remove(ax)
    }

    pub fn contains(&self, ax: &Axiom) -> bool {
        self.axioms.contains(ax)
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter()
    }

    pub fn abox(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(|a| a.is_abox())
    }

    pub fn tbox(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(|a| a.is_tbox())
    }

    pub fn rbox(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(|a| a.is_rbox())
    }

    pub fn of_kind(&self, kind: AxiomKind) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(move |a| a.kind() == kind)
    }

    pub fn has_disjunction(&self) -> bool {
        self.of_kind(AxiomKind::Disj).next().is_some()
    }

    /// Same prefixes, axioms filtered by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&Axiom) -> bool) -> Ontology {
        Ontology {
            prefixes: self.prefixes.clone(),
            axioms: self.axioms.iter().filter(|a| keep(a)).cloned().collect(),
        }
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for ax in &self.axioms {
            for c in ax.concepts() {
                if let Concept::Named(n) = c {
                    sig.concepts.insert(n.clone());
                }
            }
            for r in ax.roles() {
                sig.roles.insert(r.name.clone());
            }
            for i in ax.individuals() {
                sig.individuals.insert(i.clone());
            }
        }
        sig
    }

    /// Role expressions as written in axioms.
    pub fn role_exprs(&self) -> BTreeSet<Role> {
        self.axioms.iter().flat_map(|a| a.roles()).cloned().collect()
    }

    /// Role expressions occurring in axioms, together with their inverses.
    pub fn role_closure(&self) -> BTreeSet<Role> {
        self.signature()
            .roles
            .into_iter()
            .flat_map(|n| [Role::named(n.clone()), Role::inverse_of(n)])
            .collect()
    }

    pub fn hierarchy(&self) -> RoleHierarchy {
        RoleHierarchy::new(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ValidationIssue {
    /// Axiom is valid but must be shifted before Horn reasoning.
    RequiresShifting(Axiom),
    Malformed { axiom: Axiom, reason: String },
    /// An IRI is used both as a concept and as a role.
    Punning(Sym),
    /// A concept, role or individual mentioned in an axiom is missing from a
    /// declared signature.
    MissingFromSignature(Sym),
}

impl ValidationIssue {
    /// Whether the issue makes the ontology unusable.
    pub fn is_error(&self) -> bool {
        !matches!(self, ValidationIssue::RequiresShifting(_))
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::RequiresShifting(a) => write!(f, "requires shifting: {a}"),
            ValidationIssue::Malformed { axiom, reason } => write!(f, "{reason}: {axiom}"),
            ValidationIssue::Punning(s) => write!(f, "<{s}> is used both as a concept and as a role"),
            ValidationIssue::MissingFromSignature(s) => write!(f, "<{s}> is not in the signature"),
        }
    }
}

/// Checks normal-form conformance. DISJ axioms are noted but allowed.
pub fn validate(o: &Ontology) -> Vec<ValidationIssue> {
    validate_against(o, &o.signature())
}

/// As [`validate`], against an explicitly declared signature.
pub fn validate_against(o: &Ontology, sig: &Signature) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let malformed = |a: &Axiom, reason: &str| ValidationIssue::Malformed {
        axiom: a.clone(),
        reason: reason.to_string(),
    };
    for ax in o.axioms() {
        match ax {
            Axiom::SubClass(lhs, _) if lhs.is_empty() => issues.push(malformed(ax, "empty conjunction")),
            Axiom::Disj(_, bs) if bs.len() < 2 => issues.push(malformed(ax, "fewer than two disjuncts")),
            Axiom::Disj(..) => issues.push(ValidationIssue::RequiresShifting(ax.clone())),
            Axiom::ConceptFact(Concept::Top | Concept::Bottom, _) => {}
            Axiom::RoleFact(r, ..) if r.inverse => {}
            _ => {}
        }
        for c in ax.concepts() {
            if let Concept::Named(n) = c {
                if !sig.concepts.contains(n) {
                    issues.push(ValidationIssue::MissingFromSignature(n.clone()));
                }
            }
        }
        for r in ax.roles() {
            if !sig.roles.contains(&r.name) {
                issues.push(ValidationIssue::MissingFromSignature(r.name.clone()));
            }
        }
        for i in ax.individuals() {
            if !sig.individuals.contains(i) {
                issues.push(ValidationIssue::MissingFromSignature(i.clone()));
            }
        }
    }
    for n in sig.concepts.intersection(&sig.roles) {
        issues.push(ValidationIssue::Punning(n.clone()));
    }
    issues.sort();
    issues.dedup();
    issues
}

/// The reflexive-transitive closure `⊑*` of the role hierarchy, closed
/// under inverses, over the roles of an ontology.
#[derive(Clone, Debug, Default)]
pub struct RoleHierarchy {
    /// Direct edges with the axiom that justifies them.
    edges: BTreeMap<Role, Vec<(Role, Axiom)>>,
    roles: BTreeSet<Role>,
}

impl RoleHierarchy {
    pub fn new(o: &Ontology) -> Self {
        Self::from_axioms(o.axioms(), o.role_closure())
    }

    pub fn from_axioms<'a>(axioms: impl IntoIterator<Item = &'a Axiom>, roles: BTreeSet<Role>) -> Self {
        let mut h = RoleHierarchy {
            edges: BTreeMap::new(),
            roles,
        };
        for ax in axioms {
            if let Axiom::SubRole(r, s) = ax {
                h.edges.entry(r.clone()).or_default().push((s.clone(), ax.clone()));
                h.edges.entry(r.inv()).or_default().push((s.inv(), ax.clone()));
                for x in [r, s] {
                    h.roles.insert(x.clone());
                    h.roles.insert(x.inv());
                }
            }
        }
        h
    }

    /// Roles of the ontology and their inverses.
    pub fn roles(&self) -> &BTreeSet<Role> {
        &self.roles
    }

    /// Every `S` with `r ⊑* S`, including `r`.
    pub fn supers(&self, r: &Role) -> BTreeSet<Role> {
        let mut seen = BTreeSet::from([r.clone()]);
        let mut queue = VecDeque::from([r.clone()]);
        while let Some(x) = queue.pop_front() {
            for (s, _) in self.edges.get(&x).into_iter().flatten() {
                if seen.insert(s.clone()) {
                    queue.push_back(s.clone());
                }
            }
        }
        seen
    }

    pub fn sub(&self, r: &Role, s: &Role) -> bool {
        r == s || self.supers(r).contains(s)
    }

    /// A shortest chain of R2 axioms witnessing `r ⊑* s`. Empty when `r = s`.
    pub fn chain(&self, r: &Role, s: &Role) -> Option<Vec<Axiom>> {
        let mut prev: BTreeMap<Role, (Role, Axiom)> = BTreeMap::new();
        let mut queue = VecDeque::from([r.clone()]);
        let mut seen = BTreeSet::from([r.clone()]);
        while let Some(x) = queue.pop_front() {
            if &x == s {
                let mut out = Vec::new();
                let mut cur = x;
                while let Some((p, ax)) = prev.get(&cur) {
                    out.push(ax.clone());
                    cur = p.clone();
                }
                out.reverse();
                return Some(out);
            }
            for (y, ax) in self.edges.get(&x).into_iter().flatten() {
                if seen.insert(y.clone()) {
                    prev.insert(y.clone(), (x.clone(), ax.clone()));
                    queue.push_back(y.clone());
                }
            }
        }
        None
    }
}

/// `r ⊑*_R s` for the R2 axioms in `rbox`.
pub fn subrole_star(r: &Role, s: &Role, rbox: &[Axiom]) -> bool {
    RoleHierarchy::from_axioms(rbox, BTreeSet::new()).sub(r, s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QTerm {
    Var(Sym),
    Const(Sym),
}

impl QTerm {
    pub fn to_term(&self) -> Term {
        match self {
            QTerm::Var(v) => Term::Var(v.clone()),
            QTerm::Const(c) => Term::Const(c.clone()),
        }
    }

    pub fn var(&self) -> Option<&Sym> {
        match self {
            QTerm::Var(v) => Some(v),
            QTerm::Const(_) => None,
        }
    }
}

impl fmt::Display for QTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QTerm::Var(v) => write!(f, "?{v}"),
            QTerm::Const(c) => write!(f, "<{c}>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QAtom {
    Concept(Concept, QTerm),
    Role(Sym, QTerm, QTerm),
}

impl QAtom {
    pub fn terms(&self) -> Vec<&QTerm> {
        match self {
            QAtom::Concept(_, t) => vec![t],
            QAtom::Role(_, s, t) => vec![s, t],
        }
    }

    pub fn to_atom(&self) -> Atom {
        match self {
            QAtom::Concept(c, t) => atom(&c.pred(), [t.to_term()]),
            QAtom::Role(r, s, t) => atom(r, [s.to_term(), t.to_term()]),
        }
    }
}

impl fmt::Display for QAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QAtom::Concept(c, t) => write!(f, "{c}({t})"),
            QAtom::Role(r, s, t) => write!(f, "<{r}>({s}, {t})"),
        }
    }
}

/// `q(x̄) = ∃ȳ. ψ(x̄, ȳ)`. Bound variables are indexed from 1 in order of
/// first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjunctiveQuery {
    pub answer_vars: Vec<Sym>,
    pub bound_vars: Vec<Sym>,
    pub atoms: Vec<QAtom>,
}

impl ConjunctiveQuery {
    /// Builds a query; bound variables are the non-answer variables in
    /// order of first occurrence.
    pub fn new(answer_vars: Vec<Sym>, atoms: Vec<QAtom>) -> Result<Self, Error> {
        let mut bound: Vec<Sym> = Vec::new();
        let mut seen: BTreeSet<&Sym> = BTreeSet::new();
        for a in &atoms {
            for t in a.terms() {
                if let Some(v) = t.var() {
                    seen.insert(v);
                    if !answer_vars.contains(v) && !bound.contains(v) {
                        bound.push(v.clone());
                    }
                }
            }
        }
        for v in &answer_vars {
            if !seen.contains(v) {
                return Err(Error::Query(format!("answer variable ?{v} does not occur in the query body")));
            }
        }
        let mut uniq = BTreeSet::new();
        if let Some(d) = answer_vars.iter().find(|v| !uniq.insert(*v)) {
            return Err(Error::Query(format!("answer variable ?{d} is selected twice")));
        }
        Ok(ConjunctiveQuery {
            answer_vars,
            bound_vars: bound,
            atoms,
        })
    }

    pub fn is_boolean(&self) -> bool {
        self.answer_vars.is_empty()
    }

    /// 1-based index of a bound variable.
    pub fn bound_index(&self, v: &Sym) -> Option<u32> {
        self.bound_vars.iter().position(|b| b == v).map(|i| i as u32 + 1)
    }

    pub fn constants(&self) -> BTreeSet<Sym> {
        self.atoms
            .iter()
            .flat_map(|a| a.terms())
            .filter_map(|t| match t {
                QTerm::Const(c) => Some(c.clone()),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.answer_vars.iter().map(|v| format!("?{v}")).collect();
        let atoms: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        write!(f, "q({}) <- {}", vars.join(", "), atoms.join(" & "))
    }
}

fn x() -> Term {
    Term::var("x")
}
fn y() -> Term {
    Term::var("y")
}
fn z() -> Term {
    Term::var("z")
}

fn concept_atom(c: &Concept, t: Term) -> Atom {
    atom(&c.pred(), [t])
}

fn role_atom(r: &Role, s: Term, t: Term) -> Atom {
    atom(&r.pred(), [s, t])
}

fn congruent(s: Term, t: Term) -> Atom {
    atom(vocab::CONGRUENT, [s, t])
}

/// The two bridging rules linking `R` and `R⁻`.
pub fn inverse_bridge(name: &Sym) -> [Rule; 2] {
    let r = Role::named(name.clone());
    let ri = r.inv();
    [
        Rule::new(vec![role_atom(&ri, y(), x())], vec![role_atom(&r, x(), y())]),
        Rule::new(vec![role_atom(&r, x(), y())], vec![role_atom(&ri, y(), x())]),
    ]
}

/// Function symbol `f^A_{R,B}` applied to `t`.
pub fn skolem(label: &Label, t: Term) -> Term {
    Term::Fn(label.clone(), vec![t])
}

/// Datalog translation of a single axiom. Bridging rules are added for
/// every inverse role the axiom mentions.
pub fn translate_axiom(ax: &Axiom) -> Result<Vec<Rule>, Error> {
    let mut rules = translate_core(ax)?;
    for r in ax.roles() {
        if r.inverse {
            rules.extend(inverse_bridge(&r.name));
        }
    }
    Ok(rules)
}

/// Datalog translation without bridging rules; T5 is handled by `t5`.
pub(crate) fn translate_with(ax: &Axiom, t5: impl Fn(&Concept, &Role, &Concept) -> Vec<Rule>) -> Result<Vec<Rule>, Error> {
    Ok(match ax {
        Axiom::SubRole(r, s) => vec![Rule::new(vec![role_atom(s, x(), y())], vec![role_atom(r, x(), y())])],
        Axiom::SubClass(lhs, b) => vec![Rule::new(
            vec![concept_atom(b, x())],
            lhs.iter().map(|a| concept_atom(a, x())).collect(),
        )],
        Axiom::Nominal(a, i) => vec![Rule::new(
            vec![congruent(x(), Term::Const(i.clone()))],
            vec![concept_atom(a, x())],
        )],
        Axiom::SomeLhs(r, a, b) => vec![Rule::new(
            vec![concept_atom(b, x())],
            vec![role_atom(r, x(), y()), concept_atom(a, y())],
        )],
        Axiom::Max1(a, r, b) => vec![Rule::new(
            vec![congruent(y(), z())],
            vec![
                concept_atom(a, x()),
                role_atom(r, x(), y()),
                concept_atom(b, y()),
                role_atom(r, x(), z()),
                concept_atom(b, z()),
            ],
        )],
        Axiom::Exists(a, r, b) => t5(a, r, b),
        Axiom::Disj(..) => return Err(Error::UnsupportedAxiom(ax.to_string())),
        Axiom::ConceptFact(a, i) => vec![Rule::fact(concept_atom(a, Term::Const(i.clone())))],
        Axiom::RoleFact(r, a, b) => vec![Rule::fact(role_atom(r, Term::Const(a.clone()), Term::Const(b.clone())))],
    })
}

fn translate_core(ax: &Axiom) -> Result<Vec<Rule>, Error> {
    translate_with(ax, |a, r, b| {
        let label = ax.t5_label().expect("T5 axiom");
        let f = skolem(&label, x());
        vec![Rule::new(
            vec![role_atom(r, x(), f.clone()), concept_atom(b, f)],
            vec![concept_atom(a, x())],
        )]
    })
}

/// Concept and binary predicates that the top/equality axiomatization must
/// cover for a program over this ontology: every concept name, and both
/// the name and inverse predicate of every role.
pub fn equality_signature(o: &Ontology) -> (Vec<Sym>, Vec<Sym>) {
    let sig = o.signature();
    let concepts = sig.concepts.into_iter().collect();
    let roles = sig
        .roles
        .into_iter()
        .flat_map(|n| [Role::named(n.clone()).pred(), Role::inverse_of(n).pred()])
        .collect();
    (concepts, roles)
}

/// `Top(a)` for every individual of the ontology.
pub fn individual_top_facts(o: &Ontology) -> Vec<Rule> {
    o.signature()
        .individuals
        .into_iter()
        .map(|i| Rule::fact(atom(vocab::TOP, [Term::Const(i)])))
        .collect()
}

/// `π(O)`: all axioms translated, bridging rules for every role name,
/// duplicates removed.
pub fn translate_ontology(o: &Ontology) -> Result<Vec<Rule>, Error> {
    let mut out: IndexSet<Rule> = IndexSet::new();
    for ax in o.axioms() {
        out.extend(translate_core(ax)?);
    }
    for n in o.signature().roles {
        out.extend(inverse_bridge(&n));
    }
    Ok(out.into_iter().collect())
}

//! Role safety, the RSA check program, its dependency graph and the
//! equality-safety conditions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use indexmap::IndexSet;
use petgraph::unionfind::UnionFind;
use rsa_datalog::{atom, axiomatize_top_equality, vocab, Atom, Label, Rule, Store, Sym, Term};
use serde_json::{json, Value};

use crate::error::Error;
use crate::model::{equality_signature, individual_top_facts, inverse_bridge, translate_with, Axiom, AxiomKind, Concept, Ontology, Role, RoleHierarchy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsafeWitness {
    /// 1: the role is below the inverse of a T3 role with a non-TOP
    /// filler; 2: the role is below a T4 role or its inverse.
    pub condition: u8,
    pub axiom: Axiom,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoleSafety {
    pub unsafe_roles: BTreeMap<Role, Vec<UnsafeWitness>>,
    pub safe: BTreeSet<Role>,
}

impl RoleSafety {
    pub fn is_unsafe(&self, r: &Role) -> bool {
        self.unsafe_roles.contains_key(r)
    }
}

pub fn classify_roles(o: &Ontology) -> RoleSafety {
    classify_with(o, &o.hierarchy())
}

fn classify_with(o: &Ontology, h: &RoleHierarchy) -> RoleSafety {
    let mut report = RoleSafety::default();
    let t5_roles: BTreeSet<&Role> = o
        .axioms()
        .filter_map(|a| match a {
            Axiom::Exists(_, r, _) => Some(r),
            _ => None,
        })
        .collect();
    for r in h.roles().iter().chain(t5_roles.iter().copied()) {
        if !t5_roles.contains(r) {
            report.safe.insert(r.clone());
            continue;
        }
        let supers = h.supers(r);
        let mut witnesses = Vec::new();
        for ax in o.axioms() {
            match ax {
                Axiom::SomeLhs(s, a, _) if *a != Concept::Top && supers.contains(&s.inv()) => {
                    witnesses.push(UnsafeWitness { condition: 1, axiom: ax.clone() });
                }
                Axiom::Max1(_, s, _) if supers.contains(s) || supers.contains(&s.inv()) => {
                    witnesses.push(UnsafeWitness { condition: 2, axiom: ax.clone() });
                }
                _ => {}
            }
        }
        if witnesses.is_empty() {
            report.safe.insert(r.clone());
        } else {
            report.unsafe_roles.insert(r.clone(), witnesses);
        }
    }
    report
}

pub fn unode(label: &Label) -> Term {
    Term::Unode(label.clone())
}

/// `P_RSA` together with its top/equality axiomatization.
pub fn build_rsa_check_program(o: &Ontology, safety: &RoleSafety) -> Result<Vec<Rule>, Error> {
    let x = || Term::var("x");
    let y = || Term::var("y");
    let mut rules: IndexSet<Rule> = IndexSet::new();
    for ax in o.axioms() {
        rules.extend(translate_with(ax, |a, r, b| {
            let u = unode(&ax.t5_label().expect("T5 axiom"));
            vec![Rule::new(
                vec![atom(&r.pred(), [x(), u.clone()]), atom(&b.pred(), [u.clone()]), atom(vocab::PE, [x(), u])],
                vec![atom(&a.pred(), [x()])],
            )]
        })?);
    }
    let sig = o.signature();
    for n in &sig.roles {
        rules.extend(inverse_bridge(n));
    }
    rules.insert(Rule::new(
        vec![atom(vocab::E, [x(), y()])],
        vec![atom(vocab::U, [x()]), atom(vocab::PE, [x(), y()]), atom(vocab::U, [y()])],
    ));
    for ax in o.of_kind(AxiomKind::T5) {
        if let Axiom::Exists(_, r, _) = ax {
            if safety.is_unsafe(r) {
                rules.insert(Rule::fact(atom(vocab::U, [unode(&ax.t5_label().expect("T5"))])));
            }
        }
    }
    let (mut concepts, mut roles) = equality_signature(o);
    concepts.push(vocab::U.into());
    roles.extend([Sym::from(vocab::PE), Sym::from(vocab::E)]);
    rules.extend(axiomatize_top_equality(&concepts, &roles));
    rules.extend(individual_top_facts(o));
    Ok(rules.into_iter().collect())
}

/// The digraph over `u` constants induced by `E` facts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    /// One node per T5 axiom with an unsafe role, sorted.
    pub nodes: Vec<Label>,
    /// Sorted, duplicate-free.
    pub edges: Vec<(Label, Label)>,
}

impl DependencyGraph {
    pub fn new(nodes: impl IntoIterator<Item = Label>, edges: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut edges: Vec<_> = edges.into_iter().collect();
        edges.sort();
        edges.dedup();
        let mut nodes: BTreeSet<Label> = nodes.into_iter().collect();
        for (s, t) in &edges {
            nodes.insert(s.clone());
            nodes.insert(t.clone());
        }
        DependencyGraph {
            nodes: nodes.into_iter().collect(),
            edges,
        }
    }

    pub fn out_neighbors<'a>(&'a self, n: &'a Label) -> impl Iterator<Item = &'a Label> + 'a {
        self.edges.iter().filter(move |(s, _)| s == n).map(|(_, t)| t)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Whether the underlying undirected multigraph is acyclic. On failure the
/// witness is a shortest undirected cycle, starting at its smallest node.
pub fn is_oriented_forest(g: &DependencyGraph) -> (bool, Option<Vec<Label>>) {
    let index: BTreeMap<&Label, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut uf: UnionFind<usize> = UnionFind::new(g.nodes.len());
    let mut acyclic = true;
    for (s, t) in &g.edges {
        if !uf.union(index[s], index[t]) {
            acyclic = false;
            break;
        }
    }
    if acyclic {
        (true, None)
    } else {
        (false, shortest_cycle(g))
    }
}

fn shortest_cycle(g: &DependencyGraph) -> Option<Vec<Label>> {
    if let Some((s, _)) = g.edges.iter().find(|(s, t)| s == t) {
        return Some(vec![s.clone()]);
    }
    let n = g.nodes.len();
    let index: BTreeMap<&Label, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    // undirected edge list; each directed edge is one undirected edge
    let und: Vec<(usize, usize)> = g.edges.iter().map(|(s, t)| (index[s], index[t])).collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in und.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut best: Option<Vec<usize>> = None;
    for (e, &(a, b)) in und.iter().enumerate() {
        // shortest path from b to a avoiding edge e
        let mut prev: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[b] = true;
        let mut queue = VecDeque::from([b]);
        while let Some(v) = queue.pop_front() {
            if v == a {
                break;
            }
            for &(w, f) in &adj[v] {
                if f != e && !seen[w] {
                    seen[w] = true;
                    prev[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        if !seen[a] {
            continue;
        }
        let mut path = vec![a];
        let mut cur = a;
        while let Some(p) = prev[cur] {
            path.push(p);
            cur = p;
        }
        // path runs a .. b; the edge (a, b) closes it
        let start = (0..path.len()).min_by_key(|&i| path[i]).expect("non-empty");
        path.rotate_left(start);
        if path.len() > 2 && path[path.len() - 1] < path[1] {
            path[1..].reverse();
        }
        let better = match &best {
            None => true,
            Some(b) => (path.len(), &path) < (b.len(), b),
        };
        if better {
            best = Some(path);
        }
    }
    best.map(|c| c.into_iter().map(|i| g.nodes[i].clone()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualityViolation {
    pub kind: u8,
    pub witness: Vec<Atom>,
    pub implicated: Vec<Axiom>,
    /// The `u` constant involved.
    pub node: Label,
    /// Kind 1: `(R, S)`; kind 2: `(R, S)` with `T` in `via`.
    pub roles: (Role, Role),
    pub via: Option<Role>,
}

impl EqualityViolation {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "node": format!("u{}", self.node),
            "witness": self.witness.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "implicated": self.implicated.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "via": self.via.as_ref().map(ToString::to_string),
        })
    }
}

/// Everything the RSA test reads from `M_RSA`.
#[derive(Clone, Debug, Default)]
pub struct Analysis {
    pub safety: RoleSafety,
    pub graph: DependencyGraph,
    /// Non-reflexive `congruent` pairs.
    pub congruent: BTreeSet<(Term, Term)>,
    /// Role atoms `(role, s, t)` where `s` or `t` is a `u` constant.
    pub unode_roles: BTreeSet<(Role, Term, Term)>,
    /// T5 label to axiom.
    pub t5: BTreeMap<Label, Axiom>,
    pub facts: usize,
}

impl Analysis {
    /// `u_1 ≈ u_2` in `M_RSA`.
    pub fn unodes_congruent(&self, a: &Label, b: &Label) -> bool {
        a == b || self.congruent.contains(&(unode(a), unode(b)))
    }
}

fn role_of_pred(pred: &str, roles: &BTreeMap<Sym, Role>) -> Option<Role> {
    roles.get(pred).cloned()
}

/// Materializes `P_RSA` in a private store and snapshots what the checks need.
pub fn analyze(o: &Ontology) -> Result<Analysis, Error> {
    if o.has_disjunction() {
        return Err(Error::Disjunctive);
    }
    let h = o.hierarchy();
    let safety = classify_with(o, &h);
    let program = build_rsa_check_program(o, &safety)?;
    let store = Store::default();
    let p = store.create_partition("rsa-check", &[])?;
    store.assert(p, program)?;
    let stats = store.materialize(p)?;
    let t5: BTreeMap<Label, Axiom> = o.of_kind(AxiomKind::T5).map(|a| (a.t5_label().expect("T5"), a.clone())).collect();
    let unsafe_nodes: Vec<Label> = t5
        .iter()
        .filter(|(_, a)| matches!(a, Axiom::Exists(_, r, _) if safety.is_unsafe(r)))
        .map(|(l, _)| l.clone())
        .collect();
    // every E endpoint is congruent to some u constant and substitution
    // copies its edges there, so restricting to u constants loses no cycle
    let edges = store
        .facts(p, vocab::E, 2)?
        .into_iter()
        .filter_map(|f| match (&f[0], &f[1]) {
            (Term::Unode(s), Term::Unode(t)) => Some((s.clone(), t.clone())),
            _ => None,
        });
    let graph = DependencyGraph::new(unsafe_nodes, edges);
    let congruent = store
        .facts(p, vocab::CONGRUENT, 2)?
        .into_iter()
        .filter(|f| f[0] != f[1])
        .map(|f| (f[0].clone(), f[1].clone()))
        .collect();
    let roles: BTreeMap<Sym, Role> = o.role_closure().into_iter().map(|r| (r.pred(), r)).collect();
    let mut unode_roles = BTreeSet::new();
    for (pred, role) in &roles {
        for f in store.facts(p, pred, 2)? {
            if matches!(f[0], Term::Unode(_)) || matches!(f[1], Term::Unode(_)) {
                if let Some(r) = role_of_pred(pred, &roles) {
                    debug_assert_eq!(&r, role);
                    unode_roles.insert((r, f[0].clone(), f[1].clone()));
                }
            }
        }
    }
    store.retract_partition(p)?;
    Ok(Analysis {
        safety,
        graph,
        congruent,
        unode_roles,
        t5,
        facts: stats.facts,
    })
}

pub fn build_dependency_graph(o: &Ontology) -> Result<DependencyGraph, Error> {
    Ok(analyze(o)?.graph)
}

fn role_atom(r: &Role, s: &Term, t: &Term) -> Atom {
    atom(&r.pred(), [s.clone(), t.clone()])
}

pub fn check_equality_safety(o: &Ontology) -> Result<Vec<EqualityViolation>, Error> {
    Ok(equality_violations(o, &analyze(o)?))
}

/// Both kinds of equality-safety violation, read from an analysis of `o`.
pub fn equality_violations(o: &Ontology, an: &Analysis) -> Vec<EqualityViolation> {
    let h = o.hierarchy();
    let mut out = Vec::new();
    let t4: Vec<(&Role, &Axiom)> = o
        .axioms()
        .filter_map(|a| match a {
            Axiom::Max1(_, s, _) => Some((s, a)),
            _ => None,
        })
        .collect();
    let t4_roles: BTreeSet<&Role> = t4.iter().map(|(s, _)| *s).collect();

    // kind 1: w ≈ t, R(t, u), R ⊑* Inv(S), S in a T4 axiom
    let mut seen = BTreeSet::new();
    for (r, t, u) in &an.unode_roles {
        let Term::Unode(label) = u else { continue };
        let Some((w, _)) = an.congruent.iter().find(|(w, t2)| t2 == t && w != t) else {
            continue;
        };
        let supers = h.supers(r);
        for s in &t4_roles {
            if supers.contains(&s.inv()) && seen.insert((r.clone(), label.clone(), (*s).clone())) {
                out.push(EqualityViolation {
                    kind: 1,
                    witness: vec![atom(vocab::CONGRUENT, [w.clone(), t.clone()]), role_atom(r, t, u)],
                    implicated: t4.iter().filter(|(s2, _)| s2 == s).map(|(_, a)| (*a).clone()).collect(),
                    node: label.clone(),
                    roles: (r.clone(), (*s).clone()),
                    via: None,
                });
            }
        }
    }

    // kind 2: R(a, u), S(u, a) with a named, R ⊑* T, S ⊑* Inv(T). Only
    // role-name atoms are paired: every R(a, u) has the mirror R⁻(u, a),
    // which would otherwise match trivially with T = R.
    let mut seen = BTreeSet::new();
    for (r, a, u) in &an.unode_roles {
        let (Term::Const(_), Term::Unode(label)) = (a, u) else { continue };
        if r.inverse {
            continue;
        }
        for (s, u2, a2) in &an.unode_roles {
            if s.inverse || u2 != u || a2 != a {
                continue;
            }
            let rs = h.supers(r);
            let ss = h.supers(s);
            if let Some(t) = rs.iter().find(|t| ss.contains(&t.inv())) {
                if seen.insert((r.clone(), s.clone(), label.clone())) {
                    out.push(EqualityViolation {
                        kind: 2,
                        witness: vec![role_atom(r, a, u), role_atom(s, u, a)],
                        implicated: Vec::new(),
                        node: label.clone(),
                        roles: (r.clone(), s.clone()),
                        via: Some(t.clone()),
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct RsaReport {
    pub is_rsa: bool,
    pub forest_violation: Option<Vec<Label>>,
    pub equality_violations: Vec<EqualityViolation>,
    pub safety: RoleSafety,
    pub graph: DependencyGraph,
}

impl RsaReport {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "is_rsa": self.is_rsa,
            "forest_violation": self.forest_violation.as_ref().map(|c| c.iter().map(|l| format!("u{l}")).collect::<Vec<_>>()),
            "equality_violations": self.equality_violations.iter().map(EqualityViolation::to_json).collect::<Vec<_>>(),
            "unsafe_roles": self.safety.unsafe_roles.keys().map(ToString::to_string).collect::<Vec<_>>(),
            "graph": {
                "nodes": self.graph.nodes.len(),
                "edges": self.graph.edges.len(),
            },
        })
    }
}

pub fn report_from(o: &Ontology, an: &Analysis) -> RsaReport {
    let (_, forest_violation) = is_oriented_forest(&an.graph);
    let equality_violations = equality_violations(o, an);
    RsaReport {
        is_rsa: forest_violation.is_none() && equality_violations.is_empty(),
        forest_violation,
        equality_violations,
        safety: an.safety.clone(),
        graph: an.graph.clone(),
    }
}

pub fn is_rsa(o: &Ontology) -> Result<RsaReport, Error> {
    let an = analyze(o)?;
    Ok(report_from(o, &an))
}

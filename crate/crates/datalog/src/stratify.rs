//! Stratification of programs with negation as failure.
//!
//! `delta` is the pointwise-minimal stratification: a predicate sits one
//! stratum above every predicate it reads negatively and at least as high as
//! every predicate it reads positively. A rule is evaluated in the lowest
//! stratum among its head predicates; since every body predicate sits at or
//! below each head, all of its inputs are complete by then.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;

use crate::error::EngineError;
use crate::rule::Rule;
use crate::term::{Atom, Sym};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Sym,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: impl Into<Sym>, arity: usize) -> Self {
        PredKey {
            name: name.into(),
            arity,
        }
    }

    pub fn of(atom: &Atom) -> Self {
        PredKey {
            name: atom.pred.clone(),
            arity: atom.args.len(),
        }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strata {
    /// Predicate to stratum index, starting at 1.
    pub delta: BTreeMap<PredKey, usize>,
    /// `groups[i]` holds indices of the rules evaluated in stratum `i + 1`.
    pub groups: Vec<Vec<usize>>,
}

impl Strata {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn stratum_of(&self, pred: &PredKey) -> Option<usize> {
        self.delta.get(pred).copied()
    }
}

pub fn stratify(rules: &[Rule]) -> Result<Strata, EngineError> {
    let mut graph: DiGraph<PredKey, bool> = DiGraph::new();
    let mut nodes: HashMap<PredKey, NodeIndex> = HashMap::new();
    let mut node = |graph: &mut DiGraph<PredKey, bool>, key: PredKey| {
        *nodes
            .entry(key.clone())
            .or_insert_with(|| graph.add_node(key))
    };

    for rule in rules {
        let heads: Vec<NodeIndex> = rule
            .head
            .iter()
            .map(|a| node(&mut graph, PredKey::of(a)))
            .collect();
        for a in &rule.body {
            let b = node(&mut graph, PredKey::of(a));
            for &h in &heads {
                add_edge(&mut graph, b, h, false);
            }
        }
        for a in &rule.negated {
            let b = node(&mut graph, PredKey::of(a));
            for &h in &heads {
                add_edge(&mut graph, b, h, true);
            }
        }
    }

    let sccs = tarjan_scc(&graph);
    let mut scc_of = vec![0usize; graph.node_count()];
    for (i, scc) in sccs.iter().enumerate() {
        for n in scc {
            scc_of[n.index()] = i;
        }
    }

    for scc in &sccs {
        for &n in scc {
            for e in graph.edges(n) {
                if *e.weight() && scc_of[e.target().index()] == scc_of[n.index()] {
                    return Err(EngineError::NotStratifiable {
                        cycle: negative_cycle(&graph, &scc_of, n, e.target()),
                    });
                }
            }
        }
    }

    // tarjan_scc yields components in reverse topological order.
    let mut level = vec![1usize; sccs.len()];
    for i in (0..sccs.len()).rev() {
        let here = level[i];
        for &n in &sccs[i] {
            for e in graph.edges(n) {
                let j = scc_of[e.target().index()];
                if j != i {
                    let need = here + usize::from(*e.weight());
                    if level[j] < need {
                        level[j] = need;
                    }
                }
            }
        }
    }

    let delta: BTreeMap<PredKey, usize> = graph
        .node_indices()
        .map(|n| (graph[n].clone(), level[scc_of[n.index()]]))
        .collect();
    let k = delta.values().copied().max().unwrap_or(0);
    let mut groups = vec![Vec::new(); k];
    for (i, rule) in rules.iter().enumerate() {
        let s = rule
            .head
            .iter()
            .map(|a| delta[&PredKey::of(a)])
            .min()
            .unwrap_or(1);
        groups[s - 1].push(i);
    }
    // drop trailing strata that only hold extensional predicates
    while groups.last().is_some_and(|g| g.is_empty()) && groups.len() > 1 {
        groups.pop();
    }
    if rules.is_empty() {
        groups.clear();
    }
    Ok(Strata { delta, groups })
}

/// A negative edge dominates a positive one between the same pair.
fn add_edge(graph: &mut DiGraph<PredKey, bool>, from: NodeIndex, to: NodeIndex, negative: bool) {
    match graph.find_edge(from, to) {
        Some(e) => graph[e] |= negative,
        None => {
            graph.add_edge(from, to, negative);
        }
    }
}

/// Names the predicates on a cycle `from -> to -> ... -> from` whose first edge is negative.
fn negative_cycle(
    graph: &DiGraph<PredKey, bool>,
    scc_of: &[usize],
    from: NodeIndex,
    to: NodeIndex,
) -> Vec<String> {
    let comp = scc_of[from.index()];
    let mut prev: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut queue = VecDeque::from([to]);
    let mut seen = vec![false; graph.node_count()];
    seen[to.index()] = true;
    while let Some(n) = queue.pop_front() {
        if n == from {
            break;
        }
        for e in graph.edges(n) {
            let t = e.target();
            if scc_of[t.index()] == comp && !seen[t.index()] {
                seen[t.index()] = true;
                prev.insert(t, n);
                queue.push_back(t);
            }
        }
    }
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        match prev.get(&cur) {
            Some(&p) => {
                path.push(p);
                cur = p;
            }
            None => break,
        }
    }
    path.reverse();
    let mut names: Vec<String> = path.iter().map(|n| graph[*n].to_string()).collect();
    names.insert(0, graph[from].to_string());
    names.dedup();
    names
}

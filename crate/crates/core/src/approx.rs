//! Sound lower-bound approximation to RSA: restriction, shifting of
//! disjunctions, cycle breaking and equality-safety repair.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::Error;
use crate::model::{Axiom, AxiomKind, Concept, Ontology, Role};
use crate::profile::{analyze, report_from, DependencyGraph, EqualityViolation};
use rsa_datalog::{Label, Sym};

/// Keeps the axioms the reasoner understands. Every variant of [`Axiom`]
/// is in the language, so nothing is dropped today.
pub fn restrict_to_alchoiq(o: &Ontology) -> (Ontology, Vec<Axiom>) {
    let in_language = |a: &Axiom| {
        matches!(
            a.kind(),
            AxiomKind::R2
                | AxiomKind::T1
                | AxiomKind::T2
                | AxiomKind::T3
                | AxiomKind::T4
                | AxiomKind::T5
                | AxiomKind::Disj
                | AxiomKind::A1
                | AxiomKind::A2
        )
    };
    let dropped: Vec<Axiom> = o.axioms().filter(|a| !in_language(a)).cloned().collect();
    (o.filtered(in_language), dropped)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShiftReport {
    /// Each DISJ axiom with the Horn axioms it was replaced by.
    pub shifted: BTreeMap<Axiom, Vec<Axiom>>,
    /// Complement-deriving axioms kept after pruning.
    pub complement_rules: Vec<Axiom>,
    /// Complement concept name to the concept it negates.
    pub complements: BTreeMap<Sym, Concept>,
}

struct Complements<'a> {
    taken: &'a BTreeSet<Sym>,
    of: BTreeMap<Concept, Sym>,
    back: BTreeMap<Sym, Concept>,
}

impl Complements<'_> {
    /// `nC`, with `n(nC) = C`.
    fn neg(&mut self, c: &Concept) -> Concept {
        if let Concept::Named(n) = c {
            if let Some(orig) = self.back.get(n) {
                return orig.clone();
            }
        }
        if let Some(n) = self.of.get(c) {
            return Concept::Named(n.clone());
        }
        let base = match c {
            Concept::Named(n) => n.to_string(),
            Concept::Bottom => "urn:rsacomb:Nothing".to_string(),
            Concept::Top => "urn:rsacomb:Thing".to_string(),
        };
        let mut name = format!("{base}_not");
        while self.taken.contains(name.as_str()) || self.back.contains_key(name.as_str()) {
            name.push('_');
        }
        let sym: Sym = name.into();
        self.of.insert(c.clone(), sym.clone());
        self.back.insert(sym.clone(), c.clone());
        Concept::Named(sym)
    }
}

fn sub_class(mut body: Vec<Concept>, head: Concept) -> Axiom {
    if body.is_empty() {
        body.push(Concept::Top);
    }
    body.sort();
    body.dedup();
    Axiom::SubClass(body, head)
}

/// Replaces each DISJ axiom by Horn axioms over fresh complement concepts.
/// Horn input comes back unchanged.
pub fn shift_disjunctions(o: &Ontology) -> (Ontology, ShiftReport) {
    let mut report = ShiftReport::default();
    if !o.has_disjunction() {
        return (o.clone(), report);
    }
    let sig = o.signature();
    let mut comp = Complements {
        taken: &sig.concepts,
        of: BTreeMap::new(),
        back: BTreeMap::new(),
    };
    let mut out: Vec<Axiom> = Vec::new();
    // ⊥-rule bodies, as unary conjunctions plus an optional T3 role
    let mut bottoms: Vec<(Vec<Concept>, Option<Role>)> = Vec::new();
    for ax in o.axioms() {
        match ax {
            Axiom::Disj(a, bs) => {
                let bs: Vec<Concept> = bs.iter().filter(|b| **b != Concept::Bottom).cloned().collect();
                let mut gen = Vec::new();
                if !bs.contains(&Concept::Top) {
                    let negs: Vec<Concept> = bs.iter().map(|b| comp.neg(b)).collect();
                    for (i, b) in bs.iter().enumerate() {
                        let mut body = vec![a.clone()];
                        body.extend(negs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, n)| n.clone()));
                        gen.push(sub_class(body, b.clone()));
                    }
                    let mut body = vec![a.clone()];
                    body.extend(negs);
                    bottoms.push((body.clone(), None));
                    gen.push(sub_class(body, Concept::Bottom));
                }
                out.extend(gen.iter().cloned());
                report.shifted.insert(ax.clone(), gen);
            }
            Axiom::SubClass(body, Concept::Bottom) => {
                bottoms.push((body.clone(), None));
                out.push(ax.clone());
            }
            Axiom::SomeLhs(r, a, Concept::Bottom) => {
                bottoms.push((vec![a.clone()], Some(r.clone())));
                out.push(ax.clone());
            }
            Axiom::Exists(a, _, Concept::Bottom) => {
                bottoms.push((vec![a.clone()], None));
                out.push(ax.clone());
            }
            _ => out.push(ax.clone()),
        }
    }
    let mut complement_rules: Vec<Axiom> = Vec::new();
    for (body, role) in &bottoms {
        for (i, phi) in body.iter().enumerate() {
            if *phi == Concept::Top {
                continue;
            }
            let head = comp.neg(phi);
            match role {
                // ∃R.A ⊑ ⊥ gives ∃R⁻.⊤ ⊑ nA; the binary complement is skipped
                Some(r) => complement_rules.push(Axiom::SomeLhs(r.inv(), Concept::Top, head)),
                None => {
                    let rest: Vec<Concept> = body.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.clone()).collect();
                    complement_rules.push(sub_class(rest, head));
                }
            }
        }
    }
    // prune to a fixpoint
    let is_comp = |c: &Concept, back: &BTreeMap<Sym, Concept>| matches!(c, Concept::Named(n) if back.contains_key(n));
    let mut all: Vec<(Axiom, bool)> = out.into_iter().map(|a| (a, false)).chain(complement_rules.into_iter().map(|a| (a, true))).collect();
    let mut seen = BTreeSet::new();
    all.retain(|(a, _)| seen.insert(a.clone()));
    loop {
        let used: BTreeSet<Concept> = all.iter().flat_map(|(a, _)| body_concepts(a)).collect();
        let derivable: BTreeSet<Concept> = all
            .iter()
            .filter_map(|(a, _)| match a {
                Axiom::SubClass(_, h) | Axiom::SomeLhs(_, _, h) | Axiom::ConceptFact(h, _) => Some(h.clone()),
                Axiom::Exists(_, _, b) => Some(b.clone()),
                _ => None,
            })
            .collect();
        let before = all.len();
        all.retain(|(a, complement)| {
            let head = match a {
                Axiom::SubClass(_, h) | Axiom::SomeLhs(_, _, h) => Some(h),
                _ => None,
            };
            if *complement && head.is_some_and(|h| is_comp(h, &comp.back) && !used.contains(h)) {
                return false;
            }
            let body: Vec<&Concept> = match a {
                Axiom::SubClass(body, _) => body.iter().collect(),
                Axiom::SomeLhs(_, c, _) => vec![c],
                _ => Vec::new(),
            };
            !body.iter().any(|c| is_comp(c, &comp.back) && !derivable.contains(*c))
        });
        if all.len() == before {
            break;
        }
    }
    let kept: BTreeSet<&Axiom> = all.iter().map(|(a, _)| a).collect();
    for gen in report.shifted.values_mut() {
        gen.retain(|a| kept.contains(a));
    }
    report.complement_rules = all.iter().filter(|(_, c)| *c).map(|(a, _)| a.clone()).collect();
    let used_comps: BTreeSet<Sym> = all
        .iter()
        .flat_map(|(a, _)| a.concepts().into_iter().filter_map(|c| c.name().cloned()).collect::<Vec<_>>())
        .filter(|n| comp.back.contains_key(n))
        .collect();
    report.complements = comp.back.into_iter().filter(|(n, _)| used_comps.contains(n)).collect();
    let mut shifted = Ontology::new();
    shifted.prefixes = o.prefixes.clone();
    for (a, _) in all {
        shifted.insert(a);
    }
    (shifted, report)
}

/// Concepts read by the rule body of an axiom.
fn body_concepts(a: &Axiom) -> Vec<Concept> {
    match a {
        Axiom::SubClass(body, _) => body.clone(),
        Axiom::SomeLhs(_, c, _) | Axiom::Exists(c, _, _) | Axiom::Nominal(c, _) | Axiom::Disj(c, _) => vec![c.clone()],
        Axiom::Max1(c, _, b) => vec![c.clone(), b.clone()],
        _ => Vec::new(),
    }
}

/// The comparison baseline: shift, then drop every T5 axiom.
pub fn drop_t5_baseline(o: &Ontology) -> Ontology {
    let (shifted, _) = shift_disjunctions(&restrict_to_alchoiq(o).0);
    shifted.filtered(|a| a.kind() != AxiomKind::T5)
}

/// Stack-based traversal over out-neighbors, roots in label order. Returns
/// the T5 axioms of the cut nodes. A graph that is already an oriented
/// forest yields no cuts.
pub fn break_cycles(g: &DependencyGraph, t5: &BTreeMap<Label, Axiom>) -> BTreeSet<Axiom> {
    let (forest, witness) = crate::profile::is_oriented_forest(g);
    if forest {
        return BTreeSet::new();
    }
    let mut discovered: BTreeSet<&Label> = BTreeSet::new();
    let mut cut: BTreeSet<&Label> = BTreeSet::new();
    for v in &g.nodes {
        if discovered.contains(v) {
            continue;
        }
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if !discovered.insert(u) {
                continue;
            }
            let out: Vec<&Label> = g.out_neighbors(u).collect();
            if out.iter().any(|w| discovered.contains(w)) {
                cut.insert(u);
            } else {
                stack.extend(out);
            }
        }
    }
    let mut removed: BTreeSet<Axiom> = cut.iter().filter_map(|l| t5.get(*l).cloned()).collect();
    if removed.is_empty() {
        if let Some(first) = witness.as_ref().and_then(|w| w.first()) {
            removed.extend(t5.get(first).cloned());
        }
    }
    removed
}

/// Kind 1: drop the implicated T4 axioms. Kind 2: drop the smallest R2
/// axiom on the shorter non-empty subrole chain, or the T5 axiom of the
/// `u` constant when both chains are empty.
pub fn repair_equality_safety(o: &Ontology, violations: &[EqualityViolation], t5: &BTreeMap<Label, Axiom>) -> BTreeSet<Axiom> {
    let h = o.hierarchy();
    let mut removed = BTreeSet::new();
    for v in violations {
        match v.kind {
            1 => removed.extend(v.implicated.iter().cloned()),
            _ => {
                let (r, s) = &v.roles;
                let t = v.via.clone().expect("kind 2 names T");
                let c1 = h.chain(r, &t).unwrap_or_default();
                let c2 = h.chain(s, &t.inv()).unwrap_or_default();
                let mut chains: Vec<Vec<Axiom>> = [c1, c2].into_iter().filter(|c| !c.is_empty()).collect();
                chains.sort_by_key(|c| (c.len(), c.iter().min().cloned()));
                match chains.first().and_then(|c| c.iter().min()) {
                    Some(ax) => {
                        removed.insert(ax.clone());
                    }
                    None => removed.extend(t5.get(&v.node).cloned()),
                }
            }
        }
    }
    removed
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ApproximationProvenance {
    pub dropped_out_of_language: Vec<Axiom>,
    pub shift: ShiftReport,
    pub removed_t5: Vec<Axiom>,
    pub removed_t4: Vec<Axiom>,
    pub removed_r2: Vec<Axiom>,
    pub iterations: usize,
}

impl ApproximationProvenance {
    /// True when the output equals the input.
    pub fn is_identity(&self) -> bool {
        self.dropped_out_of_language.is_empty()
            && self.shift.shifted.is_empty()
            && self.removed_t5.is_empty()
            && self.removed_t4.is_empty()
            && self.removed_r2.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let strs = |v: &[Axiom]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        json!({
            "schema": 1,
            "dropped_out_of_language": strs(&self.dropped_out_of_language),
            "shifted": self.shift.shifted.iter().map(|(k, v)| json!({"axiom": k.to_string(), "replaced_by": strs(v)})).collect::<Vec<_>>(),
            "complement_rules": strs(&self.shift.complement_rules),
            "complements": self.shift.complements.iter().map(|(k, v)| (k.to_string(), json!(v.to_string()))).collect::<serde_json::Map<_, _>>(),
            "removed_t5": strs(&self.removed_t5),
            "removed_t4": strs(&self.removed_t4),
            "removed_r2": strs(&self.removed_r2),
            "iterations": self.iterations,
        })
    }
}

pub fn approximate_to_rsa(o: &Ontology) -> Result<(Ontology, ApproximationProvenance), Error> {
    let mut prov = ApproximationProvenance::default();
    let (restricted, dropped) = restrict_to_alchoiq(o);
    prov.dropped_out_of_language = dropped;
    let (mut cur, shift) = shift_disjunctions(&restricted);
    prov.shift = shift;
    loop {
        prov.iterations += 1;
        let an = analyze(&cur)?;
        let report = report_from(&cur, &an);
        if report.is_rsa {
            return Ok((cur, prov));
        }
        let mut removed = BTreeSet::new();
        if report.forest_violation.is_some() {
            removed.extend(break_cycles(&an.graph, &an.t5));
        }
        if !report.equality_violations.is_empty() {
            removed.extend(repair_equality_safety(&cur, &report.equality_violations, &an.t5));
        }
        if removed.is_empty() {
            return Err(Error::Approximation("no axiom left to remove".into()));
        }
        for ax in removed {
            cur.remove(&ax);
            match ax.kind() {
                AxiomKind::T5 => prov.removed_t5.push(ax),
                AxiomKind::T4 => prov.removed_t4.push(ax),
                AxiomKind::R2 => prov.removed_r2.push(ax),
                _ => unreachable!("only T4, T5 and R2 axioms are removed"),
            }
        }
    }
}

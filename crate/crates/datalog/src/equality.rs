//! Explicit top and equality axiomatization, plus the reserved predicate
//! names shared by the program builders.

use crate::rule::Rule;
use crate::term::{atom, Sym, Term};

pub mod vocab {
    pub const TOP: &str = "http://www.w3.org/2002/07/owl#Thing";
    pub const BOTTOM: &str = "http://www.w3.org/2002/07/owl#Nothing";
    pub const CONGRUENT: &str = "urn:rsacomb:congruent";
    pub const NAMED: &str = "urn:rsacomb:named";
    pub const NI: &str = "urn:rsacomb:NI";
    pub const IN: &str = "urn:rsacomb:in";
    pub const PE: &str = "urn:rsacomb:PE";
    pub const E: &str = "urn:rsacomb:E";
    pub const U: &str = "urn:rsacomb:U";
}

fn v(name: &str) -> Term {
    Term::var(name)
}

/// Rules making `Top` cover every term and `congruent` a congruence over
/// the given unary and binary predicates.
///
/// The third substitution shape replaces the object of a role atom:
/// `R(x, z) :- R(x, y), congruent(y, z)`.
pub fn axiomatize_top_equality(concepts: &[Sym], roles: &[Sym]) -> Vec<Rule> {
    let top = vocab::TOP;
    let cong = vocab::CONGRUENT;
    let mut rules = Vec::with_capacity(concepts.len() * 2 + roles.len() * 3 + 3);
    for c in concepts {
        rules.push(Rule::new(vec![atom(top, [v("X")])], vec![atom(c, [v("X")])]));
    }
    for r in roles {
        rules.push(Rule::new(
            vec![atom(top, [v("X")]), atom(top, [v("Y")])],
            vec![atom(r, [v("X"), v("Y")])],
        ));
    }
    rules.push(Rule::new(vec![atom(cong, [v("X"), v("X")])], vec![atom(top, [v("X")])]));
    rules.push(Rule::new(vec![atom(cong, [v("Y"), v("X")])], vec![atom(cong, [v("X"), v("Y")])]));
    rules.push(Rule::new(
        vec![atom(cong, [v("X"), v("Z")])],
        vec![atom(cong, [v("X"), v("Y")]), atom(cong, [v("Y"), v("Z")])],
    ));
    for c in concepts {
        rules.push(Rule::new(
            vec![atom(c, [v("Y")])],
            vec![atom(c, [v("X")]), atom(cong, [v("X"), v("Y")])],
        ));
    }
    for r in roles {
        rules.push(Rule::new(
            vec![atom(r, [v("Z"), v("Y")])],
            vec![atom(r, [v("X"), v("Y")]), atom(cong, [v("X"), v("Z")])],
        ));
        rules.push(Rule::new(
            vec![atom(r, [v("X"), v("Z")])],
            vec![atom(r, [v("X"), v("Y")]), atom(cong, [v("Y"), v("Z")])],
        ));
    }
    rules
}

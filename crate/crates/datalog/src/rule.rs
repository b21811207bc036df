use std::fmt;

use crate::error::EngineError;
use crate::term::{Atom, Sym, Term};

/// Builtin calls that may appear in a rule body.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    /// `SKOLEM(args.., key)`. Packs when every argument is bound, unpacks
    /// when the key is bound; either way the remaining side is unified.
    Skolem { args: Vec<Term>, key: Term },
    /// `var := value`
    Bind { var: Sym, value: Term },
}

impl Builtin {
    pub fn pack(args: Vec<Term>, key: Term) -> Self {
        Builtin::Skolem { args, key }
    }

    pub fn unpack(key: Term, args: Vec<Term>) -> Self {
        Builtin::Skolem { args, key }
    }

    pub fn bind(var: impl Into<Sym>, value: Term) -> Self {
        Builtin::Bind {
            var: var.into(),
            value,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Skolem { args, key } => {
                f.write_str("SKOLEM(")?;
                for a in args {
                    write!(f, "{a}, ")?;
                }
                write!(f, "{key})")
            }
            Builtin::Bind { var, value } => write!(f, "BIND(?{var}, {value})"),
        }
    }
}

/// `head :- body, NOT negated, builtins`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Vec<Atom>,
    pub body: Vec<Atom>,
    pub negated: Vec<Atom>,
    pub builtins: Vec<Builtin>,
}

impl Rule {
    pub fn new(head: Vec<Atom>, body: Vec<Atom>) -> Self {
        Rule {
            head,
            body,
            negated: Vec::new(),
            builtins: Vec::new(),
        }
    }

    pub fn fact(atom: Atom) -> Self {
        Rule::new(vec![atom], Vec::new())
    }

    pub fn with_negated(mut self, atom: Atom) -> Self {
        self.negated.push(atom);
        self
    }

    pub fn with_builtin(mut self, b: Builtin) -> Self {
        self.builtins.push(b);
        self
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
            && self.negated.is_empty()
            && self.builtins.is_empty()
            && self.head.iter().all(Atom::is_ground)
    }

    pub fn is_definite(&self) -> bool {
        self.negated.is_empty()
    }

    /// Checks range restriction and negation safety. Variables are bound by
    /// positive body atoms and by builtins whose inputs are bound.
    pub fn check_safety(&self) -> Result<(), EngineError> {
        let unsafe_rule = |reason: String| EngineError::UnsafeRule {
            rule: self.to_string(),
            reason,
        };
        if self.head.is_empty() {
            return Err(unsafe_rule("empty head".into()));
        }
        for a in &self.body {
            if a.args.iter().any(|t| matches!(t, Term::Fn(..) | Term::Packed(..)) && !t.is_ground()) {
                return Err(unsafe_rule(format!("non-ground compound term in body atom {a}")));
            }
        }
        let mut bound: Vec<&Sym> = Vec::new();
        for a in &self.body {
            for t in &a.args {
                t.collect_vars(&mut bound);
            }
        }
        let mut pending: Vec<&Builtin> = self.builtins.iter().collect();
        loop {
            let before = pending.len();
            pending.retain(|b| {
                let ready = match b {
                    Builtin::Skolem { args, key } => {
                        all_bound(key, &bound) || args.iter().all(|t| all_bound(t, &bound))
                    }
                    Builtin::Bind { value, .. } => all_bound(value, &bound),
                };
                if ready {
                    match b {
                        Builtin::Skolem { args, key } => {
                            key.collect_vars(&mut bound);
                            for t in args {
                                t.collect_vars(&mut bound);
                            }
                        }
                        Builtin::Bind { var, .. } => {
                            if !bound.contains(&var) {
                                bound.push(var)
                            }
                        }
                    }
                }
                !ready
            });
            if pending.len() == before {
                break;
            }
        }
        if let Some(b) = pending.first() {
            return Err(unsafe_rule(format!("builtin {b} never has its inputs bound")));
        }
        for a in self.head.iter().chain(&self.negated) {
            for v in a.vars() {
                if !bound.contains(&v) {
                    return Err(unsafe_rule(format!("variable ?{v} in {a} is not bound by the body")));
                }
            }
        }
        Ok(())
    }
}

fn all_bound(t: &Term, bound: &[&Sym]) -> bool {
    let mut vs = Vec::new();
    t.collect_vars(&mut vs);
    vs.iter().all(|v| bound.contains(v))
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h}")?;
        }
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if first {
                first = false;
                f.write_str(" :- ")
            } else {
                f.write_str(", ")
            }
        };
        for a in &self.body {
            sep(f)?;
            write!(f, "{a}")?;
        }
        for a in &self.negated {
            sep(f)?;
            write!(f, "NOT {a}")?;
        }
        for b in &self.builtins {
            sep(f)?;
            write!(f, "{b}")?;
        }
        f.write_str(" .")
    }
}

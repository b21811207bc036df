//! Terms and atoms as they appear in rules and facts.

use std::fmt;
use std::sync::Arc;

/// Interned-by-value symbol used for constants, predicates and variable names.
pub type Sym = Arc<str>;

/// The `(A, R, B)` label shared by function symbols, `u` constants and `v` constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub a: Sym,
    pub r: Sym,
    pub b: Sym,
}

impl Label {
    pub fn new(a: impl Into<Sym>, r: impl Into<Sym>, b: impl Into<Sym>) -> Self {
        Label {
            a: a.into(),
            r: r.into(),
            b: b.into(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        fmt_name(f, &self.a)?;
        f.write_str(",")?;
        fmt_name(f, &self.r)?;
        f.write_str(",")?;
        fmt_name(f, &self.b)?;
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// A named constant (an IRI once it reaches the engine).
    Const(Sym),
    Var(Sym),
    /// Small integer constants, disjoint from IRIs.
    Index(u32),
    /// `u^A_{R,B}`
    Unode(Label),
    /// `v^{A,i}_{R,B}`, `i` in `0..=2`.
    Vnode(Label, u8),
    /// Function application `f^A_{R,B}(args)`.
    Fn(Label, Vec<Term>),
    /// Opaque key for a tuple of terms. Width is part of the key.
    Packed(Vec<Term>),
}

impl Term {
    pub fn constant(s: impl Into<Sym>) -> Self {
        Term::Const(s.into())
    }

    pub fn var(s: impl Into<Sym>) -> Self {
        Term::Var(s.into())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Fn(_, args) | Term::Packed(args) => args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    /// Function-symbol nesting depth; packed keys do not count.
    pub fn depth(&self) -> usize {
        match self {
            Term::Fn(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Packed(args) => args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Sym>) {
        match self {
            Term::Var(v) => {
                if !out.contains(&v) {
                    out.push(v)
                }
            }
            Term::Fn(_, args) | Term::Packed(args) => {
                for a in args {
                    a.collect_vars(out)
                }
            }
            _ => {}
        }
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(s) => Some(s),
            _ => None,
        }
    }
}

fn is_bare(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "NOT"
        && s != "SKOLEM"
        && s != "BIND"
        && s != "pack"
}

pub(crate) fn fmt_name(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_bare(s) {
        f.write_str(s)
    } else {
        write!(f, "<{s}>")
    }
}

fn fmt_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(s) => fmt_name(f, s),
            Term::Var(v) => write!(f, "?{v}"),
            Term::Index(i) => write!(f, "#{i}"),
            Term::Unode(l) => write!(f, "u{l}"),
            Term::Vnode(l, i) => write!(f, "v{i}{l}"),
            Term::Fn(l, args) => {
                write!(f, "f{l}")?;
                fmt_args(f, args)
            }
            Term::Packed(args) => {
                f.write_str("pack")?;
                fmt_args(f, args)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<Sym>, args: Vec<Term>) -> Self {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<&Sym> {
        let mut out = Vec::new();
        for a in &self.args {
            a.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_name(f, &self.pred)?;
        fmt_args(f, &self.args)
    }
}

/// Convenience constructor: `atom("p", [Term::var("x")])`.
pub fn atom<I: IntoIterator<Item = Term>>(pred: &str, args: I) -> Atom {
    Atom::new(pred, args.into_iter().collect())
}

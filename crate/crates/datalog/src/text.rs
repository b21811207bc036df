//! Debug text format for rules and facts.
//!
//! ```text
//! path(?x, ?z) :- edge(?x, ?y), path(?y, ?z) .
//! r(?x) ← p(?x), NOT q(?x) .
//! Key(?k) :- Q(?x, ?y), SKOLEM(?x, ?y, ?k) .
//! edge(a, <http://example.org/b>) .
//! ```
//!
//! Terms: `?x` variables, bare or `<..>` constants, `#3` index constants,
//! `u{A,R,B}`, `v0{A,R,B}`, `f{A,R,B}(t)` and `pack(t, ..)`. `%` starts a
//! line comment. Printing with `Display` and parsing round-trip.

use crate::error::EngineError;
use crate::rule::{Builtin, Rule};
use crate::term::{Atom, Label, Sym, Term};

pub fn parse_program(src: &str) -> Result<Vec<Rule>, EngineError> {
    let mut p = Parser { src, pos: 0 };
    let mut rules = Vec::new();
    loop {
        p.skip_ws();
        if p.at_end() {
            return Ok(rules);
        }
        rules.push(p.rule()?);
    }
}

pub fn parse_rule(src: &str) -> Result<Rule, EngineError> {
    let mut rules = parse_program(src)?;
    if rules.len() != 1 {
        let p = Parser { src, pos: src.len() };
        return Err(p.error(&format!("expected exactly one rule, found {}", rules.len())));
    }
    Ok(rules.remove(0))
}

pub fn parse_atom(src: &str) -> Result<Atom, EngineError> {
    let mut p = Parser { src, pos: 0 };
    let a = p.atom()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("trailing input after atom"));
    }
    Ok(a)
}

pub fn format_program(rules: &[Rule]) -> String {
    let mut out = String::new();
    for r in rules {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> EngineError {
        let before = &self.src[..self.pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        EngineError::Syntax {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        loop {
            let r = self.rest();
            let trimmed = r.trim_start();
            self.pos += r.len() - trimmed.len();
            if trimmed.starts_with('%') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), EngineError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{tok}`")))
        }
    }

    /// Looks at the identifier at the cursor without consuming it.
    fn peek_ident(&mut self) -> &'a str {
        self.skip_ws();
        let r = self.rest();
        let end = r
            .char_indices()
            .find(|(i, c)| !(c.is_ascii_alphanumeric() || *c == '_') || (*i == 0 && c.is_ascii_digit()))
            .map_or(r.len(), |(i, _)| i);
        &r[..end]
    }

    fn name(&mut self) -> Result<Sym, EngineError> {
        self.skip_ws();
        if self.eat("<") {
            let r = self.rest();
            let end = r.find('>').ok_or_else(|| self.error("unterminated `<`"))?;
            let s: Sym = r[..end].into();
            self.pos += end + 1;
            return Ok(s);
        }
        let id = self.peek_ident();
        if id.is_empty() {
            return Err(self.error("expected a name"));
        }
        let s: Sym = id.into();
        self.pos += id.len();
        Ok(s)
    }

    fn label(&mut self) -> Result<Label, EngineError> {
        self.expect("{")?;
        let a = self.name()?;
        self.expect(",")?;
        let r = self.name()?;
        self.expect(",")?;
        let b = self.name()?;
        self.expect("}")?;
        Ok(Label { a, r, b })
    }

    fn args(&mut self) -> Result<Vec<Term>, EngineError> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn term(&mut self) -> Result<Term, EngineError> {
        self.skip_ws();
        if self.eat("?") {
            let id = self.peek_ident().to_string();
            if id.is_empty() {
                return Err(self.error("expected a variable name"));
            }
            self.pos += id.len();
            return Ok(Term::var(id));
        }
        if self.eat("#") {
            let r = self.rest();
            let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
            let n = r[..end].parse().map_err(|_| self.error("expected an index"))?;
            self.pos += end;
            return Ok(Term::Index(n));
        }
        let id = self.peek_ident().to_string();
        let after = &self.rest()[id.len()..];
        match id.as_str() {
            "u" if after.starts_with('{') => {
                self.pos += 1;
                return Ok(Term::Unode(self.label()?));
            }
            "f" if after.starts_with('{') => {
                self.pos += 1;
                let l = self.label()?;
                return Ok(Term::Fn(l, self.args()?));
            }
            "pack" if after.trim_start().starts_with('(') => {
                self.pos += 4;
                return Ok(Term::Packed(self.args()?));
            }
            _ => {}
        }
        if id.len() == 2 && id.starts_with('v') && after.starts_with('{') {
            if let Some(i) = id[1..].parse::<u8>().ok().filter(|i| *i <= 2) {
                self.pos += 2;
                return Ok(Term::Vnode(self.label()?, i));
            }
        }
        Ok(Term::Const(self.name()?))
    }

    fn atom(&mut self) -> Result<Atom, EngineError> {
        let pred = self.name()?;
        Ok(Atom {
            pred,
            args: self.args()?,
        })
    }

    fn rule(&mut self) -> Result<Rule, EngineError> {
        let mut head = vec![self.atom()?];
        while self.eat(",") {
            head.push(self.atom()?);
        }
        let mut rule = Rule::new(head, Vec::new());
        if self.eat(":-") || self.eat("←") {
            loop {
                match self.peek_ident() {
                    "NOT" => {
                        self.pos += 3;
                        rule.negated.push(self.atom()?);
                    }
                    "SKOLEM" => {
                        self.pos += 6;
                        let mut args = self.args()?;
                        let key = args.pop().ok_or_else(|| self.error("SKOLEM needs a key argument"))?;
                        rule.builtins.push(Builtin::Skolem { args, key });
                    }
                    "BIND" => {
                        self.pos += 4;
                        let mut args = self.args()?;
                        match (args.len(), args.first()) {
                            (2, Some(Term::Var(v))) => {
                                let var = v.clone();
                                let value = args.pop().expect("two arguments");
                                rule.builtins.push(Builtin::Bind { var, value });
                            }
                            _ => return Err(self.error("BIND expects a variable and a term")),
                        }
                    }
                    _ => rule.body.push(self.atom()?),
                }
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(".")?;
        Ok(rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let src = "\
path(?x, ?z) :- edge(?x, ?y), path(?y, ?z) .
r(?x) :- p(?x), NOT q(?x) .
Key(?k) :- Q(?x, ?y), SKOLEM(?x, ?y, ?k) .
B(f{A,<http://x/R>,B}(?x)), R(?x, v1{A,R,B}) :- A(?x), BIND(?y, u{A,R,B}) .
e(#0, pack(a, b), <urn:x y>) .
";
        let rules = parse_program(src).unwrap();
        assert_eq!(rules.len(), 5);
        let printed = format_program(&rules);
        assert_eq!(parse_program(&printed).unwrap(), rules);
        assert_eq!(printed.lines().next().unwrap(), "path(?x, ?z) :- edge(?x, ?y), path(?y, ?z) .");
    }

    #[test]
    fn arrow_and_comments() {
        let rules = parse_program("% comment\nr(?x) ← p(?x) . % trailing\n").unwrap();
        assert_eq!(rules[0].body.len(), 1);
    }

    #[test]
    fn reports_position() {
        let err = parse_program("p(a) .\nq(?x :- r(?x) .").unwrap_err();
        match err {
            EngineError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }
}

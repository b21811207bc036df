//! Text formats: the line-oriented `.nha` ontology syntax, the `.cq` query
//! syntax, answer tables and DOT export of dependency graphs.
//!
//! ```text
//! @prefix : <http://example.org/> .
//! sub-role :r :s- .
//! sub-class :A & :B -> :C .
//! sub-class :A -> :B | :C .
//! nominal :A -> :o .
//! some :r- TOP -> :B .
//! max1 TOP :r :B .
//! exists :A -> :r :B .
//! fact :A(:a) .
//! fact :r(:a, :b) .
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use rsa_datalog::Sym;
use serde_json::json;

use crate::filter::AnswerSet;
use crate::model::{Axiom, Concept, ConjunctiveQuery, Ontology, QAtom, QTerm, Role};
use crate::profile::DependencyGraph;

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub file: Option<PathBuf>,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn with_file(mut self, file: impl Into<PathBuf>) -> Self {
        self.span.file = Some(file.into());
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.span.file {
            write!(f, "{}:", file.display())?;
        }
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    /// Bare word: keyword, `TOP`, `a`, `@prefix`, ...
    Word(String),
    /// `prefix:local`, with an optional trailing `-` for inverse roles.
    Curie { prefix: String, local: String, inverse: bool },
    Iri(String),
    Var(String),
    Punct(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Curie { prefix, local, inverse } => {
                write!(f, "`{prefix}:{local}{}`", if *inverse { "-" } else { "" })
            }
            Tok::Iri(i) => write!(f, "`<{i}>`"),
            Tok::Var(v) => write!(f, "`?{v}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const PUNCT: [&str; 10] = ["->", "&", "|", "(", ")", ",", ".", "{", "}", "-"];

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn error(line: usize, column: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError {
        span: SourceSpan {
            file: None,
            line,
            column,
        },
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

/// Splits text into tokens. `#` starts a comment outside `<..>`.
fn lex(text: &str, errors: &mut Vec<ParseError>) -> Vec<Spanned> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut i = 0;
        let col = |i: usize| i + 1;
        while i < chars.len() {
            let (_, c) = chars[i];
            let start = i;
            let push = |out: &mut Vec<Spanned>, tok| {
                out.push(Spanned {
                    tok,
                    line: ln + 1,
                    column: col(start),
                })
            };
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' {
                break;
            } else if c == '<' {
                let rest: String = chars[i + 1..].iter().map(|(_, c)| *c).collect();
                match rest.find('>') {
                    Some(end) if !rest[..end].contains(char::is_whitespace) => {
                        push(&mut out, Tok::Iri(rest[..end].to_string()));
                        i += rest[..end].chars().count() + 2;
                    }
                    _ => {
                        errors.push(error(ln + 1, col(start), "unterminated IRI", &["`>`"]));
                        break;
                    }
                }
            } else if c == '?' {
                let mut j = i + 1;
                while j < chars.len() && is_word(chars[j].1) {
                    j += 1;
                }
                if j == i + 1 {
                    errors.push(error(ln + 1, col(start), "empty variable name", &["variable name"]));
                    i += 1;
                    continue;
                }
                push(&mut out, Tok::Var(chars[i + 1..j].iter().map(|(_, c)| *c).collect()));
                i = j;
            } else if is_word(c) || c == ':' || c == '@' {
                let mut j = i;
                let mut colon = None;
                while j < chars.len() {
                    let ch = chars[j].1;
                    if ch == ':' && colon.is_none() {
                        colon = Some(j);
                    } else if !(is_word(ch) || (ch == '-' || ch == '@') && colon.is_none() && chars.get(j + 1).map(|n| n.1) != Some('>')) {
                        break;
                    }
                    j += 1;
                }
                let text: String = chars[i..j].iter().map(|(_, c)| *c).collect();
                match colon {
                    None => push(&mut out, Tok::Word(text)),
                    Some(k) => {
                        let prefix: String = chars[i..k].iter().map(|(_, c)| *c).collect();
                        let local: String = chars[k + 1..j].iter().map(|(_, c)| *c).collect();
                        let inverse = j < chars.len() && chars[j].1 == '-' && chars.get(j + 1).map(|n| n.1) != Some('>');
                        if inverse {
                            j += 1;
                        }
                        push(&mut out, Tok::Curie { prefix, local, inverse });
                    }
                }
                i = j;
            } else if let Some(p) = PUNCT.iter().find(|p| line[chars[i].0..].starts_with(**p)) {
                push(&mut out, Tok::Punct(p));
                i += p.chars().count();
            } else {
                errors.push(error(ln + 1, col(start), format!("unexpected character `{c}`"), &[]));
                i += 1;
            }
        }
    }
    out
}

fn valid_prefix_name(p: &str) -> bool {
    p.is_empty() || (p.starts_with(|c: char| c.is_ascii_alphabetic()) && p.chars().all(is_word))
}

fn valid_local(l: &str) -> bool {
    !l.is_empty() && l.chars().all(is_word)
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    end_line: usize,
    prefixes: &'a BTreeMap<String, String>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(s) => (s.line, s.column),
            None => match self.toks.last() {
                Some(last) => (last.line, last.column + last.tok.to_string().len().saturating_sub(2)),
                None => (self.end_line, 1),
            },
        }
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let (line, column) = self.here();
        let found = match self.peek() {
            Some(s) => format!("unexpected {}", s.tok),
            None => "unexpected end of input".to_string(),
        };
        Err(error(line, column, found, expected))
    }

    fn punct(&mut self, p: &str) -> bool {
        match self.peek() {
            Some(Spanned { tok: Tok::Punct(q), .. }) if *q == p => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.punct(p) {
            Ok(())
        } else {
            self.fail(&[&format!("`{p}`")])
        }
    }

    fn word(&mut self, w: &str) -> bool {
        match self.peek() {
            Some(Spanned { tok: Tok::Word(x), .. }) if x.eq_ignore_ascii_case(w) => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn expand(&self, s: &Spanned, prefix: &str, local: &str) -> PResult<Sym> {
        if !valid_local(local) {
            return Err(error(s.line, s.column, format!("invalid local name `{local}`"), &["CURIE"]));
        }
        match self.prefixes.get(prefix) {
            Some(iri) => Ok(format!("{iri}{local}").into()),
            None => Err(error(s.line, s.column, format!("unknown prefix `{prefix}:`"), &[])),
        }
    }

    fn curie(&mut self, allow_inverse: bool, allow_iri: bool, what: &str) -> PResult<(Sym, bool)> {
        let Some(s) = self.peek() else {
            return self.fail(&[what]);
        };
        match &s.tok {
            Tok::Curie { prefix, local, inverse } if allow_inverse || !inverse => {
                let iri = self.expand(s, prefix, local)?;
                self.pos += 1;
                Ok((iri, *inverse))
            }
            Tok::Iri(i) if allow_iri => {
                self.pos += 1;
                Ok((i.as_str().into(), false))
            }
            _ => self.fail(&[what]),
        }
    }

    fn concept(&mut self) -> PResult<Concept> {
        if self.word("TOP") {
            return Ok(Concept::Top);
        }
        if self.word("BOTTOM") {
            return Ok(Concept::Bottom);
        }
        match self.curie(false, false, "concept") {
            Ok((iri, _)) => Ok(Concept::Named(iri)),
            Err(_) => self.fail(&["concept", "`TOP`", "`BOTTOM`"]),
        }
    }

    fn role(&mut self) -> PResult<Role> {
        let (name, inverse) = self.curie(true, false, "role")?;
        Ok(Role { name, inverse })
    }

    fn individual(&mut self) -> PResult<Sym> {
        Ok(self.curie(false, false, "individual")?.0)
    }
}

/// Parses a statement that begins at `toks[0]` and ends with `.`.
fn statement(c: &mut Cursor<'_>) -> PResult<Axiom> {
    let Some(Spanned { tok: Tok::Word(kw), .. }) = c.peek() else {
        return c.fail(&["statement keyword"]);
    };
    c.pos += 1;
    let ax = match kw.as_str() {
        "sub-role" => {
            let r = c.role()?;
            let s = c.role()?;
            Axiom::SubRole(r, s)
        }
        "sub-class" => {
            let mut lhs = vec![c.concept()?];
            while c.punct("&") {
                lhs.push(c.concept()?);
            }
            c.expect("->")?;
            let first = c.concept()?;
            if c.peek().is_some_and(|s| s.tok == Tok::Punct("|")) {
                if lhs.len() != 1 {
                    return c.fail(&["`.`"]);
                }
                let mut rhs = vec![first];
                while c.punct("|") {
                    rhs.push(c.concept()?);
                }
                Axiom::Disj(lhs.remove(0), rhs)
            } else {
                Axiom::SubClass(lhs, first)
            }
        }
        "nominal" => {
            let a = c.concept()?;
            c.expect("->")?;
            Axiom::Nominal(a, c.individual()?)
        }
        "some" => {
            let r = c.role()?;
            let a = c.concept()?;
            c.expect("->")?;
            Axiom::SomeLhs(r, a, c.concept()?)
        }
        "max1" => {
            let a = c.concept()?;
            let r = c.role()?;
            Axiom::Max1(a, r, c.concept()?)
        }
        "exists" => {
            let a = c.concept()?;
            c.expect("->")?;
            let r = c.role()?;
            Axiom::Exists(a, r, c.concept()?)
        }
        "fact" => {
            let start = c.pos;
            let fact_concept = c.concept();
            let (name, inverse, top) = match fact_concept {
                Ok(Concept::Named(n)) => (n, false, None),
                Ok(other) => (Sym::from(""), false, Some(other)),
                Err(_) => {
                    c.pos = start;
                    let r = c.role()?;
                    (r.name, r.inverse, None)
                }
            };
            c.expect("(")?;
            let a = c.individual()?;
            if c.punct(")") {
                if inverse {
                    return Err(error(c.toks[start].line, c.toks[start].column, "class assertion with an inverse role", &[]));
                }
                Axiom::ConceptFact(top.unwrap_or(Concept::Named(name)), a)
            } else if c.punct(",") {
                let b = c.individual()?;
                c.expect(")")?;
                if top.is_some() {
                    return Err(error(c.toks[start].line, c.toks[start].column, "role assertion over TOP/BOTTOM", &[]));
                }
                Axiom::RoleFact(Role { name, inverse }, a, b)
            } else {
                return c.fail(&["`)`", "`,`"]);
            }
        }
        _ => {
            c.pos -= 1;
            return c.fail(&["statement keyword"]);
        }
    };
    c.expect(".")?;
    Ok(ax)
}

/// Groups tokens into statements ending at a `.` token.
fn split_statements(toks: &[Spanned]) -> Vec<&[Spanned]> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        if t.tok == Tok::Punct(".") {
            out.push(&toks[start..=i]);
            start = i + 1;
        }
    }
    if start < toks.len() {
        out.push(&toks[start..]);
    }
    out
}

pub fn parse_ontology(text: &str) -> Result<Ontology, Vec<ParseError>> {
    let mut errors = Vec::new();
    let toks = lex(text, &mut errors);
    let end_line = text.lines().count().max(1);
    let mut prefixes: BTreeMap<String, String> = BTreeMap::new();
    let mut onto = Ontology::new();
    for stmt in split_statements(&toks) {
        if matches!(&stmt[0].tok, Tok::Word(w) if w == "@prefix") {
            match prefix_decl(stmt, end_line) {
                Ok((name, iri)) => {
                    if prefixes.contains_key(&name) {
                        errors.push(error(stmt[0].line, stmt[0].column, format!("duplicate prefix `{name}:`"), &[]));
                    } else {
                        prefixes.insert(name.clone(), iri.clone());
                        onto.prefixes.push((name, iri));
                    }
                }
                Err(e) => errors.push(e),
            }
            continue;
        }
        let mut c = Cursor {
            toks: stmt,
            pos: 0,
            end_line,
            prefixes: &prefixes,
        };
        match statement(&mut c) {
            Ok(ax) if c.pos == stmt.len() => {
                onto.insert(ax);
            }
            Ok(_) => errors.push(c.fail::<()>(&["end of statement"]).unwrap_err()),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(onto)
    } else {
        errors.sort();
        Err(errors)
    }
}

fn prefix_decl(stmt: &[Spanned], end_line: usize) -> PResult<(String, String)> {
    let empty = BTreeMap::new();
    let c = Cursor {
        toks: stmt,
        pos: 1,
        end_line,
        prefixes: &empty,
    };
    match (stmt.get(1).map(|s| &s.tok), stmt.get(2).map(|s| &s.tok), stmt.get(3).map(|s| &s.tok), stmt.len()) {
        (Some(Tok::Curie { prefix, local, inverse: false }), Some(Tok::Iri(iri)), Some(Tok::Punct(".")), 4)
            if local.is_empty() && valid_prefix_name(prefix) =>
        {
            Ok((prefix.clone(), iri.clone()))
        }
        (Some(Tok::Curie { .. }), Some(Tok::Iri(_)), ..) => Cursor { pos: 3, ..c }.fail(&["`.`"]),
        (Some(Tok::Curie { local, .. }), ..) if local.is_empty() => Cursor { pos: 2, ..c }.fail(&["IRI"]),
        _ => c.fail(&["prefix name"]),
    }
}

/// Prefix table used while writing; grows with generated `nsN:` prefixes.
struct Compactor {
    prefixes: Vec<(String, String)>,
}

impl Compactor {
    fn iri(&mut self, iri: &str) -> String {
        let best = self
            .prefixes
            .iter()
            .filter(|(_, p)| iri.starts_with(p.as_str()) && valid_local(&iri[p.len()..]))
            .max_by_key(|(_, p)| p.len());
        if let Some((name, p)) = best {
            return format!("{name}:{}", &iri[p.len()..]);
        }
        // an IRI without a word-character suffix gets an empty local part,
        // which the parser rejects (see `is_serializable`)
        let split = iri.len() - iri.chars().rev().take_while(|c| is_word(*c)).map(char::len_utf8).sum::<usize>();
        let (base, local) = iri.split_at(split);
        let name = match self.prefixes.iter().find(|(_, p)| p == base) {
            Some((n, _)) => n.clone(),
            None => {
                let n = (1..)
                    .map(|i| format!("ns{i}"))
                    .find(|n| self.prefixes.iter().all(|(m, _)| m != n))
                    .expect("unbounded");
                self.prefixes.push((n.clone(), base.to_string()));
                n
            }
        };
        format!("{name}:{local}")
    }

    fn concept(&mut self, c: &Concept) -> String {
        match c {
            Concept::Top => "TOP".to_string(),
            Concept::Bottom => "BOTTOM".to_string(),
            Concept::Named(n) => self.iri(n),
        }
    }

    fn concepts(&mut self, cs: &[Concept], sep: &str) -> String {
        cs.iter().map(|c| self.concept(c)).collect::<Vec<_>>().join(sep)
    }

    fn role(&mut self, r: &Role) -> String {
        format!("{}{}", self.iri(&r.name), if r.inverse { "-" } else { "" })
    }
}

/// Writes an ontology so that [`parse_ontology`] returns an equal one.
/// IRIs not covered by a declared prefix get a generated `nsN:` prefix.
pub fn serialize_ontology(o: &Ontology) -> String {
    let mut c = Compactor {
        prefixes: o.prefixes.clone(),
    };
    let mut lines = Vec::new();
    for ax in o.axioms() {
        lines.push(match ax {
            Axiom::SubRole(r, s) => format!("sub-role {} {} .", c.role(r), c.role(s)),
            Axiom::SubClass(lhs, b) => format!("sub-class {} -> {} .", c.concepts(lhs, " & "), c.concept(b)),
            Axiom::Disj(a, bs) => format!("sub-class {} -> {} .", c.concept(a), c.concepts(bs, " | ")),
            Axiom::Nominal(a, i) => format!("nominal {} -> {} .", c.concept(a), c.iri(i)),
            Axiom::SomeLhs(r, a, b) => format!("some {} {} -> {} .", c.role(r), c.concept(a), c.concept(b)),
            Axiom::Max1(a, r, b) => format!("max1 {} {} {} .", c.concept(a), c.role(r), c.concept(b)),
            Axiom::Exists(a, r, b) => format!("exists {} -> {} {} .", c.concept(a), c.role(r), c.concept(b)),
            Axiom::ConceptFact(a, i) => format!("fact {}({}) .", c.concept(a), c.iri(i)),
            Axiom::RoleFact(r, a, b) => format!("fact {}({}, {}) .", c.role(r), c.iri(a), c.iri(b)),
        });
    }
    let mut out = String::new();
    for (name, iri) in &c.prefixes {
        out.push_str(&format!("@prefix {name}: <{iri}> .\n"));
    }
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// Whether every IRI in the ontology can be written as a CURIE.
pub fn is_serializable(o: &Ontology) -> bool {
    let sig = o.signature();
    sig.concepts
        .iter()
        .chain(&sig.roles)
        .chain(&sig.individuals)
        .all(|i| i.chars().last().is_some_and(is_word))
}

/// Parses one query.
pub fn parse_query(text: &str) -> Result<ConjunctiveQuery, Vec<ParseError>> {
    let mut errors = Vec::new();
    let toks = lex(text, &mut errors);
    if !errors.is_empty() {
        return Err(errors);
    }
    let end_line = text.lines().count().max(1);
    let mut prefixes: BTreeMap<String, String> = BTreeMap::from([("rdf".to_string(), "http://www.w3.org/1999/02/22-rdf-syntax-ns#".to_string())]);
    let mut declared = std::collections::BTreeSet::new();
    let mut pos = 0;
    while let Some(Spanned { tok: Tok::Word(w), line, column }) = toks.get(pos) {
        if !w.eq_ignore_ascii_case("PREFIX") {
            break;
        }
        match (toks.get(pos + 1).map(|s| &s.tok), toks.get(pos + 2).map(|s| &s.tok)) {
            (Some(Tok::Curie { prefix, local, inverse: false }), Some(Tok::Iri(iri))) if local.is_empty() && valid_prefix_name(prefix) => {
                if !declared.insert(prefix.clone()) {
                    return Err(vec![error(*line, *column, format!("duplicate prefix `{prefix}:`"), &[])]);
                }
                prefixes.insert(prefix.clone(), iri.clone());
                pos += 3;
            }
            _ => {
                let c = Cursor {
                    toks: &toks,
                    pos: pos + 1,
                    end_line,
                    prefixes: &prefixes,
                };
                return Err(vec![c.fail::<()>(&["prefix declaration"]).unwrap_err()]);
            }
        }
    }
    let mut c = Cursor {
        toks: &toks,
        pos,
        end_line,
        prefixes: &prefixes,
    };
    query_body(&mut c).map_err(|e| vec![e])
}

fn query_body(c: &mut Cursor<'_>) -> PResult<ConjunctiveQuery> {
    let mut answer_vars: Vec<Sym> = Vec::new();
    if c.word("SELECT") {
        while let Some(Spanned { tok: Tok::Var(v), .. }) = c.peek() {
            answer_vars.push(v.as_str().into());
            c.pos += 1;
        }
    } else if !c.word("ASK") {
        return c.fail(&["`SELECT`", "`ASK`"]);
    }
    if !c.word("WHERE") {
        return c.fail(&["`WHERE`"]);
    }
    c.expect("{")?;
    let mut atoms = Vec::new();
    loop {
        if c.punct("}") {
            break;
        }
        let s = query_term(c)?;
        let here = c.peek().cloned();
        let is_type = c.word("a")
            || matches!(
                &here,
                Some(Spanned { tok: Tok::Curie { prefix, local, inverse: false }, .. })
                    if c.prefixes.get(prefix).map(|p| format!("{p}{local}")).as_deref() == Some(RDF_TYPE)
            ) && {
                c.pos += 1;
                true
            };
        if is_type {
            let (iri, _) = c.curie(false, true, "class")?;
            atoms.push(QAtom::Concept(Concept::Named(iri), s));
        } else {
            if let Some(Spanned { tok: Tok::Var(_), .. }) = &here {
                return c.fail(&["predicate"]).map_err(|mut e| {
                    e.message = "variable in predicate position".into();
                    e
                });
            }
            let (pred, _) = c.curie(false, true, "predicate")?;
            let o = query_term(c)?;
            atoms.push(QAtom::Role(pred, s, o));
        }
        if c.punct("}") {
            break;
        }
        c.expect(".")?;
    }
    if c.peek().is_some() {
        return c.fail(&["end of query"]);
    }
    ConjunctiveQuery::new(answer_vars, atoms).map_err(|e| {
        let (line, column) = c.here();
        error(line, column, e.to_string(), &[])
    })
}

fn query_term(c: &mut Cursor<'_>) -> PResult<QTerm> {
    if let Some(Spanned { tok: Tok::Var(v), .. }) = c.peek() {
        c.pos += 1;
        return Ok(QTerm::Var(v.as_str().into()));
    }
    match c.curie(false, true, "term") {
        Ok((iri, _)) => Ok(QTerm::Const(iri)),
        Err(_) => c.fail(&["variable", "CURIE", "IRI"]),
    }
}

/// Splits a `.cq` file into queries at lines consisting of `---`.
pub fn parse_queries(text: &str) -> Result<Vec<ConjunctiveQuery>, Vec<ParseError>> {
    let mut out = Vec::new();
    let mut chunk = String::new();
    let mut offset = 0;
    let mut start = 0;
    let mut flush = |chunk: &str, start: usize| -> Result<(), Vec<ParseError>> {
        if chunk.trim().is_empty() {
            return Ok(());
        }
        let q = parse_query(chunk).map_err(|es| {
            es.into_iter()
                .map(|mut e| {
                    e.span.line += start;
                    e
                })
                .collect::<Vec<_>>()
        })?;
        out.push(q);
        Ok(())
    };
    for line in text.lines() {
        offset += 1;
        if line.trim() == "---" {
            flush(&chunk, start)?;
            chunk.clear();
            start = offset;
        } else {
            chunk.push_str(line);
            chunk.push('\n');
        }
    }
    flush(&chunk, start)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AnswerFormat {
    #[default]
    Tsv,
    Json,
}

/// Renders answers; rows come out sorted whatever order they are stored in.
pub fn emit_answers(a: &AnswerSet, format: AnswerFormat) -> String {
    let mut rows = a.rows.clone();
    rows.sort();
    rows.dedup();
    match format {
        AnswerFormat::Tsv => {
            let mut out = a.vars.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\t");
            out.push('\n');
            for r in &rows {
                out.push_str(&r.iter().map(|i| format!("<{i}>")).collect::<Vec<_>>().join("\t"));
                out.push('\n');
            }
            out
        }
        AnswerFormat::Json => {
            let v = json!({
                "schema": 1,
                "vars": a.vars.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "rows": rows.iter().map(|r| r.iter().map(|i| i.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "exact": a.exact,
                "count": rows.len(),
            });
            let mut s = serde_json::to_string_pretty(&v).expect("json");
            s.push('\n');
            s
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn emit_graph_dot(g: &DependencyGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for n in &g.nodes {
        out.push_str(&format!("  \"{}\";\n", dot_escape(&format!("u{n}"))));
    }
    for (s, t) in &g.edges {
        out.push_str(&format!("  \"{}\" -> \"{}\";\n", dot_escape(&format!("u{s}")), dot_escape(&format!("u{t}"))));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: &str = "@prefix : <http://ex.org/> .\n";

    fn parse(body: &str) -> Ontology {
        parse_ontology(&format!("{P}{body}")).unwrap()
    }

    #[test]
    fn grammar_rows() {
        let o = parse("exists :A -> :r :B .");
        assert_eq!(
            o.axioms().next().unwrap(),
            &Axiom::Exists(Concept::named("http://ex.org/A"), Role::named("http://ex.org/r"), Concept::named("http://ex.org/B"))
        );
        let o = parse("sub-class :A -> :B | :C .");
        assert!(matches!(o.axioms().next().unwrap(), Axiom::Disj(_, bs) if bs.len() == 2));
        let o = parse("sub-role :r- :s .\nfact :r-(:a, :b) .\nfact TOP(:a) .\nsome :r- TOP -> :B .");
        assert_eq!(o.len(), 4);
        assert!(o.contains(&Axiom::SubRole(Role::inverse_of("http://ex.org/r"), Role::named("http://ex.org/s"))));
    }

    #[test]
    fn missing_paren() {
        let errs = parse_ontology(&format!("{P}fact :r(:a :b .")).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].span.line, 2);
        assert_eq!(errs[0].span.column, 12);
        assert!(errs[0].expected.contains(&"`)`".to_string()));
    }

    #[test]
    fn errors_are_reported_per_statement() {
        let errs = parse_ontology(&format!("{P}exists :A -> .\nfoo :A .\nfact :x:A(:a) .\nsub-class :A -> :B .")).unwrap_err();
        assert_eq!(errs.len(), 3);
        let errs = parse_ontology("@prefix : <http://a/> .\n@prefix : <http://b/> .").unwrap_err();
        assert!(errs[0].message.contains("duplicate"));
        let errs = parse_ontology("fact :A(:a) .").unwrap_err();
        assert!(errs[0].message.contains("unknown prefix"));
    }

    #[test]
    fn comments_and_iris_with_hash() {
        let o = parse_ontology("@prefix o: <http://ex.org/o#> . # c\n# whole line\nfact o:A(o:a) . # trailing").unwrap();
        assert!(o.contains(&Axiom::ConceptFact(Concept::named("http://ex.org/o#A"), "http://ex.org/o#a".into())));
    }

    #[test]
    fn serializer_round_trips() {
        let o = parse("sub-class :A & TOP -> BOTTOM .\nmax1 TOP :r- :B .\nnominal :A -> :o .\nfact :r(:a, :b) .");
        assert_eq!(parse_ontology(&serialize_ontology(&o)).unwrap(), o);
        let bare: Ontology = [Axiom::ConceptFact(Concept::named("urn:x:A"), "http://e/#a".into())].into_iter().collect();
        let text = serialize_ontology(&bare);
        assert_eq!(parse_ontology(&text).unwrap(), bare);
    }

    #[test]
    fn queries() {
        let q = parse_query(
            "PREFIX ub: <http://lehigh/univ#>\nSELECT ?X\nWHERE {\n    ?Y ub:member ?X .\n    ?Y rdf:type ub:ResearchGroup .\n}",
        )
        .unwrap();
        assert_eq!(q.answer_vars, vec![Sym::from("X")]);
        assert_eq!(q.bound_vars, vec![Sym::from("Y")]);
        assert_eq!(
            q.atoms,
            vec![
                QAtom::Role("http://lehigh/univ#member".into(), QTerm::Var("Y".into()), QTerm::Var("X".into())),
                QAtom::Concept(Concept::named("http://lehigh/univ#ResearchGroup"), QTerm::Var("Y".into())),
            ]
        );
        let q = parse_query("PREFIX : <http://e/>\nASK WHERE { ?X a :A . }").unwrap();
        assert_eq!((q.answer_vars.len(), q.bound_vars.len()), (0, 1));
        let q = parse_query("PREFIX : <http://e/>\nSELECT ?X WHERE { ?X :r ?X . }").unwrap();
        assert_eq!((q.answer_vars.len(), q.bound_vars.len(), q.atoms.len()), (1, 0, 1));
        let q = parse_query("PREFIX : <http://e/>\nSELECT WHERE { <http://e/a> :r ?X }").unwrap();
        assert!(q.is_boolean());
    }

    #[test]
    fn query_errors() {
        assert!(parse_query("SELECT ?X WHERE { ?X :r ?Y }").unwrap_err()[0].message.contains("unknown prefix"));
        let e = parse_query("PREFIX : <http://e/>\nSELECT ?X WHERE { ?X ?p ?Y }").unwrap_err();
        assert!(e[0].message.contains("predicate position"));
        assert!(parse_query("PREFIX : <http://e/>\nSELECT ?Z WHERE { ?X :r ?Y }").is_err());
        assert!(parse_query("PREFIX : <http://e/>\nSELECT ?X WHERE { ?X :r ?Y").is_err());
    }

    #[test]
    fn query_files() {
        let qs = parse_queries("PREFIX : <http://e/>\nSELECT ?X WHERE { ?X a :A }\n---\nPREFIX : <http://e/>\nASK WHERE { ?X a :A }\n").unwrap();
        assert_eq!(qs.len(), 2);
        let e = parse_queries("PREFIX : <http://e/>\nSELECT ?X WHERE { ?X a :A }\n---\nSELECT ?X WHERE { ?X a :A }\n").unwrap_err();
        assert_eq!(e[0].span.line, 4);
    }
}

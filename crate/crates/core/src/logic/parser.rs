//! Recursive-descent parser for the formula DSL.
//!
//! ```text
//! formula := iff
//! iff     := imp (("<->" | "xor") imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | quant | atom
//! quant   := ("exists" | "forall" | "exists!") var ("," var)* "." formula
//! atom    := "(" formula ")" | "true" | "false" | x "=" y | x "!=" y
//!          | "E" "(" x "," y ")" | name "(" args ")"
//!          | "TC" "[" u "," v ":" formula "]" "(" a "," b ")"
//!          | "BETWEEN" "[" u "," v ":" formula "]" "(" x "," y "," z ")"
//! ```
//!
//! Identifiers starting with an upper-case letter are set variables when
//! quantified. `name(x)` resolves, in order, to a set variable in scope, a
//! library predicate, or a graph label.

use super::ast::{Arg, Formula};
use super::library::{PredicateLibrary, VarKind};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Unbound(String),
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    Kind(String),
    Library(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::Unbound(v) => write!(f, "unbound variable `{v}`"),
            ParseErrorKind::Arity {
                name,
                expected,
                found,
            } => write!(f, "`{name}` takes {expected} argument(s), got {found}"),
            ParseErrorKind::Kind(m) => write!(f, "{m}"),
            ParseErrorKind::Library(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Equals,
    NotEquals,
    ExistsBang,
    Eof,
}

const KEYWORDS: [&str; 8] = ["exists", "forall", "true", "false", "xor", "TC", "BETWEEN", "E"];

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, (usize, String)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            if word == "exists" && i < bytes.len() && bytes[i] == b'!' {
                i += 1;
                out.push((Tok::ExistsBang, start));
            } else {
                out.push((Tok::Ident(word.to_string()), start));
            }
            continue;
        }
        let two = text.get(i..i + 2).unwrap_or("");
        let three = text.get(i..i + 3).unwrap_or("");
        let (tok, len) = if three == "<->" {
            (Tok::DArrow, 3)
        } else if two == "->" {
            (Tok::Arrow, 2)
        } else if two == "!=" {
            (Tok::NotEquals, 2)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                '!' => Tok::Bang,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                '=' => Tok::Equals,
                _ => return Err((start, format!("unexpected character `{c}`"))),
            };
            (t, 1)
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

/// How variables not bound inside the formula are treated.
#[derive(Clone, Debug)]
pub enum FreeVars {
    /// Any unbound name becomes a free variable (set variable if capitalised).
    Any,
    /// Only the listed names may occur free.
    Declared { vertex: Vec<String>, set: Vec<String> },
}

pub(crate) fn is_set_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    lib: &'a PredicateLibrary,
    free: FreeVars,
    vertex_scope: Vec<String>,
    set_scope: Vec<String>,
}

/// Parses a standalone formula against an empty library; unbound names are free.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_in(text, &PredicateLibrary::default(), FreeVars::Any)
}

pub fn parse_formula_in(
    text: &str,
    lib: &PredicateLibrary,
    free: FreeVars,
) -> Result<Formula, ParseError> {
    parse_span(text, 0..text.len(), lib, free)
}

/// Parses `text[span]`, reporting positions relative to the whole of `text`.
pub(crate) fn parse_span(
    text: &str,
    span: std::ops::Range<usize>,
    lib: &PredicateLibrary,
    free: FreeVars,
) -> Result<Formula, ParseError> {
    let base = span.start;
    let mut toks = tokenize(&text[span])
        .map_err(|(at, msg)| error_at(text, base + at, ParseErrorKind::Syntax(msg)))?;
    for t in &mut toks {
        t.1 += base;
    }
    let mut p = Parser {
        text,
        toks,
        pos: 0,
        lib,
        free,
        vertex_scope: Vec::new(),
        set_scope: Vec::new(),
    };
    let f = p.formula()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(f)
}

pub(crate) fn error_at(text: &str, offset: usize, kind: ParseErrorKind) -> ParseError {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    ParseError { line, col, kind }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(error_at(self.text, self.offset(), kind))
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.syntax(format!("expected identifier, found {other:?}")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        loop {
            match self.peek() {
                Tok::DArrow => {
                    self.bump();
                    let rhs = self.implication()?;
                    lhs = Formula::iff(lhs, rhs);
                }
                Tok::Ident(s) if s == "xor" => {
                    self.bump();
                    let rhs = self.implication()?;
                    lhs = Formula::xor(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::ExistsBang => {
                self.bump();
                self.quantifier(Quant::Unique)
            }
            Tok::Ident(s) if s == "exists" => {
                self.bump();
                self.quantifier(Quant::Exists)
            }
            Tok::Ident(s) if s == "forall" => {
                self.bump();
                self.quantifier(Quant::Forall)
            }
            _ => self.atom(),
        }
    }

    fn quantifier(&mut self, q: Quant) -> Result<Formula, ParseError> {
        let mut vars = vec![(self.offset(), self.ident()?)];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push((self.offset(), self.ident()?));
        }
        self.expect(Tok::Dot, "`.` after quantified variables")?;
        for (at, v) in &vars {
            if is_set_name(v) {
                if q == Quant::Unique {
                    return Err(error_at(
                        self.text,
                        *at,
                        ParseErrorKind::Kind(format!("`exists!` over set variable `{v}`")),
                    ));
                }
                self.set_scope.push(v.clone());
            } else {
                self.vertex_scope.push(v.clone());
            }
        }
        let mut body = self.formula()?;
        for (_, v) in vars.iter().rev() {
            let set = is_set_name(v);
            if set {
                self.set_scope.pop();
            } else {
                self.vertex_scope.pop();
            }
            body = match (q, set) {
                (Quant::Exists, false) => Formula::exists_v(v, body),
                (Quant::Forall, false) => Formula::forall_v(v, body),
                (Quant::Exists, true) => Formula::exists_s(v, body),
                (Quant::Forall, true) => Formula::forall_s(v, body),
                (Quant::Unique, _) => Formula::exists_unique(v, body),
            };
        }
        Ok(body)
    }

    fn set_in_scope(&self, name: &str) -> bool {
        self.set_scope.iter().any(|s| s == name)
            || matches!(&self.free, FreeVars::Declared { set, .. } if set.iter().any(|s| s == name))
    }

    fn vertex_var(&mut self) -> Result<String, ParseError> {
        let at = self.offset();
        let name = self.ident()?;
        self.check_vertex(&name, at)?;
        Ok(name)
    }

    fn check_vertex(&self, name: &str, at: usize) -> Result<(), ParseError> {
        if self.vertex_scope.iter().any(|s| s == name) {
            return Ok(());
        }
        let ok = match &self.free {
            FreeVars::Any => !self.set_in_scope(name) && !is_set_name(name),
            FreeVars::Declared { vertex, .. } => vertex.iter().any(|s| s == name),
        };
        if ok {
            Ok(())
        } else if self.set_in_scope(name) || is_set_name(name) {
            Err(error_at(
                self.text,
                at,
                ParseErrorKind::Kind(format!("set variable `{name}` used as a vertex")),
            ))
        } else {
            Err(error_at(self.text, at, ParseErrorKind::Unbound(name.to_string())))
        }
    }

    fn set_var_ok(&self, name: &str) -> bool {
        self.set_in_scope(name) || (matches!(self.free, FreeVars::Any) && is_set_name(name))
    }

    fn binder(&mut self) -> Result<(String, String, Formula), ParseError> {
        self.expect(Tok::LBrack, "`[`")?;
        let u = self.ident()?;
        self.expect(Tok::Comma, "`,`")?;
        let v = self.ident()?;
        self.expect(Tok::Colon, "`:`")?;
        if is_set_name(&u) || is_set_name(&v) || u == v {
            return self.err(ParseErrorKind::Kind(
                "closure binders must be two distinct vertex variables".into(),
            ));
        }
        self.vertex_scope.push(u.clone());
        self.vertex_scope.push(v.clone());
        let body = self.formula()?;
        self.vertex_scope.truncate(self.vertex_scope.len() - 2);
        self.expect(Tok::RBrack, "`]`")?;
        Ok((u, v, body))
    }

    fn vertex_args(&mut self, n: usize, name: &str) -> Result<Vec<String>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = vec![self.vertex_var()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.vertex_var()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if out.len() != n {
            return self.err(ParseErrorKind::Arity {
                name: name.to_string(),
                expected: n,
                found: out.len(),
            });
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::Bool(true))
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Formula::Bool(false))
            }
            Tok::Ident(s) if s == "E" => {
                self.bump();
                let a = self.vertex_args(2, "E")?;
                Ok(Formula::Edge(a[0].clone(), a[1].clone()))
            }
            Tok::Ident(s) if s == "TC" => {
                self.bump();
                let (u, v, body) = self.binder()?;
                let a = self.vertex_args(2, "TC")?;
                Ok(Formula::Tc {
                    u,
                    v,
                    body: Box::new(body),
                    a: a[0].clone(),
                    b: a[1].clone(),
                })
            }
            Tok::Ident(s) if s == "BETWEEN" => {
                self.bump();
                let (u, v, body) = self.binder()?;
                let a = self.vertex_args(3, "BETWEEN")?;
                Ok(Formula::Between {
                    u,
                    v,
                    body: Box::new(body),
                    x: a[0].clone(),
                    y: a[1].clone(),
                    z: a[2].clone(),
                })
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                match self.peek() {
                    Tok::LParen => self.application(name, at),
                    Tok::Equals | Tok::NotEquals => {
                        let neg = self.bump() == Tok::NotEquals;
                        self.check_vertex(&name, at)?;
                        let rhs = self.vertex_var()?;
                        let eq = Formula::Eq(name, rhs);
                        Ok(if neg { Formula::not(eq) } else { eq })
                    }
                    other => self.syntax(format!("expected `(` or `=` after `{name}`, found {other:?}")),
                }
            }
            other => self.syntax(format!("unexpected {other:?}")),
        }
    }

    fn application(&mut self, name: String, at: usize) -> Result<Formula, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut raw = vec![(self.offset(), self.ident()?)];
        while *self.peek() == Tok::Comma {
            self.bump();
            raw.push((self.offset(), self.ident()?));
        }
        self.expect(Tok::RParen, "`)`")?;
        if self.set_in_scope(&name) {
            if raw.len() != 1 {
                return Err(error_at(
                    self.text,
                    at,
                    ParseErrorKind::Arity {
                        name,
                        expected: 1,
                        found: raw.len(),
                    },
                ));
            }
            self.check_vertex(&raw[0].1, raw[0].0)?;
            return Ok(Formula::InSet(name, raw[0].1.clone()));
        }
        if let Some(def) = self.lib.get(&name) {
            if def.params.len() != raw.len() {
                return Err(error_at(
                    self.text,
                    at,
                    ParseErrorKind::Arity {
                        name,
                        expected: def.params.len(),
                        found: raw.len(),
                    },
                ));
            }
            let mut args = Vec::new();
            for (param, (pos, arg)) in def.params.iter().zip(&raw) {
                match param.kind {
                    VarKind::Vertex => {
                        self.check_vertex(arg, *pos)?;
                        args.push(Arg::Vertex(arg.clone()));
                    }
                    VarKind::Set => {
                        if !self.set_var_ok(arg) {
                            return Err(error_at(
                                self.text,
                                *pos,
                                ParseErrorKind::Kind(format!(
                                    "`{name}` expects a set variable for `{}`, got `{arg}`",
                                    param.name
                                )),
                            ));
                        }
                        args.push(Arg::Set(arg.clone()));
                    }
                }
            }
            return Ok(Formula::Pred { name, args });
        }
        if raw.len() != 1 {
            return Err(error_at(
                self.text,
                at,
                ParseErrorKind::Library(format!("unknown predicate `{name}`/{}", raw.len())),
            ));
        }
        self.check_vertex(&raw[0].1, raw[0].0)?;
        if matches!(self.free, FreeVars::Any) && is_set_name(&name) {
            return Ok(Formula::InSet(name, raw[0].1.clone()));
        }
        Ok(Formula::Label(name, raw[0].1.clone()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Quant {
    Exists,
    Forall,
    Unique,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::ast::Formula::*;

    #[test]
    fn exists_edge_has_free_x() {
        let f = parse_formula("exists y. E(x,y)").unwrap();
        assert_eq!(f, Formula::exists_v("y", Formula::edge("x", "y")));
        let (vs, ss) = f.free_vars();
        assert_eq!(vs.into_iter().collect::<Vec<_>>(), vec!["x"]);
        assert!(ss.is_empty());
    }

    #[test]
    fn set_quantifier_body_extends_right() {
        let f = parse_formula("forall Z. Z(x) -> Z(x)").unwrap();
        assert_eq!(
            f,
            Formula::forall_s(
                "Z",
                Formula::implies(Formula::in_set("Z", "x"), Formula::in_set("Z", "x"))
            )
        );
    }

    #[test]
    fn tc_references_library_predicate() {
        let lib = PredicateLibrary::parse("def pathedge(x,y) := E(x,y)").unwrap();
        let f = parse_formula_in("TC[u,v: pathedge(u,v)](x,y)", &lib, FreeVars::Any).unwrap();
        match f {
            Tc { body, a, b, .. } => {
                assert_eq!((a.as_str(), b.as_str()), ("x", "y"));
                assert!(matches!(*body, Pred { ref name, .. } if name == "pathedge"));
            }
            other => panic!("expected TC, got {other:?}"),
        }
    }

    #[test]
    fn precedence() {
        let f = parse_formula("a(x) | b(x) & c(x) -> d(x)").unwrap();
        assert_eq!(f.to_string(), "((a(x) | (b(x) & c(x))) -> d(x))");
        let g = parse_formula("!x = y").unwrap();
        assert_eq!(g, Formula::not(Formula::eq("x", "y")));
        let h = parse_formula("x != y").unwrap();
        assert_eq!(h, g);
    }

    #[test]
    fn desugars_iff_xor_unique() {
        let f = parse_formula("p(x) <-> q(x)").unwrap();
        assert!(matches!(f, Or(..)));
        let g = parse_formula("p(x) xor q(x)").unwrap();
        assert!(matches!(g, Not(..)));
        let u = parse_formula("exists! y. E(x,y)").unwrap();
        assert_eq!(u.to_string(), "(exists y. (E(x,y) & (forall y_1. (E(x,y_1) -> y_1 = y))))");
    }

    #[test]
    fn reports_positions() {
        let e = parse_formula("exists y.\n  E(x,y) & ?").unwrap_err();
        assert_eq!((e.line, e.col), (2, 12));
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn rejects_unbound_when_declared() {
        let free = FreeVars::Declared {
            vertex: vec!["x".into()],
            set: vec![],
        };
        let e = parse_formula_in("E(x,y)", &PredicateLibrary::default(), free).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbound("y".into()));
    }

    #[test]
    fn rejects_arity_mismatch() {
        let lib = PredicateLibrary::parse("def p(x,y) := E(x,y)").unwrap();
        let e = parse_formula_in("p(x)", &lib, FreeVars::Any).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { expected: 2, found: 1, .. }));
        assert!(parse_formula("E(x)").is_err());
    }

    #[test]
    fn set_argument_kinds_are_checked() {
        let lib = PredicateLibrary::parse("def inside(P, x) := P(x)").unwrap();
        assert!(parse_formula_in("exists Q. inside(Q, x)", &lib, FreeVars::Any).is_ok());
        assert!(parse_formula_in("exists y. inside(y, x)", &lib, FreeVars::Any).is_err());
    }
}

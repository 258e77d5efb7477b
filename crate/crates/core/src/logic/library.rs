//! Named predicate definitions, loaded from `.mso` library files.
//!
//! ```text
//! # comment
//! def adj(x, y) := E(x,y)
//! def inside(P, x) :=
//!     P(x) & exists y. adj(x,y)
//! ```
//!
//! A definition may only reference definitions that precede it.

use super::ast::Formula;
use super::parser::{error_at, is_set_name, parse_span, FreeVars, ParseError, ParseErrorKind};
use std::collections::HashMap;
use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Vertex,
    Set,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub kind: VarKind,
}

impl Param {
    pub fn new(name: &str) -> Self {
        let kind = if is_set_name(name) {
            VarKind::Set
        } else {
            VarKind::Vertex
        };
        Param {
            name: name.to_string(),
            kind,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredDef {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Formula,
}

impl PredDef {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn vertex_only(&self) -> bool {
        self.params.iter().all(|p| p.kind == VarKind::Vertex)
    }
}

#[derive(Clone, Debug, Default)]
pub struct PredicateLibrary {
    defs: Vec<PredDef>,
    index: HashMap<String, usize>,
}

/// A `name(params) :=` header found at the start of a chunk.
pub(crate) struct Header {
    pub name: String,
    pub params: Vec<String>,
    pub body: Range<usize>,
}

impl PredicateLibrary {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lib = PredicateLibrary::default();
        lib.extend_from_str(text)?;
        Ok(lib)
    }

    /// Appends the definitions in `text`; they may reference everything already loaded.
    pub fn extend_from_str(&mut self, text: &str) -> Result<(), ParseError> {
        let headers = chunks(text, &["def"])?
            .into_iter()
            .map(|span| parse_header(text, span, true))
            .collect::<Result<Vec<_>, _>>()?;
        let names: Vec<String> = headers.iter().map(|h| h.name.clone()).collect();
        for (i, h) in headers.into_iter().enumerate() {
            let at = h.body.start;
            self.define_span(text, h)?;
            let body = &self.defs.last().expect("just defined").body;
            if let Some(later) = names[i + 1..].iter().find(|n| labels_named(body, n)) {
                return Err(error_at(
                    text,
                    at,
                    ParseErrorKind::Library(format!("forward reference to `{later}`")),
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn define_span(&mut self, text: &str, h: Header) -> Result<(), ParseError> {
        let at = h.body.start;
        if self.index.contains_key(&h.name) {
            return Err(error_at(
                text,
                at,
                ParseErrorKind::Library(format!("predicate `{}` defined twice", h.name)),
            ));
        }
        let params: Vec<Param> = h.params.iter().map(|p| Param::new(p)).collect();
        let free = declared(&params);
        let body = parse_span(text, h.body, self, free)?;
        if labels_named(&body, &h.name) {
            return Err(error_at(
                text,
                at,
                ParseErrorKind::Library(format!("predicate `{}` refers to itself", h.name)),
            ));
        }
        self.push(PredDef {
            name: h.name,
            params,
            body,
        });
        Ok(())
    }

    /// Adds a definition whose body has already been built.
    pub fn push(&mut self, def: PredDef) {
        self.index.insert(def.name.clone(), self.defs.len());
        self.defs.push(def);
    }

    /// Defines `name` from source text, as if it were one more `def` line.
    pub fn define(&mut self, name: &str, params: &[&str], body: &str) -> Result<(), ParseError> {
        let h = Header {
            name: name.to_string(),
            params: params.iter().map(|s| s.to_string()).collect(),
            body: 0..body.len(),
        };
        self.define_span(body, h)
    }

    pub fn get(&self, name: &str) -> Option<&PredDef> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn defs(&self) -> &[PredDef] {
        &self.defs
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|d| d.name.as_str())
    }

    /// Renders the library back into the file syntax.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for d in &self.defs {
            let ps: Vec<&str> = d.params.iter().map(|p| p.name.as_str()).collect();
            out.push_str(&format!("def {}({}) := {}\n", d.name, ps.join(", "), d.body));
        }
        out
    }
}

pub(crate) fn declared(params: &[Param]) -> FreeVars {
    FreeVars::Declared {
        vertex: params
            .iter()
            .filter(|p| p.kind == VarKind::Vertex)
            .map(|p| p.name.clone())
            .collect(),
        set: params
            .iter()
            .filter(|p| p.kind == VarKind::Set)
            .map(|p| p.name.clone())
            .collect(),
    }
}

fn labels_named(f: &Formula, name: &str) -> bool {
    let mut hit = false;
    f.visit(&mut |g| {
        if let Formula::Label(l, _) = g {
            hit |= l == name;
        }
    });
    hit
}

/// Splits `text` into chunks that each start with one of `starters` at the
/// beginning of a line. Comment and blank lines before the first chunk are
/// skipped; anything else there is an error.
pub(crate) fn chunks(text: &str, starters: &[&str]) -> Result<Vec<Range<usize>>, ParseError> {
    let mut starts = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        let lead = offset + (line.len() - trimmed.len());
        let starts_chunk = starters.iter().any(|s| {
            trimmed.starts_with(s)
                && !trimmed[s.len()..]
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        });
        if starts_chunk {
            starts.push(lead);
        } else if starts.is_empty() {
            let content = trimmed.trim_end();
            if !content.is_empty() && !content.starts_with('#') {
                return Err(error_at(
                    text,
                    lead,
                    ParseErrorKind::Syntax(format!("expected one of {starters:?}")),
                ));
            }
        }
        offset += line.len();
    }
    let mut out = Vec::new();
    for (i, &s) in starts.iter().enumerate() {
        let e = starts.get(i + 1).copied().unwrap_or(text.len());
        out.push(s..e);
    }
    Ok(out)
}

/// Parses `[def] name(p1, ..., pk) :=` at the start of `span`.
pub(crate) fn parse_header(text: &str, span: Range<usize>, keyword: bool) -> Result<Header, ParseError> {
    let mut c = Cursor {
        text,
        pos: span.start,
        end: span.end,
    };
    if keyword {
        c.word()?;
    }
    let name = c.word()?;
    c.punct("(")?;
    let mut params = Vec::new();
    c.skip_ws();
    if !c.peek(")") {
        loop {
            params.push(c.word()?);
            c.skip_ws();
            if c.peek(",") {
                c.punct(",")?;
            } else {
                break;
            }
        }
    }
    c.punct(")")?;
    c.punct(":=")?;
    for (i, p) in params.iter().enumerate() {
        if params[..i].contains(p) {
            return Err(error_at(
                text,
                span.start,
                ParseErrorKind::Library(format!("parameter `{p}` repeated in `{name}`")),
            ));
        }
    }
    Ok(Header {
        name,
        params,
        body: c.pos..span.end,
    })
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    end: usize,
}

impl Cursor<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..self.end]
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn peek(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    fn fail<T>(&self, what: &str) -> Result<T, ParseError> {
        Err(error_at(
            self.text,
            self.pos,
            ParseErrorKind::Syntax(format!("expected {what}")),
        ))
    }

    fn word(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return self.fail("identifier");
        }
        let w = self.rest()[..len].to_string();
        self.pos += len;
        Ok(w)
    }

    fn punct(&mut self, s: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek(s) {
            self.pos += s.len();
            Ok(())
        } else {
            self.fail(&format!("`{s}`"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LIB: &str = "\
# adjacency helpers
def adj(x, y) := E(x,y)
def common(x, y) :=
    exists z. adj(x,z) & adj(y,z)   # shared neighbour
def inside(P, x) := P(x)
";

    #[test]
    fn parses_in_order() {
        let lib = PredicateLibrary::parse(LIB).unwrap();
        assert_eq!(lib.names().collect::<Vec<_>>(), ["adj", "common", "inside"]);
        let inside = lib.get("inside").unwrap();
        assert_eq!(inside.params[0].kind, VarKind::Set);
        assert!(!inside.vertex_only());
        assert_eq!(lib.get("common").unwrap().arity(), 2);
    }

    #[test]
    fn round_trips_through_source() {
        let lib = PredicateLibrary::parse(LIB).unwrap();
        let again = PredicateLibrary::parse(&lib.to_source()).unwrap();
        for (a, b) in lib.defs().iter().zip(again.defs()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_forward_reference() {
        let e = PredicateLibrary::parse("def a(x,y) := b(x,y)\ndef b(x,y) := E(x,y)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Library(_)), "{e}");
        let e = PredicateLibrary::parse("def a(x) := b(x)\ndef b(x) := true").unwrap_err();
        assert!(e.to_string().contains("forward reference"), "{e}");
    }

    #[test]
    fn rejects_self_reference_and_duplicates() {
        assert!(PredicateLibrary::parse("def a(x) := a(x)").is_err());
        assert!(PredicateLibrary::parse("def a(x) := true\ndef a(x) := false").is_err());
    }

    #[test]
    fn body_scope_is_the_parameter_list() {
        let e = PredicateLibrary::parse("def a(x) := E(x,y)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbound("y".into()));
        assert_eq!((e.line, e.col), (1, 17));
    }

    #[test]
    fn error_positions_are_file_relative() {
        let e = PredicateLibrary::parse("def a(x) := true\n\ndef b(x) :=\n   E(x,x) &").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn stray_text_is_rejected() {
        assert!(PredicateLibrary::parse("oops\ndef a(x) := true").is_err());
    }
}

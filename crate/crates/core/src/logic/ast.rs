use std::collections::BTreeSet;
use std::fmt;

/// Argument of a predicate reference.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Arg {
    Vertex(String),
    Set(String),
}

impl Arg {
    pub fn name(&self) -> &str {
        match self {
            Arg::Vertex(s) | Arg::Set(s) => s,
        }
    }
}

/// MSO formula over labeled graphs. Parsing desugars `<->`, `xor` and
/// `exists!` into the connectives below.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Bool(bool),
    Edge(String, String),
    /// `label(x)`: membership in a named label of the graph
    Label(String, String),
    /// `X(x)`: membership in a set variable
    InSet(String, String),
    Eq(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ExistsV(String, Box<Formula>),
    ForallV(String, Box<Formula>),
    ExistsS(String, Box<Formula>),
    ForallS(String, Box<Formula>),
    /// Reflexive-transitive closure of the relation `body(u, v)`, applied to `(a, b)`.
    Tc {
        u: String,
        v: String,
        body: Box<Formula>,
        a: String,
        b: String,
    },
    /// `y` lies on the path from `x` to `z` in the graph of the relation
    /// `body(u, v)`, which must be a disjoint union of paths.
    Between {
        u: String,
        v: String,
        body: Box<Formula>,
        x: String,
        y: String,
        z: String,
    },
    Pred { name: String, args: Vec<Arg> },
}

pub use Formula::*;

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::or(
            Formula::and(a.clone(), b.clone()),
            Formula::and(Formula::not(a), Formula::not(b)),
        )
    }

    pub fn xor(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::iff(a, b))
    }

    pub fn exists_v(x: &str, body: Formula) -> Formula {
        ExistsV(x.to_string(), Box::new(body))
    }

    pub fn forall_v(x: &str, body: Formula) -> Formula {
        ForallV(x.to_string(), Box::new(body))
    }

    pub fn exists_s(x: &str, body: Formula) -> Formula {
        ExistsS(x.to_string(), Box::new(body))
    }

    pub fn forall_s(x: &str, body: Formula) -> Formula {
        ForallS(x.to_string(), Box::new(body))
    }

    pub fn edge(x: &str, y: &str) -> Formula {
        Edge(x.to_string(), y.to_string())
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Eq(x.to_string(), y.to_string())
    }

    pub fn in_set(s: &str, x: &str) -> Formula {
        InSet(s.to_string(), x.to_string())
    }

    /// `exists! x. body` as `exists x. (body & forall x'. (body[x'/x] -> x' = x))`.
    pub fn exists_unique(x: &str, body: Formula) -> Formula {
        let fresh = fresh_name(x, &body);
        let renamed = body.rename_free_vertex(x, &fresh);
        Formula::exists_v(
            x,
            Formula::and(
                body,
                Formula::forall_v(&fresh, Formula::implies(renamed, Formula::eq(&fresh, x))),
            ),
        )
    }

    /// Renames free occurrences of vertex variable `from`. `to` must not be
    /// bound anywhere in `self`.
    pub fn rename_free_vertex(&self, from: &str, to: &str) -> Formula {
        let r = |s: &String| if s == from { to.to_string() } else { s.clone() };
        let rec = |f: &Formula| Box::new(f.rename_free_vertex(from, to));
        match self {
            Bool(b) => Bool(*b),
            Edge(x, y) => Edge(r(x), r(y)),
            Label(l, x) => Label(l.clone(), r(x)),
            InSet(s, x) => InSet(s.clone(), r(x)),
            Eq(x, y) => Eq(r(x), r(y)),
            Not(a) => Not(rec(a)),
            And(a, b) => And(rec(a), rec(b)),
            Or(a, b) => Or(rec(a), rec(b)),
            Implies(a, b) => Implies(rec(a), rec(b)),
            ExistsV(x, a) | ForallV(x, a) if x == from => self.clone(),
            ExistsV(x, a) => ExistsV(x.clone(), rec(a)),
            ForallV(x, a) => ForallV(x.clone(), rec(a)),
            ExistsS(s, a) => ExistsS(s.clone(), rec(a)),
            ForallS(s, a) => ForallS(s.clone(), rec(a)),
            Tc { u, v, body, a, b } => {
                let body = if u == from || v == from {
                    body.clone()
                } else {
                    rec(body)
                };
                Tc {
                    u: u.clone(),
                    v: v.clone(),
                    body,
                    a: r(a),
                    b: r(b),
                }
            }
            Between { u, v, body, x, y, z } => {
                let body = if u == from || v == from {
                    body.clone()
                } else {
                    rec(body)
                };
                Between {
                    u: u.clone(),
                    v: v.clone(),
                    body,
                    x: r(x),
                    y: r(y),
                    z: r(z),
                }
            }
            Pred { name, args } => Pred {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|a| match a {
                        Arg::Vertex(x) => Arg::Vertex(r(x)),
                        s => s.clone(),
                    })
                    .collect(),
            },
        }
    }

    /// Free vertex variables and free set variables.
    pub fn free_vars(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut vs = BTreeSet::new();
        let mut ss = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut vs, &mut ss);
        (vs, ss)
    }

    fn collect_free(
        &self,
        bv: &mut Vec<String>,
        bs: &mut Vec<String>,
        vs: &mut BTreeSet<String>,
        ss: &mut BTreeSet<String>,
    ) {
        let mut v = |x: &String, bv: &Vec<String>| {
            if !bv.contains(x) {
                vs.insert(x.clone());
            }
        };
        match self {
            Bool(_) => {}
            Edge(x, y) | Eq(x, y) => {
                v(x, bv);
                v(y, bv);
            }
            Label(_, x) => v(x, bv),
            InSet(s, x) => {
                v(x, bv);
                if !bs.contains(s) {
                    ss.insert(s.clone());
                }
            }
            Not(a) => a.collect_free(bv, bs, vs, ss),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.collect_free(bv, bs, vs, ss);
                b.collect_free(bv, bs, vs, ss);
            }
            ExistsV(x, a) | ForallV(x, a) => {
                bv.push(x.clone());
                a.collect_free(bv, bs, vs, ss);
                bv.pop();
            }
            ExistsS(s, a) | ForallS(s, a) => {
                bs.push(s.clone());
                a.collect_free(bv, bs, vs, ss);
                bs.pop();
            }
            Tc { u, v: w, body, a, b } => {
                v(a, bv);
                v(b, bv);
                bv.push(u.clone());
                bv.push(w.clone());
                body.collect_free(bv, bs, vs, ss);
                bv.truncate(bv.len() - 2);
            }
            Between {
                u,
                v: w,
                body,
                x,
                y,
                z,
            } => {
                v(x, bv);
                v(y, bv);
                v(z, bv);
                bv.push(u.clone());
                bv.push(w.clone());
                body.collect_free(bv, bs, vs, ss);
                bv.truncate(bv.len() - 2);
            }
            Pred { args, .. } => {
                for a in args {
                    match a {
                        Arg::Vertex(x) => v(x, bv),
                        Arg::Set(s) => {
                            if !bs.contains(s) {
                                ss.insert(s.clone());
                            }
                        }
                    }
                }
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Bool(_) | Edge(..) | Label(..) | InSet(..) | Eq(..) | Pred { .. } => vec![],
            Not(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) => vec![a, b],
            ExistsV(_, a) | ForallV(_, a) | ExistsS(_, a) | ForallS(_, a) => vec![a],
            Tc { body, .. } | Between { body, .. } => vec![body],
        }
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Bool(_) => {}
            Edge(x, y) | Eq(x, y) | InSet(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Label(_, x) => {
                out.insert(x.clone());
            }
            Not(a) => a.all_names(out),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            ExistsV(x, a) | ForallV(x, a) | ExistsS(x, a) | ForallS(x, a) => {
                out.insert(x.clone());
                a.all_names(out);
            }
            Tc { u, v, body, a, b } => {
                out.extend([u.clone(), v.clone(), a.clone(), b.clone()]);
                body.all_names(out);
            }
            Between {
                u,
                v,
                body,
                x,
                y,
                z,
            } => {
                out.extend([u.clone(), v.clone(), x.clone(), y.clone(), z.clone()]);
                body.all_names(out);
            }
            Pred { args, .. } => out.extend(args.iter().map(|a| a.name().to_string())),
        }
    }

    pub fn mentions_set_var(&self, s: &str) -> bool {
        let mut names = BTreeSet::new();
        self.all_names(&mut names);
        names.contains(s)
    }

    /// Quantifier nesting depth.
    pub fn depth(&self) -> usize {
        match self {
            Bool(_) | Edge(..) | Label(..) | InSet(..) | Eq(..) | Pred { .. } => 0,
            Not(a) => a.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.depth().max(b.depth()),
            ExistsV(_, a) | ForallV(_, a) | ExistsS(_, a) | ForallS(_, a) => 1 + a.depth(),
            Tc { body, .. } | Between { body, .. } => 1 + body.depth(),
        }
    }
}

/// A name not occurring in `f`, derived from `base`.
pub fn fresh_name(base: &str, f: &Formula) -> String {
    let mut names = BTreeSet::new();
    f.all_names(&mut names);
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !names.contains(c) && c != base)
        .unwrap()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bool(true) => write!(f, "true"),
            Bool(false) => write!(f, "false"),
            Edge(x, y) => write!(f, "E({x},{y})"),
            Label(l, x) => write!(f, "{l}({x})"),
            InSet(s, x) => write!(f, "{s}({x})"),
            Eq(x, y) => write!(f, "{x} = {y}"),
            Not(a) => write!(f, "!{}", Paren(a)),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            ExistsV(x, a) | ExistsS(x, a) => write!(f, "(exists {x}. {a})"),
            ForallV(x, a) | ForallS(x, a) => write!(f, "(forall {x}. {a})"),
            Tc { u, v, body, a, b } => write!(f, "TC[{u},{v}: {body}]({a},{b})"),
            Between {
                u,
                v,
                body,
                x,
                y,
                z,
            } => write!(f, "BETWEEN[{u},{v}: {body}]({x},{y},{z})"),
            Pred { name, args } => {
                let args: Vec<&str> = args.iter().map(Arg::name).collect();
                write!(f, "{name}({})", args.join(","))
            }
        }
    }
}

struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Eq(..) => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}

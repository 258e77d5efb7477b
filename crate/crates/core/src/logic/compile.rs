//! Lowering of [`Formula`] to slot-indexed nodes.
//!
//! Every binder gets its own slot in the frame of the enclosing unit (a
//! predicate body or a top-level query), so evaluation never looks up names.

use super::ast::{Arg, Formula};
use super::eval::EvalError;
use super::library::{PredicateLibrary, VarKind};
use std::collections::HashMap;

pub(crate) type Slot = usize;

#[derive(Clone, Copy, Debug)]
pub(crate) enum ArgSlot {
    V(Slot),
    S(Slot),
}

#[derive(Debug)]
pub(crate) enum Node {
    Const(bool),
    Edge(Slot, Slot),
    Label(usize, Slot),
    MissingLabel(String),
    InSet(Slot, Slot),
    Eq(Slot, Slot),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    ExistsV(Slot, Box<Node>),
    ForallV(Slot, Box<Node>),
    ExistsS(Slot, Box<Node>),
    ForallS(Slot, Box<Node>),
    Tc(Box<Closure>),
    Between(Box<Closure>),
    Call { pred: usize, args: Vec<ArgSlot> },
}

/// A TC or BETWEEN node. `args` are (a, b) for TC and (x, y, z) for BETWEEN.
#[derive(Debug)]
pub(crate) struct Closure {
    pub id: usize,
    pub u: Slot,
    pub v: Slot,
    pub body: Node,
    pub args: Vec<Slot>,
    /// The body depends on nothing but `u`, `v` and the graph.
    pub closed: bool,
    pub tc: bool,
}

#[derive(Debug)]
pub(crate) struct Unit {
    pub root: Node,
    pub vslots: usize,
    pub sslots: usize,
    pub params: Vec<ArgSlot>,
}

pub(crate) struct Compiler<'a> {
    lib: &'a PredicateLibrary,
    labels: &'a HashMap<String, usize>,
    vscope: Vec<(String, Slot)>,
    sscope: Vec<(String, Slot)>,
    vslots: usize,
    sslots: usize,
    closures: usize,
}

impl<'a> Compiler<'a> {
    pub fn new(lib: &'a PredicateLibrary, labels: &'a HashMap<String, usize>) -> Self {
        Compiler {
            lib,
            labels,
            vscope: Vec::new(),
            sscope: Vec::new(),
            vslots: 0,
            sslots: 0,
            closures: 0,
        }
    }

    /// Compiles `f` with the given free variables occupying the first slots.
    pub fn unit(
        mut self,
        f: &Formula,
        params: &[(String, VarKind)],
    ) -> Result<Unit, EvalError> {
        let mut slots = Vec::new();
        for (name, kind) in params {
            slots.push(match kind {
                VarKind::Vertex => ArgSlot::V(self.bind_v(name)),
                VarKind::Set => ArgSlot::S(self.bind_s(name)),
            });
        }
        let root = self.node(f)?;
        Ok(Unit {
            root,
            vslots: self.vslots,
            sslots: self.sslots,
            params: slots,
        })
    }

    fn bind_v(&mut self, name: &str) -> Slot {
        let s = self.vslots;
        self.vslots += 1;
        self.vscope.push((name.to_string(), s));
        s
    }

    fn bind_s(&mut self, name: &str) -> Slot {
        let s = self.sslots;
        self.sslots += 1;
        self.sscope.push((name.to_string(), s));
        s
    }

    fn v(&self, name: &str) -> Result<Slot, EvalError> {
        self.vscope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|&(_, s)| s)
            .ok_or_else(|| EvalError::Unassigned(name.to_string()))
    }

    fn s(&self, name: &str) -> Result<Slot, EvalError> {
        self.sscope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|&(_, s)| s)
            .ok_or_else(|| EvalError::Unassigned(name.to_string()))
    }

    fn bin(&mut self, a: &Formula, b: &Formula) -> Result<(Box<Node>, Box<Node>), EvalError> {
        Ok((Box::new(self.node(a)?), Box::new(self.node(b)?)))
    }

    fn scoped_v(&mut self, x: &str, body: &Formula) -> Result<(Slot, Box<Node>), EvalError> {
        let s = self.bind_v(x);
        let b = self.node(body);
        self.vscope.pop();
        Ok((s, Box::new(b?)))
    }

    fn scoped_s(&mut self, x: &str, body: &Formula) -> Result<(Slot, Box<Node>), EvalError> {
        let s = self.bind_s(x);
        let b = self.node(body);
        self.sscope.pop();
        Ok((s, Box::new(b?)))
    }

    fn closure(
        &mut self,
        u: &str,
        v: &str,
        body: &Formula,
        args: &[&String],
        tc: bool,
    ) -> Result<Closure, EvalError> {
        let args = args.iter().map(|a| self.v(a)).collect::<Result<Vec<_>, _>>()?;
        let (fv, fs) = body.free_vars();
        let closed = fs.is_empty() && fv.iter().all(|x| x == u || x == v);
        let id = self.closures;
        self.closures += 1;
        let us = self.bind_v(u);
        let vs = self.bind_v(v);
        let b = self.node(body);
        self.vscope.truncate(self.vscope.len() - 2);
        Ok(Closure {
            id,
            u: us,
            v: vs,
            body: b?,
            args,
            closed,
            tc,
        })
    }

    fn node(&mut self, f: &Formula) -> Result<Node, EvalError> {
        Ok(match f {
            Formula::Bool(b) => Node::Const(*b),
            Formula::Edge(x, y) => Node::Edge(self.v(x)?, self.v(y)?),
            Formula::Label(l, x) => match self.labels.get(l) {
                Some(&id) => Node::Label(id, self.v(x)?),
                None => {
                    self.v(x)?;
                    Node::MissingLabel(l.clone())
                }
            },
            Formula::InSet(s, x) => Node::InSet(self.s(s)?, self.v(x)?),
            Formula::Eq(x, y) => Node::Eq(self.v(x)?, self.v(y)?),
            Formula::Not(a) => Node::Not(Box::new(self.node(a)?)),
            Formula::And(a, b) => {
                let (a, b) = self.bin(a, b)?;
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = self.bin(a, b)?;
                Node::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = self.bin(a, b)?;
                Node::Implies(a, b)
            }
            Formula::ExistsV(x, a) => {
                let (s, b) = self.scoped_v(x, a)?;
                Node::ExistsV(s, b)
            }
            Formula::ForallV(x, a) => {
                let (s, b) = self.scoped_v(x, a)?;
                Node::ForallV(s, b)
            }
            Formula::ExistsS(x, a) => {
                let (s, b) = self.scoped_s(x, a)?;
                Node::ExistsS(s, b)
            }
            Formula::ForallS(x, a) => {
                let (s, b) = self.scoped_s(x, a)?;
                Node::ForallS(s, b)
            }
            Formula::Tc { u, v, body, a, b } => {
                Node::Tc(Box::new(self.closure(u, v, body, &[a, b], true)?))
            }
            Formula::Between {
                u,
                v,
                body,
                x,
                y,
                z,
            } => Node::Between(Box::new(self.closure(u, v, body, &[x, y, z], false)?)),
            Formula::Pred { name, args } => {
                let pred = self
                    .lib
                    .position(name)
                    .ok_or_else(|| EvalError::UnknownPredicate(name.clone()))?;
                let def = &self.lib.defs()[pred];
                if def.params.len() != args.len() {
                    return Err(EvalError::Arity {
                        name: name.clone(),
                        expected: def.params.len(),
                        found: args.len(),
                    });
                }
                let mut slots = Vec::with_capacity(args.len());
                for (p, a) in def.params.iter().zip(args) {
                    slots.push(match (p.kind, a) {
                        (VarKind::Vertex, Arg::Vertex(x)) => ArgSlot::V(self.v(x)?),
                        (VarKind::Set, Arg::Set(x)) => ArgSlot::S(self.s(x)?),
                        _ => {
                            return Err(EvalError::ArgumentKind {
                                name: name.clone(),
                                param: p.name.clone(),
                            })
                        }
                    });
                }
                Node::Call { pred, args: slots }
            }
        })
    }
}

impl Node {
    /// Predicates called directly from this node, without entering other units.
    pub fn calls(&self, out: &mut Vec<usize>) {
        match self {
            Node::Call { pred, .. } => out.push(*pred),
            Node::Not(a)
            | Node::ExistsV(_, a)
            | Node::ForallV(_, a)
            | Node::ExistsS(_, a)
            | Node::ForallS(_, a) => a.calls(out),
            Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => {
                a.calls(out);
                b.calls(out);
            }
            Node::Tc(c) | Node::Between(c) => c.body.calls(out),
            _ => {}
        }
    }

    /// Closed closures, innermost first.
    pub fn closed_closures<'a>(&'a self, out: &mut Vec<&'a Closure>) {
        match self {
            Node::Not(a)
            | Node::ExistsV(_, a)
            | Node::ForallV(_, a)
            | Node::ExistsS(_, a)
            | Node::ForallS(_, a) => a.closed_closures(out),
            Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => {
                a.closed_closures(out);
                b.closed_closures(out);
            }
            Node::Tc(c) | Node::Between(c) => {
                c.body.closed_closures(out);
                if c.closed {
                    out.push(c);
                }
            }
            _ => {}
        }
    }
}

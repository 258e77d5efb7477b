//! Syntactic rewrites: relativization to a set variable and pure-MSO
//! encodings of the `TC` and `BETWEEN` primitives.

use super::ast::{fresh_name, Formula};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("`{0}` already occurs in the formula")]
    NameClash(String),
    #[error("`{0}` is not a set variable name")]
    NotSetName(String),
    #[error("closure body has free vertex variables besides the binders: {0:?}")]
    ExtraFree(Vec<String>),
    #[error("predicate `{0}` must be expanded before relativizing")]
    Predicate(String),
}

fn names_with_labels(f: &Formula) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    f.all_names(&mut names);
    f.visit(&mut |g| match g {
        Formula::Label(l, _) | Formula::InSet(l, _) => {
            names.insert(l.clone());
        }
        Formula::ExistsS(s, _) | Formula::ForallS(s, _) => {
            names.insert(s.clone());
        }
        Formula::Pred { name, args } => {
            names.insert(name.clone());
            names.extend(args.iter().map(|a| a.name().to_string()));
        }
        _ => {}
    });
    names
}

/// Confines every quantifier of `f` to the set `x`:
///
/// * `exists z. a` becomes `exists z. (X(z) & a')`
/// * `forall z. a` becomes `forall z. (X(z) -> a')`
/// * `exists Z. a` becomes `exists Z. ((forall w. Z(w) -> X(w)) & a')`
/// * `forall Z. a` becomes `forall Z. ((forall w. Z(w) -> X(w)) -> a')`
///
/// Closure steps are confined to `x` as well, so that `TC` and `BETWEEN`
/// read the induced subgraph.
pub fn relativize(f: &Formula, x: &str) -> Result<Formula, TransformError> {
    if !super::parser::is_set_name(x) {
        return Err(TransformError::NotSetName(x.to_string()));
    }
    let names = names_with_labels(f);
    if names.contains(x) {
        return Err(TransformError::NameClash(x.to_string()));
    }
    let w = fresh_name("w", f);
    rel(f, x, &w)
}

fn rel(f: &Formula, x: &str, w: &str) -> Result<Formula, TransformError> {
    use Formula::*;
    let subset = |z: &str| Formula::forall_v(w, Formula::implies(Formula::in_set(z, w), Formula::in_set(x, w)));
    Ok(match f {
        Bool(_) | Edge(..) | Label(..) | InSet(..) | Eq(..) => f.clone(),
        Not(a) => Formula::not(rel(a, x, w)?),
        And(a, b) => Formula::and(rel(a, x, w)?, rel(b, x, w)?),
        Or(a, b) => Formula::or(rel(a, x, w)?, rel(b, x, w)?),
        Implies(a, b) => Formula::implies(rel(a, x, w)?, rel(b, x, w)?),
        ExistsV(z, a) => Formula::exists_v(z, Formula::and(Formula::in_set(x, z), rel(a, x, w)?)),
        ForallV(z, a) => Formula::forall_v(z, Formula::implies(Formula::in_set(x, z), rel(a, x, w)?)),
        ExistsS(z, a) => Formula::exists_s(z, Formula::and(subset(z), rel(a, x, w)?)),
        ForallS(z, a) => Formula::forall_s(z, Formula::implies(subset(z), rel(a, x, w)?)),
        Tc { u, v, body, a, b } => Tc {
            u: u.clone(),
            v: v.clone(),
            body: Box::new(guard(x, u, v, rel(body, x, w)?)),
            a: a.clone(),
            b: b.clone(),
        },
        Between {
            u,
            v,
            body,
            x: p,
            y,
            z,
        } => Between {
            u: u.clone(),
            v: v.clone(),
            body: Box::new(guard(x, u, v, rel(body, x, w)?)),
            x: p.clone(),
            y: y.clone(),
            z: z.clone(),
        },
        Pred { name, .. } => return Err(TransformError::Predicate(name.clone())),
    })
}

fn guard(x: &str, u: &str, v: &str, body: Formula) -> Formula {
    Formula::and(Formula::and(Formula::in_set(x, u), Formula::in_set(x, v)), body)
}

fn check_closure_body(u: &str, v: &str, body: &Formula) -> Result<(), TransformError> {
    let (fv, _) = body.free_vars();
    let extra: Vec<String> = fv.into_iter().filter(|n| n != u && n != v).collect();
    if extra.is_empty() {
        Ok(())
    } else {
        Err(TransformError::ExtraFree(extra))
    }
}

/// Renames the binders `u`, `v` of `body` away from every name in `avoid`.
fn fresh_binders(u: &str, v: &str, body: &Formula, avoid: &[&str]) -> (String, String, Formula) {
    let mut ctx = body.clone();
    for a in avoid {
        ctx = Formula::and(ctx, Formula::eq(a, a));
    }
    let u2 = fresh_name(u, &ctx);
    let ctx = Formula::and(ctx, Formula::eq(&u2, &u2));
    let v2 = fresh_name(v, &ctx);
    let b = body.rename_free_vertex(u, &u2).rename_free_vertex(v, &v2);
    (u2, v2, b)
}

/// `body` with its binders replaced by `p` and `q`, written without substitution
/// as `exists u. exists v. (u = p & v = q & body)`.
fn step(u: &str, v: &str, body: &Formula, p: &str, q: &str) -> Formula {
    Formula::exists_v(
        u,
        Formula::exists_v(
            v,
            Formula::and(Formula::and(Formula::eq(u, p), Formula::eq(v, q)), body.clone()),
        ),
    )
}

/// The reflexive-transitive closure of `body(u, v)` from `a` to `b` as a
/// plain MSO formula: every set containing `a` and closed under a step
/// contains `b`.
pub fn tc_naive_encoding(
    u: &str,
    v: &str,
    body: &Formula,
    a: &str,
    b: &str,
) -> Result<Formula, TransformError> {
    check_closure_body(u, v, body)?;
    Ok(tc_encoding(u, v, body, a, b))
}

/// [`tc_naive_encoding`] without the free-variable check; extra free
/// variables of `body` act as parameters.
pub(crate) fn tc_encoding(u: &str, v: &str, body: &Formula, a: &str, b: &str) -> Formula {
    let (u, v, body) = fresh_binders(u, v, body, &[a, b]);
    let mut ctx = Formula::and(body.clone(), Formula::eq(a, b));
    ctx = Formula::and(ctx, Formula::eq(&u, &v));
    let y = fresh_name("Y", &ctx);
    let closed = Formula::forall_v(
        &u,
        Formula::forall_v(
            &v,
            Formula::implies(Formula::and(Formula::in_set(&y, &u), body), Formula::in_set(&y, &v)),
        ),
    );
    Formula::forall_s(
        &y,
        Formula::implies(Formula::and(Formula::in_set(&y, a), closed), Formula::in_set(&y, b)),
    )
}

/// `y` lies on the path of `body`-steps from `x` to `z`, as
/// `exists P. path(P, x, z) & P(y)` where `path` demands that `x` and `z`
/// have exactly one step-neighbour in `P` and every other member of `P` has two.
pub fn between_naive_encoding(
    u: &str,
    v: &str,
    body: &Formula,
    x: &str,
    y: &str,
    z: &str,
) -> Result<Formula, TransformError> {
    check_closure_body(u, v, body)?;
    Ok(between_encoding(u, v, body, x, y, z))
}

pub(crate) fn between_encoding(u: &str, v: &str, body: &Formula, x: &str, y: &str, z: &str) -> Formula {
    let (u, v, body) = fresh_binders(u, v, body, &[x, y, z]);
    let mut ctx = Formula::and(body.clone(), Formula::eq(x, y));
    for n in [z, &u, &v] {
        ctx = Formula::and(ctx, Formula::eq(n, n));
    }
    let p = fresh_name("P", &ctx);
    let w = fresh_name("w", &ctx);
    let ctx = Formula::and(ctx, Formula::eq(&w, &w));
    let s = fresh_name("s", &ctx);
    let ctx = Formula::and(ctx, Formula::eq(&s, &s));
    let t = fresh_name("t", &ctx);
    let edge = |a: &str, b: &str| step(&u, &v, &body, a, b);
    let one_neighbour = |end: &str| {
        Formula::exists_unique(&w, Formula::and(Formula::in_set(&p, &w), edge(end, &w)))
    };
    let interior = Formula::forall_v(
        &w,
        Formula::implies(
            Formula::and(
                Formula::in_set(&p, &w),
                Formula::and(Formula::not(Formula::eq(&w, x)), Formula::not(Formula::eq(&w, z))),
            ),
            Formula::exists_v(
                &s,
                Formula::exists_v(
                    &t,
                    Formula::and(
                        Formula::and(Formula::in_set(&p, &s), Formula::in_set(&p, &t)),
                        Formula::and(
                            Formula::and(edge(&s, &w), edge(&t, &w)),
                            Formula::not(Formula::eq(&s, &t)),
                        ),
                    ),
                ),
            ),
        ),
    );
    let path = Formula::and(
        Formula::and(Formula::in_set(&p, x), Formula::in_set(&p, z)),
        Formula::and(Formula::and(one_neighbour(x), one_neighbour(z)), interior),
    );
    Formula::exists_s(&p, Formula::and(path, Formula::in_set(&p, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    #[test]
    fn relativizes_vertex_quantifiers() {
        let f = parse_formula("forall z. exists w. E(z,w)").unwrap();
        let r = relativize(&f, "X").unwrap();
        let expected = parse_formula("forall z. (X(z) -> exists w. (X(w) & E(z,w)))").unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn quantifier_free_is_unchanged() {
        let f = parse_formula("E(x,y) & !x = y").unwrap();
        assert_eq!(relativize(&f, "X").unwrap(), f);
    }

    #[test]
    fn set_quantifiers_get_subset_guards() {
        let f = parse_formula("exists Z. Z(x)").unwrap();
        let r = relativize(&f, "X").unwrap();
        let expected = parse_formula("exists Z. ((forall w_1. (Z(w_1) -> X(w_1))) & Z(x))").unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn rejects_clashing_name() {
        let f = parse_formula("exists X. X(y)").unwrap();
        assert_eq!(relativize(&f, "X"), Err(TransformError::NameClash("X".into())));
        assert!(relativize(&parse_formula("true").unwrap(), "x").is_err());
    }

    #[test]
    fn tc_encoding_shape() {
        let body = parse_formula("E(u,v)").unwrap();
        let f = tc_naive_encoding("u", "v", &body, "a", "b").unwrap();
        let (fv, fs) = f.free_vars();
        assert_eq!(fv.into_iter().collect::<Vec<_>>(), ["a", "b"]);
        assert!(fs.is_empty());
        let bad = parse_formula("E(u,c)").unwrap();
        assert!(tc_naive_encoding("u", "v", &bad, "a", "b").is_err());
    }

    #[test]
    fn encodings_avoid_capture() {
        let body = parse_formula("E(u,v)").unwrap();
        let f = tc_naive_encoding("u", "v", &body, "v", "u").unwrap();
        let (fv, _) = f.free_vars();
        assert_eq!(fv.into_iter().collect::<Vec<_>>(), ["u", "v"]);
        let g = between_naive_encoding("u", "v", &body, "v", "u", "w").unwrap();
        let (fv, _) = g.free_vars();
        assert_eq!(fv.into_iter().collect::<Vec<_>>(), ["u", "v", "w"]);
    }
}

//! Capture-free simultaneous substitution over formulas.

use super::ast::*;
use std::collections::HashMap;
use thiserror::Error;

pub type Subst = HashMap<String, Expr>;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("no substitute for `old({name})` at {pos}")]
pub struct UnboundSubstitution {
    pub name: String,
    pub pos: Pos,
}

/// Substitute plain variables via `sigma` and `old(x)` occurrences via
/// `old_sigma`, simultaneously and capture-free.
///
/// With `eliminate_old`, every `old(x)` must have an image; otherwise
/// uncovered `old(x)` occurrences are kept as-is.
pub fn substitute(
    f: &Expr,
    sigma: &Subst,
    old_sigma: &Subst,
    eliminate_old: bool,
) -> Result<Expr, UnboundSubstitution> {
    let mut taken: Vec<String> = Vec::new();
    for img in sigma.values().chain(old_sigma.values()) {
        for v in img.free_vars() {
            if !taken.contains(&v) {
                taken.push(v);
            }
        }
    }
    go(f, sigma, old_sigma, eliminate_old, &taken)
}

/// Substitute plain variables only; `old(·)` is left untouched.
pub fn subst_vars(f: &Expr, sigma: &Subst) -> Expr {
    substitute(f, sigma, &Subst::new(), false).expect("plain substitution cannot fail")
}

/// Replace `old(x)` by `sigma_old(x)`, failing on uncovered occurrences.
pub fn subst_old(f: &Expr, old_sigma: &Subst) -> Result<Expr, UnboundSubstitution> {
    substitute(f, &Subst::new(), old_sigma, true)
}

fn go(
    f: &Expr,
    sigma: &Subst,
    old_sigma: &Subst,
    eliminate_old: bool,
    taken: &[String],
) -> Result<Expr, UnboundSubstitution> {
    let pos = f.pos;
    let kind = match &f.kind {
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Nondet => f.kind.clone(),
        ExprKind::Var(n) => match sigma.get(n) {
            Some(img) => return Ok(img.clone()),
            None => f.kind.clone(),
        },
        ExprKind::Old(n) => match old_sigma.get(n) {
            Some(img) => return Ok(img.clone()),
            None if eliminate_old => {
                return Err(UnboundSubstitution {
                    name: n.clone(),
                    pos,
                })
            }
            None => f.kind.clone(),
        },
        ExprKind::Unary(op, e) => {
            ExprKind::Unary(*op, Box::new(go(e, sigma, old_sigma, eliminate_old, taken)?))
        }
        ExprKind::Binary(op, l, r) => ExprKind::Binary(
            *op,
            Box::new(go(l, sigma, old_sigma, eliminate_old, taken)?),
            Box::new(go(r, sigma, old_sigma, eliminate_old, taken)?),
        ),
        ExprKind::Select(a, i) => ExprKind::Select(
            Box::new(go(a, sigma, old_sigma, eliminate_old, taken)?),
            Box::new(go(i, sigma, old_sigma, eliminate_old, taken)?),
        ),
        ExprKind::Store(a, i, v) => ExprKind::Store(
            Box::new(go(a, sigma, old_sigma, eliminate_old, taken)?),
            Box::new(go(i, sigma, old_sigma, eliminate_old, taken)?),
            Box::new(go(v, sigma, old_sigma, eliminate_old, taken)?),
        ),
        ExprKind::Call(name, args) => ExprKind::Call(
            name.clone(),
            args.iter()
                .map(|a| go(a, sigma, old_sigma, eliminate_old, taken))
                .collect::<Result<_, _>>()?,
        ),
        ExprKind::Ite(c, t, e) => ExprKind::Ite(
            Box::new(go(c, sigma, old_sigma, eliminate_old, taken)?),
            Box::new(go(t, sigma, old_sigma, eliminate_old, taken)?),
            Box::new(go(e, sigma, old_sigma, eliminate_old, taken)?),
        ),
        ExprKind::Quantified(q, vars, body) => {
            // shadowed names drop out of sigma; rename binders that would
            // capture a free variable of some image
            let mut inner_sigma = sigma.clone();
            let mut renames = Subst::new();
            let mut new_vars = Vec::with_capacity(vars.len());
            for (v, t) in vars {
                inner_sigma.remove(v);
                if taken.contains(v) {
                    let fresh = fresh_name(v, taken, &new_vars);
                    renames.insert(v.clone(), Expr::var(fresh.clone()));
                    new_vars.push((fresh, *t));
                } else {
                    new_vars.push((v.clone(), *t));
                }
            }
            let body = if renames.is_empty() {
                (**body).clone()
            } else {
                subst_vars(body, &renames)
            };
            ExprKind::Quantified(
                *q,
                new_vars,
                Box::new(go(&body, &inner_sigma, old_sigma, eliminate_old, taken)?),
            )
        }
    };
    Ok(Expr::new(kind, pos))
}

fn fresh_name(base: &str, taken: &[String], also: &[(String, Type)]) -> String {
    let mut i = 1;
    loop {
        let cand = format!("{}_{}", base, i);
        if !taken.contains(&cand) && !also.iter().any(|(n, _)| *n == cand) {
            return cand;
        }
        i += 1;
    }
}

//! Static checks: name resolution, typing, annotation placement, mod-sets.

use super::ast::*;
use std::collections::BTreeSet;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CheckError {
    #[error("type error at {pos}: {message}")]
    Type { pos: Pos, message: String },
    #[error("scope error at {pos}: {message}")]
    Scope { pos: Pos, message: String },
    #[error("annotation error at {pos}: {message}")]
    Annot { pos: Pos, message: String },
}

impl CheckError {
    fn ty(pos: Pos, message: impl Into<String>) -> Self {
        CheckError::Type {
            pos,
            message: message.into(),
        }
    }
    fn scope(pos: Pos, message: impl Into<String>) -> Self {
        CheckError::Scope {
            pos,
            message: message.into(),
        }
    }
    fn annot(pos: Pos, message: impl Into<String>) -> Self {
        CheckError::Annot {
            pos,
            message: message.into(),
        }
    }
}

/// Variables assigned anywhere inside `s`, directly or through an array
/// store to the array variable, including nested loops and both branches.
pub fn mod_set(s: &Stmt) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_mods(s, &mut out);
    out
}

fn collect_mods(s: &Stmt, out: &mut BTreeSet<String>) {
    match &s.kind {
        StmtKind::Assign { target, .. } => {
            out.insert(target.clone());
        }
        StmtKind::If {
            then_branch,
            else_branch,
            ..
        } => {
            collect_mods(then_branch, out);
            if let Some(e) = else_branch {
                collect_mods(e, out);
            }
        }
        StmtKind::While { body, .. } => collect_mods(body, out),
        StmtKind::Block(stmts) => {
            for st in stmts {
                collect_mods(st, out);
            }
        }
        StmtKind::Decl { .. }
        | StmtKind::Break
        | StmtKind::Return(_)
        | StmtKind::Assert(_)
        | StmtKind::Assume(_) => {}
    }
}

/// Where an expression occurs; decides which constructs are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Initializers and assignment right-hand sides: `nondet()` allowed.
    Exec,
    /// `if`/`while` conditions: deterministic, no calls.
    Cond,
    /// `assert`/`assume` conditions: spec-function calls allowed.
    Assertion,
    /// Loop invariant annotation.
    Invariant,
    /// Loop summary annotation: `old(·)` over the mod-set allowed.
    Summary,
    /// Spec-function case guard or right-hand side.
    SpecBody,
}

struct Checker<'a> {
    program: &'a Program,
    scopes: Vec<HashMap<String, Type>>,
    /// Mod-set of the enclosing loop while checking a summary annotation.
    summary_mods: Option<BTreeSet<String>>,
    loop_depth: usize,
}

/// Run all static checks and return the program with mod-sets filled in.
pub fn check(p: Program) -> Result<Program, CheckError> {
    check_signatures(&p)?;
    for sf in &p.spec_funs {
        check_spec_fun(&p, sf)?;
    }
    let mut checked = p.clone();
    for f in &mut checked.funs {
        let mut ck = Checker {
            program: &p,
            scopes: Vec::new(),
            summary_mods: None,
            loop_depth: 0,
        };
        ck.check_fun(f)?;
    }
    Ok(checked)
}

fn check_signatures(p: &Program) -> Result<(), CheckError> {
    let mut seen: HashMap<&str, Pos> = HashMap::new();
    for (name, pos) in p
        .spec_funs
        .iter()
        .map(|f| (f.name.as_str(), f.pos))
        .chain(p.funs.iter().map(|f| (f.name.as_str(), f.pos)))
    {
        if seen.insert(name, pos).is_some() {
            return Err(CheckError::scope(
                pos,
                format!("duplicate function name `{}`", name),
            ));
        }
    }
    let main = p
        .funs
        .iter()
        .find(|f| f.name == "main")
        .ok_or_else(|| CheckError::scope(Pos::default(), "no `main` function"))?;
    if main.ret != Some(Type::Int) {
        return Err(CheckError::ty(main.pos, "`main` must return int"));
    }
    Ok(())
}

fn check_spec_fun(p: &Program, sf: &SpecFun) -> Result<(), CheckError> {
    let mut params = HashMap::new();
    for (n, t) in &sf.params {
        if params.insert(n.clone(), *t).is_some() {
            return Err(CheckError::scope(
                sf.pos,
                format!("duplicate parameter `{}` in spec function `{}`", n, sf.name),
            ));
        }
    }
    let mut ck = Checker {
        program: p,
        scopes: vec![params],
        summary_mods: None,
        loop_depth: 0,
    };
    for (guard, rhs) in &sf.cases {
        let gt = ck.infer(guard, Ctx::SpecBody)?;
        if gt != Type::Bool {
            return Err(CheckError::ty(guard.pos, "case guard must be bool"));
        }
        let rt = ck.infer(rhs, Ctx::SpecBody)?;
        if rt != sf.ret {
            return Err(CheckError::ty(
                rhs.pos,
                format!("case result has type {}, expected {}", rt, sf.ret),
            ));
        }
    }
    Ok(())
}

impl<'a> Checker<'a> {
    fn lookup(&self, name: &str) -> Option<Type> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name))
            .copied()
    }

    fn declare(&mut self, name: &str, ty: Type, pos: Pos) -> Result<(), CheckError> {
        let scope = self.scopes.last_mut().expect("scope stack nonempty");
        if scope.insert(name.to_string(), ty).is_some() {
            return Err(CheckError::scope(
                pos,
                format!("`{}` already declared in this scope", name),
            ));
        }
        Ok(())
    }

    fn check_fun(&mut self, f: &mut FunDef) -> Result<(), CheckError> {
        let mut params = HashMap::new();
        for (n, t) in &f.params {
            if params.insert(n.clone(), *t).is_some() {
                return Err(CheckError::scope(
                    f.pos,
                    format!("duplicate parameter `{}`", n),
                ));
            }
        }
        self.scopes.push(params);
        let ret = f.ret;
        self.check_stmt(&mut f.body, ret)?;
        self.scopes.pop();
        if ret.is_some() && !always_returns(&f.body) {
            return Err(CheckError::ty(
                f.pos,
                format!("function `{}` may fall off the end without returning", f.name),
            ));
        }
        f.mods = mod_set(&f.body).into_iter().collect();
        Ok(())
    }

    fn check_stmt(&mut self, s: &mut Stmt, ret: Option<Type>) -> Result<(), CheckError> {
        let pos = s.pos;
        match &mut s.kind {
            StmtKind::Block(stmts) => {
                self.scopes.push(HashMap::new());
                for st in stmts {
                    self.check_stmt(st, ret)?;
                }
                self.scopes.pop();
            }
            StmtKind::Decl { name, ty, init } => {
                if let Some(e) = init {
                    let et = self.infer_rhs(e)?;
                    if et != *ty {
                        return Err(CheckError::ty(
                            e.pos,
                            format!("initializer has type {}, expected {}", et, ty),
                        ));
                    }
                }
                self.declare(name, *ty, pos)?;
            }
            StmtKind::Assign {
                target,
                index,
                value,
            } => {
                let tty = self.lookup(target).ok_or_else(|| {
                    CheckError::scope(pos, format!("assignment to undeclared `{}`", target))
                })?;
                match index {
                    Some(i) => {
                        if tty != Type::ArrayInt {
                            return Err(CheckError::ty(
                                pos,
                                format!("`{}` is not an array", target),
                            ));
                        }
                        if self.infer(i, Ctx::Exec)? != Type::Int {
                            return Err(CheckError::ty(i.pos, "array index must be int"));
                        }
                        if self.infer_rhs(value)? != Type::Int {
                            return Err(CheckError::ty(value.pos, "array element must be int"));
                        }
                    }
                    None => {
                        let vt = self.infer_rhs(value)?;
                        if vt != tty {
                            return Err(CheckError::ty(
                                value.pos,
                                format!("assigning {} to `{}` of type {}", vt, target, tty),
                            ));
                        }
                    }
                }
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.infer(cond, Ctx::Cond)? != Type::Bool {
                    return Err(CheckError::ty(cond.pos, "condition must be bool"));
                }
                self.check_stmt(then_branch, ret)?;
                if let Some(e) = else_branch {
                    self.check_stmt(e, ret)?;
                }
            }
            StmtKind::While {
                cond,
                annot,
                body,
                mods,
            } => {
                if self.infer(cond, Ctx::Cond)? != Type::Bool {
                    return Err(CheckError::ty(cond.pos, "condition must be bool"));
                }
                let body_mods = mod_set(body);
                // only variables visible at the loop head matter for annotations
                let visible_mods: BTreeSet<String> = body_mods
                    .iter()
                    .filter(|m| self.lookup(m).is_some())
                    .cloned()
                    .collect();
                if let Some(inv) = &annot.invariant {
                    if self.infer(inv, Ctx::Invariant)? != Type::Bool {
                        return Err(CheckError::ty(inv.pos, "invariant must be bool"));
                    }
                }
                if let Some(sum) = &annot.summary {
                    self.summary_mods = Some(visible_mods.clone());
                    let t = self.infer(sum, Ctx::Summary);
                    self.summary_mods = None;
                    if t? != Type::Bool {
                        return Err(CheckError::ty(sum.pos, "summary must be bool"));
                    }
                }
                self.loop_depth += 1;
                self.check_stmt(body, ret)?;
                self.loop_depth -= 1;
                *mods = visible_mods.into_iter().collect();
            }
            StmtKind::Break => {
                if self.loop_depth == 0 {
                    return Err(CheckError::scope(pos, "`break` outside of a loop"));
                }
            }
            StmtKind::Return(value) => match (value, ret) {
                (None, None) => {}
                (None, Some(t)) => {
                    return Err(CheckError::ty(pos, format!("must return a value of type {}", t)));
                }
                (Some(e), None) => {
                    return Err(CheckError::ty(e.pos, "void function returns a value"));
                }
                (Some(e), Some(t)) => {
                    let et = self.infer_rhs(e)?;
                    if et != t {
                        return Err(CheckError::ty(
                            e.pos,
                            format!("returning {}, expected {}", et, t),
                        ));
                    }
                }
            },
            StmtKind::Assert(e) | StmtKind::Assume(e) => {
                if self.infer(e, Ctx::Assertion)? != Type::Bool {
                    return Err(CheckError::ty(e.pos, "condition must be bool"));
                }
            }
        }
        Ok(())
    }

    /// Right-hand sides may be a direct program-function call; anything else
    /// is a plain executable expression.
    fn infer_rhs(&mut self, e: &Expr) -> Result<Type, CheckError> {
        if let ExprKind::Call(name, args) = &e.kind {
            if let Some(f) = self.program.fun(name) {
                if args.len() != f.params.len() {
                    return Err(CheckError::ty(
                        e.pos,
                        format!(
                            "`{}` takes {} arguments, got {}",
                            name,
                            f.params.len(),
                            args.len()
                        ),
                    ));
                }
                for (a, (pname, pty)) in args.iter().zip(&f.params) {
                    let at = self.infer(a, Ctx::Cond)?;
                    if at != *pty {
                        return Err(CheckError::ty(
                            a.pos,
                            format!("argument for `{}` has type {}, expected {}", pname, at, pty),
                        ));
                    }
                }
                return f.ret.ok_or_else(|| {
                    CheckError::ty(e.pos, format!("`{}` returns no value", name))
                });
            }
        }
        self.infer(e, Ctx::Exec)
    }

    fn infer(&mut self, e: &Expr, ctx: Ctx) -> Result<Type, CheckError> {
        match &e.kind {
            ExprKind::Int(_) => Ok(Type::Int),
            ExprKind::Bool(_) => Ok(Type::Bool),
            ExprKind::Var(n) => self
                .lookup(n)
                .ok_or_else(|| CheckError::scope(e.pos, format!("undeclared variable `{}`", n))),
            ExprKind::Old(n) => {
                if ctx != Ctx::Summary {
                    return Err(CheckError::annot(
                        e.pos,
                        "`old(·)` is only allowed in summary annotations",
                    ));
                }
                let mods = self.summary_mods.as_ref().expect("summary mod-set");
                if !mods.contains(n) {
                    return Err(CheckError::annot(
                        e.pos,
                        format!("`old({})` refers to a variable outside the loop mod-set", n),
                    ));
                }
                self.lookup(n)
                    .ok_or_else(|| CheckError::scope(e.pos, format!("undeclared variable `{}`", n)))
            }
            ExprKind::Nondet => {
                if ctx != Ctx::Exec {
                    return Err(CheckError::ty(
                        e.pos,
                        "`nondet()` is only allowed in initializers and assignments",
                    ));
                }
                Ok(Type::Int)
            }
            ExprKind::Unary(UnOp::Neg, inner) => {
                if self.infer(inner, ctx)? != Type::Int {
                    return Err(CheckError::ty(inner.pos, "operand of `-` must be int"));
                }
                Ok(Type::Int)
            }
            ExprKind::Unary(UnOp::Not, inner) => {
                if self.infer(inner, ctx)? != Type::Bool {
                    return Err(CheckError::ty(inner.pos, "operand of `!` must be bool"));
                }
                Ok(Type::Bool)
            }
            ExprKind::Binary(op, l, r) => {
                let lt = self.infer(l, ctx)?;
                let rt = self.infer(r, ctx)?;
                if op.is_arith() {
                    if lt != Type::Int || rt != Type::Int {
                        return Err(CheckError::ty(e.pos, "arithmetic needs int operands"));
                    }
                    Ok(Type::Int)
                } else if op.is_comparison() {
                    if *op == BinOp::Eq || *op == BinOp::Ne {
                        if lt != rt {
                            return Err(CheckError::ty(
                                e.pos,
                                format!("comparing {} with {}", lt, rt),
                            ));
                        }
                    } else if lt != Type::Int || rt != Type::Int {
                        return Err(CheckError::ty(e.pos, "ordering needs int operands"));
                    }
                    Ok(Type::Bool)
                } else {
                    if lt != Type::Bool || rt != Type::Bool {
                        return Err(CheckError::ty(e.pos, "logical operator needs bool operands"));
                    }
                    Ok(Type::Bool)
                }
            }
            ExprKind::Select(a, i) => {
                if self.infer(a, ctx)? != Type::ArrayInt {
                    return Err(CheckError::ty(a.pos, "indexing a non-array"));
                }
                if self.infer(i, ctx)? != Type::Int {
                    return Err(CheckError::ty(i.pos, "array index must be int"));
                }
                Ok(Type::Int)
            }
            ExprKind::Store(a, i, v) => {
                if self.infer(a, ctx)? != Type::ArrayInt
                    || self.infer(i, ctx)? != Type::Int
                    || self.infer(v, ctx)? != Type::Int
                {
                    return Err(CheckError::ty(e.pos, "ill-typed array update"));
                }
                Ok(Type::ArrayInt)
            }
            ExprKind::Call(name, args) => {
                let sf = match self.program.spec_fun(name) {
                    Some(sf) => sf,
                    None => {
                        return Err(if self.program.fun(name).is_some() {
                            CheckError::ty(
                                e.pos,
                                format!(
                                    "call to `{}` must be the entire right-hand side of an assignment",
                                    name
                                ),
                            )
                        } else {
                            CheckError::scope(e.pos, format!("unknown function `{}`", name))
                        });
                    }
                };
                if !matches!(
                    ctx,
                    Ctx::Assertion | Ctx::Invariant | Ctx::Summary | Ctx::SpecBody
                ) {
                    return Err(CheckError::ty(
                        e.pos,
                        format!(
                            "spec function `{}` may only be used in assertions and annotations",
                            name
                        ),
                    ));
                }
                if args.len() != sf.params.len() {
                    return Err(CheckError::ty(
                        e.pos,
                        format!(
                            "`{}` takes {} arguments, got {}",
                            name,
                            sf.params.len(),
                            args.len()
                        ),
                    ));
                }
                for (a, (_, pty)) in args.iter().zip(&sf.params) {
                    let at = self.infer(a, ctx)?;
                    if at != *pty {
                        return Err(CheckError::ty(
                            a.pos,
                            format!("argument has type {}, expected {}", at, pty),
                        ));
                    }
                }
                Ok(sf.ret)
            }
            ExprKind::Ite(c, t, els) => {
                if self.infer(c, ctx)? != Type::Bool {
                    return Err(CheckError::ty(c.pos, "ite condition must be bool"));
                }
                let tt = self.infer(t, ctx)?;
                let et = self.infer(els, ctx)?;
                if tt != et {
                    return Err(CheckError::ty(e.pos, "ite branches disagree"));
                }
                Ok(tt)
            }
            ExprKind::Quantified(_, vars, body) => {
                if !matches!(ctx, Ctx::Invariant | Ctx::Summary) {
                    return Err(CheckError::ty(
                        e.pos,
                        "quantifiers are only allowed in annotations",
                    ));
                }
                self.scopes.push(vars.iter().cloned().collect());
                let bt = self.infer(body, ctx);
                self.scopes.pop();
                if bt? != Type::Bool {
                    return Err(CheckError::ty(body.pos, "quantified body must be bool"));
                }
                Ok(Type::Bool)
            }
        }
    }
}

fn always_returns(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::Assume(e) => e.is_false(),
        StmtKind::Block(stmts) => stmts.iter().any(always_returns),
        StmtKind::If {
            then_branch,
            else_branch,
            ..
        } => {
            always_returns(then_branch)
                && else_branch.as_ref().map(|e| always_returns(e)).unwrap_or(false)
        }
        _ => false,
    }
}

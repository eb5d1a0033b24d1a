//! AST for the mini imperative language and its annotation sublanguage.
//!
//! Programs, statements and expressions share one expression type with the
//! assertion language; the checker enforces the context rules (`nondet()`
//! only in executable positions, `old(x)` only in summary annotations,
//! quantifiers only in annotations).

use std::fmt;

/// Source position, 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// The three value sorts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    /// Total map from Int to Int, value semantics.
    ArrayInt,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => write!(f, "int"),
            Type::Bool => write!(f, "bool"),
            Type::ArrayInt => write!(f, "int[]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Implies,
}

impl BinOp {
    /// True for operators producing Bool from two Int operands.
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne
        )
    }

    pub fn is_arith(self) -> bool {
        matches!(
            self,
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }
}

/// Quantifier kind for annotation-level formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

/// Expression / term / formula node.
///
/// Equality is structural on the kind and ignores source positions, so
/// substitution with identity maps yields an equal tree.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Var(String),
    /// `old(x)`: the value of `x` at the designated earlier state.
    Old(String),
    /// `nondet()`: fresh unconstrained Int, executable positions only.
    Nondet,
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Array read `a[i]`.
    Select(Box<Expr>, Box<Expr>),
    /// Functional array update; not surface syntax, produced by encoding.
    Store(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Application of a spec function or (in restricted positions) a program function.
    Call(String, Vec<Expr>),
    /// If-then-else term; produced by encodings and solver models.
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Quantified formula; annotations and generated formulas only.
    Quantified(Quant, Vec<(String, Type)>, Box<Expr>),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    pub fn int(v: i64) -> Self {
        Expr::new(ExprKind::Int(v), Pos::default())
    }

    pub fn bool(v: bool) -> Self {
        Expr::new(ExprKind::Bool(v), Pos::default())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Var(name.into()), Pos::default())
    }

    pub fn old(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Old(name.into()), Pos::default())
    }

    pub fn unary(op: UnOp, e: Expr) -> Self {
        Expr::new(ExprKind::Unary(op, Box::new(e)), Pos::default())
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)), Pos::default())
    }

    pub fn not(e: Expr) -> Self {
        match &e.kind {
            ExprKind::Bool(b) => Expr::bool(!b),
            ExprKind::Unary(UnOp::Not, inner) => (**inner).clone(),
            _ => Expr::unary(UnOp::Not, e),
        }
    }

    pub fn and(l: Expr, r: Expr) -> Self {
        match (&l.kind, &r.kind) {
            (ExprKind::Bool(true), _) => r,
            (_, ExprKind::Bool(true)) => l,
            (ExprKind::Bool(false), _) | (_, ExprKind::Bool(false)) => Expr::bool(false),
            _ => Expr::binary(BinOp::And, l, r),
        }
    }

    pub fn or(l: Expr, r: Expr) -> Self {
        match (&l.kind, &r.kind) {
            (ExprKind::Bool(false), _) => r,
            (_, ExprKind::Bool(false)) => l,
            (ExprKind::Bool(true), _) | (_, ExprKind::Bool(true)) => Expr::bool(true),
            _ => Expr::binary(BinOp::Or, l, r),
        }
    }

    pub fn implies(l: Expr, r: Expr) -> Self {
        match (&l.kind, &r.kind) {
            (ExprKind::Bool(true), _) => r,
            (ExprKind::Bool(false), _) => Expr::bool(true),
            (_, ExprKind::Bool(true)) => Expr::bool(true),
            _ => Expr::binary(BinOp::Implies, l, r),
        }
    }

    pub fn eq(l: Expr, r: Expr) -> Self {
        Expr::binary(BinOp::Eq, l, r)
    }

    /// Conjunction of a sequence, `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Expr>) -> Self {
        parts
            .into_iter()
            .fold(Expr::bool(true), Expr::and)
    }

    pub fn is_true(&self) -> bool {
        matches!(self.kind, ExprKind::Bool(true))
    }

    pub fn is_false(&self) -> bool {
        matches!(self.kind, ExprKind::Bool(false))
    }

    /// Free plain variables, in first-occurrence order (skips `old`).
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.walk_free(&mut bound, &mut |name, is_old| {
            if !is_old && !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
        });
        out
    }

    /// Names occurring under `old(·)`, in first-occurrence order.
    pub fn old_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.walk_free(&mut bound, &mut |name, is_old| {
            if is_old && !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
        });
        out
    }

    fn walk_free(&self, bound: &mut Vec<String>, f: &mut impl FnMut(&str, bool)) {
        match &self.kind {
            ExprKind::Var(n) => {
                if !bound.iter().any(|b| b == n) {
                    f(n, false);
                }
            }
            ExprKind::Old(n) => f(n, true),
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Nondet => {}
            ExprKind::Unary(_, e) => e.walk_free(bound, f),
            ExprKind::Binary(_, l, r) => {
                l.walk_free(bound, f);
                r.walk_free(bound, f);
            }
            ExprKind::Select(a, i) => {
                a.walk_free(bound, f);
                i.walk_free(bound, f);
            }
            ExprKind::Store(a, i, v) => {
                a.walk_free(bound, f);
                i.walk_free(bound, f);
                v.walk_free(bound, f);
            }
            ExprKind::Call(_, args) => {
                for a in args {
                    a.walk_free(bound, f);
                }
            }
            ExprKind::Ite(c, t, e) => {
                c.walk_free(bound, f);
                t.walk_free(bound, f);
                e.walk_free(bound, f);
            }
            ExprKind::Quantified(_, vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().map(|(v, _)| v.clone()));
                body.walk_free(bound, f);
                bound.truncate(n);
            }
        }
    }

    /// True if `nondet()` occurs anywhere in the expression.
    pub fn has_nondet(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e.kind, ExprKind::Nondet) {
                found = true;
            }
        });
        found
    }

    /// True if `old(·)` occurs anywhere in the expression.
    pub fn has_old(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e.kind, ExprKind::Old(_)) {
                found = true;
            }
        });
        found
    }

    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Int(_)
            | ExprKind::Bool(_)
            | ExprKind::Var(_)
            | ExprKind::Old(_)
            | ExprKind::Nondet => {}
            ExprKind::Unary(_, e) => e.visit(f),
            ExprKind::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            ExprKind::Select(a, i) => {
                a.visit(f);
                i.visit(f);
            }
            ExprKind::Store(a, i, v) => {
                a.visit(f);
                i.visit(f);
                v.visit(f);
            }
            ExprKind::Call(_, args) => args.iter().for_each(|a| a.visit(f)),
            ExprKind::Ite(c, t, e) => {
                c.visit(f);
                t.visit(f);
                e.visit(f);
            }
            ExprKind::Quantified(_, _, body) => body.visit(f),
        }
    }
}

/// Loop annotation: optional invariant and optional summary.
///
/// `old(x)` may appear only in the summary, and only for `x` in the loop's
/// mod-set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoopAnnot {
    pub invariant: Option<Expr>,
    pub summary: Option<Expr>,
}

impl LoopAnnot {
    pub fn is_empty(&self) -> bool {
        self.invariant.is_none() && self.summary.is_none()
    }
}

/// Statement node.
#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    /// `type x = e;` — missing initializer havocs the variable.
    Decl {
        name: String,
        ty: Type,
        init: Option<Expr>,
    },
    /// `x = e;` or `a[i] = e;`
    Assign {
        target: String,
        index: Option<Expr>,
        value: Expr,
    },
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        annot: LoopAnnot,
        body: Box<Stmt>,
        /// Variables assigned anywhere in the body; filled in by `check`.
        mods: Vec<String>,
    },
    Break,
    Return(Option<Expr>),
    Assert(Expr),
    Assume(Expr),
    Block(Vec<Stmt>),
}

impl Stmt {
    pub fn new(kind: StmtKind, pos: Pos) -> Self {
        Stmt { kind, pos }
    }
}

/// Spec function: mathematical function defined by guarded equations.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFun {
    pub name: String,
    pub params: Vec<(String, Type)>,
    pub ret: Type,
    /// `case guard -> rhs;` pairs; guards are tried in order.
    pub cases: Vec<(Expr, Expr)>,
    pub pos: Pos,
}

/// Program function definition.
#[derive(Debug, Clone, PartialEq)]
pub struct FunDef {
    pub name: String,
    pub params: Vec<(String, Type)>,
    /// `None` is `void`.
    pub ret: Option<Type>,
    pub body: Stmt,
    /// Variables (params and locals) assigned in the body; filled in by `check`.
    pub mods: Vec<String>,
    pub pos: Pos,
}

/// A parsed program: spec functions plus function definitions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub spec_funs: Vec<SpecFun>,
    pub funs: Vec<FunDef>,
}

impl Program {
    pub fn fun(&self, name: &str) -> Option<&FunDef> {
        self.funs.iter().find(|f| f.name == name)
    }

    pub fn spec_fun(&self, name: &str) -> Option<&SpecFun> {
        self.spec_funs.iter().find(|f| f.name == name)
    }

    pub fn main(&self) -> Option<&FunDef> {
        self.fun("main")
    }
}

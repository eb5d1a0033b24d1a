//! Pretty printer. `parse(pretty(parse(s))) == parse(s)` on well-formed input.

use super::ast::*;
use std::fmt::Write;

pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for sf in &p.spec_funs {
        pretty_spec_fun(&mut out, sf);
        out.push('\n');
    }
    for f in &p.funs {
        pretty_fun(&mut out, f);
        out.push('\n');
    }
    out
}

fn pretty_spec_fun(out: &mut String, sf: &SpecFun) {
    let params = sf
        .params
        .iter()
        .map(|(n, t)| format!("{} {}", t, n))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(out, "spec {} {}({}) {{", sf.ret, sf.name, params);
    for (guard, rhs) in &sf.cases {
        let _ = writeln!(out, "  case {} -> {};", pretty_expr(guard), pretty_expr(rhs));
    }
    let _ = writeln!(out, "}}");
}

fn pretty_fun(out: &mut String, f: &FunDef) {
    let ret = match &f.ret {
        None => "void".to_string(),
        Some(t) => t.to_string(),
    };
    let params = f
        .params
        .iter()
        .map(|(n, t)| format!("{} {}", t, n))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = write!(out, "{} {}({}) ", ret, f.name, params);
    pretty_stmt(out, &f.body, 0);
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn pretty_stmt(out: &mut String, s: &Stmt, level: usize) {
    match &s.kind {
        StmtKind::Block(stmts) => {
            out.push_str("{\n");
            for st in stmts {
                indent(out, level + 1);
                pretty_stmt(out, st, level + 1);
            }
            indent(out, level);
            out.push_str("}\n");
        }
        StmtKind::Decl { name, ty, init } => match init {
            Some(e) => {
                let _ = writeln!(out, "{} {} = {};", ty, name, pretty_expr(e));
            }
            None => {
                let _ = writeln!(out, "{} {};", ty, name);
            }
        },
        StmtKind::Assign {
            target,
            index,
            value,
        } => match index {
            Some(i) => {
                let _ = writeln!(out, "{}[{}] = {};", target, pretty_expr(i), pretty_expr(value));
            }
            None => {
                let _ = writeln!(out, "{} = {};", target, pretty_expr(value));
            }
        },
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = write!(out, "if ({}) ", pretty_expr(cond));
            pretty_stmt(out, then_branch, level);
            if let Some(e) = else_branch {
                // the block printer already placed a newline; splice `else` after it
                out.truncate(out.trim_end_matches('\n').len());
                out.push_str(" else ");
                pretty_stmt(out, e, level);
            }
        }
        StmtKind::While {
            cond, annot, body, ..
        } => {
            let _ = writeln!(out, "while ({})", pretty_expr(cond));
            if let Some(inv) = &annot.invariant {
                indent(out, level + 1);
                let _ = writeln!(out, "invariant {};", pretty_expr(inv));
            }
            if let Some(sum) = &annot.summary {
                indent(out, level + 1);
                let _ = writeln!(out, "summary {};", pretty_expr(sum));
            }
            indent(out, level);
            pretty_stmt(out, body, level);
        }
        StmtKind::Break => out.push_str("break;\n"),
        StmtKind::Return(None) => out.push_str("return;\n"),
        StmtKind::Return(Some(e)) => {
            let _ = writeln!(out, "return {};", pretty_expr(e));
        }
        StmtKind::Assert(e) => {
            let _ = writeln!(out, "assert({});", pretty_expr(e));
        }
        StmtKind::Assume(e) => {
            let _ = writeln!(out, "assume({});", pretty_expr(e));
        }
    }
}

/// Render an expression with minimal parentheses.
pub fn pretty_expr(e: &Expr) -> String {
    render(e, 0)
}

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Implies => 1,
        BinOp::Or => 2,
        BinOp::And => 3,
        BinOp::Eq | BinOp::Ne => 4,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
        BinOp::Add | BinOp::Sub => 6,
        BinOp::Mul | BinOp::Div | BinOp::Mod => 7,
    }
}

fn op_str(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::Mod => "%",
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        BinOp::Eq => "==",
        BinOp::Ne => "!=",
        BinOp::And => "&&",
        BinOp::Or => "||",
        BinOp::Implies => "==>",
    }
}

fn render(e: &Expr, min_prec: u8) -> String {
    match &e.kind {
        ExprKind::Int(n) => n.to_string(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Var(n) => n.clone(),
        ExprKind::Old(n) => format!("old({})", n),
        ExprKind::Nondet => "nondet()".to_string(),
        ExprKind::Unary(UnOp::Not, inner) => format!("!{}", render(inner, 8)),
        ExprKind::Unary(UnOp::Neg, inner) => format!("-{}", render(inner, 8)),
        ExprKind::Binary(op, l, r) => {
            let p = prec(*op);
            // left associative except ==>, which is right associative
            let (lp, rp) = if *op == BinOp::Implies {
                (p + 1, p)
            } else {
                (p, p + 1)
            };
            let s = format!("{} {} {}", render(l, lp), op_str(*op), render(r, rp));
            if p < min_prec {
                format!("({})", s)
            } else {
                s
            }
        }
        ExprKind::Select(a, i) => format!("{}[{}]", render(a, 8), render(i, 0)),
        ExprKind::Store(a, i, v) => {
            format!("store({}, {}, {})", render(a, 0), render(i, 0), render(v, 0))
        }
        ExprKind::Call(name, args) => {
            let args = args.iter().map(|a| render(a, 0)).collect::<Vec<_>>().join(", ");
            format!("{}({})", name, args)
        }
        ExprKind::Ite(c, t, els) => format!(
            "ite({}, {}, {})",
            render(c, 0),
            render(t, 0),
            render(els, 0)
        ),
        ExprKind::Quantified(q, vars, body) => {
            let q = match q {
                Quant::Forall => "forall",
                Quant::Exists => "exists",
            };
            let vars = vars
                .iter()
                .map(|(n, t)| format!("{} {}", t, n))
                .collect::<Vec<_>>()
                .join(", ");
            format!("({} {}. {})", q, vars, render(body, 0))
        }
    }
}

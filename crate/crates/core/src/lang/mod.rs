//! Surface syntax, AST and static checks for the mini imperative language.

pub mod ast;
pub mod check;
pub mod parser;
pub mod pretty;
pub mod token;

mod subst;

pub use ast::*;
pub use check::{check, mod_set, CheckError};
pub use parser::{parse, parse_expr, SyntaxError};
pub use pretty::{pretty_expr, pretty_program};
pub use subst::{subst_old, subst_vars, substitute, Subst, UnboundSubstitution};

#[cfg(test)]
mod tests {
    use super::*;

    const EUCLID: &str = r#"
spec int gcd(int x, int y) {
  case x == y -> x;
  case x > y -> gcd(x - y, y);
  case x < y -> gcd(x, y - x);
}

int main() {
  int x0 = nondet();
  int y0 = nondet();
  assume(x0 > 0);
  assume(y0 > 0);
  int x = x0;
  int y = y0;
  while (x != y) {
    if (x > y) { x = x - y; } else { y = y - x; }
  }
  assert(x == gcd(x0, y0));
  return 0;
}
"#;

    fn count_stmts(s: &Stmt, pred: &impl Fn(&StmtKind) -> bool) -> usize {
        let mut n = if pred(&s.kind) { 1 } else { 0 };
        match &s.kind {
            StmtKind::Block(stmts) => n += stmts.iter().map(|s| count_stmts(s, pred)).sum::<usize>(),
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                n += count_stmts(then_branch, pred);
                if let Some(e) = else_branch {
                    n += count_stmts(e, pred);
                }
            }
            StmtKind::While { body, .. } => n += count_stmts(body, pred),
            _ => {}
        }
        n
    }

    #[test]
    fn parses_euclid() {
        let p = parse(EUCLID).unwrap();
        assert_eq!(p.funs.len(), 1);
        assert_eq!(p.spec_funs.len(), 1);
        let main = p.main().unwrap();
        assert_eq!(count_stmts(&main.body, &|k| matches!(k, StmtKind::While { .. })), 1);
        assert_eq!(count_stmts(&main.body, &|k| matches!(k, StmtKind::Assume(_))), 2);
        assert_eq!(count_stmts(&main.body, &|k| matches!(k, StmtKind::Assert(_))), 1);
    }

    #[test]
    fn parses_minimal_program() {
        let p = parse("int main() { return 0; }").unwrap();
        assert_eq!(p.funs.len(), 1);
        let body = match &p.funs[0].body.kind {
            StmtKind::Block(stmts) => stmts,
            _ => panic!("body must be a block"),
        };
        assert_eq!(body.len(), 1);
        check(p).unwrap();
    }

    #[test]
    fn break_outside_loop_rejected_at_check() {
        let p = parse("int main() { break; return 0; }").unwrap();
        let err = check(p).unwrap_err();
        assert!(matches!(err, CheckError::Scope { .. }), "{err}");
    }

    #[test]
    fn euclid_mod_set() {
        let p = check(parse(EUCLID).unwrap()).unwrap();
        let main = p.main().unwrap();
        let mut mods = Vec::new();
        fn find_while(s: &Stmt, out: &mut Vec<Vec<String>>) {
            match &s.kind {
                StmtKind::While { body, mods, .. } => {
                    out.push(mods.clone());
                    find_while(body, out);
                }
                StmtKind::Block(stmts) => stmts.iter().for_each(|s| find_while(s, out)),
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    find_while(then_branch, out);
                    if let Some(e) = else_branch {
                        find_while(e, out);
                    }
                }
                _ => {}
            }
        }
        find_while(&main.body, &mut mods);
        assert_eq!(mods, vec![vec!["x".to_string(), "y".to_string()]]);
    }

    #[test]
    fn empty_body_mod_set() {
        let p = parse("int main() { bool b = true; while (b) { } return 0; }").unwrap();
        let p = check(p).unwrap();
        let main = p.main().unwrap();
        let mut mods = vec![];
        if let StmtKind::Block(stmts) = &main.body.kind {
            for s in stmts {
                if let StmtKind::While { mods: m, .. } = &s.kind {
                    mods = m.clone();
                }
            }
        }
        assert!(mods.is_empty());
    }

    #[test]
    fn nested_array_loop_mod_set() {
        let src = "int main() { int[] a; int[] b; int n = nondet(); int i = 0; \
                   while (i < n) { b[i] = a[i]; i = i + 1; } return 0; }";
        let p = check(parse(src).unwrap()).unwrap();
        let main = p.main().unwrap();
        if let StmtKind::Block(stmts) = &main.body.kind {
            let m = stmts.iter().find_map(|s| match &s.kind {
                StmtKind::While { mods, .. } => Some(mods.clone()),
                _ => None,
            });
            assert_eq!(m.unwrap(), vec!["b".to_string(), "i".to_string()]);
        }
    }

    #[test]
    fn assert_has_empty_mod_set() {
        let s = Stmt::new(StmtKind::Assert(Expr::bool(true)), Pos::default());
        assert!(mod_set(&s).is_empty());
    }

    #[test]
    fn old_outside_mod_set_rejected() {
        let src = "int main() { int n = 1; int i = 0; \
                   while (i < n) summary old(n) == n; { i = i + 1; } return 0; }";
        let err = check(parse(src).unwrap()).unwrap_err();
        assert!(matches!(err, CheckError::Annot { .. }), "{err}");
    }

    #[test]
    fn old_only_in_summary() {
        let src = "int main() { int i = 0; \
                   while (i < 1) invariant old(i) == i; { i = i + 1; } return 0; }";
        let err = check(parse(src).unwrap()).unwrap_err();
        assert!(matches!(err, CheckError::Annot { .. }), "{err}");
    }

    #[test]
    fn substitution_examples() {
        // x = gcd(old(x), old(y)) with old mapped to x0, y0
        let f = parse_expr("x == gcd(old(x), old(y))").unwrap();
        let old_sigma: Subst = [
            ("x".to_string(), Expr::var("x0")),
            ("y".to_string(), Expr::var("y0")),
        ]
        .into();
        let got = subst_old(&f, &old_sigma).unwrap();
        assert_eq!(got, parse_expr("x == gcd(x0, y0)").unwrap());

        // identity substitution is the identity
        let id: Subst = [("x".to_string(), Expr::var("x"))].into();
        assert_eq!(substitute(&f, &id, &Subst::new(), false).unwrap(), f);

        // disjoint roles: old(x) + x with sigma x->0, old x->1
        let g = parse_expr("old(x) + x").unwrap();
        let sigma: Subst = [("x".to_string(), Expr::int(0))].into();
        let old: Subst = [("x".to_string(), Expr::int(1))].into();
        let got = substitute(&g, &sigma, &old, true).unwrap();
        assert_eq!(got, parse_expr("1 + 0").unwrap());
    }

    #[test]
    fn strict_old_substitution_reports_missing_image() {
        let f = parse_expr("old(z) == 1").unwrap();
        let err = subst_old(&f, &Subst::new()).unwrap_err();
        assert_eq!(err.name, "z");
    }

    #[test]
    fn capture_avoiding_substitution() {
        use ExprKind::*;
        // (forall int k. k <= x)[x -> k] must rename the binder
        let body = Expr::binary(BinOp::Le, Expr::var("k"), Expr::var("x"));
        let f = Expr::new(
            Quantified(Quant::Forall, vec![("k".to_string(), Type::Int)], Box::new(body)),
            Pos::default(),
        );
        let sigma: Subst = [("x".to_string(), Expr::var("k"))].into();
        let got = subst_vars(&f, &sigma);
        match &got.kind {
            Quantified(_, vars, body) => {
                assert_ne!(vars[0].0, "k");
                let expect = Expr::binary(BinOp::Le, Expr::var(vars[0].0.clone()), Expr::var("k"));
                assert_eq!(**body, expect);
            }
            _ => panic!("expected quantifier"),
        }
    }

    #[test]
    fn check_is_idempotent() {
        let p = check(parse(EUCLID).unwrap()).unwrap();
        let p2 = check(p.clone()).unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse("int main() { int x = ; return 0; }").unwrap_err();
        assert_eq!(err.pos.line, 1);
        assert!(err.expected.contains("expression"));
    }

    #[test]
    fn nondet_rejected_in_annotations() {
        let src = "int main() { int i = 0; while (i < 1) invariant nondet() == 0; { i = i + 1; } return 0; }";
        assert!(check(parse(src).unwrap()).is_err());
    }
}

//! Recursive descent parser for `.imp` sources.

use super::ast::*;
use super::token::{lex, TokKind, Token};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("syntax error at {pos}: expected {expected}, found `{found}`")]
pub struct SyntaxError {
    pub pos: Pos,
    pub expected: String,
    pub found: String,
}

pub type ParseResult<T> = Result<T, SyntaxError>;

/// Parse a complete program.
pub fn parse(source: &str) -> ParseResult<Program> {
    let tokens = lex(source).map_err(|e| SyntaxError {
        pos: e.pos,
        expected: "valid token".into(),
        found: e.message,
    })?;
    Parser { tokens, pos: 0 }.program()
}

/// Parse a single expression (used by tests and the bridge CLI).
pub fn parse_expr(source: &str) -> ParseResult<Expr> {
    let tokens = lex(source).map_err(|e| SyntaxError {
        pos: e.pos,
        expected: "valid token".into(),
        found: e.message,
    })?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect(TokKind::Eof)?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &TokKind {
        &self.tokens[self.pos].kind
    }

    fn peek2(&self) -> &TokKind {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].kind
    }

    fn here(&self) -> Pos {
        self.tokens[self.pos].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokKind) -> ParseResult<Token> {
        if *self.peek() == kind {
            Ok(self.bump())
        } else {
            Err(self.err(&kind.to_string()))
        }
    }

    fn err(&self, expected: &str) -> SyntaxError {
        SyntaxError {
            pos: self.here(),
            expected: expected.to_string(),
            found: self.peek().to_string(),
        }
    }

    fn ident(&mut self) -> ParseResult<(String, Pos)> {
        let pos = self.here();
        match self.peek().clone() {
            TokKind::Ident(name) => {
                self.bump();
                Ok((name, pos))
            }
            _ => Err(self.err("identifier")),
        }
    }

    fn program(&mut self) -> ParseResult<Program> {
        let mut program = Program::default();
        while *self.peek() != TokKind::Eof {
            if *self.peek() == TokKind::KwSpec {
                program.spec_funs.push(self.spec_fun()?);
            } else {
                program.funs.push(self.fun_def()?);
            }
        }
        Ok(program)
    }

    fn ty(&mut self) -> ParseResult<Type> {
        match self.peek() {
            TokKind::KwInt => {
                self.bump();
                if self.eat(&TokKind::LBracket) {
                    self.expect(TokKind::RBracket)?;
                    Ok(Type::ArrayInt)
                } else {
                    Ok(Type::Int)
                }
            }
            TokKind::KwBool => {
                self.bump();
                Ok(Type::Bool)
            }
            _ => Err(self.err("type")),
        }
    }

    fn params(&mut self) -> ParseResult<Vec<(String, Type)>> {
        self.expect(TokKind::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != TokKind::RParen {
            loop {
                let ty = self.ty()?;
                let (name, _) = self.ident()?;
                params.push((name, ty));
                if !self.eat(&TokKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokKind::RParen)?;
        Ok(params)
    }

    fn spec_fun(&mut self) -> ParseResult<SpecFun> {
        let pos = self.here();
        self.expect(TokKind::KwSpec)?;
        let ret = self.ty()?;
        let (name, _) = self.ident()?;
        let params = self.params()?;
        self.expect(TokKind::LBrace)?;
        let mut cases = Vec::new();
        while !self.eat(&TokKind::RBrace) {
            self.expect(TokKind::KwCase)?;
            let guard = self.expr()?;
            self.expect(TokKind::Arrow)?;
            let rhs = self.expr()?;
            self.expect(TokKind::Semi)?;
            cases.push((guard, rhs));
        }
        if cases.is_empty() {
            return Err(self.err("at least one `case`"));
        }
        Ok(SpecFun {
            name,
            params,
            ret,
            cases,
            pos,
        })
    }

    fn fun_def(&mut self) -> ParseResult<FunDef> {
        let pos = self.here();
        let ret = if self.eat(&TokKind::KwVoid) {
            None
        } else {
            Some(self.ty()?)
        };
        let (name, _) = self.ident()?;
        let params = self.params()?;
        let body = self.block()?;
        Ok(FunDef {
            name,
            params,
            ret,
            body,
            mods: Vec::new(),
            pos,
        })
    }

    fn block(&mut self) -> ParseResult<Stmt> {
        let pos = self.here();
        self.expect(TokKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&TokKind::RBrace) {
            stmts.push(self.stmt()?);
        }
        Ok(Stmt::new(StmtKind::Block(stmts), pos))
    }

    fn stmt(&mut self) -> ParseResult<Stmt> {
        let pos = self.here();
        match self.peek().clone() {
            TokKind::KwInt | TokKind::KwBool => {
                let ty = self.ty()?;
                let (name, _) = self.ident()?;
                let init = if self.eat(&TokKind::Assign) {
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(TokKind::Semi)?;
                Ok(Stmt::new(StmtKind::Decl { name, ty, init }, pos))
            }
            TokKind::Ident(_) => {
                let (target, _) = self.ident()?;
                let index = if self.eat(&TokKind::LBracket) {
                    let e = self.expr()?;
                    self.expect(TokKind::RBracket)?;
                    Some(e)
                } else {
                    None
                };
                self.expect(TokKind::Assign)?;
                let value = self.expr()?;
                self.expect(TokKind::Semi)?;
                Ok(Stmt::new(
                    StmtKind::Assign {
                        target,
                        index,
                        value,
                    },
                    pos,
                ))
            }
            TokKind::KwIf => {
                self.bump();
                self.expect(TokKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokKind::RParen)?;
                let then_branch = Box::new(self.block()?);
                let else_branch = if self.eat(&TokKind::KwElse) {
                    Some(Box::new(self.block()?))
                } else {
                    None
                };
                Ok(Stmt::new(
                    StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    },
                    pos,
                ))
            }
            TokKind::KwWhile => {
                self.bump();
                self.expect(TokKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokKind::RParen)?;
                let mut annot = LoopAnnot::default();
                if self.eat(&TokKind::KwInvariant) {
                    annot.invariant = Some(self.expr()?);
                    self.expect(TokKind::Semi)?;
                }
                if self.eat(&TokKind::KwSummary) {
                    annot.summary = Some(self.expr()?);
                    self.expect(TokKind::Semi)?;
                }
                let body = Box::new(self.block()?);
                Ok(Stmt::new(
                    StmtKind::While {
                        cond,
                        annot,
                        body,
                        mods: Vec::new(),
                    },
                    pos,
                ))
            }
            TokKind::KwBreak => {
                self.bump();
                self.expect(TokKind::Semi)?;
                Ok(Stmt::new(StmtKind::Break, pos))
            }
            TokKind::KwReturn => {
                self.bump();
                let value = if *self.peek() == TokKind::Semi {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(TokKind::Semi)?;
                Ok(Stmt::new(StmtKind::Return(value), pos))
            }
            TokKind::KwAssert => {
                self.bump();
                self.expect(TokKind::LParen)?;
                let e = self.expr()?;
                self.expect(TokKind::RParen)?;
                self.expect(TokKind::Semi)?;
                Ok(Stmt::new(StmtKind::Assert(e), pos))
            }
            TokKind::KwAssume => {
                self.bump();
                self.expect(TokKind::LParen)?;
                let e = self.expr()?;
                self.expect(TokKind::RParen)?;
                self.expect(TokKind::Semi)?;
                Ok(Stmt::new(StmtKind::Assume(e), pos))
            }
            _ => Err(self.err("statement")),
        }
    }

    // Precedence climbing, lowest first: ==> || && (==,!=) (<,<=,>,>=) (+,-) (*,/,%) unary postfix.
    fn expr(&mut self) -> ParseResult<Expr> {
        self.implies_expr()
    }

    fn implies_expr(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        let lhs = self.or_expr()?;
        if self.eat(&TokKind::FatImplies) {
            // right associative
            let rhs = self.implies_expr()?;
            Ok(Expr::new(
                ExprKind::Binary(BinOp::Implies, Box::new(lhs), Box::new(rhs)),
                pos,
            ))
        } else {
            Ok(lhs)
        }
    }

    fn or_expr(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        let mut lhs = self.and_expr()?;
        while self.eat(&TokKind::OrOr) {
            let rhs = self.and_expr()?;
            lhs = Expr::new(ExprKind::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        let mut lhs = self.eq_expr()?;
        while self.eat(&TokKind::AndAnd) {
            let rhs = self.eq_expr()?;
            lhs = Expr::new(ExprKind::Binary(BinOp::And, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn eq_expr(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        let mut lhs = self.rel_expr()?;
        loop {
            let op = match self.peek() {
                TokKind::EqEq => BinOp::Eq,
                TokKind::Ne => BinOp::Ne,
                _ => break,
            };
            self.bump();
            let rhs = self.rel_expr()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn rel_expr(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        let mut lhs = self.add_expr()?;
        loop {
            let op = match self.peek() {
                TokKind::Lt => BinOp::Lt,
                TokKind::Le => BinOp::Le,
                TokKind::Gt => BinOp::Gt,
                TokKind::Ge => BinOp::Ge,
                _ => break,
            };
            self.bump();
            let rhs = self.add_expr()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn add_expr(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                TokKind::Plus => BinOp::Add,
                TokKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.mul_expr()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                TokKind::Star => BinOp::Mul,
                TokKind::Slash => BinOp::Div,
                TokKind::Percent => BinOp::Mod,
                _ => break,
            };
            self.bump();
            let rhs = self.unary_expr()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        match self.peek() {
            TokKind::Bang => {
                self.bump();
                let e = self.unary_expr()?;
                Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), pos))
            }
            TokKind::Minus => {
                self.bump();
                let e = self.unary_expr()?;
                Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(e)), pos))
            }
            _ => self.postfix_expr(),
        }
    }

    fn postfix_expr(&mut self) -> ParseResult<Expr> {
        let mut e = self.atom()?;
        loop {
            let pos = self.here();
            if *self.peek() == TokKind::LBracket {
                self.bump();
                let idx = self.expr()?;
                self.expect(TokKind::RBracket)?;
                e = Expr::new(ExprKind::Select(Box::new(e), Box::new(idx)), pos);
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn atom(&mut self) -> ParseResult<Expr> {
        let pos = self.here();
        match self.peek().clone() {
            TokKind::Int(n) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(n), pos))
            }
            TokKind::KwTrue => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(true), pos))
            }
            TokKind::KwFalse => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(false), pos))
            }
            TokKind::KwOld => {
                self.bump();
                self.expect(TokKind::LParen)?;
                let (name, _) = self.ident()?;
                self.expect(TokKind::RParen)?;
                Ok(Expr::new(ExprKind::Old(name), pos))
            }
            TokKind::KwNondet => {
                self.bump();
                self.expect(TokKind::LParen)?;
                self.expect(TokKind::RParen)?;
                Ok(Expr::new(ExprKind::Nondet, pos))
            }
            TokKind::Ident(name) => {
                if *self.peek2() == TokKind::LParen {
                    self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != TokKind::RParen {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat(&TokKind::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(TokKind::RParen)?;
                    Ok(Expr::new(ExprKind::Call(name, args), pos))
                } else {
                    self.bump();
                    Ok(Expr::new(ExprKind::Var(name), pos))
                }
            }
            TokKind::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokKind::RParen)?;
                Ok(e)
            }
            _ => Err(self.err("expression")),
        }
    }
}

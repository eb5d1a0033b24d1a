//! Hand-rolled lexer for `.imp` sources.

use super::ast::Pos;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    Int(i64),
    Ident(String),
    // keywords
    KwInt,
    KwBool,
    KwVoid,
    KwTrue,
    KwFalse,
    KwIf,
    KwElse,
    KwWhile,
    KwBreak,
    KwReturn,
    KwAssert,
    KwAssume,
    KwSpec,
    KwCase,
    KwInvariant,
    KwSummary,
    KwOld,
    KwNondet,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Arrow,   // ->
    Assign,  // =
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    FatImplies, // ==>
    Eof,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Int(n) => write!(f, "{}", n),
            TokKind::Ident(s) => write!(f, "{}", s),
            TokKind::KwInt => write!(f, "int"),
            TokKind::KwBool => write!(f, "bool"),
            TokKind::KwVoid => write!(f, "void"),
            TokKind::KwTrue => write!(f, "true"),
            TokKind::KwFalse => write!(f, "false"),
            TokKind::KwIf => write!(f, "if"),
            TokKind::KwElse => write!(f, "else"),
            TokKind::KwWhile => write!(f, "while"),
            TokKind::KwBreak => write!(f, "break"),
            TokKind::KwReturn => write!(f, "return"),
            TokKind::KwAssert => write!(f, "assert"),
            TokKind::KwAssume => write!(f, "assume"),
            TokKind::KwSpec => write!(f, "spec"),
            TokKind::KwCase => write!(f, "case"),
            TokKind::KwInvariant => write!(f, "invariant"),
            TokKind::KwSummary => write!(f, "summary"),
            TokKind::KwOld => write!(f, "old"),
            TokKind::KwNondet => write!(f, "nondet"),
            TokKind::LParen => write!(f, "("),
            TokKind::RParen => write!(f, ")"),
            TokKind::LBrace => write!(f, "{{"),
            TokKind::RBrace => write!(f, "}}"),
            TokKind::LBracket => write!(f, "["),
            TokKind::RBracket => write!(f, "]"),
            TokKind::Semi => write!(f, ";"),
            TokKind::Comma => write!(f, ","),
            TokKind::Arrow => write!(f, "->"),
            TokKind::Assign => write!(f, "="),
            TokKind::Plus => write!(f, "+"),
            TokKind::Minus => write!(f, "-"),
            TokKind::Star => write!(f, "*"),
            TokKind::Slash => write!(f, "/"),
            TokKind::Percent => write!(f, "%"),
            TokKind::Bang => write!(f, "!"),
            TokKind::Lt => write!(f, "<"),
            TokKind::Le => write!(f, "<="),
            TokKind::Gt => write!(f, ">"),
            TokKind::Ge => write!(f, ">="),
            TokKind::EqEq => write!(f, "=="),
            TokKind::Ne => write!(f, "!="),
            TokKind::AndAnd => write!(f, "&&"),
            TokKind::OrOr => write!(f, "||"),
            TokKind::FatImplies => write!(f, "==>"),
            TokKind::Eof => write!(f, "<eof>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

pub fn lex(source: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! push {
        ($kind:expr, $len:expr) => {{
            tokens.push(Token {
                kind: $kind,
                pos: Pos::new(line, col),
            });
            i += $len;
            col += $len as u32;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            '/' if next == Some('/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push!(TokKind::LParen, 1),
            ')' => push!(TokKind::RParen, 1),
            '{' => push!(TokKind::LBrace, 1),
            '}' => push!(TokKind::RBrace, 1),
            '[' => push!(TokKind::LBracket, 1),
            ']' => push!(TokKind::RBracket, 1),
            ';' => push!(TokKind::Semi, 1),
            ',' => push!(TokKind::Comma, 1),
            '+' => push!(TokKind::Plus, 1),
            '*' => push!(TokKind::Star, 1),
            '/' => push!(TokKind::Slash, 1),
            '%' => push!(TokKind::Percent, 1),
            '-' => {
                if next == Some('>') {
                    push!(TokKind::Arrow, 2)
                } else {
                    push!(TokKind::Minus, 1)
                }
            }
            '=' => {
                if next == Some('=') {
                    if chars.get(i + 2) == Some(&'>') {
                        push!(TokKind::FatImplies, 3)
                    } else {
                        push!(TokKind::EqEq, 2)
                    }
                } else {
                    push!(TokKind::Assign, 1)
                }
            }
            '!' => {
                if next == Some('=') {
                    push!(TokKind::Ne, 2)
                } else {
                    push!(TokKind::Bang, 1)
                }
            }
            '<' => {
                if next == Some('=') {
                    push!(TokKind::Le, 2)
                } else {
                    push!(TokKind::Lt, 1)
                }
            }
            '>' => {
                if next == Some('=') {
                    push!(TokKind::Ge, 2)
                } else {
                    push!(TokKind::Gt, 1)
                }
            }
            '&' => {
                if next == Some('&') {
                    push!(TokKind::AndAnd, 2)
                } else {
                    return Err(LexError {
                        pos: Pos::new(line, col),
                        message: "expected `&&`".into(),
                    });
                }
            }
            '|' => {
                if next == Some('|') {
                    push!(TokKind::OrOr, 2)
                } else {
                    return Err(LexError {
                        pos: Pos::new(line, col),
                        message: "expected `||`".into(),
                    });
                }
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value: i64 = text.parse().map_err(|_| LexError {
                    pos: Pos::new(line, col),
                    message: format!("integer literal out of range: {}", text),
                })?;
                tokens.push(Token {
                    kind: TokKind::Int(value),
                    pos: Pos::new(line, col),
                });
                col += (i - start) as u32;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let kind = match text.as_str() {
                    "int" => TokKind::KwInt,
                    "bool" => TokKind::KwBool,
                    "void" => TokKind::KwVoid,
                    "true" => TokKind::KwTrue,
                    "false" => TokKind::KwFalse,
                    "if" => TokKind::KwIf,
                    "else" => TokKind::KwElse,
                    "while" => TokKind::KwWhile,
                    "break" => TokKind::KwBreak,
                    "return" => TokKind::KwReturn,
                    "assert" => TokKind::KwAssert,
                    "assume" => TokKind::KwAssume,
                    "spec" => TokKind::KwSpec,
                    "case" => TokKind::KwCase,
                    "invariant" => TokKind::KwInvariant,
                    "summary" => TokKind::KwSummary,
                    "old" => TokKind::KwOld,
                    "nondet" => TokKind::KwNondet,
                    _ => TokKind::Ident(text),
                };
                tokens.push(Token {
                    kind,
                    pos: Pos::new(line, col),
                });
                col += (i - start) as u32;
            }
            other => {
                return Err(LexError {
                    pos: Pos::new(line, col),
                    message: format!("unexpected character `{}`", other),
                });
            }
        }
    }
    tokens.push(Token {
        kind: TokKind::Eof,
        pos: Pos::new(line, col),
    });
    Ok(tokens)
}

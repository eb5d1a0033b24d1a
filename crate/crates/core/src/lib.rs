//! Loop verification via constrained Horn clauses.
//!
//! The pipeline: parse and check a program ([`lang`]), translate it into a
//! clause system under one of three encodings ([`vcgen`]), serialize and
//! solve with external CHC backends ([`chc`]), and cross-check everything
//! against an executable finite-domain semantics ([`semantics`]). The
//! [`bridge`] module translates between the invariant and summary
//! disciplines; [`hoare`] discharges annotated loops with a syntactic proof
//! rule.

pub mod lang;

pub use lang::{check, parse, CheckError, Expr, Program, SyntaxError};

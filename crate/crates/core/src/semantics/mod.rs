//! Executable finite-domain semantics: the test oracle for the whole crate.
//!
//! States range over a small configurable [`Domain`]; loops get their exact
//! relational semantics by fixpoint iteration, and every proof-rule side
//! condition is decidable by enumeration.

mod checks;
mod rel;

pub use checks::{
    check_invariant, check_summary, holds_triple, i_star, r_star, strongest_invariant,
    ConditionReport, InvariantClass, InvariantReport, SummaryReport,
};
pub use rel::{compose, loop_rel, regular_restriction, step_rel};

use crate::lang::{BinOp, Expr, ExprKind, Program, Quant, Type, UnOp};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SemError {
    #[error("state budget exceeded: {states} states over budget {budget}")]
    BudgetExceeded { states: u128, budget: u128 },
    #[error("unsupported in finite semantics: {0}")]
    Unsupported(String),
}

/// A single runtime value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    /// Fixed-length array, indices `0..len`.
    Array(Vec<i64>),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

/// Finite value ranges for a fixed set of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    /// Variables of a state, in fixed order.
    pub vars: Vec<(String, Type)>,
    /// Inclusive range for Int variables and array elements.
    pub lo: i64,
    pub hi: i64,
    /// Array length; indices `0..array_len`.
    pub array_len: usize,
    /// Maximum number of states this domain may enumerate.
    pub budget: u128,
}

pub const DEFAULT_BUDGET: u128 = 1_000_000;

impl Domain {
    pub fn new(vars: Vec<(String, Type)>) -> Self {
        Domain {
            vars,
            lo: 0,
            hi: 2,
            array_len: 2,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_range(mut self, lo: i64, hi: i64) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn with_array_len(mut self, len: usize) -> Self {
        self.array_len = len;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    /// Convenience: Int variables only, default range.
    pub fn ints(names: &[&str]) -> Self {
        Domain::new(names.iter().map(|n| (n.to_string(), Type::Int)).collect())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn int_values(&self) -> impl Iterator<Item = i64> + '_ {
        self.lo..=self.hi
    }

    fn values_of(&self, ty: Type) -> Vec<Value> {
        match ty {
            Type::Int => self.int_values().map(Value::Int).collect(),
            Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Type::ArrayInt => {
                let mut out = vec![vec![]];
                for _ in 0..self.array_len {
                    let mut next = Vec::new();
                    for prefix in &out {
                        for v in self.int_values() {
                            let mut a = prefix.clone();
                            a.push(v);
                            next.push(a);
                        }
                    }
                    out = next;
                }
                out.into_iter().map(Value::Array).collect()
            }
        }
    }

    pub fn state_count(&self) -> u128 {
        let range = (self.hi - self.lo + 1) as u128;
        let mut count: u128 = 1;
        for (_, ty) in &self.vars {
            let n = match ty {
                Type::Int => range,
                Type::Bool => 2,
                Type::ArrayInt => range.saturating_pow(self.array_len as u32),
            };
            count = count.saturating_mul(n);
        }
        count
    }

    fn check_budget(&self) -> Result<(), SemError> {
        let states = self.state_count();
        if states > self.budget {
            return Err(SemError::BudgetExceeded {
                states,
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// All states of the domain, in lexicographic order.
    pub fn states(&self) -> Result<Vec<State>, SemError> {
        self.check_budget()?;
        let mut states = vec![Vec::new()];
        for (_, ty) in &self.vars {
            let values = self.values_of(*ty);
            let mut next = Vec::with_capacity(states.len() * values.len());
            for s in &states {
                for v in &values {
                    let mut s2 = s.clone();
                    s2.push(v.clone());
                    next.push(s2);
                }
            }
            states = next;
        }
        Ok(states.into_iter().map(State).collect())
    }

    pub fn contains_value(&self, v: &Value) -> bool {
        match v {
            Value::Int(n) => *n >= self.lo && *n <= self.hi,
            Value::Bool(_) => true,
            Value::Array(a) => {
                a.len() == self.array_len && a.iter().all(|n| *n >= self.lo && *n <= self.hi)
            }
        }
    }
}

/// A state: one value per domain variable, in domain order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub Vec<Value>);

impl State {
    pub fn get(&self, dom: &Domain, name: &str) -> Option<&Value> {
        dom.var_index(name).map(|i| &self.0[i])
    }

    pub fn set(&self, dom: &Domain, name: &str, v: Value) -> State {
        let mut s = self.clone();
        let i = dom.var_index(name).expect("variable in domain");
        s.0[i] = v;
        s
    }
}

/// Loop-body outcome: regular completion, runtime error, or early exit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Regular(State),
    Error,
    Broke(State),
}

/// Transition relation of a command over a domain.
pub type Rel = BTreeSet<(State, Outcome)>;

/// Semantic predicate: a set of states.
pub type PredSem = BTreeSet<State>;

/// Semantic relation between two states (origin, current/final).
pub type RelSem = BTreeSet<(State, State)>;

/// Expression evaluator with value-set semantics for `nondet()`.
pub struct Evaluator<'a> {
    pub program: &'a Program,
    pub dom: &'a Domain,
    /// Set when a division or modulo by zero was smoothed over.
    pub div_by_zero: bool,
    /// Recursion budget for spec-function unfolding.
    fuel: u32,
}

pub type ValueSet = BTreeSet<Value>;

impl<'a> Evaluator<'a> {
    pub fn new(program: &'a Program, dom: &'a Domain) -> Self {
        Evaluator {
            program,
            dom,
            div_by_zero: false,
            fuel: 100_000,
        }
    }

    /// Set of possible values of `e` in state `s`; a singleton unless
    /// `nondet()` occurs. An empty set means the evaluation is pruned
    /// (out-of-domain array access).
    pub fn eval(&mut self, e: &Expr, s: &State) -> Result<ValueSet, SemError> {
        let dom = self.dom;
        let env = |name: &str| s.get(dom, name).cloned();
        self.eval_env(e, &env, None)
    }

    /// Evaluate a two-state formula: `old(x)` reads from `s_old`.
    pub fn eval_two_state(
        &mut self,
        e: &Expr,
        s_old: &State,
        s: &State,
    ) -> Result<ValueSet, SemError> {
        let dom = self.dom;
        let env = |name: &str| s.get(dom, name).cloned();
        self.eval_env(e, &env, Some(&|name: &str| s_old.get(dom, name).cloned()))
    }

    /// True iff the (deterministic) formula evaluates to true.
    pub fn holds(&mut self, e: &Expr, s: &State) -> Result<bool, SemError> {
        Ok(self.eval(e, s)? == BTreeSet::from([Value::Bool(true)]))
    }

    pub fn holds_two_state(&mut self, e: &Expr, s_old: &State, s: &State) -> Result<bool, SemError> {
        Ok(self.eval_two_state(e, s_old, s)? == BTreeSet::from([Value::Bool(true)]))
    }

    fn eval_env(
        &mut self,
        e: &Expr,
        env: &dyn Fn(&str) -> Option<Value>,
        old_env: Option<&dyn Fn(&str) -> Option<Value>>,
    ) -> Result<ValueSet, SemError> {
        let singleton = |v: Value| BTreeSet::from([v]);
        match &e.kind {
            ExprKind::Int(n) => Ok(singleton(Value::Int(*n))),
            ExprKind::Bool(b) => Ok(singleton(Value::Bool(*b))),
            ExprKind::Var(n) => env(n)
                .map(singleton)
                .ok_or_else(|| SemError::Unsupported(format!("unbound variable `{}`", n))),
            ExprKind::Old(n) => match old_env {
                Some(old) => old(n)
                    .map(singleton)
                    .ok_or_else(|| SemError::Unsupported(format!("unbound `old({})`", n))),
                None => Err(SemError::Unsupported(format!(
                    "`old({})` outside a two-state formula",
                    n
                ))),
            },
            ExprKind::Nondet => Ok(self.dom.int_values().map(Value::Int).collect()),
            ExprKind::Unary(op, inner) => {
                let vs = self.eval_env(inner, env, old_env)?;
                let mut out = BTreeSet::new();
                for v in vs {
                    match (op, v) {
                        (UnOp::Neg, Value::Int(n)) => {
                            out.insert(Value::Int(-n));
                        }
                        (UnOp::Not, Value::Bool(b)) => {
                            out.insert(Value::Bool(!b));
                        }
                        _ => return Err(SemError::Unsupported("ill-typed unary".into())),
                    }
                }
                Ok(out)
            }
            ExprKind::Binary(op, l, r) => {
                // short-circuit so that guarded divisions do not flag
                if *op == BinOp::And || *op == BinOp::Or || *op == BinOp::Implies {
                    return self.eval_logic(*op, l, r, env, old_env);
                }
                let ls = self.eval_env(l, env, old_env)?;
                let rs = self.eval_env(r, env, old_env)?;
                let mut out = BTreeSet::new();
                for lv in &ls {
                    for rv in &rs {
                        for v in self.apply_bin(*op, lv, rv)? {
                            out.insert(v);
                        }
                    }
                }
                Ok(out)
            }
            ExprKind::Select(a, i) => {
                let arrs = self.eval_env(a, env, old_env)?;
                let idxs = self.eval_env(i, env, old_env)?;
                let mut out = BTreeSet::new();
                for arr in &arrs {
                    let arr = match arr {
                        Value::Array(a) => a,
                        _ => return Err(SemError::Unsupported("select on non-array".into())),
                    };
                    for idx in &idxs {
                        let idx = idx.as_int().unwrap_or(-1);
                        // out-of-range access prunes the evaluation
                        if idx >= 0 && (idx as usize) < arr.len() {
                            out.insert(Value::Int(arr[idx as usize]));
                        }
                    }
                }
                Ok(out)
            }
            ExprKind::Store(a, i, v) => {
                let arrs = self.eval_env(a, env, old_env)?;
                let idxs = self.eval_env(i, env, old_env)?;
                let vals = self.eval_env(v, env, old_env)?;
                let mut out = BTreeSet::new();
                for arr in &arrs {
                    let arr = match arr {
                        Value::Array(a) => a,
                        _ => return Err(SemError::Unsupported("store on non-array".into())),
                    };
                    for idx in &idxs {
                        let idx = idx.as_int().unwrap_or(-1);
                        if idx >= 0 && (idx as usize) < arr.len() {
                            for val in &vals {
                                let val = val.as_int().expect("int element");
                                let mut a2 = arr.clone();
                                a2[idx as usize] = val;
                                out.insert(Value::Array(a2));
                            }
                        }
                    }
                }
                Ok(out)
            }
            ExprKind::Call(name, args) => {
                let mut arg_sets = Vec::with_capacity(args.len());
                for a in args {
                    arg_sets.push(self.eval_env(a, env, old_env)?);
                }
                let mut out = BTreeSet::new();
                for combo in cartesian(&arg_sets) {
                    for v in self.eval_spec_call(name, &combo)? {
                        out.insert(v);
                    }
                }
                Ok(out)
            }
            ExprKind::Ite(c, t, els) => {
                let cs = self.eval_env(c, env, old_env)?;
                let mut out = BTreeSet::new();
                if cs.contains(&Value::Bool(true)) {
                    out.extend(self.eval_env(t, env, old_env)?);
                }
                if cs.contains(&Value::Bool(false)) {
                    out.extend(self.eval_env(els, env, old_env)?);
                }
                Ok(out)
            }
            ExprKind::Quantified(q, vars, body) => {
                // finite quantification over the domain
                let mut assignments: Vec<Vec<(String, Value)>> = vec![Vec::new()];
                for (n, t) in vars {
                    let values = self.dom.values_of(*t);
                    let mut next = Vec::new();
                    for a in &assignments {
                        for v in &values {
                            let mut a2 = a.clone();
                            a2.push((n.clone(), v.clone()));
                            next.push(a2);
                        }
                    }
                    assignments = next;
                }
                let mut result = *q == Quant::Forall;
                for a in assignments {
                    let inner_env = |name: &str| {
                        a.iter()
                            .rev()
                            .find(|(n, _)| n == name)
                            .map(|(_, v)| v.clone())
                            .or_else(|| env(name))
                    };
                    let vs = self.eval_env(body, &inner_env, old_env)?;
                    let holds = vs == BTreeSet::from([Value::Bool(true)]);
                    match q {
                        Quant::Forall if !holds => {
                            result = false;
                            break;
                        }
                        Quant::Exists if holds => {
                            result = true;
                            break;
                        }
                        _ => {}
                    }
                }
                Ok(BTreeSet::from([Value::Bool(result)]))
            }
        }
    }

    fn eval_logic(
        &mut self,
        op: BinOp,
        l: &Expr,
        r: &Expr,
        env: &dyn Fn(&str) -> Option<Value>,
        old_env: Option<&dyn Fn(&str) -> Option<Value>>,
    ) -> Result<ValueSet, SemError> {
        let ls = self.eval_env(l, env, old_env)?;
        let mut out = BTreeSet::new();
        for lv in &ls {
            let lb = lv
                .as_bool()
                .ok_or_else(|| SemError::Unsupported("ill-typed logic".into()))?;
            let short = match op {
                BinOp::And => !lb,
                BinOp::Or => lb,
                BinOp::Implies => !lb,
                _ => unreachable!(),
            };
            if short {
                out.insert(Value::Bool(op != BinOp::And));
            } else {
                for rv in self.eval_env(r, env, old_env)? {
                    out.insert(rv);
                }
            }
        }
        Ok(out)
    }

    fn apply_bin(&mut self, op: BinOp, l: &Value, r: &Value) -> Result<ValueSet, SemError> {
        use BinOp::*;
        let bad = || SemError::Unsupported("ill-typed binary".into());
        let one = |v: Value| Ok(BTreeSet::from([v]));
        match op {
            Add | Sub | Mul => {
                let (a, b) = (l.as_int().ok_or_else(bad)?, r.as_int().ok_or_else(bad)?);
                let v = match op {
                    Add => a.checked_add(b),
                    Sub => a.checked_sub(b),
                    Mul => a.checked_mul(b),
                    _ => unreachable!(),
                }
                .ok_or_else(|| SemError::Unsupported("integer overflow".into()))?;
                one(Value::Int(v))
            }
            Div | Mod => {
                let (a, b) = (l.as_int().ok_or_else(bad)?, r.as_int().ok_or_else(bad)?);
                if b == 0 {
                    // total semantics: unconstrained in-domain value
                    self.div_by_zero = true;
                    return Ok(self.dom.int_values().map(Value::Int).collect());
                }
                // Euclidean convention, matching the solver theory
                let (q, m) = (a.div_euclid(b), a.rem_euclid(b));
                one(Value::Int(if op == Div { q } else { m }))
            }
            Lt | Le | Gt | Ge => {
                let (a, b) = (l.as_int().ok_or_else(bad)?, r.as_int().ok_or_else(bad)?);
                let v = match op {
                    Lt => a < b,
                    Le => a <= b,
                    Gt => a > b,
                    Ge => a >= b,
                    _ => unreachable!(),
                };
                one(Value::Bool(v))
            }
            Eq => one(Value::Bool(l == r)),
            Ne => one(Value::Bool(l != r)),
            And | Or | Implies => unreachable!("handled by eval_logic"),
        }
    }

    /// Unfold the defining equations of a spec function; guards are tried
    /// in order. Outside every guard the result is an unconstrained
    /// in-domain value.
    fn eval_spec_call(&mut self, name: &str, args: &[Value]) -> Result<ValueSet, SemError> {
        if self.fuel == 0 {
            return Err(SemError::Unsupported(format!(
                "recursion budget exhausted unfolding `{}`",
                name
            )));
        }
        self.fuel -= 1;
        let sf = self
            .program
            .spec_fun(name)
            .ok_or_else(|| SemError::Unsupported(format!("unknown spec function `{}`", name)))?
            .clone();
        let binding: Vec<(String, Value)> = sf
            .params
            .iter()
            .map(|(n, _)| n.clone())
            .zip(args.iter().cloned())
            .collect();
        let env = move |n: &str| {
            binding
                .iter()
                .find(|(p, _)| p == n)
                .map(|(_, v)| v.clone())
        };
        for (guard, rhs) in &sf.cases {
            let g = self.eval_env(guard, &env, None)?;
            if g == BTreeSet::from([Value::Bool(true)]) {
                return self.eval_env(rhs, &env, None);
            }
        }
        Ok(self.dom.int_values().map(Value::Int).collect())
    }
}

fn cartesian(sets: &[ValueSet]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for s in sets {
        let mut next = Vec::with_capacity(out.len() * s.len());
        for prefix in &out {
            for v in s {
                let mut p2 = prefix.clone();
                p2.push(v.clone());
                next.push(p2);
            }
        }
        out = next;
    }
    out
}

/// States of the domain satisfying a (one-state) formula.
pub fn formula_states(
    f: &Expr,
    dom: &Domain,
    program: &Program,
) -> Result<PredSem, SemError> {
    let mut out = BTreeSet::new();
    let mut ev = Evaluator::new(program, dom);
    for s in dom.states()? {
        if ev.holds(f, &s)? {
            out.insert(s);
        }
    }
    Ok(out)
}

/// Pairs (s_old, s) of the domain satisfying a two-state formula.
pub fn formula_pairs(f: &Expr, dom: &Domain, program: &Program) -> Result<RelSem, SemError> {
    let mut out = BTreeSet::new();
    let mut ev = Evaluator::new(program, dom);
    let states = dom.states()?;
    let pairs = (states.len() as u128).saturating_mul(states.len() as u128);
    if pairs > dom.budget {
        return Err(SemError::BudgetExceeded {
            states: pairs,
            budget: dom.budget,
        });
    }
    for s_old in &states {
        for s in &states {
            if ev.holds_two_state(f, s_old, s)? {
                out.insert((s_old.clone(), s.clone()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, parse_expr};

    #[test]
    fn eval_subtraction() {
        let dom = Domain::ints(&["x", "y"]).with_range(0, 5);
        let prog = Program::default();
        let mut ev = Evaluator::new(&prog, &dom);
        let s = State(vec![Value::Int(5), Value::Int(3)]);
        let e = parse_expr("x - y").unwrap();
        assert_eq!(ev.eval(&e, &s).unwrap(), BTreeSet::from([Value::Int(2)]));
    }

    #[test]
    fn eval_nondet_is_full_range() {
        let dom = Domain::ints(&["x"]);
        let prog = Program::default();
        let mut ev = Evaluator::new(&prog, &dom);
        let s = State(vec![Value::Int(0)]);
        let e = parse_expr("nondet()").unwrap();
        let got = ev.eval(&e, &s).unwrap();
        let want: ValueSet = [0, 1, 2].into_iter().map(Value::Int).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn eval_gcd_by_unfolding() {
        let src = "spec int gcd(int x, int y) {\
            case x == y -> x;\
            case x > y -> gcd(x - y, y);\
            case x < y -> gcd(x, y - x);\
        } int main() { return 0; }";
        let prog = parse(src).unwrap();
        let dom = Domain::ints(&["x"]).with_range(0, 10);
        let mut ev = Evaluator::new(&prog, &dom);
        let s = State(vec![Value::Int(0)]);
        let e = parse_expr("gcd(4, 6)").unwrap();
        assert_eq!(ev.eval(&e, &s).unwrap(), BTreeSet::from([Value::Int(2)]));
    }

    #[test]
    fn div_by_zero_yields_unconstrained_value() {
        let dom = Domain::ints(&["x"]);
        let prog = Program::default();
        let mut ev = Evaluator::new(&prog, &dom);
        let s = State(vec![Value::Int(1)]);
        let e = parse_expr("x / 0").unwrap();
        let got = ev.eval(&e, &s).unwrap();
        assert_eq!(got.len(), 3);
        assert!(ev.div_by_zero);
    }

    #[test]
    fn state_count_budget() {
        let dom = Domain::ints(&["a", "b", "c"]).with_budget(10);
        assert!(matches!(dom.states(), Err(SemError::BudgetExceeded { .. })));
    }
}

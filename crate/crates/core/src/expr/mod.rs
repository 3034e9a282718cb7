//! Component-function expressions over coordinates `x1..xn`.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" exponent ] ;          (* right-associative *)
//! exponent= [ "-" ] integer | "(" [ "-" ] integer ")" | atom "^" exponent ;
//! atom    = number | "pi" | variable | func "(" expr ")" | "(" expr ")" ;
//! variable= "x" integer ;                    (* 1-based, <= dimension *)
//! func    = "sin" | "cos" | "exp" | "ln" | "sqrt" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! Precedence from tightest: `^`, unary minus, `*` `/`, `+` `-`. So `-x1^2`
//! is `-(x1^2)`. Exponents must be integers; use `sqrt`, `exp` and `ln` for
//! anything else.

mod parser;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use parser::parse_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// Zero-based variable index (`x1` is `Var(0)`).
    Var(usize),
    Neg(Expr),
    Bin(BinOp, Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

/// A shared expression tree. Subtrees may be shared (the symbolic builders
/// reuse nodes), which [`Expr::eval_many`] exploits.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Expr {
        Expr(Arc::new(Node::Const(c)))
    }

    pub fn var(index: usize) -> Expr {
        Expr(Arc::new(Node::Var(index)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn bin(op: BinOp, a: &Expr, b: &Expr) -> Expr {
        Expr(Arc::new(Node::Bin(op, a.clone(), b.clone())))
    }

    /// `a + b`, folding zero constants.
    pub fn add(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(p), Some(q)) => Expr::constant(p + q),
            (Some(p), _) if p == 0.0 => b.clone(),
            (_, Some(q)) if q == 0.0 => a.clone(),
            _ => Expr::bin(BinOp::Add, a, b),
        }
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(p), Some(q)) => Expr::constant(p - q),
            (_, Some(q)) if q == 0.0 => a.clone(),
            (Some(p), _) if p == 0.0 => Expr::neg(b),
            _ => Expr::bin(BinOp::Sub, a, b),
        }
    }

    /// `a * b`, folding zero and one constants.
    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(p), Some(q)) => Expr::constant(p * q),
            (Some(p), _) if p == 0.0 => Expr::constant(0.0),
            (_, Some(q)) if q == 0.0 => Expr::constant(0.0),
            (Some(p), _) if p == 1.0 => b.clone(),
            (_, Some(q)) if q == 1.0 => a.clone(),
            _ => Expr::bin(BinOp::Mul, a, b),
        }
    }

    pub fn div(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(p), Some(q)) if q != 0.0 => Expr::constant(p / q),
            (Some(p), _) if p == 0.0 => Expr::constant(0.0),
            (_, Some(q)) if q == 1.0 => a.clone(),
            _ => Expr::bin(BinOp::Div, a, b),
        }
    }

    pub fn neg(a: &Expr) -> Expr {
        match a.as_const() {
            Some(p) => Expr::constant(-p),
            None => Expr(Arc::new(Node::Neg(a.clone()))),
        }
    }

    pub fn powi(a: &Expr, n: i32) -> Expr {
        match (a.as_const(), n) {
            (_, 1) => a.clone(),
            (Some(p), _) => Expr::constant(p.powi(n)),
            _ => Expr(Arc::new(Node::Pow(a.clone(), n))),
        }
    }

    pub fn call(f: Func, a: &Expr) -> Expr {
        Expr(Arc::new(Node::Call(f, a.clone())))
    }

    pub fn sqrt(a: &Expr) -> Expr {
        Expr::call(Func::Sqrt, a)
    }

    pub fn ln(a: &Expr) -> Expr {
        Expr::call(Func::Ln, a)
    }

    pub fn scale(c: f64, a: &Expr) -> Expr {
        Expr::mul(&Expr::constant(c), a)
    }

    /// Sum of a list, `0` when empty.
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        terms
            .into_iter()
            .fold(Expr::constant(0.0), |acc, t| Expr::add(&acc, &t))
    }

    /// Largest variable index plus one (0 for closed expressions).
    pub fn arity(&self) -> usize {
        match self.node() {
            Node::Const(_) => 0,
            Node::Var(i) => i + 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.arity(),
            Node::Bin(_, a, b) => a.arity().max(b.arity()),
        }
    }

    /// Zero-based indices of the variables that occur.
    pub fn free_vars(&self) -> Vec<usize> {
        fn walk(e: &Expr, out: &mut Vec<usize>) {
            match e.node() {
                Node::Const(_) => {}
                Node::Var(i) => {
                    if !out.contains(i) {
                        out.push(*i);
                    }
                }
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => walk(a, out),
                Node::Bin(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out
    }

    /// Evaluates over `env`, which must cover every variable.
    pub fn eval<S: Scalar>(&self, env: &[S]) -> Result<S> {
        let mut memo = HashMap::new();
        self.eval_memo(env, &mut memo)
    }

    /// Evaluates several expressions, sharing work across common subtrees.
    pub fn eval_many<S: Scalar>(exprs: &[&Expr], env: &[S]) -> Result<Vec<S>> {
        let mut memo = HashMap::new();
        exprs.iter().map(|e| e.eval_memo(env, &mut memo)).collect()
    }

    fn eval_memo<S: Scalar>(&self, env: &[S], memo: &mut HashMap<*const Node, S>) -> Result<S> {
        let key = Arc::as_ptr(&self.0);
        let shared = Arc::strong_count(&self.0) > 1;
        if shared {
            if let Some(v) = memo.get(&key) {
                return Ok(v.clone());
            }
        }
        if env.is_empty() {
            return Err(Error::Arity {
                expected: self.arity().max(1),
                got: 0,
            });
        }
        let v = match self.node() {
            Node::Const(c) => env[0].constant_like(*c),
            Node::Var(i) => env.get(*i).cloned().ok_or(Error::Arity {
                expected: self.arity(),
                got: env.len(),
            })?,
            Node::Neg(a) => -a.eval_memo(env, memo)?,
            Node::Bin(op, a, b) => {
                let p = a.eval_memo(env, memo)?;
                let q = b.eval_memo(env, memo)?;
                match op {
                    BinOp::Add => p + q,
                    BinOp::Sub => p - q,
                    BinOp::Mul => p * q,
                    BinOp::Div => {
                        if q.value() == 0.0 || !q.value().is_finite() {
                            return Err(self.domain("division by zero"));
                        }
                        p / q
                    }
                }
            }
            Node::Pow(a, n) => {
                let p = a.eval_memo(env, memo)?;
                if *n < 0 && p.value() == 0.0 {
                    return Err(self.domain("negative power of zero"));
                }
                p.powi(*n)
            }
            Node::Call(f, a) => {
                let p = a.eval_memo(env, memo)?;
                match f {
                    Func::Sin => p.sin(),
                    Func::Cos => p.cos(),
                    Func::Exp => p.exp(),
                    Func::Ln => {
                        if p.value() <= 0.0 || p.value().is_nan() {
                            return Err(self.domain("logarithm of a nonpositive value"));
                        }
                        p.ln()
                    }
                    Func::Sqrt => {
                        if p.value() <= 0.0 || p.value().is_nan() {
                            return Err(self.domain("square root of a nonpositive value"));
                        }
                        p.sqrt()
                    }
                }
            }
        };
        if shared {
            memo.insert(key, v.clone());
        }
        Ok(v)
    }

    fn domain(&self, reason: &'static str) -> Error {
        let mut node = self.to_string();
        if node.len() > 120 {
            node.truncate(117);
            node.push_str("...");
        }
        Error::Domain { node, reason }
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Node::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c < 0.0 {
        write!(f, "-")?;
    }
    // Debug gives the shortest representation that round-trips.
    write!(f, "{:?}", c.abs())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self.node() {
            Node::Const(c) => write_num(f, *c),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Neg(a) => {
                write!(f, "-")?;
                paren(f, a, 3)
            }
            Node::Bin(op, a, b) => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                paren(f, a, prec)?;
                write!(f, " {sym} ")?;
                // left-associative: a right operand of equal precedence needs parens
                paren(f, b, prec + 1)
            }
            Node::Pow(a, n) => {
                paren(f, a, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    #[test]
    fn eval_product() {
        let e = parse_expr("x1*x2", 2).unwrap();
        assert_eq!(e.eval(&[2.0, 3.0]).unwrap(), 6.0);
    }

    #[test]
    fn eval_sin_jet() {
        let e = parse_expr("sin(x1)", 1).unwrap();
        let v = e.eval(&[Jet::variable(1, 1, 0, 0.0)]).unwrap();
        assert_eq!(v.value(), 0.0);
        assert_eq!(v.d1(0), 1.0);
    }

    #[test]
    fn division_by_zero_names_node() {
        let e = parse_expr("1/x1", 1).unwrap();
        match e.eval(&[0.0]).unwrap_err() {
            Error::Domain { node, .. } => assert_eq!(node, "1.0 / x1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ln_and_sqrt_domain() {
        assert!(matches!(
            parse_expr("ln(x1)", 1).unwrap().eval(&[-1.0]),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            parse_expr("sqrt(x1 - 1)", 1).unwrap().eval(&[1.0]),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn printing_respects_precedence() {
        for src in [
            "-x1^2",
            "(x1 - x2) - x3",
            "x1 - (x2 - x3)",
            "x1 / (x2 * x3)",
            "(-x1)^2",
            "2^3^2",
        ] {
            let e = parse_expr(src, 3).unwrap();
            let back = parse_expr(&e.to_string(), 3).unwrap();
            let env = [0.3, -1.7, 2.9];
            assert_eq!(e.eval(&env).unwrap(), back.eval(&env).unwrap(), "{src} -> {e}");
        }
    }

    #[test]
    fn builders_fold_constants() {
        let x = Expr::var(0);
        assert_eq!(Expr::mul(&Expr::constant(1.0), &x), x);
        assert_eq!(Expr::add(&Expr::constant(0.0), &x), x);
        assert_eq!(Expr::mul(&Expr::constant(0.0), &x).as_const(), Some(0.0));
        assert_eq!(Expr::scale(-2.0, &Expr::constant(3.0)).to_string(), "-6.0");
    }

    #[test]
    fn shared_subtrees_eval_once_and_agree() {
        let x = Expr::var(0);
        let s = Expr::sqrt(&Expr::add(&Expr::powi(&x, 2), &Expr::constant(1.0)));
        let a = Expr::mul(&s, &s);
        let b = Expr::div(&x, &s);
        let vals = Expr::eval_many(&[&a, &b], &[2.0]).unwrap();
        assert!((vals[0] - 5.0).abs() < 1e-14);
        assert!((vals[1] - 2.0 / 5f64.sqrt()).abs() < 1e-15);
    }
}

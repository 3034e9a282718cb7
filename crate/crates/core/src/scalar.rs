//! Numeric kinds that expressions and metrics can be evaluated over.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A ring-like value with the elementary functions the expression DSL needs.
///
/// Implemented by `f64` and by [`Jet`](crate::jet::Jet). Elementary functions
/// do not check their domain; [`Expr::eval`](crate::expr::Expr::eval) does.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant carrying the same shape as `self` (jet layout, for jets).
    fn constant_like(&self, c: f64) -> Self;
    /// The base-point value.
    fn value(&self) -> f64;
    fn scale(&self, c: f64) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, n: i32) -> Self;

    fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

/// Sum of `a[i] * b[i]`.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = a[0].zero_like();
    for (p, q) in a.iter().zip(b) {
        acc = acc + p.clone() * q.clone();
    }
    acc
}

/// Quadratic form `y^T m y` over a row-major square matrix.
pub fn quad<S: Scalar>(m: &[Vec<S>], y: &[S]) -> S {
    let mut acc = y[0].zero_like();
    for (i, row) in m.iter().enumerate() {
        for (j, mij) in row.iter().enumerate() {
            acc = acc + mij.clone() * y[i].clone() * y[j].clone();
        }
    }
    acc
}

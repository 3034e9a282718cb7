//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] in `m` variables of order `K` stores the Taylor coefficients of
//! every monomial of total degree `<= K`. Coefficients are laid out by degree
//! and then lexicographically, so the coefficients of a lower-order jet are a
//! prefix of any higher-order jet over the same variables. Layouts are built
//! once per `(m, K)` and shared.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_ORDER: usize = 4;

/// Exponent per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(exponents: Vec<u8>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    /// Unit index `e_var`.
    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        MultiIndex(e)
    }

    /// Index with one count per listed variable; `[0, 0, 2]` is `d^3/dv0^2 dv2`.
    pub fn from_vars(nvars: usize, vars: &[usize]) -> Self {
        let mut e = vec![0u8; nvars];
        for &v in vars {
            e[v] += 1;
        }
        MultiIndex(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// `prod(e_v!)`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&e| (1..=e as u32).product::<u32>() as f64).product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Index tables for one `(nvars, order)` pair.
pub struct JetLayout {
    nvars: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// `(i, j, k)` with `indices[i] + indices[j] == indices[k]`.
    mul_table: Vec<(u32, u32, u32)>,
    /// Per variable: `(source, target, factor)` mapping into the order-1 layout.
    deriv_maps: Vec<Vec<(u32, u32, f64)>>,
}

impl fmt::Debug for JetLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetLayout(m={}, K={})", self.nvars, self.order)
    }
}

fn enumerate_indices(nvars: usize, order: usize) -> Vec<MultiIndex> {
    fn rec(nvars: usize, var: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
        if var == nvars - 1 {
            cur[var] = left as u8;
            out.push(MultiIndex(cur.clone()));
            cur[var] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[var] = e as u8;
            rec(nvars, var + 1, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u8; nvars];
    for deg in 0..=order {
        rec(nvars, 0, deg, &mut cur, &mut out);
    }
    out
}

/// Number of monomials of degree `<= order` in `nvars` variables.
pub fn jet_len(nvars: usize, order: usize) -> usize {
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 1..=order {
        num *= nvars + i;
        den *= i;
    }
    num / den
}

impl JetLayout {
    fn build(nvars: usize, order: usize) -> Self {
        let indices = enumerate_indices(nvars, order);
        debug_assert_eq!(indices.len(), jet_len(nvars, order));
        let lookup: HashMap<MultiIndex, usize> = indices.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut mul_table = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if a.degree() + b.degree() > order {
                    continue;
                }
                let sum = MultiIndex(a.0.iter().zip(&b.0).map(|(p, q)| p + q).collect());
                mul_table.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }
        let mut deriv_maps = Vec::with_capacity(nvars);
        if order > 0 {
            let lower = enumerate_indices(nvars, order - 1);
            for v in 0..nvars {
                let mut map = Vec::with_capacity(lower.len());
                for (t, idx) in lower.iter().enumerate() {
                    let mut up = idx.clone();
                    up.0[v] += 1;
                    map.push((lookup[&up] as u32, t as u32, up.0[v] as f64));
                }
                deriv_maps.push(map);
            }
        }
        JetLayout {
            nvars,
            order,
            indices,
            lookup,
            mul_table,
            deriv_maps,
        }
    }

    pub fn get(nvars: usize, order: usize) -> Arc<JetLayout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetLayout>>>> = OnceLock::new();
        assert!(nvars >= 1, "jets need at least one variable");
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet layout cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetLayout::build(nvars, order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, idx: &MultiIndex) -> Option<usize> {
        self.lookup.get(idx).copied()
    }
}

/// Truncated Taylor polynomial around a base point.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.layout.nvars)
            .field("order", &self.layout.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(nvars: usize, order: usize, value: f64) -> Jet {
        let layout = JetLayout::get(nvars, order);
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Jet { layout, coeffs }
    }

    /// The coordinate function `v_var` with base value `value`.
    pub fn variable(nvars: usize, order: usize, var: usize, value: f64) -> Jet {
        let mut j = Jet::constant(nvars, order, value);
        if order > 0 {
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// Seeds one variable per entry of `point`.
    pub fn seed(point: &[f64], order: usize) -> Vec<Jet> {
        let m = point.len();
        point
            .iter()
            .enumerate()
            .map(|(v, &p)| Jet::variable(m, order, v, p))
            .collect()
    }

    pub fn from_coeffs(layout: Arc<JetLayout>, coeffs: Vec<f64>) -> Jet {
        assert_eq!(layout.len(), coeffs.len());
        Jet { layout, coeffs }
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    /// Taylor coefficients in layout order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Result<f64> {
        if idx.degree() > self.order() {
            return Err(Error::OrderOverflow {
                degree: idx.degree(),
                order: self.order(),
            });
        }
        Ok(self.coeffs[self.layout.lookup[idx]])
    }

    /// The partial derivative `d^idx` at the base point: `idx! * coefficient`.
    pub fn partial(&self, idx: &MultiIndex) -> Result<f64> {
        Ok(idx.factorial() * self.coeff(idx)?)
    }

    /// First partial derivative with respect to `var`.
    pub fn d1(&self, var: usize) -> f64 {
        self.coeffs[1 + var]
    }

    /// Second partial derivative with respect to `u` and `v`.
    pub fn d2(&self, u: usize, v: usize) -> f64 {
        let idx = MultiIndex::from_vars(self.nvars(), &[u, v]);
        self.partial(&idx).expect("jet order below 2")
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let layout = JetLayout::get(self.nvars(), order);
        let coeffs = self.coeffs[..layout.len()].to_vec();
        Jet { layout, coeffs }
    }

    /// The jet of `d/dv_var` of the represented function, one order lower.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order() > 0, "cannot differentiate an order-0 jet");
        let layout = JetLayout::get(self.nvars(), self.order() - 1);
        let mut coeffs = vec![0.0; layout.len()];
        for &(src, dst, factor) in &self.layout.deriv_maps[var] {
            coeffs[dst as usize] = factor * self.coeffs[src as usize];
        }
        Jet { layout, coeffs }
    }

    fn aligned<'a>(&'a self, other: &'a Jet) -> (std::borrow::Cow<'a, Jet>, std::borrow::Cow<'a, Jet>) {
        use std::borrow::Cow;
        assert_eq!(self.nvars(), other.nvars(), "jets over different variable sets");
        match self.order().cmp(&other.order()) {
            std::cmp::Ordering::Equal => (Cow::Borrowed(self), Cow::Borrowed(other)),
            std::cmp::Ordering::Less => (Cow::Borrowed(self), Cow::Owned(other.truncate(self.order()))),
            std::cmp::Ordering::Greater => (Cow::Owned(self.truncate(other.order())), Cow::Borrowed(other)),
        }
    }

    fn mul_ref(&self, other: &Jet) -> Jet {
        let (a, b) = self.aligned(other);
        let layout = a.layout.clone();
        let mut coeffs = vec![0.0; layout.len()];
        let (ac, bc) = (&a.coeffs, &b.coeffs);
        for &(i, j, k) in &layout.mul_table {
            let p = ac[i as usize];
            if p != 0.0 {
                coeffs[k as usize] += p * bc[j as usize];
            }
        }
        Jet { layout, coeffs }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let (a, b) = self.aligned(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&p, &q)| f(p, q)).collect();
        Jet {
            layout: a.layout.clone(),
            coeffs,
        }
    }

    /// `g(self)` for a univariate `g` given its derivatives `g^(k)(value)`, `k = 0..=K`.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let order = self.order();
        debug_assert!(derivs.len() > order);
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut fact = 1.0;
        for k in 1..=order {
            fact *= k as f64;
        }
        // Horner in h; h has no constant term so powers beyond K vanish.
        let mut acc = Jet::constant(self.nvars(), order, derivs[order] / fact);
        for k in (0..order).rev() {
            fact /= (k + 1) as f64;
            acc = acc.mul_ref(&h);
            acc.coeffs[0] += derivs[k] / fact;
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let a = self.coeffs[0];
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut c = 1.0 / a;
        for k in 0..=self.order() {
            d.push(c);
            c *= -((k + 1) as f64) / a;
        }
        self.compose(&d)
    }

    fn powf_derivs(a: f64, p: f64, order: usize) -> Vec<f64> {
        let mut d = Vec::with_capacity(order + 1);
        let mut coef = 1.0;
        for k in 0..=order {
            d.push(coef * a.powf(p - k as f64));
            coef *= p - k as f64;
        }
        d
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Jet) -> bool {
        self.nvars() == other.nvars() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.zip_with(b, |p, q| p + q));
binop!(Sub, sub, |a, b| a.zip_with(b, |p, q| p - q));
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a.mul_ref(&b.recip()));

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.coeffs.iter_mut().for_each(|c| *c = -*c);
        self
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -self.clone()
    }
}

impl Scalar for Jet {
    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(self.nvars(), self.order(), c)
    }

    fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn scale(&self, c: f64) -> Self {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    fn sin(&self) -> Self {
        let (s, c) = self.coeffs[0].sin_cos();
        let cycle = [s, c, -s, -c];
        let d: Vec<f64> = (0..=self.order()).map(|k| cycle[k % 4]).collect();
        self.compose(&d)
    }

    fn cos(&self) -> Self {
        let (s, c) = self.coeffs[0].sin_cos();
        let cycle = [c, -s, -c, s];
        let d: Vec<f64> = (0..=self.order()).map(|k| cycle[k % 4]).collect();
        self.compose(&d)
    }

    fn exp(&self) -> Self {
        let e = self.coeffs[0].exp();
        self.compose(&vec![e; self.order() + 1])
    }

    fn ln(&self) -> Self {
        let a = self.coeffs[0];
        let mut d = vec![a.ln()];
        // d^k/da^k ln a = (-1)^(k-1) (k-1)! / a^k
        let mut c = 1.0 / a;
        for k in 1..=self.order() {
            d.push(c);
            c *= -(k as f64) / a;
        }
        self.compose(&d)
    }

    fn sqrt(&self) -> Self {
        self.compose(&Jet::powf_derivs(self.coeffs[0], 0.5, self.order()))
    }

    fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = self.constant_like(1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes_and_prefix_property() {
        assert_eq!(jet_len(6, 4), 210);
        assert_eq!(JetLayout::get(8, 4).len(), 495);
        let hi = JetLayout::get(3, 4);
        let lo = JetLayout::get(3, 2);
        assert_eq!(&hi.indices()[..lo.len()], lo.indices());
    }

    #[test]
    fn partial_of_square() {
        let x = Jet::variable(1, 2, 0, 3.0);
        let sq = &x * &x;
        assert_eq!(sq.partial(&MultiIndex::new(vec![1])).unwrap(), 6.0);
        assert_eq!(sq.partial(&MultiIndex::new(vec![2])).unwrap(), 2.0);
    }

    #[test]
    fn partial_of_product_mixed() {
        let v = Jet::seed(&[0.7, -1.2], 3);
        let p = &v[0] * &v[1];
        assert_eq!(p.partial(&MultiIndex::new(vec![1, 1])).unwrap(), 1.0);
    }

    #[test]
    fn order_overflow() {
        let x = Jet::variable(1, 4, 0, 1.0);
        let err = x.partial(&MultiIndex::new(vec![5])).unwrap_err();
        assert_eq!(err, Error::OrderOverflow { degree: 5, order: 4 });
    }

    #[test]
    fn sin_at_zero() {
        let x = Jet::variable(1, 1, 0, 0.0);
        let s = x.sin();
        assert_eq!(s.value(), 0.0);
        assert_eq!(s.d1(0), 1.0);
    }

    #[test]
    fn derivative_lowers_order() {
        let v = Jet::seed(&[2.0, 5.0], 3);
        // f = x^3 y  ->  df/dx = 3 x^2 y
        let f = v[0].powi(3) * &v[1];
        let fx = f.derivative(0);
        assert_eq!(fx.order(), 2);
        assert!((fx.value() - 60.0).abs() < 1e-12);
        assert!((fx.d1(0) - 60.0).abs() < 1e-12); // 6 x y
        assert!((fx.d1(1) - 12.0).abs() < 1e-12); // 3 x^2
    }

    #[test]
    fn mixed_orders_truncate_to_lower() {
        let a = Jet::variable(2, 3, 0, 1.0);
        let b = Jet::variable(2, 1, 1, 2.0);
        let c = &a * &b;
        assert_eq!(c.order(), 1);
        assert_eq!(c.value(), 2.0);
    }

    #[test]
    fn transcendental_identities() {
        let x = Jet::seed(&[0.4, 1.3], 4);
        let u = &x[0] * &x[1] + x[1].clone();
        let one = u.sin().powi(2) + u.cos().powi(2);
        assert!((one.value() - 1.0).abs() < 1e-14);
        assert!(one.coeffs()[1..].iter().all(|c| c.abs() < 1e-12));
        let back = u.exp().ln() - u.clone();
        assert!(back.coeffs().iter().all(|c| c.abs() < 1e-12));
        let s = u.sqrt();
        let sq = &s * &s - u.clone();
        assert!(sq.coeffs().iter().all(|c| c.abs() < 1e-12));
        let r = u.powi(-2) * u.powi(2);
        assert!((r.value() - 1.0).abs() < 1e-14);
        assert!(r.coeffs()[1..].iter().all(|c| c.abs() < 1e-11));
    }
}

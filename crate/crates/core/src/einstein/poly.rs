//! Homogeneous polynomials in `y` with point-frozen coefficients.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{Mat, Tensor3};

/// Exponent vectors of all monomials of degree `d` in `n` variables, in
/// lexicographic order.
pub fn monomials(n: usize, d: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, d: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n - 1 {
            prefix.push(d as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u8);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `sum c_m y^m` over monomials of a fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoly {
    n: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl HomPoly {
    pub fn zero(n: usize, degree: usize) -> Self {
        HomPoly {
            n,
            degree,
            coeffs: vec![0.0; monomials(n, degree).len()],
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        HomPoly {
            n,
            degree: 0,
            coeffs: vec![c],
        }
    }

    fn from_terms(n: usize, degree: usize, terms: impl IntoIterator<Item = (Vec<u8>, f64)>) -> Self {
        let mons = monomials(n, degree);
        let index: HashMap<&Vec<u8>, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut coeffs = vec![0.0; mons.len()];
        for (m, c) in terms {
            coeffs[index[&m]] += c;
        }
        HomPoly { n, degree, coeffs }
    }

    fn exps(n: usize, idx: &[usize]) -> Vec<u8> {
        let mut e = vec![0u8; n];
        for &i in idx {
            e[i] += 1;
        }
        e
    }

    /// `v_i y^i`.
    pub fn linear(v: &[f64]) -> Self {
        let n = v.len();
        Self::from_terms(n, 1, (0..n).map(|i| (Self::exps(n, &[i]), v[i])))
    }

    /// `m_ij y^i y^j`.
    pub fn quadratic(m: &Mat) -> Self {
        let n = m.len();
        Self::from_terms(
            n,
            2,
            (0..n).flat_map(|i| (0..n).map(move |j| (Self::exps(n, &[i, j]), m[i][j]))),
        )
    }

    /// `t_ijk y^i y^j y^k`.
    pub fn cubic(t: &Tensor3) -> Self {
        let n = t.len();
        Self::from_terms(
            n,
            3,
            (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (Self::exps(n, &[i, j, k]), t[i][j][k])))),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        monomials(self.n, self.degree)
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| c * m.iter().zip(y).map(|(&e, v)| v.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        HomPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &HomPoly) -> Self {
        assert_eq!(
            (self.n, self.degree),
            (other.n, other.degree),
            "adding polynomials of different shape"
        );
        HomPoly {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &HomPoly) -> Self {
        assert_eq!(self.n, other.n);
        let (ma, mb) = (monomials(self.n, self.degree), monomials(self.n, other.degree));
        let terms = ma.iter().zip(&self.coeffs).flat_map(|(ea, ca)| {
            mb.iter()
                .zip(&other.coeffs)
                .map(move |(eb, cb)| (ea.iter().zip(eb).map(|(p, q)| p + q).collect::<Vec<u8>>(), ca * cb))
        });
        Self::from_terms(self.n, self.degree + other.degree, terms.collect::<Vec<_>>())
    }
}

/// Outcome of dividing a polynomial by `alpha^2 = a_ij y^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisibility {
    pub quotient: HomPoly,
    /// Coefficient norm of `p - quotient * alpha^2`.
    pub residual: f64,
    /// Coefficient norm of `p`.
    pub scale: f64,
}

impl Divisibility {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual <= tol * self.scale.max(1.0)
    }
}

/// Least-squares quotient of `p` by `alpha^2`.
pub fn poly_divisible_by_alpha2(p: &HomPoly, a: &Mat) -> Divisibility {
    let n = p.dim();
    let d = p.degree();
    assert!(d >= 2, "degree below 2 cannot carry a factor alpha^2");
    let alpha2 = HomPoly::quadratic(a);
    let basis = monomials(n, d - 2);
    let rows = p.coeffs().len();
    let mut m = DMatrix::zeros(rows, basis.len());
    for col in 0..basis.len() {
        let mut unit = HomPoly::zero(n, d - 2);
        unit.coeffs[col] = 1.0;
        for (row, v) in unit.mul(&alpha2).coeffs.iter().enumerate() {
            m[(row, col)] = *v;
        }
    }
    let rhs = DVector::from_column_slice(p.coeffs());
    let q = m
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .expect("SVD was computed with U and V");
    let resid = (&m * &q - &rhs).norm();
    Divisibility {
        quotient: HomPoly {
            n,
            degree: d - 2,
            coeffs: q.iter().copied().collect(),
        },
        residual: resid,
        scale: p.norm(),
    }
}

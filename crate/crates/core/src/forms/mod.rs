//! Kropina metrics `F = alpha^2 / beta` in both of their descriptions.
//!
//! The `(alpha, beta)` view is a Riemannian metric `a_ij` and a 1-form `b_i`
//! on the cone `beta > 0`. The navigation view is a Riemannian metric `h`
//! with a unit vector field `W`, and `F = h^2 / (2 W_0)`. For a positive
//! gauge function `b(x)` the two are linked by
//!
//! ```text
//! a_ij = (b^2 / 4) h_ij      b_i = (b^2 / 2) W_i      rho = ln(2 / b)
//! ```
//!
//! and every gauge yields the same `F`. Going from `(alpha, beta)` back to
//! navigation data the gauge is forced to `b = |beta|_alpha`.

mod closed;
mod invariants;
mod nav;

pub use closed::{hess_f_closed, kropina_ricci_closed, kropina_spray_closed, s_bh_closed, s_closed, s_dot_closed};
pub use invariants::{ab_invariants, conformal_residual, fit_eta, AbAt, AbInvariants, EtaFit};
pub use nav::{
    nav_quantities, nav_ricci_isotropic, nav_riemann_isotropic, nav_spray, rs_from_nav, NavQuantities, RsTriple,
};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::finsler::{Density, FinslerMetric, SublevelBox};
use crate::linalg;
use crate::riemann::{MetricRole, RiemannianMetric, VectorFieldW};
use crate::scalar::{dot, quad, Scalar};

/// `(det m, adj m)` with `adj m * m = det m * I`, built symbolically.
pub fn symbolic_adjugate(m: &[Vec<Expr>]) -> (Expr, Vec<Vec<Expr>>) {
    let n = m.len();
    if n == 1 {
        return (m[0][0].clone(), vec![vec![Expr::constant(1.0)]]);
    }
    let minor = |skip_r: usize, skip_c: usize| -> Vec<Vec<Expr>> {
        (0..n)
            .filter(|&r| r != skip_r)
            .map(|r| (0..n).filter(|&c| c != skip_c).map(|c| m[r][c].clone()).collect())
            .collect()
    };
    let cofactor = |r: usize, c: usize| {
        let d = symbolic_det(&minor(r, c));
        if (r + c) % 2 == 0 {
            d
        } else {
            Expr::neg(&d)
        }
    };
    let adj: Vec<Vec<Expr>> = (0..n).map(|i| (0..n).map(|j| cofactor(j, i)).collect()).collect();
    let det = Expr::sum((0..n).map(|j| Expr::mul(&m[0][j], &adj[j][0])));
    (det, adj)
}

fn symbolic_det(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        1 => m[0][0].clone(),
        2 => Expr::sub(&Expr::mul(&m[0][0], &m[1][1]), &Expr::mul(&m[0][1], &m[1][0])),
        _ => symbolic_adjugate(m).0,
    }
}

fn mat_vec_expr(m: &[Vec<Expr>], v: &[Expr]) -> Vec<Expr> {
    m.iter()
        .map(|row| Expr::sum(row.iter().zip(v).map(|(a, b)| Expr::mul(a, b))))
        .collect()
}

/// One Kropina metric in both views, plus the weight function `f`.
#[derive(Debug, Clone)]
pub struct KropinaSpace {
    dim: usize,
    a: RiemannianMetric,
    b: Vec<Expr>,
    h: RiemannianMetric,
    w: VectorFieldW,
    gauge: Expr,
    f: Expr,
}

impl KropinaSpace {
    /// From navigation data with gauge `b(x)`, by default the constant 2.
    pub fn from_nav(h: RiemannianMetric, w: VectorFieldW, gauge: Option<Expr>, f: Expr) -> Result<Self> {
        let n = h.dim();
        if w.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                got: w.dim(),
            });
        }
        let gauge = gauge.unwrap_or_else(|| Expr::constant(2.0));
        let b2 = Expr::mul(&gauge, &gauge);
        let quarter = Expr::scale(0.25, &b2);
        let half = Expr::scale(0.5, &b2);
        let w_low = mat_vec_expr(h.components(), w.components());
        let a = h
            .components()
            .iter()
            .map(|row| row.iter().map(|c| Expr::mul(&quarter, c)).collect())
            .collect();
        let b = w_low.iter().map(|c| Expr::mul(&half, c)).collect();
        Ok(KropinaSpace {
            dim: n,
            a: RiemannianMetric::new(a, MetricRole::Alpha)?,
            b,
            h: RiemannianMetric::new(h.components().to_vec(), MetricRole::H)?,
            w,
            gauge,
            f,
        })
    }

    /// From `(alpha, beta)`: `h = (4 / b^2) a`, `W = b^# / 2`.
    pub fn from_ab(a: RiemannianMetric, b: Vec<Expr>, f: Expr) -> Result<Self> {
        let n = a.dim();
        if b.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: b.len(),
            });
        }
        let (det, adj) = symbolic_adjugate(a.components());
        let b_up: Vec<Expr> = mat_vec_expr(&adj, &b).iter().map(|c| Expr::div(c, &det)).collect();
        let b2 = Expr::sum(b_up.iter().zip(&b).map(|(u, l)| Expr::mul(u, l)));
        let gauge = Expr::sqrt(&b2);
        let four_over = Expr::div(&Expr::constant(4.0), &b2);
        let h = a
            .components()
            .iter()
            .map(|row| row.iter().map(|c| Expr::mul(&four_over, c)).collect())
            .collect();
        let w = VectorFieldW::new(b_up.iter().map(|c| Expr::scale(0.5, c)).collect());
        Ok(KropinaSpace {
            dim: n,
            a: RiemannianMetric::new(a.components().to_vec(), MetricRole::Alpha)?,
            b,
            h: RiemannianMetric::new(h, MetricRole::H)?,
            w,
            gauge,
            f,
        })
    }

    /// The same metric re-expressed with another gauge.
    pub fn regauge(&self, gauge: Expr) -> Result<Self> {
        KropinaSpace::from_nav(self.h.clone(), self.w.clone(), Some(gauge), self.f.clone())
    }

    pub fn with_weight(&self, f: Expr) -> Self {
        KropinaSpace { f, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> &RiemannianMetric {
        &self.a
    }

    pub fn beta(&self) -> &[Expr] {
        &self.b
    }

    pub fn h(&self) -> &RiemannianMetric {
        &self.h
    }

    pub fn w(&self) -> &VectorFieldW {
        &self.w
    }

    pub fn gauge(&self) -> &Expr {
        &self.gauge
    }

    pub fn weight(&self) -> &Expr {
        &self.f
    }

    /// `F` through the `(alpha, beta)` view.
    pub fn ab_metric(&self) -> KropinaAb<'_> {
        KropinaAb { a: &self.a, b: &self.b }
    }

    /// `F` through the navigation view.
    pub fn nav_metric(&self) -> KropinaNav<'_> {
        KropinaNav { h: &self.h, w: &self.w }
    }

    /// Closed-form Busemann-Hausdorff density.
    pub fn bh_density(&self) -> Density {
        Density::KropinaBh {
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// `exp(-(n+1) f) sigma_BH`.
    pub fn weighted_density(&self) -> Density {
        self.bh_density().weighted(self.f.clone(), self.dim)
    }

    /// Gauge value `b(x)`; errors unless positive.
    pub fn gauge_at(&self, x: &[f64]) -> Result<f64> {
        let v = self.gauge.eval(x)?;
        if !(v > 0.0) {
            return Err(Error::NonPositiveGauge {
                value: v,
                x: x.to_vec(),
            });
        }
        Ok(v)
    }

    /// Pointwise consistency of the two views and the unit-norm condition.
    pub fn check_point(&self, x: &[f64], tol: f64) -> Result<()> {
        self.h.check_positive_definite(x)?;
        self.a.check_positive_definite(x)?;
        self.w.check_unit(&self.h, x, tol)?;
        let g = self.gauge_at(x)?;
        let a = self.a.values(x)?;
        let bl: Vec<f64> = self.b.iter().map(|e| e.eval(x)).collect::<Result<_>>()?;
        let b2 = linalg::quadf(&linalg::invert_f64(&a)?, &bl);
        if (b2.sqrt() - g).abs() > tol * g.max(1.0) {
            return Err(Error::Invalid(format!(
                "gauge {g} disagrees with |beta|_alpha = {} at {x:?}",
                b2.sqrt()
            )));
        }
        Ok(())
    }
}

/// `F = alpha^2 / beta` on `beta > 0`.
#[derive(Debug, Clone, Copy)]
pub struct KropinaAb<'a> {
    pub a: &'a RiemannianMetric,
    pub b: &'a [Expr],
}

impl KropinaAb<'_> {
    fn beta(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let refs: Vec<&Expr> = self.b.iter().collect();
        Ok(linalg::dotf(&Expr::eval_many(&refs, x)?, y))
    }
}

impl FinslerMetric for KropinaAb<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn energy<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        let refs: Vec<&Expr> = self.b.iter().collect();
        let beta = dot(&Expr::eval_many(&refs, x)?, y);
        let alpha2 = quad(&self.a.eval(x)?, y);
        Ok((alpha2 / beta).square())
    }

    fn in_domain(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        Ok(self.beta(x, y)? > 0.0)
    }

    /// The unit ball is the `alpha`-ball of radius `b/2` about `b^# / 2`.
    fn sublevel_box(&self, x: &[f64]) -> Result<SublevelBox> {
        let ainv = linalg::invert_f64(&self.a.values(x)?)?;
        let refs: Vec<&Expr> = self.b.iter().collect();
        let bl = Expr::eval_many(&refs, x)?;
        let b_up = linalg::mat_vec(&ainv, &bl);
        let b = linalg::dotf(&b_up, &bl).sqrt();
        if !(b > 0.0) {
            return Err(Error::DegenerateBeta(x.to_vec()));
        }
        Ok(SublevelBox {
            center: b_up.iter().map(|v| v / 2.0).collect(),
            half_widths: (0..bl.len()).map(|i| b / 2.0 * ainv[i][i].sqrt()).collect(),
        })
    }

    fn bh_closed_form(&self, x: &[f64]) -> Option<Result<f64>> {
        let d = Density::KropinaBh {
            a: self.a.clone(),
            b: self.b.to_vec(),
        };
        Some(d.value(x))
    }
}

/// `F = h^2 / (2 W_0)` on `W_0 > 0`.
#[derive(Debug, Clone, Copy)]
pub struct KropinaNav<'a> {
    pub h: &'a RiemannianMetric,
    pub w: &'a VectorFieldW,
}

impl FinslerMetric for KropinaNav<'_> {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn energy<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        let h = self.h.eval(x)?;
        let w = self.w.eval(x)?;
        let h2 = quad(&h, y);
        let hw: Vec<S> = h.iter().map(|row| dot(row, &w)).collect();
        let w0 = dot(&hw, y);
        Ok((h2 / w0.scale(2.0)).square())
    }

    fn in_domain(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        Ok(linalg::dotf(&self.w.lowered(self.h, x)?, y) > 0.0)
    }

    /// The unit ball is the `h`-unit ball about `W`.
    fn sublevel_box(&self, x: &[f64]) -> Result<SublevelBox> {
        let hinv = linalg::invert_f64(&self.h.values(x)?)?;
        Ok(SublevelBox {
            center: self.w.eval(x)?,
            half_widths: (0..hinv.len()).map(|i| hinv[i][i].sqrt()).collect(),
        })
    }

    fn bh_closed_form(&self, x: &[f64]) -> Option<Result<f64>> {
        Some(Density::Riemannian(self.h.clone()).value(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::finsler::bh_density;
    use crate::testutil::*;
    use rand::Rng;

    pub(crate) fn twisted_ab(n: usize) -> KropinaSpace {
        let mut r = rng(21);
        let a = random_metric(n, &mut r);
        let b = (0..n)
            .map(|i| {
                parse_expr(
                    &format!("{} + 0.2*sin(x{})", if i == 0 { 1.0 } else { 0.3 }, (i + 1) % n + 1),
                    n,
                )
                .unwrap()
            })
            .collect();
        KropinaSpace::from_ab(a, b, Expr::constant(0.0)).unwrap()
    }

    fn admissible(space: &KropinaSpace, x: &[f64], r: &mut impl Rng) -> Vec<f64> {
        loop {
            let y: Vec<f64> = (0..space.dim()).map(|_| r.random_range(-1.0..1.0)).collect();
            if space.ab_metric().in_domain(x, &y).unwrap() {
                return y;
            }
        }
    }

    #[test]
    fn symbolic_inverse_matches_numeric() {
        let mut r = rng(1);
        let g = random_metric(4, &mut r);
        let (det, adj) = symbolic_adjugate(g.components());
        let x = random_point(4, &mut r);
        let gv = g.values(&x).unwrap();
        let inv = linalg::invert_f64(&gv).unwrap();
        let d = det.eval(&x).unwrap();
        assert!((d - linalg::det(&gv)).abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                assert!((adj[i][j].eval(&x).unwrap() / d - inv[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn both_views_give_the_same_metric() {
        let space = twisted_ab(3);
        let mut r = rng(2);
        for _ in 0..50 {
            let x = random_point(3, &mut r);
            space.check_point(&x, 1e-10).unwrap();
            let y = admissible(&space, &x, &mut r);
            let f1 = space.ab_metric().norm(&x, &y).unwrap();
            let f2 = space.nav_metric().norm(&x, &y).unwrap();
            assert!((f1 - f2).abs() < 1e-10 * f1.max(1.0));
        }
    }

    #[test]
    fn round_trip_through_navigation_data() {
        let space = twisted_ab(3);
        let back = space.regauge(space.gauge().clone()).unwrap();
        let mut r = rng(3);
        for _ in 0..20 {
            let x = random_point(3, &mut r);
            let a0 = space.alpha().values(&x).unwrap();
            let a1 = back.alpha().values(&x).unwrap();
            for i in 0..3 {
                assert!((space.beta()[i].eval(&x).unwrap() - back.beta()[i].eval(&x).unwrap()).abs() < 1e-12);
                for j in 0..3 {
                    assert!((a0[i][j] - a1[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gauge_two_copies_navigation_data() {
        let (h, w) = hopf();
        let s = KropinaSpace::from_nav(h.clone(), w.clone(), None, Expr::constant(0.0)).unwrap();
        let x = [0.5, 0.1, 0.2];
        assert_eq!(s.alpha().values(&x).unwrap(), h.values(&x).unwrap());
        let wl = w.lowered(&h, &x).unwrap();
        for i in 0..3 {
            assert_eq!(s.beta()[i].eval(&x).unwrap(), 2.0 * wl[i]);
        }
        let s2 = s.regauge(parse_expr("1 + 0.1*x1", 3).unwrap()).unwrap();
        let y = [0.1, 0.7, 0.4];
        let f1 = s.ab_metric().norm(&x, &y).unwrap();
        let f2 = s2.ab_metric().norm(&x, &y).unwrap();
        assert!((f1 - f2).abs() < 1e-12);
        assert!(matches!(
            s.regauge(Expr::constant(-1.0)).unwrap().gauge_at(&x),
            Err(Error::NonPositiveGauge { .. })
        ));
    }

    #[test]
    fn non_unit_field_rejected() {
        let h = RiemannianMetric::euclidean(2, MetricRole::H);
        let w = VectorFieldW::new(vec![Expr::constant(2.0), Expr::constant(0.0)]);
        let s = KropinaSpace::from_nav(h, w, None, Expr::constant(0.0)).unwrap();
        assert!(matches!(s.check_point(&[0.0, 0.0], 1e-8), Err(Error::NotUnit { .. })));
    }

    #[test]
    fn bh_monte_carlo_confirms_closed_form() {
        let space = twisted_ab(3);
        let x = [0.2, -0.1, 0.4];
        let est = bh_density(&space.ab_metric(), &x, 100_000, 11).unwrap();
        let closed = est.closed_form.unwrap();
        assert!((est.sigma - closed).abs() < 3.0 * est.std_err, "{est:?}");
        let nav = bh_density(&space.nav_metric(), &x, 100_000, 11).unwrap();
        assert!((nav.closed_form.unwrap() - closed).abs() < 1e-12 * closed);
    }
}

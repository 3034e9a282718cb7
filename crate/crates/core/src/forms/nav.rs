//! Curvature of a Kropina metric from its navigation data `(h, W)`.

use super::KropinaSpace;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{self, Mat};
use crate::riemann::CovDerivPack;

/// Covariant data of `(h, W, f)` together with `rho = ln(2 / b)`.
#[derive(Debug, Clone)]
pub struct NavQuantities {
    pub pack: CovDerivPack,
    pub rho: f64,
    /// `rho_i`.
    pub rho_grad: Vec<f64>,
}

pub fn nav_quantities(space: &KropinaSpace, x: &[f64]) -> Result<NavQuantities> {
    let pack = CovDerivPack::new(space.h(), space.w(), space.weight(), x)?;
    let b = space.gauge_at(x)?;
    let gj = space.gauge().eval(&Jet::seed(x, 1))?;
    Ok(NavQuantities {
        pack,
        rho: (2.0 / b).ln(),
        rho_grad: (0..x.len()).map(|i| -gj.d1(i) / b).collect(),
    })
}

fn sum(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).sum()
}

struct Along {
    h2: f64,
    w0: f64,
    f: f64,
    r00: f64,
    s0: f64,
    s_up0: Vec<f64>,
}

fn along(q: &NavQuantities, y: &[f64]) -> Along {
    let p = &q.pack;
    let h2 = linalg::quadf(&p.h, y);
    let w0 = linalg::dotf(&p.w.w_down, y);
    Along {
        h2,
        w0,
        f: h2 / (2.0 * w0),
        r00: linalg::quadf(&p.w.r, y),
        s0: linalg::dotf(&p.w.s_vec, y),
        s_up0: linalg::mat_vec(&p.w.s_mixed, y),
    }
}

/// `G^i = G_h^i - F S^i_0 - (R_00 + 2 F S_0)(y^i - F W^i) / (2F)`.
pub fn nav_spray(q: &NavQuantities, y: &[f64]) -> Vec<f64> {
    let p = &q.pack;
    let n = y.len();
    let a = along(q, y);
    let c = (a.r00 + 2.0 * a.f * a.s0) / (2.0 * a.f);
    (0..n)
        .map(|i| {
            let gh = 0.5 * sum(n, |j| sum(n, |k| p.christoffel[i][j][k] * y[j] * y[k]));
            gh - a.f * a.s_up0[i] - c * (y[i] - a.f * p.w.w_up[i])
        })
        .collect()
}

/// `r_00`, `s^i_0`, `s_0` of `(alpha, beta)` expressed through `(h, W, rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RsTriple {
    pub r00: f64,
    pub s_up0: Vec<f64>,
    pub s0: f64,
}

pub fn rs_from_nav(q: &NavQuantities, y: &[f64]) -> RsTriple {
    let p = &q.pack;
    let a = along(q, y);
    let e = (-2.0 * q.rho).exp();
    let rho_up = linalg::mat_vec(&p.h_inv, &q.rho_grad);
    let rho0 = linalg::dotf(&q.rho_grad, y);
    let w_rho = linalg::dotf(&p.w.w_up, &q.rho_grad);
    RsTriple {
        r00: 2.0 * e * (a.r00 - w_rho * a.h2),
        s_up0: (0..y.len())
            .map(|i| 2.0 * (a.s_up0[i] + rho_up[i] * a.w0 - rho0 * p.w.w_up[i]))
            .collect(),
        s0: 4.0 * e * (a.s0 + w_rho * a.w0 - rho0),
    }
}

fn require_isotropic(q: &NavQuantities, tol: f64) -> Result<()> {
    let p = &q.pack;
    let scale = linalg::metric_norm2(&p.dw, &p.h_inv).max(1.0);
    let r = linalg::metric_norm2(&p.w.r, &p.h_inv);
    if r > tol * scale {
        return Err(Error::Hypothesis(format!("W is not Killing: |R_ij| = {r:.3e}")));
    }
    let s = linalg::metric_norm1(&p.w.s_vec, &p.h_inv);
    if s > tol * scale {
        return Err(Error::Hypothesis(format!("S_j does not vanish: |S_j| = {s:.3e}")));
    }
    Ok(())
}

/// Riemann curvature `R^i_k` when `W` is Killing with `S_j = 0`.
pub fn nav_riemann_isotropic(q: &NavQuantities, y: &[f64], tol: f64) -> Result<Mat> {
    require_isotropic(q, tol)?;
    let p = &q.pack;
    let c = &p.curvature;
    let sm = &p.w.s_mixed;
    let w = &p.w.w_up;
    let n = y.len();
    let a = along(q, y);
    let f = a.f;
    let y_low = linalg::mat_vec(&p.h, y);
    let mut out = linalg::zeros(n);
    for i in 0..n {
        let yyw = sum(n, |pp| sum(n, |m| sum(n, |qq| c[pp][i][m][qq] * y[pp] * y[qq] * w[m])));
        let s0s = sum(n, |m| a.s_up0[m] * sm[i][m]);
        for k in 0..n {
            let xi = y_low[k] - f * p.w.w_down[k];
            let yy = sum(n, |pp| sum(n, |qq| c[pp][i][k][qq] * y[pp] * y[qq]));
            let yw = sum(n, |pp| sum(n, |qq| c[pp][i][k][qq] * y[pp] * w[qq]));
            let kw = sum(n, |m| sum(n, |qq| c[k][i][m][qq] * y[m] * w[qq]));
            let ss = sum(n, |m| sm[m][k] * sm[i][m]);
            out[i][k] = yy - 2.0 * f * yw - xi / a.w0 * yyw + f * kw - f * f * ss + xi / a.w0 * f * s0s;
        }
    }
    Ok(out)
}

/// `Ric = Ric^h(y) - 2F Ric^h(y, W) - F^2 S^m_i S^i_m` when `W` is Killing
/// with `S_j = 0`.
pub fn nav_ricci_isotropic(q: &NavQuantities, y: &[f64], tol: f64) -> Result<f64> {
    require_isotropic(q, tol)?;
    let p = &q.pack;
    let n = y.len();
    let f = along(q, y).f;
    let sm = &p.w.s_mixed;
    let ss = sum(n, |i| sum(n, |m| sm[m][i] * sm[i][m]));
    Ok(linalg::quadf(&p.ricci, y) - 2.0 * f * linalg::bilinf(&p.ricci, y, &p.w.w_up) - f * f * ss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, Expr};
    use crate::fd::rel_diff;
    use crate::finsler::{ricci_generic, riemann_generic, spray_generic, FinslerMetric};
    use crate::forms::ab_invariants;
    use crate::riemann::VectorFieldW;
    use crate::testutil::*;
    use rand::Rng;

    fn unit_random(n: usize, seed: u64) -> KropinaSpace {
        let mut r = rng(seed);
        let h = random_metric(n, &mut r);
        let w = random_field(n, &mut r);
        // normalise W symbolically: W / |W|_h
        let comps = w.components();
        let norm2 = Expr::sum((0..n).flat_map(|i| {
            let c = comps.to_vec();
            let hc = h.components()[i].clone();
            (0..n).map(move |j| Expr::mul(&Expr::mul(&hc[j], &c[i]), &c[j]))
        }));
        let norm = Expr::sqrt(&norm2);
        let unit = VectorFieldW::new(comps.iter().map(|c| Expr::div(c, &norm)).collect());
        let gauge = parse_expr("1.7 + 0.2*sin(x1)", n).unwrap();
        KropinaSpace::from_nav(h, unit, Some(gauge), Expr::constant(0.0)).unwrap()
    }

    fn admissible(space: &KropinaSpace, r: &mut impl Rng, x: &[f64]) -> Vec<f64> {
        let m = space.nav_metric();
        loop {
            let y: Vec<f64> = (0..space.dim()).map(|_| r.random_range(-1.0..1.0)).collect();
            let wl = space.w().lowered(space.h(), x).unwrap();
            let w0 = linalg::dotf(&wl, &y) / space.h().norm(x, &y).unwrap();
            if m.in_domain(x, &y).unwrap() && w0 > 0.2 {
                return y;
            }
        }
    }

    #[test]
    fn spray_and_rs_match_ab_side() {
        for (n, seed) in [(2, 80), (3, 81)] {
            let space = unit_random(n, seed);
            let mut r = rng(seed);
            for _ in 0..10 {
                let x = random_point(n, &mut r);
                let y = admissible(&space, &mut r, &x);
                let q = nav_quantities(&space, &x).unwrap();
                let g = nav_spray(&q, &y);
                let generic = spray_generic(&space.nav_metric(), &x, &y).unwrap();
                let f = space.nav_metric().norm(&x, &y).unwrap();
                for i in 0..n {
                    assert!(rel_diff(g[i], generic[i], f * f) < 1e-10, "{g:?} {generic:?}");
                }
                let inv = ab_invariants(space.alpha(), space.beta(), space.weight(), &x).unwrap();
                let at = inv.at(&y);
                let rs = rs_from_nav(&q, &y);
                assert!(rel_diff(rs.r00, at.r00, f) < 1e-10);
                assert!(rel_diff(rs.s0, at.s0, f) < 1e-10);
                for i in 0..n {
                    assert!(rel_diff(rs.s_up0[i], at.s_up0[i], f) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn hopf_curvature_matches_generic() {
        let (h, w) = hopf();
        let space = KropinaSpace::from_nav(h, w, None, Expr::constant(0.0)).unwrap();
        let mut r = rng(90);
        for _ in 0..20 {
            let x = [
                r.random_range(0.3..1.2),
                r.random_range(-1.0..1.0),
                r.random_range(-1.0..1.0),
            ];
            let y = admissible(&space, &mut r, &x);
            let q = nav_quantities(&space, &x).unwrap();
            let m = space.nav_metric();
            let f = m.norm(&x, &y).unwrap();
            let closed = nav_riemann_isotropic(&q, &y, 1e-8).unwrap();
            let generic = riemann_generic(&m, &x, &y).unwrap();
            for i in 0..3 {
                for k in 0..3 {
                    assert!(
                        rel_diff(closed[i][k], generic[i][k], f * f) < 1e-8,
                        "{closed:?}\n{generic:?}"
                    );
                }
            }
            let ric = nav_ricci_isotropic(&q, &y, 1e-8).unwrap();
            assert!(rel_diff(ric, ricci_generic(&m, &x, &y).unwrap(), f * f) < 1e-8);
        }
    }

    #[test]
    fn isotropic_forms_refuse_non_killing_fields() {
        let space = unit_random(3, 91);
        let q = nav_quantities(&space, &[0.1, 0.2, 0.3]).unwrap();
        let y = [1.0, 0.0, 0.0];
        assert!(matches!(nav_ricci_isotropic(&q, &y, 1e-8), Err(Error::Hypothesis(_))));
        assert!(matches!(nav_riemann_isotropic(&q, &y, 1e-8), Err(Error::Hypothesis(_))));
    }
}

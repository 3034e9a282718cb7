use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fd::fd_partial_auto;
use crate::jet::{Jet, MultiIndex};
use crate::linalg::{self, Mat, Tensor3};
use crate::riemann::{ricci_from_curvature, RiemannianMetric};
use crate::scalar::Scalar;

/// Covariant data of `b_i` with respect to `alpha` at one point.
///
/// `r_ij` and `s_ij` are the symmetric and skew parts of `b_{i;j}`; vectors
/// carry one index contracted with `b^i` (`r_j = b^i r_ij`).
#[derive(Debug, Clone)]
pub struct AbInvariants {
    pub x: Vec<f64>,
    pub a: Mat,
    pub a_inv: Mat,
    pub christoffel: Tensor3,
    pub b_low: Vec<f64>,
    pub b_up: Vec<f64>,
    /// `|beta|_alpha^2`.
    pub b2: f64,
    pub r: Mat,
    pub s: Mat,
    /// `r^i_j`.
    pub r_mixed: Mat,
    /// `s^i_j`.
    pub s_mixed: Mat,
    pub r_vec: Vec<f64>,
    pub s_vec: Vec<f64>,
    pub r_up: Vec<f64>,
    pub s_up: Vec<f64>,
    /// `r = r_ij b^i b^j`.
    pub r_scalar: f64,
    /// `r_{ij;k}` as `[i][j][k]`.
    pub dr: Tensor3,
    pub ds: Tensor3,
    /// `r_{i;k}` as `[i][k]`.
    pub dr_vec: Mat,
    pub ds_vec: Mat,
    pub ricci: Mat,
    /// `r^k_k`.
    pub trace_r: f64,
    /// `s^k_{;k}`.
    pub div_s: f64,
    /// `s^k_{i;k}`.
    pub div_s_mixed: Vec<f64>,
    /// `s^k s_k`.
    pub s_sq: f64,
    /// `s^j_k s^k_j`.
    pub s_mixed_sq: f64,
    /// `r_i s^i`.
    pub r_dot_s: f64,
    /// `s^k_i r^i_k`.
    pub s_r_trace: f64,
    pub f_grad: Vec<f64>,
    /// Plain second partials of `f`.
    pub f_d2: Mat,
    /// Gradient of `tr_a(r) / n`, the would-be `eta_k`.
    pub eta_grad: Vec<f64>,
}

fn sum(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).sum()
}

fn contract_jets(m: &[Vec<Jet>], v: &[Jet]) -> Vec<Jet> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(p, q)| p * q)
                .reduce(|a, b| a + b)
                .expect("n >= 1")
        })
        .collect()
}

/// Computes [`AbInvariants`] for `alpha = a`, `beta = b` and weight `f`.
pub fn ab_invariants(a: &RiemannianMetric, b: &[Expr], f: &Expr, x: &[f64]) -> Result<AbInvariants> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.len(),
        });
    }
    let geo = a.geometry(x, 2)?;
    let refs: Vec<&Expr> = b.iter().collect();
    let bj = Expr::eval_many(&refs, &geo.coords)?;
    let b_up_j = geo.raise(&bj);
    let db = geo.cov_covector(&bj);
    let rj: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| (&db[i][j] + &db[j][i]).scale(0.5)).collect())
        .collect();
    let sj: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| (&db[i][j] - &db[j][i]).scale(0.5)).collect())
        .collect();
    let b_up_1: Vec<Jet> = b_up_j.iter().map(|v| v.truncate(1)).collect();
    let rt: Vec<Vec<Jet>> = (0..n).map(|j| (0..n).map(|i| rj[i][j].clone()).collect()).collect();
    let st: Vec<Vec<Jet>> = (0..n).map(|j| (0..n).map(|i| sj[i][j].clone()).collect()).collect();
    let r_vec_j = contract_jets(&rt, &b_up_1);
    let s_vec_j = contract_jets(&st, &b_up_1);
    let dr = geo
        .cov_two_form(&rj)
        .iter()
        .map(|m| linalg::values(m))
        .collect::<Tensor3>();
    let ds = geo
        .cov_two_form(&sj)
        .iter()
        .map(|m| linalg::values(m))
        .collect::<Tensor3>();
    let dr_vec = linalg::values(&geo.cov_covector(&r_vec_j));
    let ds_vec = linalg::values(&geo.cov_covector(&s_vec_j));
    let ginv1: Vec<Vec<Jet>> = geo
        .ginv
        .iter()
        .map(|row| row.iter().map(|v| v.truncate(1)).collect())
        .collect();
    let trace_j = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| &ginv1[i][j] * &rj[i][j])
        .reduce(|p, q| p + q)
        .expect("n >= 1");
    let eta_grad = (0..n).map(|k| trace_j.d1(k) / n as f64).collect();

    let a_m = geo.metric_values();
    let a_inv = geo.inverse_values();
    let b_low: Vec<f64> = bj.iter().map(Jet::value).collect();
    let b_up: Vec<f64> = b_up_j.iter().map(Jet::value).collect();
    let r = linalg::values(&rj);
    let s = linalg::values(&sj);
    let raise = |m: &Mat| -> Mat {
        (0..n)
            .map(|i| (0..n).map(|j| sum(n, |k| a_inv[i][k] * m[k][j])).collect())
            .collect()
    };
    let r_mixed = raise(&r);
    let s_mixed = raise(&s);
    let r_vec: Vec<f64> = r_vec_j.iter().map(Jet::value).collect();
    let s_vec: Vec<f64> = s_vec_j.iter().map(Jet::value).collect();
    let r_up = linalg::mat_vec(&a_inv, &r_vec);
    let s_up = linalg::mat_vec(&a_inv, &s_vec);
    let fj = f.eval(&geo.coords)?;
    let curvature = geo.curvature();
    Ok(AbInvariants {
        x: x.to_vec(),
        b2: linalg::dotf(&b_up, &b_low),
        r_scalar: linalg::dotf(&r_vec, &b_up),
        trace_r: sum(n, |k| r_mixed[k][k]),
        div_s: sum(n, |k| sum(n, |l| a_inv[k][l] * ds_vec[l][k])),
        div_s_mixed: (0..n)
            .map(|i| sum(n, |k| sum(n, |l| a_inv[k][l] * ds[l][i][k])))
            .collect(),
        s_sq: linalg::dotf(&s_up, &s_vec),
        s_mixed_sq: sum(n, |j| sum(n, |k| s_mixed[j][k] * s_mixed[k][j])),
        r_dot_s: linalg::dotf(&r_vec, &s_up),
        s_r_trace: sum(n, |k| sum(n, |i| s_mixed[k][i] * r_mixed[i][k])),
        f_grad: (0..n).map(|i| fj.d1(i)).collect(),
        f_d2: (0..n).map(|i| (0..n).map(|j| fj.d2(i, j)).collect()).collect(),
        ricci: ricci_from_curvature(&curvature),
        christoffel: geo.christoffel_values(),
        a: a_m,
        a_inv,
        b_low,
        b_up,
        r,
        s,
        r_mixed,
        s_mixed,
        r_vec,
        s_vec,
        r_up,
        s_up,
        dr,
        ds,
        dr_vec,
        ds_vec,
        eta_grad,
    })
}

/// Direction-dependent contractions of [`AbInvariants`] with `y`.
///
/// A subscript `0` means contraction with `y`: `r_00 = r_ij y^i y^j`,
/// `s^i_0 = s^i_j y^j`.
#[derive(Debug, Clone)]
pub struct AbAt {
    pub y: Vec<f64>,
    pub alpha2: f64,
    pub beta: f64,
    /// `F = alpha^2 / beta`.
    pub f: f64,
    pub r00: f64,
    pub r0: f64,
    pub s0: f64,
    pub s_up0: Vec<f64>,
    /// `r_i0`.
    pub r_i0: Vec<f64>,
    pub r00_0: f64,
    /// `r_{00;k} b^k`.
    pub r00_b: f64,
    pub r0_0: f64,
    pub s0_0: f64,
    /// `s_{0;k} b^k`.
    pub s0_b: f64,
    /// `s^k_{0;k}`.
    pub div_s0: f64,
    /// `s_k s^k_0`.
    pub s_s0: f64,
    /// `r_k s^k_0`.
    pub r_s0: f64,
    /// `r_0k s^k`.
    pub r0_s: f64,
    /// `r_0k s^k_0`.
    pub r0_s0: f64,
    /// `Ric^alpha(y)`.
    pub ricci00: f64,
    pub f0: f64,
    /// `f_{x^i x^j} y^i y^j`.
    pub f_yy: f64,
}

impl AbInvariants {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn at(&self, y: &[f64]) -> AbAt {
        let n = self.dim();
        let alpha2 = linalg::quadf(&self.a, y);
        let beta = linalg::dotf(&self.b_low, y);
        let s_up0 = linalg::mat_vec(&self.s_mixed, y);
        let r_i0 = linalg::mat_vec(&self.r, y);
        let tri = |t: &Tensor3, u: &[f64], v: &[f64], w: &[f64]| {
            sum(n, |i| sum(n, |j| sum(n, |k| t[i][j][k] * u[i] * v[j] * w[k])))
        };
        AbAt {
            alpha2,
            beta,
            f: alpha2 / beta,
            r00: linalg::dotf(&r_i0, y),
            r0: linalg::dotf(&self.r_vec, y),
            s0: linalg::dotf(&self.s_vec, y),
            r00_0: tri(&self.dr, y, y, y),
            r00_b: tri(&self.dr, y, y, &self.b_up),
            r0_0: linalg::quadf(&self.dr_vec, y),
            s0_0: linalg::quadf(&self.ds_vec, y),
            s0_b: linalg::bilinf(&self.ds_vec, y, &self.b_up),
            div_s0: linalg::dotf(&self.div_s_mixed, y),
            s_s0: linalg::dotf(&self.s_vec, &s_up0),
            r_s0: linalg::dotf(&self.r_vec, &s_up0),
            r0_s: linalg::dotf(&r_i0, &self.s_up),
            r0_s0: linalg::dotf(&r_i0, &s_up0),
            ricci00: linalg::quadf(&self.ricci, y),
            f0: linalg::dotf(&self.f_grad, y),
            f_yy: linalg::quadf(&self.f_d2, y),
            s_up0,
            r_i0,
            y: y.to_vec(),
        }
    }
}

/// Least-squares fit of `t = c * a` for a symmetric tensor `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaFit {
    pub eta: f64,
    pub residual: f64,
    /// Size of the fitted tensor, for relative thresholds.
    pub scale: f64,
}

impl EtaFit {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual <= tol * self.scale.max(1.0)
    }
}

/// Fits `r_00 = eta alpha^2` over the directions `e_i` and `e_i + e_j`.
pub fn fit_eta(inv: &AbInvariants) -> EtaFit {
    let n = inv.dim();
    let mut dirs = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e);
        for j in (i + 1)..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e[j] = 1.0;
            dirs.push(e);
        }
    }
    let pairs: Vec<(f64, f64)> = dirs
        .iter()
        .map(|y| (linalg::quadf(&inv.r, y), linalg::quadf(&inv.a, y)))
        .collect();
    let eta = pairs.iter().map(|(r, a)| r * a).sum::<f64>() / pairs.iter().map(|(_, a)| a * a).sum::<f64>();
    let residual = pairs.iter().map(|(r, a)| ((r - eta * a) / a).abs()).fold(0.0, f64::max);
    EtaFit {
        eta,
        residual,
        scale: linalg::metric_norm2(&inv.r, &inv.a_inv),
    }
}

/// Whether `b^#` is a conformal field of `alpha`, from finite differences of
/// the Lie derivative `L_{b^#} a = 2 c a`. Shares no code with the jets.
pub fn conformal_residual(a: &RiemannianMetric, b: &[Expr], x: &[f64]) -> Result<EtaFit> {
    let n = a.dim();
    let field = |p: &[f64], k: usize| -> Result<f64> {
        let am = a.values(p)?;
        let bl: Vec<f64> = b.iter().map(|e| e.eval(p)).collect::<Result<_>>()?;
        Ok(linalg::mat_vec(&linalg::invert_f64(&am)?, &bl)[k])
    };
    let am = a.values(x)?;
    let v: Vec<f64> = (0..n).map(|k| field(x, k)).collect::<Result<_>>()?;
    let mut dv = linalg::zeros(n);
    let mut da = vec![linalg::zeros(n); n];
    for k in 0..n {
        let idx = MultiIndex::unit(n, k);
        for i in 0..n {
            dv[i][k] = fd_partial_auto(|p| field(p, i), x, &idx)?;
            for j in i..n {
                let d = fd_partial_auto(|p| a.components()[i][j].eval(p), x, &idx)?;
                da[k][i][j] = d;
                da[k][j][i] = d;
            }
        }
    }
    // dv[k][i] = d_i V^k
    let lie: Mat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| sum(n, |k| v[k] * da[k][i][j] + am[k][j] * dv[k][i] + am[i][k] * dv[k][j]))
                .collect()
        })
        .collect();
    let a_inv = linalg::invert_f64(&am)?;
    let c = sum(n, |i| sum(n, |j| a_inv[i][j] * lie[i][j])) / (2.0 * n as f64);
    let diff: Mat = (0..n)
        .map(|i| (0..n).map(|j| lie[i][j] - 2.0 * c * am[i][j]).collect())
        .collect();
    Ok(EtaFit {
        eta: c,
        residual: linalg::metric_norm2(&diff, &a_inv),
        scale: linalg::metric_norm2(&lie, &a_inv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    fn conformal_example() -> (RiemannianMetric, Vec<Expr>) {
        // b^# = x is a homothety of the flat metric: r = a
        let a = RiemannianMetric::euclidean(3, crate::riemann::MetricRole::Alpha);
        (a, exprs(&["x1", "x2", "x3"], 3))
    }

    #[test]
    fn homothety_is_isotropic() {
        let (a, b) = conformal_example();
        let x = [0.3, 0.4, -0.2];
        let inv = ab_invariants(&a, &b, &Expr::constant(0.0), &x).unwrap();
        let fit = fit_eta(&inv);
        assert!((fit.eta - 1.0).abs() < 1e-14 && fit.holds(1e-12));
        assert!(inv.s_sq.abs() < 1e-15);
        let lie = conformal_residual(&a, &b, &x).unwrap();
        assert!((lie.eta - 1.0).abs() < 1e-9 && lie.holds(1e-8), "{lie:?}");
    }

    #[test]
    fn rotation_is_killing_not_isotropic_for_shear() {
        let a = RiemannianMetric::euclidean(2, crate::riemann::MetricRole::Alpha);
        let rot = exprs(&["-x2", "x1"], 2);
        let x = [0.2, 0.7];
        let inv = ab_invariants(&a, &rot, &Expr::constant(0.0), &x).unwrap();
        assert!(inv.r.iter().flatten().all(|v| v.abs() < 1e-15));
        assert!((inv.s[1][0] - 1.0).abs() < 1e-15);
        let shear = exprs(&["x2", "0"], 2);
        let inv = ab_invariants(&a, &shear, &Expr::constant(0.0), &x).unwrap();
        assert!(!fit_eta(&inv).holds(1e-8));
        assert!(!conformal_residual(&a, &shear, &x).unwrap().holds(1e-8));
    }

    #[test]
    fn jets_agree_with_fd_for_r_and_s() {
        let mut r = rng(5);
        let a = random_metric(3, &mut r);
        let b = exprs(&["1 + 0.2*sin(x2)", "0.3*x1*x3", "cos(x1)"], 3);
        let x = random_point(3, &mut r);
        let inv = ab_invariants(&a, &b, &Expr::constant(0.0), &x).unwrap();
        let gam = &inv.christoffel;
        let bl = |p: &[f64], i: usize| b[i].eval(p);
        for i in 0..3 {
            for j in 0..3 {
                let d = fd_partial_auto(|p| bl(p, i), &x, &MultiIndex::unit(3, j)).unwrap();
                let cov = d - sum(3, |m| gam[m][i][j] * inv.b_low[m]);
                let from_inv = inv.r[i][j] + inv.s[i][j];
                assert!((cov - from_inv).abs() < 1e-9);
            }
        }
    }
}

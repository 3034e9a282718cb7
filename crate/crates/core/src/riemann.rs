//! Levi-Civita machinery for a Riemannian metric given by component
//! expressions: Christoffel symbols, curvature, Ricci tensor, Hessians, and
//! the covariant derivatives of a unit vector field used by navigation data.
//!
//! Curvature convention: `curvature[k][m][i][j]` is `R_k^m_ij`, fixed by the
//! Ricci identity for covectors
//!
//! ```text
//! W_{k|i|j} - W_{k|j|i} = W_m R_k^m_ij
//! ```
//!
//! where `W_{k|i|j}` differentiates first along `i`, then along `j`. In
//! coordinates `R_k^m_ij = d_i G^m_jk - d_j G^m_ik + G^m_ip G^p_jk - G^m_jp G^p_ik`.
//! The Ricci tensor is `Ric_kj = R_k^m_mj`, positive on round spheres, and
//! the Riemann curvature operator of the metric along `y` is
//! `R^i_k(y) = R_p^i_kq y^p y^q`.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::Jet;
use crate::linalg::{self, Mat, Tensor3, Tensor4};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricRole {
    /// Navigation metric `h`.
    H,
    /// Kropina quadratic part `alpha`.
    Alpha,
    Other,
}

impl MetricRole {
    pub fn tag(self) -> &'static str {
        match self {
            MetricRole::H => "h",
            MetricRole::Alpha => "alpha",
            MetricRole::Other => "g",
        }
    }
}

/// A Riemannian metric `g_ij(x)` on a chart of dimension `n`.
#[derive(Debug, Clone)]
pub struct RiemannianMetric {
    dim: usize,
    components: Vec<Vec<Expr>>,
    role: MetricRole,
}

impl RiemannianMetric {
    /// Builds from a full matrix of expressions, which must be symmetric.
    pub fn new(components: Vec<Vec<Expr>>, role: MetricRole) -> Result<Self> {
        let dim = components.len();
        if dim == 0 {
            return Err(Error::Invalid("metric of dimension 0".into()));
        }
        for (i, row) in components.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: row.len(),
                });
            }
            for j in 0..i {
                if components[i][j] != components[j][i] && components[i][j].to_string() != components[j][i].to_string()
                {
                    return Err(Error::Asymmetric { i: j + 1, j: i + 1 });
                }
            }
            if let Some(bad) = row.iter().find(|e| e.arity() > dim) {
                return Err(Error::Invalid(format!(
                    "component `{bad}` uses variables beyond x{dim}"
                )));
            }
        }
        Ok(RiemannianMetric { dim, components, role })
    }

    pub fn euclidean(dim: usize, role: MetricRole) -> Self {
        let components = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| Expr::constant(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        RiemannianMetric { dim, components, role }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn role(&self) -> MetricRole {
        self.role
    }

    pub fn components(&self) -> &[Vec<Expr>] {
        &self.components
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<Vec<S>>> {
        let flat: Vec<&Expr> = self.components.iter().flatten().collect();
        let vals = Expr::eval_many(&flat, x)?;
        Ok(vals.chunks(self.dim).map(|c| c.to_vec()).collect())
    }

    pub fn values(&self, x: &[f64]) -> Result<Mat> {
        self.eval(x)
    }

    pub fn check_positive_definite(&self, x: &[f64]) -> Result<Mat> {
        let g = self.values(x)?;
        if !linalg::is_positive_definite(&g) {
            return Err(Error::NotPositiveDefinite {
                role: self.role.tag().into(),
                x: x.to_vec(),
            });
        }
        Ok(g)
    }

    /// Jets of the metric around `x` to the given order, with derived
    /// connection and curvature. Order 2 is enough for curvature values.
    pub fn geometry(&self, x: &[f64], order: usize) -> Result<Geometry> {
        Geometry::new(self, x, order)
    }

    /// Norm `sqrt(g_ij(x) y^i y^j)`.
    pub fn norm(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(linalg::quadf(&self.values(x)?, y).max(0.0).sqrt())
    }
}

/// Local jets of a metric and its Levi-Civita connection around one point.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub point: Vec<f64>,
    pub order: usize,
    /// Coordinate jets `x^i`.
    pub coords: Vec<Jet>,
    pub g: Vec<Vec<Jet>>,
    pub ginv: Vec<Vec<Jet>>,
    /// `gamma[k][i][j] = G^k_ij`, one order below the metric jets.
    pub gamma: Vec<Vec<Vec<Jet>>>,
}

impl Geometry {
    fn new(metric: &RiemannianMetric, x: &[f64], order: usize) -> Result<Geometry> {
        let n = metric.dim;
        if x.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: x.len(),
            });
        }
        assert!(order >= 1, "connection needs order >= 1");
        metric.check_positive_definite(x)?;
        let coords = Jet::seed(x, order);
        let g = metric.eval(&coords)?;
        let ginv = linalg::invert(&g)?;
        let dg: Vec<Vec<Vec<Jet>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| g[i][j].derivative(k)).collect())
                    .collect()
            })
            .collect();
        let zero = Jet::constant(n, order - 1, 0.0);
        let mut gamma = vec![vec![vec![zero.clone(); n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = zero.clone();
                    for l in 0..n {
                        let t = &dg[j][l][i] + &dg[i][l][j] - &dg[i][j][l];
                        acc = acc + &ginv[k][l] * t;
                    }
                    let v = acc.scale(0.5);
                    gamma[k][j][i] = v.clone();
                    gamma[k][i][j] = v;
                }
            }
        }
        Ok(Geometry {
            point: x.to_vec(),
            order,
            coords,
            g,
            ginv,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn metric_values(&self) -> Mat {
        linalg::values(&self.g)
    }

    pub fn inverse_values(&self) -> Mat {
        linalg::values(&self.ginv)
    }

    pub fn christoffel_values(&self) -> Tensor3 {
        self.gamma.iter().map(|m| linalg::values(m)).collect()
    }

    /// Curvature jets `R_k^m_ij`, two orders below the metric.
    pub fn curvature_jets(&self) -> Vec<Vec<Vec<Vec<Jet>>>> {
        assert!(self.order >= 2, "curvature needs metric jets of order >= 2");
        let n = self.dim();
        let gamma = &self.gamma;
        let zero = Jet::constant(n, self.order - 2, 0.0);
        let mut r = vec![vec![vec![vec![zero.clone(); n]; n]; n]; n];
        for k in 0..n {
            for m in 0..n {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut acc = gamma[m][j][k].derivative(i) - gamma[m][i][k].derivative(j);
                        for p in 0..n {
                            acc = acc + &gamma[m][i][p] * &gamma[p][j][k] - &gamma[m][j][p] * &gamma[p][i][k];
                        }
                        r[k][m][j][i] = -acc.clone();
                        r[k][m][i][j] = acc;
                    }
                }
            }
        }
        r
    }

    /// `curvature[k][m][i][j] = R_k^m_ij` at the base point.
    pub fn curvature(&self) -> Tensor4 {
        self.curvature_jets()
            .iter()
            .map(|a| {
                a.iter()
                    .map(|b| b.iter().map(|c| c.iter().map(Jet::value).collect()).collect())
                    .collect()
            })
            .collect()
    }

    /// Covariant derivative of a covector field: `out[i][j] = w_{i;j}`.
    pub fn cov_covector(&self, w: &[Jet]) -> Vec<Vec<Jet>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = w[i].derivative(j);
                        for m in 0..n {
                            acc = acc - &self.gamma[m][i][j] * &w[m];
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// Covariant derivative of a (0,2)-tensor: `out[i][j][k] = t_{ij;k}`.
    pub fn cov_two_form(&self, t: &[Vec<Jet>]) -> Vec<Vec<Vec<Jet>>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| {
                                let mut acc = t[i][j].derivative(k);
                                for m in 0..n {
                                    acc = acc - &self.gamma[m][k][i] * &t[m][j] - &self.gamma[m][k][j] * &t[i][m];
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// `g_ij v^j`.
    pub fn lower(&self, v: &[Jet]) -> Vec<Jet> {
        contract_rows(&self.g, v)
    }

    /// `g^ij w_j`.
    pub fn raise(&self, w: &[Jet]) -> Vec<Jet> {
        contract_rows(&self.ginv, w)
    }

    /// Hessian jets `f_ij = d_i d_j f - G^m_ij d_m f` of a scalar field.
    pub fn hessian_jets(&self, f: &Jet) -> Vec<Vec<Jet>> {
        let df: Vec<Jet> = (0..self.dim()).map(|i| f.derivative(i)).collect();
        self.cov_covector(&df)
    }
}

fn contract_rows(m: &[Vec<Jet>], v: &[Jet]) -> Vec<Jet> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Jet::constant(v[0].nvars(), v[0].order(), 0.0), |acc, (a, b)| {
                    acc + a * b
                })
        })
        .collect()
}

pub fn jets_to_values(m: &[Vec<Jet>]) -> Mat {
    linalg::values(m)
}

/// `G^k_ij` at `x`.
pub fn christoffel(g: &RiemannianMetric, x: &[f64]) -> Result<Tensor3> {
    Ok(g.geometry(x, 1)?.christoffel_values())
}

/// `R_k^m_ij` at `x` (see the module docs for the convention).
pub fn riemann_h(g: &RiemannianMetric, x: &[f64]) -> Result<Tensor4> {
    Ok(g.geometry(x, 2)?.curvature())
}

/// Fully covariant curvature `R_mkij = g_mp R_k^p_ij`.
pub fn lower_curvature(curv: &Tensor4, g: &Mat) -> Tensor4 {
    let n = g.len();
    let mut out = linalg::zeros4(n);
    for m in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[m][k][i][j] = (0..n).map(|p| g[m][p] * curv[k][p][i][j]).sum();
                }
            }
        }
    }
    out
}

/// Ricci tensor `Ric_kj = R_k^m_mj`.
pub fn ricci_from_curvature(curv: &Tensor4) -> Mat {
    let n = curv.len();
    let mut ric = linalg::zeros(n);
    for k in 0..n {
        for j in 0..n {
            ric[k][j] = (0..n).map(|m| curv[k][m][m][j]).sum();
        }
    }
    ric
}

/// Ricci tensor of `g` at `x`.
pub fn ricci_h(g: &RiemannianMetric, x: &[f64]) -> Result<Mat> {
    Ok(ricci_from_curvature(&riemann_h(g, x)?))
}

/// Covariant Hessian of the scalar field `f` with respect to `g` at `x`.
pub fn hess_h(f: &Expr, g: &RiemannianMetric, x: &[f64]) -> Result<Mat> {
    let geo = g.geometry(x, 2)?;
    let fj = f.eval(&geo.coords)?;
    Ok(linalg::values(&geo.hessian_jets(&fj)))
}

/// A vector field `W^i(x)` given by expressions.
#[derive(Debug, Clone)]
pub struct VectorFieldW {
    components: Vec<Expr>,
}

impl VectorFieldW {
    pub fn new(components: Vec<Expr>) -> Self {
        VectorFieldW { components }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        let refs: Vec<&Expr> = self.components.iter().collect();
        Expr::eval_many(&refs, x)
    }

    /// `W_i = h_ij W^j` at `x`.
    pub fn lowered(&self, h: &RiemannianMetric, x: &[f64]) -> Result<Vec<f64>> {
        Ok(linalg::mat_vec(&h.values(x)?, &self.eval(x)?))
    }

    pub fn h_norm(&self, h: &RiemannianMetric, x: &[f64]) -> Result<f64> {
        Ok(linalg::quadf(&h.values(x)?, &self.eval(x)?).max(0.0).sqrt())
    }

    /// Errors unless `|W|_h = 1` within `tol` at `x`.
    pub fn check_unit(&self, h: &RiemannianMetric, x: &[f64], tol: f64) -> Result<()> {
        let norm = self.h_norm(h, x)?;
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotUnit { norm, x: x.to_vec() });
        }
        Ok(())
    }
}

/// Covariant-derivative data of `W` (and optionally a weight `f`) at a point.
#[derive(Debug, Clone)]
pub struct WInvariants {
    pub w_up: Vec<f64>,
    pub w_down: Vec<f64>,
    /// `R_ij = (W_i|j + W_j|i) / 2`.
    pub r: Mat,
    /// `S_ij = (W_i|j - W_j|i) / 2`.
    pub s: Mat,
    /// `S^i_j = h^ik S_kj`.
    pub s_mixed: Mat,
    /// `S_j = W^i S_ij`.
    pub s_vec: Vec<f64>,
    /// `R_j = W^i R_ij`.
    pub r_vec: Vec<f64>,
    /// `R = R_j W^j`.
    pub r_scalar: f64,
}

/// Jets of `W^i`, `W_i` and `W_i|j` for reuse by higher derivatives.
#[derive(Debug, Clone)]
pub struct WJets {
    pub w_up: Vec<Jet>,
    pub w_down: Vec<Jet>,
    /// `dw[i][j] = W_i|j`.
    pub dw: Vec<Vec<Jet>>,
}

impl WJets {
    pub fn new(geo: &Geometry, w: &VectorFieldW) -> Result<WJets> {
        if w.dim() != geo.dim() {
            return Err(Error::Dimension {
                expected: geo.dim(),
                got: w.dim(),
            });
        }
        let w_up = w.eval(&geo.coords)?;
        let w_down = geo.lower(&w_up);
        let dw = geo.cov_covector(&w_down);
        Ok(WJets { w_up, w_down, dw })
    }

    pub fn invariants(&self, geo: &Geometry) -> WInvariants {
        let n = geo.dim();
        let dw = linalg::values(&self.dw);
        let w_up: Vec<f64> = self.w_up.iter().map(Jet::value).collect();
        let w_down: Vec<f64> = self.w_down.iter().map(Jet::value).collect();
        let ginv = geo.inverse_values();
        let mut r = linalg::zeros(n);
        let mut s = linalg::zeros(n);
        for i in 0..n {
            for j in 0..n {
                r[i][j] = 0.5 * (dw[i][j] + dw[j][i]);
                s[i][j] = 0.5 * (dw[i][j] - dw[j][i]);
            }
        }
        let s_mixed: Mat = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| ginv[i][k] * s[k][j]).sum()).collect())
            .collect();
        let s_vec: Vec<f64> = (0..n).map(|j| (0..n).map(|i| w_up[i] * s[i][j]).sum()).collect();
        let r_vec: Vec<f64> = (0..n).map(|j| (0..n).map(|i| w_up[i] * r[i][j]).sum()).collect();
        let r_scalar = linalg::dotf(&r_vec, &w_up);
        WInvariants {
            w_up,
            w_down,
            r,
            s,
            s_mixed,
            s_vec,
            r_vec,
            r_scalar,
        }
    }

    /// `out[k][i][j] = W_{k|i|j}`.
    pub fn second_derivative(&self, geo: &Geometry) -> Tensor3 {
        geo.cov_two_form(&self.dw).iter().map(|m| linalg::values(m)).collect()
    }
}

/// The script invariants of `W` with respect to `g` at `x`.
pub fn w_invariants(g: &RiemannianMetric, w: &VectorFieldW, x: &[f64]) -> Result<WInvariants> {
    let geo = g.geometry(x, 1)?;
    Ok(WJets::new(&geo, w)?.invariants(&geo))
}

/// `W_{k|i|j}` at `x`, indexed `[k][i][j]`.
pub fn second_cov_w(g: &RiemannianMetric, w: &VectorFieldW, x: &[f64]) -> Result<Tensor3> {
    let geo = g.geometry(x, 2)?;
    Ok(WJets::new(&geo, w)?.second_derivative(&geo))
}

/// Everything covariant about `(h, W, f)` at one point, as plain arrays.
#[derive(Debug, Clone)]
pub struct CovDerivPack {
    pub h: Mat,
    pub h_inv: Mat,
    pub christoffel: Tensor3,
    /// `W_i|j`, indexed `[i][j]`.
    pub dw: Mat,
    /// `W_{k|i|j}`, indexed `[k][i][j]`.
    pub ddw: Tensor3,
    pub f_grad: Vec<f64>,
    /// Second covariant derivative `f_ij`.
    pub f_hess: Mat,
    /// `R_k^m_ij`.
    pub curvature: Tensor4,
    pub ricci: Mat,
    pub w: WInvariants,
}

impl CovDerivPack {
    pub fn new(h: &RiemannianMetric, w: &VectorFieldW, f: &Expr, x: &[f64]) -> Result<Self> {
        let geo = h.geometry(x, 2)?;
        let wj = WJets::new(&geo, w)?;
        let fj = f.eval(&geo.coords)?;
        let curvature = geo.curvature();
        Ok(CovDerivPack {
            h: geo.metric_values(),
            h_inv: geo.inverse_values(),
            christoffel: geo.christoffel_values(),
            dw: linalg::values(&wj.dw),
            ddw: wj.second_derivative(&geo),
            f_grad: (0..geo.dim()).map(|i| fj.d1(i)).collect(),
            f_hess: linalg::values(&geo.hessian_jets(&fj)),
            ricci: ricci_from_curvature(&curvature),
            curvature,
            w: wj.invariants(&geo),
        })
    }
}

impl CovDerivPack {
    /// `h`-norm of `W_{k|i|j} + W_m R_j^m_ki`, which vanishes for Killing fields.
    pub fn killing_identity_residual(&self) -> f64 {
        let n = self.h.len();
        let mut t = linalg::zeros3(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let wr: f64 = (0..n).map(|m| self.w.w_down[m] * self.curvature[j][m][k][i]).sum();
                    t[k][i][j] = self.ddw[k][i][j] + wr;
                }
            }
        }
        linalg::metric_norm3(&t, &self.h_inv)
    }
}

//! Curvature of an arbitrary Finsler metric computed from `F` alone.
//!
//! Every quantity comes from jets of `E = F^2` over the combined block of
//! `2n` variables `(x, y)`: the fundamental tensor, the spray, the Riemann
//! curvature, the distortion of a volume density, the S-curvature and its
//! derivative along geodesics, and Hessians of functions. Values of the
//! Riemann curvature and of `S'` need second derivatives of the spray, so
//! the full stack runs at jet order 4.

mod geodesic;
mod volume;

pub use geodesic::{flow_oracle, geodesic_flow, FlowOracle, GeodesicPath};
pub use volume::{ball_volume, bh_density, BhEstimate, SublevelBox};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::Jet;
use crate::linalg::{self, Mat};
use crate::riemann::RiemannianMetric;
use crate::scalar::{quad, Scalar};

/// A (possibly conic) Finsler metric given through its energy `F^2`.
pub trait FinslerMetric: Sync {
    fn dim(&self) -> usize;

    /// `F(x, y)^2`, generic over plain numbers and jets.
    fn energy<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S>;

    /// Whether `(x, y)` lies in the conic domain where `F > 0`.
    fn in_domain(&self, x: &[f64], y: &[f64]) -> Result<bool>;

    /// Box containing the unit sublevel set `{y : F(x, y) < 1}`.
    fn sublevel_box(&self, x: &[f64]) -> Result<SublevelBox> {
        volume::probe_box(self, x)
    }

    /// Busemann-Hausdorff density in closed form, when one is known.
    fn bh_closed_form(&self, _x: &[f64]) -> Option<Result<f64>> {
        None
    }

    fn norm(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if !self.in_domain(x, y)? {
            return Err(Error::OutsideDomain {
                x: x.to_vec(),
                y: y.to_vec(),
            });
        }
        Ok(self.energy(x, y)?.max(0.0).sqrt())
    }
}

/// `F = sqrt(g_ij(x) y^i y^j)`.
#[derive(Debug, Clone)]
pub struct RiemannFinsler(pub RiemannianMetric);

impl FinslerMetric for RiemannFinsler {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn energy<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        Ok(quad(&self.0.eval(x)?, y))
    }

    fn in_domain(&self, _x: &[f64], y: &[f64]) -> Result<bool> {
        Ok(y.iter().any(|v| *v != 0.0))
    }

    fn bh_closed_form(&self, x: &[f64]) -> Option<Result<f64>> {
        Some(self.0.values(x).map(|g| linalg::det(&g).sqrt()))
    }
}

/// `c F` for a positive constant `c`.
#[derive(Debug, Clone)]
pub struct Scaled<M>(pub M, pub f64);

impl<M: FinslerMetric> FinslerMetric for Scaled<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn energy<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        Ok(self.0.energy(x, y)?.scale(self.1 * self.1))
    }

    fn in_domain(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        self.0.in_domain(x, y)
    }

    fn sublevel_box(&self, x: &[f64]) -> Result<SublevelBox> {
        let b = self.0.sublevel_box(x)?;
        Ok(SublevelBox {
            center: b.center.iter().map(|c| c / self.1).collect(),
            half_widths: b.half_widths.iter().map(|w| w / self.1).collect(),
        })
    }
}

/// A volume density `sigma(x) > 0`, handled through `ln sigma`.
#[derive(Debug, Clone)]
pub enum Density {
    Constant(f64),
    /// Custom density expression.
    Custom(Expr),
    /// `sqrt(det g)`.
    Riemannian(RiemannianMetric),
    /// Busemann-Hausdorff density of `alpha^2 / beta`: `(2/b)^n sqrt(det a)`.
    KropinaBh {
        a: RiemannianMetric,
        b: Vec<Expr>,
    },
    /// `exp(-weight * f) * base`.
    Weighted {
        base: Box<Density>,
        f: Expr,
        weight: f64,
    },
}

impl Density {
    pub fn tag(&self) -> &'static str {
        match self {
            Density::Constant(_) | Density::Custom(_) => "custom",
            Density::Riemannian(_) => "riemannian",
            Density::KropinaBh { .. } => "busemann-hausdorff",
            Density::Weighted { .. } => "weighted",
        }
    }

    /// The weighted density `exp(-(n+1) f) * self`.
    pub fn weighted(self, f: Expr, n: usize) -> Density {
        Density::Weighted {
            base: Box::new(self),
            f,
            weight: (n + 1) as f64,
        }
    }

    pub fn ln_density<S: Scalar>(&self, x: &[S]) -> Result<S> {
        match self {
            Density::Constant(c) => {
                if *c <= 0.0 {
                    return Err(Error::Invalid(format!("density {c} is not positive")));
                }
                Ok(x[0].constant_like(c.ln()))
            }
            Density::Custom(e) => {
                let v = e.eval(x)?;
                if v.value() <= 0.0 {
                    return Err(Error::Invalid(format!("density {} is not positive", v.value())));
                }
                Ok(v.ln())
            }
            Density::Riemannian(g) => {
                let d = linalg::det(&g.eval(x)?);
                if d.value() <= 0.0 {
                    return Err(Error::NonPositiveDeterminant);
                }
                Ok(d.ln().scale(0.5))
            }
            Density::KropinaBh { a, b } => {
                let am = a.eval(x)?;
                let bv: Vec<&Expr> = b.iter().collect();
                let bl = Expr::eval_many(&bv, x)?;
                let ainv = linalg::invert(&am)?;
                let b2 = quad(&ainv, &bl);
                let d = linalg::det(&am);
                if d.value() <= 0.0 {
                    return Err(Error::NonPositiveDeterminant);
                }
                if b2.value() <= 0.0 {
                    return Err(Error::DegenerateBeta(x.iter().map(S::value).collect()));
                }
                let n = am.len() as f64;
                Ok(d.ln().scale(0.5) - b2.ln().scale(0.5 * n) + x[0].constant_like(n * 2f64.ln()))
            }
            Density::Weighted { base, f, weight } => Ok(base.ln_density(x)? - f.eval(x)?.scale(*weight)),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.ln_density(x)?.exp())
    }
}

/// Everything the generic pipeline computes at one `(x, y)`.
#[derive(Debug, Clone)]
pub struct CurvatureSample {
    pub f: f64,
    pub g: Mat,
    pub spray: Vec<f64>,
    /// `N^i_j = dG^i / dy^j`.
    pub connection: Mat,
    /// `R^i_k`.
    pub riemann: Mat,
    pub ricci: f64,
    pub tau: f64,
    pub s: f64,
    pub s_dot: f64,
    pub hess_f: Option<f64>,
}

/// Jets of `E`, `g`, `g^-1` and the spray over the `(x, y)` block.
struct Stack {
    n: usize,
    xs: Vec<Jet>,
    ys: Vec<Jet>,
    g: Vec<Vec<Jet>>,
    spray: Vec<Jet>,
}

impl Stack {
    fn build<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], y: &[f64], order: usize) -> Result<Stack> {
        let n = m.dim();
        for len in [x.len(), y.len()] {
            if len != n {
                return Err(Error::Dimension { expected: n, got: len });
            }
        }
        if !m.in_domain(x, y)? {
            return Err(Error::OutsideDomain {
                x: x.to_vec(),
                y: y.to_vec(),
            });
        }
        let seeds = Jet::seed(&[x, y].concat(), order);
        let (xs, ys) = seeds.split_at(n);
        let e = m.energy(xs, ys)?;
        let ey: Vec<Jet> = (0..n).map(|i| e.derivative(n + i)).collect();
        let g: Vec<Vec<Jet>> = (0..n)
            .map(|i| (0..n).map(|j| ey[i].derivative(n + j).scale(0.5)).collect())
            .collect();
        let ginv = linalg::invert(&g).map_err(|_| Error::Singular("fundamental tensor"))?;
        let bracket: Vec<Jet> = (0..n)
            .map(|l| {
                let mut acc = -e.derivative(l);
                for k in 0..n {
                    acc = acc + ey[l].derivative(k) * &ys[k];
                }
                acc
            })
            .collect();
        let spray = (0..n)
            .map(|i| {
                (0..n)
                    .map(|l| &ginv[i][l] * &bracket[l])
                    .reduce(|a, b| a + b)
                    .expect("n >= 1")
                    .scale(0.25)
            })
            .collect();
        Ok(Stack {
            n,
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            g,
            spray,
        })
    }

    fn riemann(&self) -> Mat {
        let n = self.n;
        let gs = &self.spray;
        let y: Vec<f64> = self.ys.iter().map(Jet::value).collect();
        let mut r = linalg::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let mut v = 2.0 * gs[i].d1(k);
                for m in 0..n {
                    v -= gs[i].d2(m, n + k) * y[m];
                    v += 2.0 * gs[m].value() * gs[i].d2(n + m, n + k);
                    v -= gs[i].d1(n + m) * gs[m].d1(n + k);
                }
                r[i][k] = v;
            }
        }
        r
    }

    /// Horizontal derivative along `y`: `y^m dq/dx^m - 2 G^j dq/dy^j`.
    fn along(&self, q: &Jet) -> Jet {
        let n = self.n;
        (0..n)
            .map(|m| q.derivative(m) * &self.ys[m] - (&self.spray[m] * q.derivative(n + m)).scale(2.0))
            .reduce(|a, b| a + b)
            .expect("n >= 1")
    }

    fn tau(&self, density: &Density) -> Result<Jet> {
        let d = linalg::det(&self.g);
        if d.value() <= 0.0 {
            return Err(Error::NonPositiveDeterminant);
        }
        Ok(d.ln().scale(0.5) - density.ln_density(&self.xs)?)
    }

    fn hess(&self, f: &Expr) -> Result<f64> {
        let fj = f.eval(&self.xs)?;
        let n = self.n;
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v += fj.d2(i, j) * self.ys[i].value() * self.ys[j].value();
            }
            v -= 2.0 * fj.d1(i) * self.spray[i].value();
        }
        Ok(v)
    }
}

/// `g_ij = (1/2) [F^2]_{y^i y^j}`.
pub fn fundamental_tensor<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], y: &[f64]) -> Result<Mat> {
    Ok(linalg::values(&Stack::build(m, x, y, 2)?.g))
}

/// Spray coefficients `G^i`.
pub fn spray_generic<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    Ok(Stack::build(m, x, y, 2)?.spray.iter().map(Jet::value).collect())
}

/// Riemann curvature `R^i_k`.
pub fn riemann_generic<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], y: &[f64]) -> Result<Mat> {
    Ok(Stack::build(m, x, y, 4)?.riemann())
}

/// Ricci curvature, the trace of `R^i_k`.
pub fn ricci_generic<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], y: &[f64]) -> Result<f64> {
    let r = riemann_generic(m, x, y)?;
    Ok((0..r.len()).map(|i| r[i][i]).sum())
}

/// Distortion `ln(sqrt(det g) / sigma)`.
pub fn distortion<M: FinslerMetric + ?Sized>(m: &M, density: &Density, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(Stack::build(m, x, y, 2)?.tau(density)?.value())
}

/// S-curvature with respect to `density`.
pub fn s_curvature_generic<M: FinslerMetric + ?Sized>(m: &M, density: &Density, x: &[f64], y: &[f64]) -> Result<f64> {
    let st = Stack::build(m, x, y, 3)?;
    Ok(st.along(&st.tau(density)?).value())
}

/// Rate of change `S'` of the S-curvature along the geodesic.
pub fn sdot_generic<M: FinslerMetric + ?Sized>(m: &M, density: &Density, x: &[f64], y: &[f64]) -> Result<f64> {
    let st = Stack::build(m, x, y, 4)?;
    let s = st.along(&st.tau(density)?);
    Ok(st.along(&s).value())
}

/// `Hess_F f(y) = f_{x^i x^j} y^i y^j - 2 f_{x^i} G^i`.
pub fn hess_f<M: FinslerMetric + ?Sized>(m: &M, f: &Expr, x: &[f64], y: &[f64]) -> Result<f64> {
    Stack::build(m, x, y, 2)?.hess(f)
}

/// The full stack in one pass.
pub fn curvature_sample<M: FinslerMetric + ?Sized>(
    m: &M,
    density: &Density,
    f: Option<&Expr>,
    x: &[f64],
    y: &[f64],
) -> Result<CurvatureSample> {
    let st = Stack::build(m, x, y, 4)?;
    let n = st.n;
    let g = linalg::values(&st.g);
    let tau = st.tau(density)?;
    let s = st.along(&tau);
    let s_dot = st.along(&s).value();
    let riemann = st.riemann();
    Ok(CurvatureSample {
        f: linalg::quadf(&g, y).max(0.0).sqrt(),
        spray: st.spray.iter().map(Jet::value).collect(),
        connection: (0..n)
            .map(|i| (0..n).map(|j| st.spray[i].d1(n + j)).collect())
            .collect(),
        ricci: (0..n).map(|i| riemann[i][i]).sum(),
        riemann,
        tau: tau.value(),
        s: s.value(),
        s_dot,
        hess_f: f.map(|f| st.hess(f)).transpose()?,
        g,
    })
}

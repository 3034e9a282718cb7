//! Four equivalent descriptions of isotropic S-curvature for Kropina metrics,
//! each computed on its own.

use serde::Serialize;

use crate::error::Result;
use crate::forms::{ab_invariants, conformal_residual, fit_eta, nav_quantities, s_bh_closed, KropinaSpace};
use crate::linalg;

/// Relative residuals of the four predicates at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropySuite {
    pub x: Vec<f64>,
    /// `r_00 = eta alpha^2` fit.
    pub isotropy: f64,
    /// Largest `|S_BH(y)|` over the directions, relative to its terms.
    pub s_bh: f64,
    /// `|R_ij|_h` of the navigation field.
    pub killing: f64,
    /// `L_{b^#} a = 2 c a` by finite differences.
    pub conformal: f64,
    pub tolerance: f64,
}

impl IsotropySuite {
    pub fn flags(&self) -> [bool; 4] {
        [self.isotropy, self.s_bh, self.killing, self.conformal].map(|r| r <= self.tolerance)
    }

    /// All four true or all four false.
    pub fn consistent(&self) -> bool {
        let f = self.flags();
        f.iter().all(|v| *v) || f.iter().all(|v| !*v)
    }

    pub fn all_hold(&self) -> bool {
        self.flags().iter().all(|v| *v)
    }
}

pub fn isotropy_suite(space: &KropinaSpace, x: &[f64], dirs: &[Vec<f64>], tol: f64) -> Result<IsotropySuite> {
    let inv = ab_invariants(space.alpha(), space.beta(), space.weight(), x)?;
    let eta = fit_eta(&inv);
    let n1 = inv.dim() as f64 + 1.0;
    let s_bh = dirs
        .iter()
        .map(|y| {
            let at = inv.at(y);
            let size = (n1 / inv.b2) * (at.r0.abs() + (at.r00 / at.f).abs());
            s_bh_closed(&inv, y).abs() / size.max(at.f)
        })
        .fold(0.0, f64::max);
    let q = nav_quantities(space, x)?;
    let pk = &q.pack;
    let killing = linalg::metric_norm2(&pk.w.r, &pk.h_inv) / linalg::metric_norm2(&pk.dw, &pk.h_inv).max(1.0);
    let conf = conformal_residual(space.alpha(), space.beta(), x)?;
    Ok(IsotropySuite {
        x: x.to_vec(),
        isotropy: eta.residual / eta.scale.max(1.0),
        s_bh,
        killing,
        conformal: conf.residual / conf.scale.max(1.0),
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::riemann::{MetricRole, RiemannianMetric, VectorFieldW};
    use crate::sampling::{sample_grid, ChartBox};
    use crate::testutil::*;

    #[test]
    fn hopf_is_jointly_true() {
        let (h, w) = hopf();
        let space = KropinaSpace::from_nav(h, w, None, parse_expr("0", 3).unwrap()).unwrap();
        let bx = ChartBox::new(vec![0.3, -1.0, -1.0], vec![1.2, 1.0, 1.0]).unwrap();
        for p in sample_grid(&space, &bx, 4, 10, 7).unwrap() {
            let s = isotropy_suite(&space, &p.x, &p.dirs, 1e-8).unwrap();
            assert!(s.all_hold(), "{s:?}");
        }
    }

    #[test]
    fn twisted_wind_is_jointly_false() {
        let h = RiemannianMetric::euclidean(3, MetricRole::H);
        let w = VectorFieldW::new(vec![
            parse_expr("cos(x2)", 3).unwrap(),
            parse_expr("sin(x2)", 3).unwrap(),
            parse_expr("0", 3).unwrap(),
        ]);
        let space = KropinaSpace::from_nav(h, w, None, parse_expr("0", 3).unwrap()).unwrap();
        for p in sample_grid(&space, &ChartBox::cube(3, 1.0), 4, 10, 7).unwrap() {
            let s = isotropy_suite(&space, &p.x, &p.dirs, 1e-8).unwrap();
            assert!(s.consistent() && !s.all_hold(), "{s:?}");
        }
    }
}

//! Weighted Ricci curvature `Ric + a S' - c S^2` of Kropina metrics and
//! checkers for the weakly weighted Einstein condition
//! `Ric_{a,c} = (n-1) (3 theta(y) F + sigma F^2)`.

mod lemmas;
mod poly;
mod theorems;

pub use lemmas::{isotropy_suite, IsotropySuite};
pub use poly::{monomials, poly_divisible_by_alpha2, Divisibility, HomPoly};
pub use theorems::{
    check_theorem, thm41_check, thm44_check, thm51_check, thm61_check, ConditionResult, PointRecord, TheoremId,
    TheoremReport, Verdict,
};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finsler::curvature_sample;
use crate::forms::{ab_invariants, kropina_ricci_closed, s_closed, s_dot_closed, KropinaSpace};
use crate::linalg::{self, Mat};

/// `|nu| <= ZERO_TOL` counts as `nu = 0`, likewise for `kappa`.
pub const ZERO_TOL: f64 = 1e-12;

/// Weight constants `(a, c)` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub a: f64,
    pub c: f64,
    pub n: usize,
}

/// Which characterization applies to a weight configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NuNonzero,
    NuZeroKappaNonzero,
    Projective,
}

/// `(kappa, nu)` for weight constants `(a, c)` in dimension `n`.
pub fn weight_constants(a: f64, c: f64, n: usize) -> (f64, f64) {
    let (n, m) = (n as f64, n as f64 + 1.0);
    ((n - 1.0) - a * m, 3.0 * (n - 1.0) - 4.0 * a * m - c * m * m)
}

impl WeightConfig {
    pub fn new(a: f64, c: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("weighted Ricci needs n >= 2, got {n}")));
        }
        if !(a.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite(vec![a, c]));
        }
        Ok(WeightConfig { a, c, n })
    }

    /// Plain Ricci curvature.
    pub fn plain(n: usize) -> Result<Self> {
        Self::new(0.0, 0.0, n)
    }

    /// `Ric_inf = Ric + S'`.
    pub fn ric_inf(n: usize) -> Result<Self> {
        Self::new(1.0, 0.0, n)
    }

    /// `Ric_N = Ric + S' - S^2 / (N - n)`.
    pub fn ric_n(big_n: f64, n: usize) -> Result<Self> {
        if big_n == n as f64 {
            return Err(Error::Invalid("Ric_N needs N != n".into()));
        }
        Self::new(1.0, 1.0 / (big_n - n as f64), n)
    }

    /// Projective Ricci curvature.
    pub fn pric(n: usize) -> Result<Self> {
        let m = n as f64 + 1.0;
        Self::new((n as f64 - 1.0) / m, -(n as f64 - 1.0) / (m * m), n)
    }

    pub fn kappa(&self) -> f64 {
        weight_constants(self.a, self.c, self.n).0
    }

    pub fn nu(&self) -> f64 {
        weight_constants(self.a, self.c, self.n).1
    }

    pub fn regime(&self) -> Regime {
        if self.nu().abs() > ZERO_TOL {
            Regime::NuNonzero
        } else if self.kappa().abs() > ZERO_TOL {
            Regime::NuZeroKappaNonzero
        } else {
            Regime::Projective
        }
    }
}

/// Route for curvature evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Closed,
    Generic,
}

/// Ricci curvature and weighted S-curvature at one `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciParts {
    pub f: f64,
    pub ricci: f64,
    pub s: f64,
    pub s_dot: f64,
}

impl RicciParts {
    pub fn weighted(&self, cfg: &WeightConfig) -> f64 {
        self.ricci + cfg.a * self.s_dot - cfg.c * self.s * self.s
    }

    pub fn projective(&self, n: usize) -> f64 {
        let m = n as f64 + 1.0;
        let cfg = WeightConfig {
            a: (n as f64 - 1.0) / m,
            c: -(n as f64 - 1.0) / (m * m),
            n,
        };
        self.weighted(&cfg)
    }

    /// Right side of `Ric_{a,c} = PRic - kappa/(n+1) (S' + 4 S^2/(n+1)) + nu S^2/(n+1)^2`.
    pub fn via_projective(&self, cfg: &WeightConfig) -> f64 {
        let m = cfg.n as f64 + 1.0;
        let s2 = self.s * self.s;
        self.projective(cfg.n) - cfg.kappa() / m * (self.s_dot + 4.0 * s2 / m) + cfg.nu() * s2 / (m * m)
    }
}

pub fn ricci_parts(space: &KropinaSpace, x: &[f64], y: &[f64], route: Route) -> Result<RicciParts> {
    match route {
        Route::Generic => {
            let cs = curvature_sample(&space.ab_metric(), &space.weighted_density(), None, x, y)?;
            Ok(RicciParts {
                f: cs.f,
                ricci: cs.ricci,
                s: cs.s,
                s_dot: cs.s_dot,
            })
        }
        Route::Closed => {
            let inv = ab_invariants(space.alpha(), space.beta(), space.weight(), x)?;
            Ok(closed_parts(&inv, y))
        }
    }
}

pub(crate) fn closed_parts(inv: &crate::forms::AbInvariants, y: &[f64]) -> RicciParts {
    RicciParts {
        f: inv.at(y).f,
        ricci: kropina_ricci_closed(inv, y),
        s: s_closed(inv, y),
        s_dot: s_dot_closed(inv, y),
    }
}

/// `Ric_{a,c}(y)` for the density `exp(-(n+1) f) sigma_BH`.
pub fn ric_ac(space: &KropinaSpace, cfg: &WeightConfig, x: &[f64], y: &[f64], route: Route) -> Result<f64> {
    Ok(ricci_parts(space, x, y, route)?.weighted(cfg))
}

/// Projective Ricci curvature.
pub fn pric(space: &KropinaSpace, x: &[f64], y: &[f64], route: Route) -> Result<f64> {
    Ok(ricci_parts(space, x, y, route)?.projective(space.dim()))
}

/// Where `theta` and `sigma` came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Given,
    /// Least-squares fit; `residual` is the RMS of the normalized equations.
    Fitted {
        residual: f64,
    },
}

/// A 1-form `theta` and scalar `sigma` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EinsteinAnsatz {
    pub theta: Vec<f64>,
    pub sigma: f64,
    pub provenance: Provenance,
}

impl EinsteinAnsatz {
    pub fn given(theta: Vec<f64>, sigma: f64) -> Self {
        EinsteinAnsatz {
            theta,
            sigma,
            provenance: Provenance::Given,
        }
    }

    /// `(n-1) (3 theta(y) F + sigma F^2)`.
    pub fn rhs(&self, y: &[f64], f: f64) -> f64 {
        let n = self.theta.len() as f64;
        (n - 1.0) * (3.0 * linalg::dotf(&self.theta, y) * f + self.sigma * f * f)
    }
}

/// `Ric_{a,c}(y) - (n-1)(3 theta(y) F + sigma F^2)` through the generic pipeline.
pub fn einstein_residual(
    space: &KropinaSpace,
    cfg: &WeightConfig,
    ansatz: &EinsteinAnsatz,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let p = ricci_parts(space, x, y, Route::Generic)?;
    Ok(p.weighted(cfg) - ansatz.rhs(y, p.f))
}

/// `(y, F, Ric_{a,c})` samples along `directions`, generic route.
pub fn weighted_samples(
    space: &KropinaSpace,
    cfg: &WeightConfig,
    x: &[f64],
    directions: &[Vec<f64>],
) -> Result<Vec<(f64, f64)>> {
    directions
        .iter()
        .map(|y| {
            let p = ricci_parts(space, x, y, Route::Generic)?;
            Ok((p.f, p.weighted(cfg)))
        })
        .collect()
}

/// Solves `Ric_{a,c}(y) = (n-1)(3 theta(y) F + sigma F^2)` for `(theta, sigma)` in
/// the least-squares sense, one row per direction divided by `F^2`.
pub fn fit_theta_sigma(
    space: &KropinaSpace,
    cfg: &WeightConfig,
    x: &[f64],
    directions: &[Vec<f64>],
) -> Result<EinsteinAnsatz> {
    let values = weighted_samples(space, cfg, x, directions)?;
    fit_from_samples(directions, &values)
}

/// [`fit_theta_sigma`] from precomputed `(F, Ric_{a,c})` pairs.
pub fn fit_from_samples(directions: &[Vec<f64>], values: &[(f64, f64)]) -> Result<EinsteinAnsatz> {
    let n = directions.first().map_or(0, Vec::len);
    let rows = directions.len();
    if rows < n + 2 {
        return Err(Error::RankDeficient {
            rank: rows,
            needed: n + 2,
        });
    }
    let k = (n - 1) as f64;
    let mut m = DMatrix::zeros(rows, n + 1);
    let mut rhs = DVector::zeros(rows);
    for (r, (y, (f, ric))) in directions.iter().zip(values).enumerate() {
        for i in 0..n {
            m[(r, i)] = 3.0 * k * y[i] / f;
        }
        m[(r, n)] = k;
        rhs[r] = ric / (f * f);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-10 * smax).count();
    if rank < n + 1 {
        return Err(Error::RankDeficient { rank, needed: n + 1 });
    }
    let sol = svd.solve(&rhs, 0.0).expect("SVD was computed with U and V");
    let residual = (&m * &sol - &rhs).norm() / (rows as f64).sqrt();
    Ok(EinsteinAnsatz {
        theta: sol.iter().take(n).copied().collect(),
        sigma: sol[n],
        provenance: Provenance::Fitted { residual },
    })
}

/// `mu = tr_h T / (n (n-1))` and the `h`-operator norm of `T - (n-1) mu h`.
pub fn tensor_einstein_check(t: &Mat, h: &Mat) -> Result<(f64, f64)> {
    let n = h.len();
    let hm = linalg::to_dmatrix(h);
    let chol = nalgebra::Cholesky::new(hm).ok_or_else(|| Error::NotPositiveDefinite {
        role: "h".into(),
        x: vec![],
    })?;
    let h_inv = linalg::invert_f64(h)?;
    let trace: f64 = (0..n).map(|i| (0..n).map(|j| h_inv[i][j] * t[i][j]).sum::<f64>()).sum();
    let mu = trace / (n as f64 * (n as f64 - 1.0));
    let d: Mat = (0..n)
        .map(|i| (0..n).map(|j| t[i][j] - (n as f64 - 1.0) * mu * h[i][j]).collect())
        .collect();
    // L^-1 D L^-T
    let l = chol.l();
    let dm = linalg::to_dmatrix(&d);
    let left = l
        .solve_lower_triangular(&dm)
        .ok_or(Error::Singular("Cholesky factor of h"))?;
    let both = l
        .solve_lower_triangular(&left.transpose())
        .ok_or(Error::Singular("Cholesky factor of h"))?;
    let sym = (&both + both.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let residual = eig.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    Ok((mu, residual))
}

//! Numerical checkers for the four characterizations of weakly weighted
//! Einstein Kropina metrics, one per weight regime and representation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::{poly_divisible_by_alpha2, HomPoly};
use super::{fit_from_samples, tensor_einstein_check, weighted_samples, EinsteinAnsatz, Regime, WeightConfig};
use crate::error::{Error, Result};
use crate::forms::{ab_invariants, fit_eta, hess_f_closed, nav_quantities, AbInvariants, KropinaSpace};
use crate::linalg::{self, Mat};
use crate::sampling::SamplePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "41")]
    Nav,
    #[serde(rename = "44")]
    Ab,
    #[serde(rename = "51")]
    NuZero,
    #[serde(rename = "61")]
    Projective,
}

impl TheoremId {
    pub const ALL: [TheoremId; 4] = [TheoremId::Nav, TheoremId::Ab, TheoremId::NuZero, TheoremId::Projective];

    pub fn label(&self) -> &'static str {
        match self {
            TheoremId::Nav => "41",
            TheoremId::Ab => "44",
            TheoremId::NuZero => "51",
            TheoremId::Projective => "61",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            TheoremId::Nav => "navigation data, nu != 0",
            TheoremId::Ab => "(alpha, beta) data, nu != 0",
            TheoremId::NuZero => "nu = 0, kappa != 0",
            TheoremId::Projective => "projective Ricci, kappa = nu = 0",
        }
    }

    /// The checker for `cfg`, taking navigation data when `nav` is set.
    pub fn auto(cfg: &WeightConfig, nav: bool) -> TheoremId {
        match cfg.regime() {
            Regime::NuNonzero if nav => TheoremId::Nav,
            Regime::NuNonzero => TheoremId::Ab,
            Regime::NuZeroKappaNonzero => TheoremId::NuZero,
            Regime::Projective => TheoremId::Projective,
        }
    }

    fn regime(&self) -> Regime {
        match self {
            TheoremId::Nav | TheoremId::Ab => Regime::NuNonzero,
            TheoremId::NuZero => Regime::NuZeroKappaNonzero,
            TheoremId::Projective => Regime::Projective,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown theorem `{s}`, expected one of 41, 44, 51, 61")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionFailed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::PreconditionFailed => "PRECONDITION_FAILED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub name: String,
    /// Largest relative residual over the sample points.
    pub residual: f64,
    pub tolerance: f64,
    pub precondition: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub x: Vec<f64>,
    pub scalars: BTreeMap<String, f64>,
    pub forms: BTreeMap<String, Vec<f64>>,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub a: f64,
    pub c: f64,
    pub kappa: f64,
    pub nu: f64,
    pub tolerance: f64,
    pub conditions: Vec<ConditionResult>,
    pub points: Vec<PointRecord>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Largest value of a per-point scalar.
    pub fn max_scalar(&self, name: &str) -> Option<f64> {
        self.points
            .iter()
            .filter_map(|p| p.scalars.get(name))
            .copied()
            .reduce(f64::max)
    }
}

/// One point's contribution: residuals in a fixed order plus the record.
struct PointOutcome {
    residuals: Vec<(&'static str, f64, bool)>,
    record: PointRecord,
}

impl PointOutcome {
    fn new(x: &[f64]) -> Self {
        PointOutcome {
            residuals: Vec::new(),
            record: PointRecord {
                x: x.to_vec(),
                scalars: BTreeMap::new(),
                forms: BTreeMap::new(),
                residuals: BTreeMap::new(),
            },
        }
    }

    fn condition(&mut self, name: &'static str, residual: f64) {
        self.residuals.push((name, residual, false));
        self.record.residuals.insert(name.into(), residual);
    }

    fn precondition(&mut self, name: &'static str, residual: f64) {
        self.residuals.push((name, residual, true));
        self.record.residuals.insert(name.into(), residual);
    }

    fn scalar(&mut self, name: &str, v: f64) {
        self.record.scalars.insert(name.into(), v);
    }

    fn form(&mut self, name: &str, v: &[f64]) {
        self.record.forms.insert(name.into(), v.to_vec());
    }
}

fn assemble(
    theorem: TheoremId,
    cfg: &WeightConfig,
    tol: f64,
    outcomes: Vec<PointOutcome>,
    notes: Vec<String>,
) -> TheoremReport {
    let mut conditions: Vec<ConditionResult> = Vec::new();
    for o in &outcomes {
        for (k, (name, res, pre)) in o.residuals.iter().enumerate() {
            if conditions.len() <= k {
                conditions.push(ConditionResult {
                    name: (*name).into(),
                    residual: 0.0,
                    tolerance: tol,
                    precondition: *pre,
                    verdict: Verdict::Pass,
                });
            }
            let c = &mut conditions[k];
            if res.is_nan() || c.residual.is_nan() {
                c.residual = f64::NAN;
            } else {
                c.residual = c.residual.max(*res);
            }
        }
    }
    for c in &mut conditions {
        c.verdict = match (c.residual <= tol, c.precondition) {
            (true, _) => Verdict::Pass,
            (false, true) => Verdict::PreconditionFailed,
            (false, false) => Verdict::Fail,
        };
    }
    let verdict = if conditions.iter().any(|c| c.verdict == Verdict::PreconditionFailed) {
        Verdict::PreconditionFailed
    } else if conditions.iter().any(|c| c.verdict == Verdict::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    TheoremReport {
        theorem,
        a: cfg.a,
        c: cfg.c,
        kappa: cfg.kappa(),
        nu: cfg.nu(),
        tolerance: tol,
        conditions,
        points: outcomes.into_iter().map(|o| o.record).collect(),
        verdict,
        notes,
    }
}

fn require_regime(theorem: TheoremId, cfg: &WeightConfig, space: &KropinaSpace) -> Result<()> {
    if cfg.n != space.dim() {
        return Err(Error::Dimension {
            expected: space.dim(),
            got: cfg.n,
        });
    }
    if cfg.regime() != theorem.regime() {
        return Err(Error::Dispatch {
            theorem: theorem.label().into(),
            reason: format!(
                "weights a = {}, c = {} give kappa = {:.6e}, nu = {:.6e}",
                cfg.a,
                cfg.c,
                cfg.kappa(),
                cfg.nu()
            ),
        });
    }
    Ok(())
}

/// Signed sum that remembers the size of its terms.
#[derive(Default)]
struct Terms {
    value: f64,
    size: f64,
}

impl Terms {
    fn add(&mut self, t: f64) {
        self.value += t;
        self.size += t.abs();
    }

    fn relative(&self) -> f64 {
        self.value.abs() / self.size.max(1.0)
    }
}

/// Covector counterpart of [`Terms`], measured in the `a`-norm.
struct CoTerms<'a> {
    a_inv: &'a Mat,
    value: Vec<f64>,
    size: f64,
}

impl<'a> CoTerms<'a> {
    fn new(a_inv: &'a Mat) -> Self {
        CoTerms {
            a_inv,
            value: vec![0.0; a_inv.len()],
            size: 0.0,
        }
    }

    fn add(&mut self, coef: f64, v: &[f64]) {
        for (acc, x) in self.value.iter_mut().zip(v) {
            *acc += coef * x;
        }
        self.size += coef.abs() * linalg::metric_norm1(v, self.a_inv);
    }

    fn relative(&self) -> f64 {
        linalg::metric_norm1(&self.value, self.a_inv) / self.size.max(1.0)
    }
}

fn einstein_relative(dirs: &[Vec<f64>], values: &[(f64, f64)], ansatz: &EinsteinAnsatz) -> f64 {
    dirs.iter()
        .zip(values)
        .map(|(y, (f, ric))| (ric - ansatz.rhs(y, *f)).abs() / ric.abs().max(f * f))
        .fold(0.0, f64::max)
}

/// Generic-route samples and the fitted ansatz at one point.
struct Fitted {
    values: Vec<(f64, f64)>,
    ansatz: EinsteinAnsatz,
}

fn fitted(space: &KropinaSpace, cfg: &WeightConfig, p: &SamplePoint, out: &mut PointOutcome) -> Result<Fitted> {
    let values = weighted_samples(space, cfg, &p.x, &p.dirs)?;
    let ansatz = fit_from_samples(&p.dirs, &values)?;
    out.form("theta_fit", &ansatz.theta);
    out.scalar("sigma_fit", ansatz.sigma);
    if let super::Provenance::Fitted { residual } = ansatz.provenance {
        out.scalar("fit_rms", residual);
    }
    out.condition("einstein_fitted", einstein_relative(&p.dirs, &values, &ansatz));
    Ok(Fitted { values, ansatz })
}

fn sigma_gap(formula: f64, fit: f64) -> f64 {
    (formula - fit).abs() / formula.abs().max(1.0)
}

/// `sum_j v_j m[j][i]`.
fn row_contract(v: &[f64], m: &Mat) -> Vec<f64> {
    (0..v.len())
        .map(|i| (0..v.len()).map(|j| v[j] * m[j][i]).sum())
        .collect()
}

/// `-(s^k s_k / 2 + b^2 s^j_k s^k_j / 4) / ((n-1) b^2)`.
fn sigma_ab(inv: &AbInvariants) -> f64 {
    let n = inv.dim() as f64;
    -(0.5 * inv.s_sq + inv.b2 / 4.0 * inv.s_mixed_sq) / ((n - 1.0) * inv.b2)
}

/// Directions rescaled to `alpha(y) = 1`.
fn alpha_unit(inv: &AbInvariants, dirs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    dirs.iter()
        .map(|y| {
            let s = linalg::quadf(&inv.a, y).sqrt();
            y.iter().map(|v| v / s).collect()
        })
        .collect()
}

/// Left side minus right side of the linear condition shared by the
/// `nu != 0` and projective cases: `beta [...] + b^2 [...] = 0`.
fn one_form_condition(inv: &AbInvariants, eta: f64, theta: &[f64]) -> f64 {
    let n = inv.dim();
    let nf = n as f64;
    let b2 = inv.b2;
    let theta_b = linalg::dotf(theta, &inv.b_up);
    let mut c = CoTerms::new(&inv.a_inv);
    c.add((nf - 2.0) * inv.s_sq, &inv.b_low);
    c.add(3.0 * (nf - 1.0) * b2 * theta_b, &inv.b_low);
    c.add(-b2 * (inv.div_s + inv.s_mixed_sq), &inv.b_low);
    c.add(b2 * (nf - 3.0) * eta, &inv.s_vec);
    c.add(b2, &linalg::mat_vec(&inv.ds_vec, &inv.b_up));
    c.add(-b2 * b2, &inv.div_s_mixed);
    c.add(b2 * (nf - 1.0), &row_contract(&inv.s_vec, &inv.s_mixed));
    c.add(-3.0 * (nf - 1.0) * b2 * b2, theta);
    c.relative()
}

/// Checker on navigation data; needs `nu != 0`.
pub fn thm41_check(
    space: &KropinaSpace,
    cfg: &WeightConfig,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<TheoremReport> {
    require_regime(TheoremId::Nav, cfg, space)?;
    let n = space.dim();
    let nf = n as f64;
    let m = nf + 1.0;
    let outcomes = samples
        .par_iter()
        .map(|p| -> Result<PointOutcome> {
            let mut out = PointOutcome::new(&p.x);
            let q = nav_quantities(space, &p.x)?;
            let pk = &q.pack;
            let wi = &pk.w;
            let scale = linalg::metric_norm2(&pk.dw, &pk.h_inv).max(1.0);
            out.precondition("killing", linalg::metric_norm2(&wi.r, &pk.h_inv) / scale);
            out.precondition("s_vec_zero", linalg::metric_norm1(&wi.s_vec, &pk.h_inv) / scale);

            let t: Mat = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            pk.ricci[i][j] + cfg.a * m * pk.f_hess[i][j] - cfg.c * m * m * pk.f_grad[i] * pk.f_grad[j]
                        })
                        .collect()
                })
                .collect();
            let (mu, tres) = tensor_einstein_check(&t, &pk.h)?;
            out.condition(
                "ricci_tensor_einstein",
                tres / linalg::metric_norm2(&t, &pk.h_inv).max(1.0),
            );
            out.scalar("mu", mu);

            let w = &wi.w_up;
            let fw = linalg::dotf(&pk.f_grad, w);
            let fh_w = linalg::mat_vec(&pk.f_hess, w);
            let f_s = row_contract(&pk.f_grad, &wi.s_mixed);
            let theta: Vec<f64> = (0..n)
                .map(|i| {
                    (2.0 * cfg.a * m * (fh_w[i] + f_s[i]) - 2.0 * cfg.c * m * m * pk.f_grad[i] * fw)
                        / (3.0 * (nf - 1.0))
                })
                .collect();
            let ric_w = linalg::quadf(&pk.ricci, w);
            let ss: f64 = (0..n)
                .map(|i| (0..n).map(|j| wi.s_mixed[i][j] * wi.s_mixed[j][i]).sum::<f64>())
                .sum();
            let hess_w = linalg::quadf(&pk.f_hess, w);
            let sigma = mu - (ric_w + ss + cfg.a * m * hess_w - cfg.c * m * m * fw * fw) / (nf - 1.0);
            let theta_w = linalg::dotf(&theta, w);
            let sigma_mu =
                mu - 3.0 * theta_w - (ric_w + ss - cfg.a * m * hess_w + cfg.c * m * m * fw * fw) / (nf - 1.0);
            out.form("theta", &theta);
            out.scalar("sigma", sigma);
            out.scalar("sigma_from_mu", sigma_mu);

            let fit = fitted(space, cfg, p, &mut out)?;
            let theta_gap = linalg::metric_norm1(
                &theta
                    .iter()
                    .zip(&fit.ansatz.theta)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
                &pk.h_inv,
            ) / linalg::metric_norm1(&theta, &pk.h_inv).max(1.0);
            out.condition("theta_vs_fit", theta_gap);
            out.condition("sigma_vs_fit", sigma_gap(sigma, fit.ansatz.sigma));
            out.scalar("sigma_from_mu_vs_fit", sigma_gap(sigma_mu, fit.ansatz.sigma));
            let formula = EinsteinAnsatz::given(theta, sigma);
            out.condition("einstein_formula", einstein_relative(&p.dirs, &fit.values, &formula));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let gap = outcomes
        .iter()
        .map(|o| {
            let s = &o.record.scalars;
            sigma_gap(s["sigma"], s["sigma_from_mu"])
        })
        .fold(0.0, f64::max);
    let notes = vec![format!(
        "sigma from the stated formula and from the mu relation of the converse differ by at most {gap:.3e} (relative)"
    )];
    Ok(assemble(TheoremId::Nav, cfg, tol, outcomes, notes))
}

/// Checker on `(alpha, beta)` data; needs `nu != 0`.
pub fn thm44_check(
    space: &KropinaSpace,
    cfg: &WeightConfig,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<TheoremReport> {
    require_regime(TheoremId::Ab, cfg, space)?;
    let nf = space.dim() as f64;
    let (kappa, nu) = (cfg.kappa(), cfg.nu());
    let m = nf + 1.0;
    let outcomes = samples
        .par_iter()
        .map(|p| -> Result<PointOutcome> {
            let mut out = PointOutcome::new(&p.x);
            let inv = ab_invariants(space.alpha(), space.beta(), space.weight(), &p.x)?;
            let eta_fit = fit_eta(&inv);
            out.precondition("beta_isotropy", eta_fit.residual / eta_fit.scale.max(1.0));
            let eta = eta_fit.eta;
            out.scalar("eta", eta);

            let fit = fitted(space, cfg, p, &mut out)?;
            let theta = &fit.ansatz.theta;
            let b2 = inv.b2;
            let b4 = b2 * b2;
            let eta_b = linalg::dotf(&inv.eta_grad, &inv.b_up);
            let lambda = -((nf - 2.0) * eta * eta + eta_b) * b2
                + 3.0 * (nf - 1.0) * b2 * linalg::dotf(theta, &inv.b_up)
                + (nf - 2.0) * inv.s_sq
                - b2 * (inv.div_s + inv.s_mixed_sq);
            out.scalar("lambda", lambda);

            let mut worst: f64 = 0.0;
            for y in alpha_unit(&inv, &p.dirs) {
                let at = inv.at(&y);
                let eta0 = linalg::dotf(&inv.eta_grad, &y);
                let mut t = Terms::default();
                t.add(at.ricci00 * b4);
                t.add((nf - 2.0) * b2 * (at.s0_0 + eta0 * at.beta));
                t.add(-(nf - 2.0) * (2.0 * eta * at.beta * at.s0 + at.s0 * at.s0 + eta * eta * at.beta * at.beta));
                t.add(-(3.0 * kappa - nu - cfg.a * m) * b4 * at.f0 * at.f0);
                t.add((nf - 1.0 - kappa) * b4 * hess_f_closed(&inv, &y));
                t.add(-lambda * at.alpha2);
                worst = worst.max(t.relative());
            }
            out.condition("lambda_identity", worst);
            out.condition("one_form_identity", one_form_condition(&inv, eta, theta));

            let sigma = sigma_ab(&inv);
            out.scalar("sigma", sigma);
            out.condition("sigma_vs_fit", sigma_gap(sigma, fit.ansatz.sigma));
            let formula = EinsteinAnsatz::given(theta.clone(), sigma);
            out.condition("einstein_formula", einstein_relative(&p.dirs, &fit.values, &formula));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(TheoremId::Ab, cfg, tol, outcomes, Vec::new()))
}

/// Cubic `P` with `P(y) = t_ijk y^i y^j y^k`, divided by `alpha^2`.
fn cubic_quotient(inv: &AbInvariants, t: &crate::linalg::Tensor3, out: &mut PointOutcome) -> Vec<f64> {
    let d = poly_divisible_by_alpha2(&HomPoly::cubic(t), &inv.a);
    out.precondition("cubic_divisible", d.residual / d.scale.max(1.0));
    let zeta = d.quotient.coeffs().to_vec();
    out.form("zeta", &zeta);
    zeta
}

/// Checker for `nu = 0`, `kappa != 0`.
pub fn thm51_check(
    space: &KropinaSpace,
    cfg: &WeightConfig,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<TheoremReport> {
    require_regime(TheoremId::NuZero, cfg, space)?;
    let n = space.dim();
    let nf = n as f64;
    let kappa = cfg.kappa();
    let m = nf + 1.0;
    let outcomes = samples
        .par_iter()
        .map(|p| -> Result<PointOutcome> {
            let mut out = PointOutcome::new(&p.x);
            let inv = ab_invariants(space.alpha(), space.beta(), space.weight(), &p.x)?;
            let b2 = inv.b2;
            let b4 = b2 * b2;
            let k3 = 3.0 * kappa - cfg.a * m;
            let mut t = linalg::zeros3(n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        t[i][j][k] = kappa * (b2 * inv.dr[i][j][k] + 2.0 * inv.r[i][j] * (inv.r_vec[k] + inv.s_vec[k]))
                            + 2.0 * k3 * b2 * inv.r[i][j] * inv.f_grad[k];
                    }
                }
            }
            let zeta = cubic_quotient(&inv, &t, &mut out);

            let fit = fitted(space, cfg, p, &mut out)?;
            let theta = &fit.ansatz.theta;
            let theta_b = linalg::dotf(theta, &inv.b_up);
            let u = (nf - kappa) * inv.r_dot_s + (nf - 2.0) * inv.s_sq + 3.0 * (nf - 1.0) * b2 * theta_b
                - b2 * (inv.div_s + inv.s_mixed_sq + inv.s_r_trace);
            out.scalar("u", u);

            let mut worst: f64 = 0.0;
            for y in alpha_unit(&inv, &p.dirs) {
                let at = inv.at(&y);
                let mut e = Terms::default();
                e.add(at.beta * linalg::dotf(&zeta, &y));
                e.add(b4 * at.ricci00);
                e.add(b2 * at.r00_b);
                e.add((nf - 2.0) * b2 * at.s0_0);
                e.add(b2 * at.r00 * inv.trace_r);
                e.add(-(nf - 2.0) * at.s0 * at.s0);
                e.add((nf - 2.0 - kappa) * b2 * at.r0_0);
                e.add((kappa - nf) * at.r00 * inv.r_scalar);
                e.add((4.0 - 2.0 * kappa - 2.0 * nf) * at.r0 * at.s0);
                e.add(2.0 * (kappa + 1.0) * b2 * at.r0_s0);
                e.add((2.0 - 2.0 * kappa - nf) * at.r0 * at.r0);
                e.add((nf - 1.0 - kappa) * b4 * hess_f_closed(&inv, &y));
                e.add(-k3 * (2.0 * b2 * at.r0 * at.f0 + b4 * at.f0 * at.f0));
                e.add(-u * at.alpha2);
                worst = worst.max(e.relative());
            }
            out.condition("quadratic_identity", worst);

            let mut c = CoTerms::new(&inv.a_inv);
            c.add(u, &inv.b_low);
            c.add((kappa - nf) * inv.r_scalar, &inv.s_vec);
            c.add(b2, &linalg::mat_vec(&inv.ds_vec, &inv.b_up));
            c.add(b2 * inv.trace_r, &inv.s_vec);
            c.add(-b4, &inv.div_s_mixed);
            c.add((nf - kappa - 2.0) * b2, &row_contract(&inv.r_vec, &inv.s_mixed));
            c.add(-b2, &linalg::mat_vec(&inv.r, &inv.s_up));
            c.add((nf - 1.0) * b2, &row_contract(&inv.s_vec, &inv.s_mixed));
            c.add(-3.0 * (nf - 1.0) * b4, theta);
            out.condition("one_form_identity", c.relative());

            let sigma = sigma_ab(&inv);
            out.scalar("sigma", sigma);
            out.condition("sigma_vs_fit", sigma_gap(sigma, fit.ansatz.sigma));
            let formula = EinsteinAnsatz::given(theta.clone(), sigma);
            out.condition("einstein_formula", einstein_relative(&p.dirs, &fit.values, &formula));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(TheoremId::NuZero, cfg, tol, outcomes, Vec::new()))
}

/// Checker for the projective Ricci curvature, `kappa = nu = 0`.
pub fn thm61_check(
    space: &KropinaSpace,
    cfg: &WeightConfig,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<TheoremReport> {
    require_regime(TheoremId::Projective, cfg, space)?;
    let n = space.dim();
    let nf = n as f64;
    let outcomes = samples
        .par_iter()
        .map(|p| -> Result<PointOutcome> {
            let mut out = PointOutcome::new(&p.x);
            let inv = ab_invariants(space.alpha(), space.beta(), space.weight(), &p.x)?;
            let b2 = inv.b2;
            let b4 = b2 * b2;
            let eta_fit = fit_eta(&inv);
            out.precondition("beta_isotropy", eta_fit.residual / eta_fit.scale.max(1.0));
            let eta = eta_fit.eta;
            out.scalar("eta", eta);

            let mut t = linalg::zeros3(n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        t[i][j][k] = -2.0 * (nf - 1.0) * b2 * inv.r[i][j] * inv.f_grad[k];
                    }
                }
            }
            let zeta = cubic_quotient(&inv, &t, &mut out);

            let fit = fitted(space, cfg, p, &mut out)?;
            let theta = &fit.ansatz.theta;
            let u = (nf - 2.0) * inv.s_sq + 3.0 * (nf - 1.0) * b2 * linalg::dotf(theta, &inv.b_up)
                - b2 * (inv.div_s + inv.s_mixed_sq);
            out.scalar("u", u);
            let eta_b = linalg::dotf(&inv.eta_grad, &inv.b_up);

            let mut worst: f64 = 0.0;
            for y in alpha_unit(&inv, &p.dirs) {
                let at = inv.at(&y);
                let eta0 = linalg::dotf(&inv.eta_grad, &y);
                let mut e = Terms::default();
                e.add(at.beta * linalg::dotf(&zeta, &y));
                e.add(b4 * at.ricci00);
                e.add(((eta_b + (nf - 2.0) * eta * eta) * b2 - u) * at.alpha2);
                e.add(-(nf - 2.0) * eta * eta * at.beta * at.beta);
                e.add(((nf - 2.0) * (b2 * eta0 - 2.0 * eta * at.s0) + 2.0 * (nf - 1.0) * b2 * eta * at.f0) * at.beta);
                e.add((nf - 2.0) * (b2 * at.s0_0 - at.s0 * at.s0));
                e.add((nf - 1.0) * b4 * (hess_f_closed(&inv, &y) + at.f0 * at.f0));
                worst = worst.max(e.relative());
            }
            out.condition("quadratic_identity", worst);
            out.condition("one_form_identity", one_form_condition(&inv, eta, theta));

            let sigma = sigma_ab(&inv);
            out.scalar("sigma", sigma);
            out.condition("sigma_vs_fit", sigma_gap(sigma, fit.ansatz.sigma));
            let formula = EinsteinAnsatz::given(theta.clone(), sigma);
            out.condition("einstein_formula", einstein_relative(&p.dirs, &fit.values, &formula));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(TheoremId::Projective, cfg, tol, outcomes, Vec::new()))
}

/// Runs `theorem`, or the checker matching the weight regime when `None`.
pub fn check_theorem(
    space: &KropinaSpace,
    cfg: &WeightConfig,
    theorem: Option<TheoremId>,
    nav: bool,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<TheoremReport> {
    match theorem.unwrap_or_else(|| TheoremId::auto(cfg, nav)) {
        TheoremId::Nav => thm41_check(space, cfg, samples, tol),
        TheoremId::Ab => thm44_check(space, cfg, samples, tol),
        TheoremId::NuZero => thm51_check(space, cfg, samples, tol),
        TheoremId::Projective => thm61_check(space, cfg, samples, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::einstein::tests::flat_wind;
    use crate::expr::parse_expr;
    use crate::riemann::{MetricRole, RiemannianMetric, VectorFieldW};
    use crate::sampling::{sample_grid, ChartBox};
    use crate::testutil::*;

    const TOL: f64 = 1e-6;

    fn hopf_space() -> KropinaSpace {
        let (h, w) = hopf();
        KropinaSpace::from_nav(h, w, None, parse_expr("0", 3).unwrap()).unwrap()
    }

    fn hopf_samples(space: &KropinaSpace, points: usize) -> Vec<SamplePoint> {
        let bx = ChartBox::new(vec![0.3, -1.0, -1.0], vec![1.2, 1.0, 1.0]).unwrap();
        sample_grid(space, &bx, points, 12, 3).unwrap()
    }

    fn nu_zero(n: usize) -> WeightConfig {
        let nf = n as f64;
        let a = 0.25;
        WeightConfig::new(a, (3.0 * (nf - 1.0) - 4.0 * a * (nf + 1.0)) / (nf + 1.0).powi(2), n).unwrap()
    }

    fn assert_pass(r: &TheoremReport) {
        assert_eq!(r.verdict, Verdict::Pass, "{:#?}", r.conditions);
    }

    #[test]
    fn theorem_ids_parse() {
        for t in TheoremId::ALL {
            assert_eq!(t.label().parse::<TheoremId>().unwrap(), t);
        }
        assert!("42".parse::<TheoremId>().is_err());
    }

    #[test]
    fn flat_wind_passes_every_regime() {
        let space = flat_wind(3);
        let samples = sample_grid(&space, &ChartBox::cube(3, 1.0), 3, 8, 1).unwrap();
        for (t, cfg) in [
            (TheoremId::Nav, WeightConfig::ric_inf(3).unwrap()),
            (TheoremId::Ab, WeightConfig::ric_inf(3).unwrap()),
            (TheoremId::NuZero, nu_zero(3)),
            (TheoremId::Projective, WeightConfig::pric(3).unwrap()),
        ] {
            let r = check_theorem(&space, &cfg, Some(t), true, &samples, TOL).unwrap();
            assert_pass(&r);
            assert!(
                r.conditions.iter().all(|c| c.residual < 1e-12),
                "{t}: {:#?}",
                r.conditions
            );
            assert!(r.max_scalar("sigma").unwrap().abs() < 1e-12);
        }
        let r = thm41_check(&space, &WeightConfig::ric_inf(3).unwrap(), &samples, TOL).unwrap();
        assert!(r.max_scalar("mu").unwrap().abs() < 1e-12);
    }

    #[test]
    fn dispatch_mismatch_is_an_error() {
        let space = flat_wind(3);
        let samples = sample_grid(&space, &ChartBox::cube(3, 1.0), 1, 8, 1).unwrap();
        let pric = WeightConfig::pric(3).unwrap();
        assert!(matches!(
            thm41_check(&space, &pric, &samples, TOL),
            Err(Error::Dispatch { .. })
        ));
        assert!(matches!(
            thm44_check(&space, &pric, &samples, TOL),
            Err(Error::Dispatch { .. })
        ));
        assert!(matches!(
            thm51_check(&space, &WeightConfig::ric_inf(3).unwrap(), &samples, TOL),
            Err(Error::Dispatch { .. })
        ));
        assert!(matches!(
            thm61_check(&space, &nu_zero(3), &samples, TOL),
            Err(Error::Dispatch { .. })
        ));
        assert_eq!(TheoremId::auto(&pric, true), TheoremId::Projective);
        assert_eq!(TheoremId::auto(&nu_zero(3), true), TheoremId::NuZero);
        assert_eq!(
            TheoremId::auto(&WeightConfig::ric_inf(3).unwrap(), false),
            TheoremId::Ab
        );
    }

    #[test]
    fn hopf_passes_all_checkers() {
        let space = hopf_space();
        let samples = hopf_samples(&space, 3);
        let r = thm41_check(&space, &WeightConfig::ric_inf(3).unwrap(), &samples, TOL).unwrap();
        assert_pass(&r);
        for p in &r.points {
            assert!((p.scalars["mu"] - 1.0).abs() < 1e-9);
            assert!((p.scalars["sigma"] - 1.0).abs() < 1e-9);
        }
        assert_pass(&thm44_check(&space, &WeightConfig::ric_inf(3).unwrap(), &samples, TOL).unwrap());
        assert_pass(&thm51_check(&space, &nu_zero(3), &samples, TOL).unwrap());
        assert_pass(&thm61_check(&space, &WeightConfig::pric(3).unwrap(), &samples, TOL).unwrap());
    }

    #[test]
    fn gaussian_weight_is_weakly_einstein() {
        let h = RiemannianMetric::euclidean(3, MetricRole::H);
        let w = VectorFieldW::new(vec![
            parse_expr("1", 3).unwrap(),
            parse_expr("0", 3).unwrap(),
            parse_expr("0", 3).unwrap(),
        ]);
        let lambda = 0.4;
        let f = parse_expr(&format!("0.5*{lambda}*(x1^2 + x2^2 + x3^2)"), 3).unwrap();
        let space = KropinaSpace::from_nav(h, w, None, f).unwrap();
        let samples = sample_grid(&space, &ChartBox::cube(3, 1.0), 3, 12, 2).unwrap();
        let cfg = WeightConfig::ric_inf(3).unwrap();
        let r = thm41_check(&space, &cfg, &samples, TOL).unwrap();
        assert_pass(&r);
        let expect = 2.0 * cfg.a * 4.0 * lambda / 6.0;
        for p in &r.points {
            assert!((p.forms["theta"][0] - expect).abs() < 1e-9);
            assert!((p.forms["theta_fit"][0] - expect).abs() < 1e-6);
            assert!((p.scalars["mu"] - cfg.a * 4.0 * lambda / 2.0).abs() < 1e-9);
            assert!(p.scalars["sigma"].abs() < 1e-9);
        }
        assert_pass(&thm44_check(&space, &cfg, &samples, TOL).unwrap());
    }

    #[test]
    fn twisted_wind_fails_preconditions() {
        let h = RiemannianMetric::euclidean(3, MetricRole::H);
        let w = VectorFieldW::new(vec![
            parse_expr("cos(x2)", 3).unwrap(),
            parse_expr("sin(x2)", 3).unwrap(),
            parse_expr("0", 3).unwrap(),
        ]);
        let space = KropinaSpace::from_nav(h, w, None, parse_expr("0", 3).unwrap()).unwrap();
        let samples = sample_grid(&space, &ChartBox::cube(3, 1.0), 2, 8, 4).unwrap();
        let cfg = WeightConfig::ric_inf(3).unwrap();
        for r in [
            thm41_check(&space, &cfg, &samples, TOL).unwrap(),
            thm44_check(&space, &cfg, &samples, TOL).unwrap(),
            thm61_check(&space, &WeightConfig::pric(3).unwrap(), &samples, TOL).unwrap(),
        ] {
            assert_eq!(r.verdict, Verdict::PreconditionFailed, "{:#?}", r.conditions);
        }
    }

    #[test]
    fn zeta_matches_projective_closed_form() {
        // beta^# = x is a homothety of the flat metric, so r_00 = alpha^2
        let a = RiemannianMetric::euclidean(3, MetricRole::Alpha);
        let b = vec![
            parse_expr("x1 + 2", 3).unwrap(),
            parse_expr("x2", 3).unwrap(),
            parse_expr("x3", 3).unwrap(),
        ];
        let f = parse_expr("0.3*x1 - 0.2*x2*x3", 3).unwrap();
        let space = KropinaSpace::from_ab(a, b, f).unwrap();
        let bx = ChartBox::cube(3, 0.5);
        let samples = sample_grid(&space, &bx, 2, 8, 5).unwrap();
        let r = thm61_check(&space, &WeightConfig::pric(3).unwrap(), &samples, TOL).unwrap();
        assert!(r.condition("cubic_divisible").unwrap().residual < 1e-12);
        for p in &r.points {
            let inv = ab_invariants(space.alpha(), space.beta(), space.weight(), &p.x).unwrap();
            for k in 0..3 {
                let expect = -2.0 * 2.0 * inv.b2 * 1.0 * inv.f_grad[k];
                assert!((p.forms["zeta"][k] - expect).abs() < 1e-7 * expect.abs().max(1.0));
            }
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let space = hopf_space();
        let samples = hopf_samples(&space, 2);
        let cfg = WeightConfig::ric_inf(3).unwrap();
        let a = serde_json::to_string(&thm41_check(&space, &cfg, &samples, TOL).unwrap()).unwrap();
        let b = serde_json::to_string(&thm41_check(&space, &cfg, &samples, TOL).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

//! Closed forms against the generic pipeline, one table row per formula.

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{LoadedScenario, Tolerances};
use crate::error::{Error, Result};
use crate::finsler::{curvature_sample, s_curvature_generic, CurvatureSample};
use crate::forms::{
    ab_invariants, hess_f_closed, kropina_ricci_closed, kropina_spray_closed, nav_quantities, nav_ricci_isotropic,
    nav_riemann_isotropic, nav_spray, s_bh_closed, s_closed, s_dot_closed,
};
use crate::linalg;
use crate::sampling::{sample_grid, SamplePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Fail,
    Skipped,
}

/// Largest deviation of one formula over the sample grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRow {
    pub name: String,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub samples: usize,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_y: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub points: usize,
    pub directions: usize,
    pub rows: Vec<LadderRow>,
    pub passed: bool,
}

/// `|a - b| / max(|a|, |b|, F^degree)`; values of degree `d` in `y` scale like `F^d`.
pub fn ladder_deviation(a: f64, b: f64, f: f64, degree: i32) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f.powi(degree))
}

fn vec_deviation(a: &[f64], b: &[f64], f: f64, degree: i32) -> f64 {
    let d = a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let s = a.iter().chain(b).map(|v| v.abs()).fold(f.powi(degree), f64::max);
    d / s
}

struct Row {
    name: &'static str,
    tolerance: f64,
}

fn rows(t: &Tolerances) -> Vec<Row> {
    let r = |name, tolerance| Row { name, tolerance };
    vec![
        r("spray_ab", t.spray),
        r("spray_nav", t.spray),
        r("hess_f", t.spray),
        r("ricci_ab", t.curvature),
        r("riemann_nav_isotropic", t.curvature),
        r("ricci_nav_isotropic", t.curvature),
        r("killing_second_derivative", t.curvature),
        r("s_bh", t.s_curvature),
        r("s_weighted", t.s_curvature),
        r("s_dot_weighted", t.s_curvature),
    ]
}

/// Deviations of every row at one `(x, y)`; `None` marks a skipped row.
fn deviations(loaded: &LoadedScenario, x: &[f64], y: &[f64], hyp_tol: f64) -> Result<Vec<Option<f64>>> {
    let space = &loaded.space;
    let ab = space.ab_metric();
    let cs: CurvatureSample = curvature_sample(&ab, &space.weighted_density(), Some(space.weight()), x, y)?;
    let f = cs.f;
    let inv = ab_invariants(space.alpha(), space.beta(), space.weight(), x)?;
    let q = nav_quantities(space, x)?;
    let s_bh = s_curvature_generic(&ab, &space.bh_density(), x, y)?;

    let mut out = vec![
        Some(vec_deviation(&kropina_spray_closed(&inv, y), &cs.spray, f, 2)),
        Some(vec_deviation(&nav_spray(&q, y), &cs.spray, f, 2)),
        Some(ladder_deviation(
            hess_f_closed(&inv, y),
            cs.hess_f.expect("weight passed"),
            f,
            2,
        )),
        Some(ladder_deviation(kropina_ricci_closed(&inv, y), cs.ricci, f, 2)),
    ];
    match nav_riemann_isotropic(&q, y, hyp_tol) {
        Ok(r) => {
            let d = (0..r.len())
                .flat_map(|i| (0..r.len()).map(move |k| (i, k)))
                .map(|(i, k)| (r[i][k] - cs.riemann[i][k]).abs())
                .fold(0.0, f64::max);
            let s = r
                .iter()
                .chain(&cs.riemann)
                .flatten()
                .map(|v| v.abs())
                .fold(f * f, f64::max);
            out.push(Some(d / s));
            out.push(Some(ladder_deviation(
                nav_ricci_isotropic(&q, y, hyp_tol)?,
                cs.ricci,
                f,
                2,
            )));
            let scale = linalg::metric_norm2(&q.pack.dw, &q.pack.h_inv).max(1.0);
            out.push(Some(q.pack.killing_identity_residual() / scale));
        }
        Err(Error::Hypothesis(_)) => out.extend([None, None, None]),
        Err(e) => return Err(e),
    }
    out.push(Some(ladder_deviation(s_bh_closed(&inv, y), s_bh, f, 1)));
    out.push(Some(ladder_deviation(s_closed(&inv, y), cs.s, f, 1)));
    out.push(Some(ladder_deviation(s_dot_closed(&inv, y), cs.s_dot, f, 2)));
    Ok(out)
}

/// Runs the ladder on `points x directions` seeded samples.
pub fn verify_samples(loaded: &LoadedScenario, samples: &[SamplePoint]) -> Result<VerifyReport> {
    let tol = &loaded.scenario.tolerances;
    let spec = rows(tol);
    let per_point: Vec<Vec<(Vec<f64>, Vec<Option<f64>>)>> = samples
        .par_iter()
        .map(|p| {
            p.dirs
                .iter()
                .map(|y| Ok((y.clone(), deviations(loaded, &p.x, y, tol.check)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<LadderRow> = spec
        .iter()
        .map(|r| LadderRow {
            name: r.name.into(),
            tolerance: r.tolerance,
            max_deviation: 0.0,
            samples: 0,
            status: RowStatus::Skipped,
            worst_x: None,
            worst_y: None,
            note: None,
        })
        .collect();
    for (p, dirs) in samples.iter().zip(&per_point) {
        for (y, devs) in dirs {
            for (row, dev) in rows.iter_mut().zip(devs) {
                let Some(d) = dev else { continue };
                row.samples += 1;
                let worse = if d.is_nan() {
                    !row.max_deviation.is_nan()
                } else {
                    !row.max_deviation.is_nan() && (row.worst_x.is_none() || *d > row.max_deviation)
                };
                if worse {
                    row.max_deviation = *d;
                    row.worst_x = Some(p.x.clone());
                    row.worst_y = Some(y.clone());
                }
            }
        }
    }
    for row in &mut rows {
        row.status = if row.samples == 0 {
            row.note = Some("navigation field is not Killing with S_j = 0".into());
            RowStatus::Skipped
        } else if row.max_deviation <= row.tolerance {
            RowStatus::Pass
        } else {
            RowStatus::Fail
        };
    }
    let passed = rows.iter().all(|r| r.status != RowStatus::Fail);
    Ok(VerifyReport {
        points: samples.len(),
        directions: samples.first().map_or(0, |p| p.dirs.len()),
        rows,
        passed,
    })
}

pub fn verify(loaded: &LoadedScenario, points: usize, directions: usize, seed: u64) -> Result<VerifyReport> {
    let samples = sample_grid(&loaded.space, &loaded.scenario.bx, points, directions, seed)?;
    verify_samples(loaded, &samples)
}

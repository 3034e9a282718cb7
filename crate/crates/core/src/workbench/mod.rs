//! Scenarios, the check / verify / convert runners and `report/1` documents.

mod scenario;
mod verify;

pub use scenario::{
    builtin, load_scenario, LoadedScenario, Representation, SampleCounts, Scenario, Tolerances, WeightSpec, BUILTINS,
    MIN_ADMISSIBLE, SCENARIO_SCHEMA,
};
pub use verify::{ladder_deviation, verify, verify_samples, LadderRow, RowStatus, VerifyReport};

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::einstein::{check_theorem, TheoremId, TheoremReport, Verdict};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::finsler::FinslerMetric;
use crate::sampling::sample_grid;

pub const REPORT_SCHEMA: &str = "report/1";

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const FAIL: i32 = 2;
    pub const PRECONDITION: i32 = 3;
}

/// Exit code for an error raised while running a command.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Schema { .. } | Error::Io(_) | Error::Invalid(_) | Error::Dispatch { .. } => {
            exit::USAGE
        }
        _ => exit::PRECONDITION,
    }
}

pub fn tool_version() -> String {
    format!("kropina v{}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportError {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ReportError {
    fn from(e: &Error) -> Self {
        let kind = format!("{e:?}");
        let kind = kind.split([' ', '(', '{']).next().unwrap_or("Error").to_string();
        ReportError {
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

/// F at the same samples before and after a conversion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvertReport {
    pub from: Representation,
    pub to: Representation,
    pub gauge: String,
    pub samples: usize,
    pub max_relative_difference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Result of one command, schema `report/1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub tool: String,
    pub command: String,
    pub scenario: Scenario,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<TheoremReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convert: Option<ConvertReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ReportError>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl ReportDocument {
    fn new(command: &str, scenario: &Scenario, seed: u64) -> Self {
        ReportDocument {
            schema: REPORT_SCHEMA,
            tool: tool_version(),
            command: command.into(),
            scenario: scenario.clone(),
            seed,
            check: None,
            verify: None,
            convert: None,
            error: None,
            exit_code: exit::PASS,
            timings: None,
        }
    }

    fn fail_with(&mut self, e: &Error) {
        self.error = Some(e.into());
        self.exit_code = error_exit_code(e);
    }

    fn finish(mut self, start: Instant, timings: bool) -> Self {
        if timings {
            self.timings = Some(Timings {
                total_ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
        self
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text summary table.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} {}  scenario {}  seed {}",
            self.tool, self.command, self.scenario.name, self.seed
        );
        if let Some(c) = &self.check {
            let _ = writeln!(
                s,
                "theorem {} ({})  a = {}  c = {}  kappa = {:.6}  nu = {:.6}",
                c.theorem,
                c.theorem.summary(),
                c.a,
                c.c,
                c.kappa,
                c.nu
            );
            let _ = writeln!(s, "{:<26} {:>12} {:>10}  verdict", "condition", "residual", "tolerance");
            for cond in &c.conditions {
                let tag = if cond.precondition { " (pre)" } else { "" };
                let _ = writeln!(
                    s,
                    "{:<26} {:>12.3e} {:>10.1e}  {}{}",
                    cond.name, cond.residual, cond.tolerance, cond.verdict, tag
                );
            }
            for note in &c.notes {
                let _ = writeln!(s, "note: {note}");
            }
            let _ = writeln!(s, "verdict: {}", c.verdict);
        }
        if let Some(v) = &self.verify {
            let _ = writeln!(s, "{} points x {} directions", v.points, v.directions);
            let _ = writeln!(
                s,
                "{:<26} {:>12} {:>10} {:>8}  status",
                "formula", "max dev", "tolerance", "samples"
            );
            for r in &v.rows {
                let _ = writeln!(
                    s,
                    "{:<26} {:>12.3e} {:>10.1e} {:>8}  {:?}",
                    r.name, r.max_deviation, r.tolerance, r.samples, r.status
                );
            }
            let _ = writeln!(s, "verdict: {}", if v.passed { "PASS" } else { "FAIL" });
        }
        if let Some(c) = &self.convert {
            let _ = writeln!(
                s,
                "{:?} -> {:?} with gauge {}: max relative F difference {:.3e} over {} samples (tolerance {:.0e})",
                c.from, c.to, c.gauge, c.max_relative_difference, c.samples, c.tolerance
            );
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error ({}): {}", e.kind, e.message);
        }
        if let Some(t) = &self.timings {
            let _ = writeln!(s, "time: {:.1} ms", t.total_ms);
        }
        let _ = writeln!(s, "exit code {}", self.exit_code);
        s
    }
}

/// Options shared by the runners.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub directions: Option<usize>,
    pub tolerance: Option<f64>,
    pub timings: bool,
}

impl RunOptions {
    fn seed(&self, s: &Scenario) -> u64 {
        self.seed.unwrap_or(s.seed)
    }

    fn counts(&self, s: &Scenario) -> (usize, usize) {
        (
            self.points.unwrap_or(s.samples.points),
            self.directions.unwrap_or(s.samples.directions),
        )
    }
}

/// Runs the requested checker, or the one the weight regime selects.
pub fn run_check(loaded: &LoadedScenario, theorem: Option<TheoremId>, opts: &RunOptions) -> ReportDocument {
    let start = Instant::now();
    let s = &loaded.scenario;
    let seed = opts.seed(s);
    let mut doc = ReportDocument::new("check", s, seed);
    let (points, dirs) = opts.counts(s);
    let tol = opts.tolerance.unwrap_or(s.tolerances.check);
    let result = sample_grid(&loaded.space, &s.bx, points, dirs, seed)
        .and_then(|samples| check_theorem(&loaded.space, &loaded.weights, theorem, loaded.is_nav(), &samples, tol));
    match result {
        Ok(r) => {
            doc.exit_code = match r.verdict {
                Verdict::Pass => exit::PASS,
                Verdict::Fail => exit::FAIL,
                Verdict::PreconditionFailed => exit::PRECONDITION,
            };
            doc.check = Some(r);
        }
        Err(e) => doc.fail_with(&e),
    }
    doc.finish(start, opts.timings)
}

/// Cross-validates every closed form against the generic pipeline.
pub fn run_verify(loaded: &LoadedScenario, opts: &RunOptions) -> ReportDocument {
    let start = Instant::now();
    let s = &loaded.scenario;
    let seed = opts.seed(s);
    let mut doc = ReportDocument::new("verify", s, seed);
    let (points, dirs) = opts.counts(s);
    match verify(loaded, points, dirs, seed) {
        Ok(v) => {
            doc.exit_code = if v.passed { exit::PASS } else { exit::FAIL };
            doc.verify = Some(v);
        }
        Err(e) => doc.fail_with(&e),
    }
    doc.finish(start, opts.timings)
}

/// Relative F agreement required of a conversion.
pub const CONVERT_TOL: f64 = 1e-10;

fn strings(v: &[Expr]) -> Vec<String> {
    v.iter().map(Expr::to_string).collect()
}

fn string_mat(m: &[Vec<Expr>]) -> Vec<Vec<String>> {
    m.iter().map(|r| strings(r)).collect()
}

/// The scenario re-expressed in `to`. `gauge` is the new `|beta|_alpha`
/// for `ab` output, or the gauge stored with `nav` output.
pub fn convert_scenario(loaded: &LoadedScenario, to: Representation, gauge: Option<&str>) -> Result<Scenario> {
    let s = &loaded.scenario;
    let n = s.dimension;
    let gauge = gauge.map(|g| parse_expr(g, n)).transpose()?;
    let space = match &gauge {
        Some(g) => loaded.space.regauge(g.clone())?,
        None => loaded.space.clone(),
    };
    let centre: Vec<f64> = s.bx.lo.iter().zip(&s.bx.hi).map(|(l, h)| 0.5 * (l + h)).collect();
    space.gauge_at(&centre)?;
    let mut out = Scenario {
        name: format!("{}_{}", s.name, if to == Representation::Nav { "nav" } else { "ab" }),
        representation: to,
        h: None,
        w: None,
        gauge: None,
        a: None,
        b: None,
        ..s.clone()
    };
    match to {
        Representation::Nav => {
            out.h = Some(string_mat(space.h().components()));
            out.w = Some(strings(space.w().components()));
            out.gauge = Some(space.gauge().to_string());
        }
        Representation::Ab => {
            out.a = Some(string_mat(space.alpha().components()));
            out.b = Some(strings(space.beta()));
        }
    }
    Ok(out)
}

/// Converts and compares F of the re-parsed result at seeded samples.
pub fn run_convert(
    loaded: &LoadedScenario,
    to: Representation,
    gauge: Option<&str>,
    opts: &RunOptions,
) -> (ReportDocument, Option<Scenario>) {
    let start = Instant::now();
    let s = &loaded.scenario;
    let seed = opts.seed(s);
    let mut doc = ReportDocument::new("convert", s, seed);
    let (points, dirs) = opts.counts(s);
    let result = (|| -> Result<(ConvertReport, Scenario)> {
        let out = convert_scenario(loaded, to, gauge)?;
        let regauged = match gauge {
            Some(g) => loaded.space.regauge(parse_expr(g, s.dimension)?)?,
            None => loaded.space.clone(),
        };
        let back = LoadedScenario::new(Scenario::from_json_str(&out.to_json_pretty())?)?;
        let samples = sample_grid(&loaded.space, &s.bx, points, dirs, seed)?;
        let (m0, m1) = (loaded.space.ab_metric(), back.space.ab_metric());
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for p in &samples {
            regauged.gauge_at(&p.x)?;
            back.space.gauge_at(&p.x)?;
            for y in &p.dirs {
                let (f0, f1) = (m0.norm(&p.x, y)?, m1.norm(&p.x, y)?);
                worst = worst.max((f0 - f1).abs() / f0.abs().max(f1.abs()));
                count += 1;
            }
        }
        let report = ConvertReport {
            from: s.representation,
            to,
            gauge: regauged.gauge().to_string(),
            samples: count,
            max_relative_difference: worst,
            tolerance: CONVERT_TOL,
            passed: worst <= CONVERT_TOL,
        };
        Ok((report, out))
    })();
    match result {
        Ok((report, out)) => {
            doc.exit_code = if report.passed { exit::PASS } else { exit::FAIL };
            doc.convert = Some(report);
            (doc.finish(start, opts.timings), Some(out))
        }
        Err(e) => {
            doc.fail_with(&e);
            (doc.finish(start, opts.timings), None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunOptions {
        RunOptions {
            points: Some(3),
            directions: Some(10),
            ..RunOptions::default()
        }
    }

    #[test]
    fn auto_dispatch_on_builtins() {
        let cases = [
            ("euclid_parallel", TheoremId::Projective, exit::PASS),
            ("s3_hopf", TheoremId::Nav, exit::PASS),
            ("euclid_gaussian", TheoremId::Nav, exit::PASS),
            ("euclid_twist", TheoremId::Nav, exit::PRECONDITION),
            ("torus_wind", TheoremId::Nav, exit::FAIL),
        ];
        for (name, theorem, code) in cases {
            let doc = run_check(&load_scenario(name).unwrap(), None, &quick());
            assert_eq!(doc.check.as_ref().unwrap().theorem, theorem, "{name}");
            assert_eq!(doc.exit_code, code, "{name}\n{}", doc.render_text());
        }
    }

    #[test]
    fn explicit_mismatch_is_a_usage_error() {
        let doc = run_check(
            &load_scenario("s3_hopf").unwrap(),
            Some(TheoremId::Projective),
            &quick(),
        );
        assert_eq!(doc.exit_code, exit::USAGE);
        assert_eq!(doc.error.as_ref().unwrap().kind, "Dispatch");
    }

    #[test]
    fn reports_are_deterministic_without_timings() {
        let l = load_scenario("s3_hopf").unwrap();
        let a = run_check(&l, None, &quick()).to_json_pretty();
        assert_eq!(a, run_check(&l, None, &quick()).to_json_pretty());
        let timed = RunOptions {
            timings: true,
            ..quick()
        };
        assert!(run_check(&l, None, &timed).timings.is_some());
    }

    #[test]
    fn ab_nav_ab_round_trip() {
        let l = load_scenario("random:4").unwrap();
        let (doc, nav) = run_convert(&l, Representation::Nav, None, &quick());
        assert_eq!(doc.exit_code, exit::PASS, "{}", doc.render_text());
        let nav = LoadedScenario::new(nav.unwrap()).unwrap();
        let (doc, ab) = run_convert(&nav, Representation::Ab, None, &quick());
        assert_eq!(doc.exit_code, exit::PASS);
        let ab = LoadedScenario::new(ab.unwrap()).unwrap();
        let samples = sample_grid(&l.space, &l.scenario.bx, 3, 5, 1).unwrap();
        for p in &samples {
            let (a0, a1) = (
                l.space.alpha().values(&p.x).unwrap(),
                ab.space.alpha().values(&p.x).unwrap(),
            );
            for (r0, r1) in a0.iter().zip(&a1) {
                for (u, v) in r0.iter().zip(r1) {
                    assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
                }
            }
            for (e0, e1) in l.space.beta().iter().zip(ab.space.beta()) {
                let (u, v) = (e0.eval(&p.x).unwrap(), e1.eval(&p.x).unwrap());
                assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }
    }

    #[test]
    fn regauged_conversion_keeps_f() {
        let l = load_scenario("s3_hopf").unwrap();
        for g in ["2", "1+0.1*x1"] {
            let (doc, _) = run_convert(&l, Representation::Ab, Some(g), &quick());
            let c = doc.convert.unwrap();
            assert!(c.passed && c.max_relative_difference < 1e-10, "{g}: {c:?}");
        }
        let (doc, out) = run_convert(&l, Representation::Ab, Some("-1"), &quick());
        assert!(out.is_none());
        assert_eq!(doc.error.unwrap().kind, "NonPositiveGauge");
        assert_eq!(doc.exit_code, exit::PRECONDITION);
    }
}

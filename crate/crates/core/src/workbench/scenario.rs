//! Scenario files (`scenario/1`) and the built-in registry.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::einstein::WeightConfig;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::forms::KropinaSpace;
use crate::riemann::{MetricRole, RiemannianMetric, VectorFieldW};
use crate::sampling::{admissible_fraction, ChartBox};

pub const SCENARIO_SCHEMA: &str = "scenario/1";

/// Smallest accepted fraction of directions with `beta > 0`.
pub const MIN_ADMISSIBLE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Nav,
    Ab,
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nav" => Ok(Representation::Nav),
            "ab" => Ok(Representation::Ab),
            other => Err(Error::Invalid(format!(
                "representation must be `nav` or `ab`, got `{other}`"
            ))),
        }
    }
}

/// Weight constants by name or by value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Preset(String),
    Constants { a: f64, c: f64 },
}

impl WeightSpec {
    /// Presets: `plain`, `ricInf`, `pric`, `ricN:<N>`; otherwise `<a>,<c>`.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some((a, c)) = s.split_once(',') {
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Invalid(format!("weights `{s}`: `{t}` is not a number")))
            };
            return Ok(WeightSpec::Constants { a: num(a)?, c: num(c)? });
        }
        let known = matches!(s, "plain" | "ricInf" | "pric")
            || s.strip_prefix("ricN:").is_some_and(|t| t.parse::<f64>().is_ok());
        if !known {
            return Err(Error::Invalid(format!(
                "unknown weight preset `{s}`; expected plain, ricInf, pric, ricN:<N> or <a>,<c>"
            )));
        }
        Ok(WeightSpec::Preset(s.to_string()))
    }

    pub fn config(&self, n: usize) -> Result<WeightConfig> {
        match self {
            WeightSpec::Constants { a, c } => WeightConfig::new(*a, *c, n),
            WeightSpec::Preset(p) => match p.as_str() {
                "plain" => WeightConfig::plain(n),
                "ricInf" => WeightConfig::ric_inf(n),
                "pric" => WeightConfig::pric(n),
                other => match other.strip_prefix("ricN:").map(str::parse::<f64>) {
                    Some(Ok(big_n)) => WeightConfig::ric_n(big_n, n),
                    _ => Err(Error::Invalid(format!(
                        "unknown weight preset `{other}`; expected plain, ricInf, pric or ricN:<N>"
                    ))),
                },
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub points: usize,
    pub directions: usize,
}

/// Tolerances of the checkers and of the verification ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub check: f64,
    pub spray: f64,
    pub curvature: f64,
    pub s_curvature: f64,
    pub unit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            check: 1e-6,
            spray: 1e-8,
            curvature: 1e-7,
            s_curvature: 1e-5,
            unit: 1e-10,
        }
    }
}

/// A scenario as written in its file; expressions stay strings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub dimension: usize,
    pub representation: Representation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    pub f: String,
    pub weights: WeightSpec,
    #[serde(rename = "box")]
    pub bx: ChartBox,
    pub samples: SampleCounts,
    pub seed: u64,
    pub tolerances: Tolerances,
}

fn schema_err(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: if pointer.is_empty() { "/".into() } else { pointer.into() },
        message: message.into(),
    }
}

fn child(ptr: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{ptr}/{key}")
}

/// Strict reader over a JSON object that tracks the pointer of each field.
struct Obj<'a> {
    map: &'a Map<String, Value>,
    ptr: String,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, ptr: &str) -> Result<Self> {
        match v {
            Value::Object(map) => Ok(Obj { map, ptr: ptr.into() }),
            _ => Err(schema_err(ptr, "expected an object")),
        }
    }

    fn allow_only(&self, keys: &[&str]) -> Result<()> {
        match self.map.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(schema_err(&child(&self.ptr, k), "unknown field")),
            None => Ok(()),
        }
    }

    fn opt(&self, key: &str) -> Option<(&'a Value, String)> {
        self.map.get(key).map(|v| (v, child(&self.ptr, key)))
    }

    fn req(&self, key: &str) -> Result<(&'a Value, String)> {
        self.opt(key)
            .ok_or_else(|| schema_err(&child(&self.ptr, key), format!("missing required field `{key}`")))
    }
}

fn as_str(v: &Value, ptr: &str) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| schema_err(ptr, "expected a string"))
}

fn as_uint(v: &Value, ptr: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| schema_err(ptr, "expected a nonnegative integer"))
}

fn as_f64(v: &Value, ptr: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| schema_err(ptr, "expected a number"))
}

fn as_array<'a>(v: &'a Value, ptr: &str, len: usize) -> Result<&'a Vec<Value>> {
    let arr = v.as_array().ok_or_else(|| schema_err(ptr, "expected an array"))?;
    if arr.len() != len {
        return Err(schema_err(ptr, format!("expected {len} entries, found {}", arr.len())));
    }
    Ok(arr)
}

/// An expression given as a string or a bare number, checked against `n`.
fn as_expr(v: &Value, ptr: &str, n: usize) -> Result<String> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(x) => x.to_string(),
        _ => return Err(schema_err(ptr, "expected an expression string")),
    };
    parse_expr(&text, n).map_err(|e| schema_err(ptr, format!("at offset {}: {}", e.offset, e.kind)))?;
    Ok(text)
}

fn expr_vec(v: &Value, ptr: &str, n: usize) -> Result<Vec<String>> {
    as_array(v, ptr, n)?
        .iter()
        .enumerate()
        .map(|(i, e)| as_expr(e, &child(ptr, i), n))
        .collect()
}

fn expr_mat(v: &Value, ptr: &str, n: usize) -> Result<Vec<Vec<String>>> {
    as_array(v, ptr, n)?
        .iter()
        .enumerate()
        .map(|(i, row)| expr_vec(row, &child(ptr, i), n))
        .collect()
}

fn f64_vec(v: &Value, ptr: &str, n: usize) -> Result<Vec<f64>> {
    as_array(v, ptr, n)?
        .iter()
        .enumerate()
        .map(|(i, e)| as_f64(e, &child(ptr, i)))
        .collect()
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| schema_err("", format!("not valid JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let o = Obj::new(v, "")?;
        o.allow_only(&[
            "schema",
            "name",
            "description",
            "dimension",
            "representation",
            "h",
            "w",
            "gauge",
            "a",
            "b",
            "f",
            "weights",
            "box",
            "samples",
            "seed",
            "tolerances",
        ])?;
        let schema = match o.opt("schema") {
            Some((v, p)) => {
                let s = as_str(v, &p)?;
                if s != SCENARIO_SCHEMA {
                    return Err(schema_err(
                        &p,
                        format!("unsupported schema `{s}`, expected `{SCENARIO_SCHEMA}`"),
                    ));
                }
                s
            }
            None => SCENARIO_SCHEMA.to_string(),
        };
        let (v, p) = o.req("name")?;
        let name = as_str(v, &p)?;
        let description = o.opt("description").map(|(v, p)| as_str(v, &p)).transpose()?;
        let (v, p) = o.req("dimension")?;
        let n = as_uint(v, &p)? as usize;
        if !(2..=6).contains(&n) {
            return Err(schema_err(&p, format!("dimension must lie in 2..=6, got {n}")));
        }
        let (v, p) = o.req("representation")?;
        let representation: Representation = as_str(v, &p)?
            .parse()
            .map_err(|e: Error| schema_err(&p, e.to_string()))?;

        let (mut h, mut w, mut gauge, mut a, mut b) = (None, None, None, None, None);
        let forbid = |keys: &[&str]| -> Result<()> {
            match keys.iter().find(|k| o.map.contains_key(**k)) {
                Some(k) => Err(schema_err(
                    &child("", k),
                    format!(
                        "field `{k}` does not belong to representation `{}`",
                        match representation {
                            Representation::Nav => "nav",
                            Representation::Ab => "ab",
                        }
                    ),
                )),
                None => Ok(()),
            }
        };
        match representation {
            Representation::Nav => {
                forbid(&["a", "b"])?;
                let (v, p) = o.req("h")?;
                h = Some(expr_mat(v, &p, n)?);
                let (v, p) = o.req("w")?;
                w = Some(expr_vec(v, &p, n)?);
                gauge = o.opt("gauge").map(|(v, p)| as_expr(v, &p, n)).transpose()?;
            }
            Representation::Ab => {
                forbid(&["h", "w", "gauge"])?;
                let (v, p) = o.req("a")?;
                a = Some(expr_mat(v, &p, n)?);
                let (v, p) = o.req("b")?;
                b = Some(expr_vec(v, &p, n)?);
            }
        }
        let f = o
            .opt("f")
            .map(|(v, p)| as_expr(v, &p, n))
            .transpose()?
            .unwrap_or_else(|| "0".into());

        let weights = match o.opt("weights") {
            None => WeightSpec::Preset("ricInf".into()),
            Some((Value::String(s), p)) => {
                let spec = WeightSpec::Preset(s.clone());
                spec.config(n).map_err(|e| schema_err(&p, e.to_string()))?;
                spec
            }
            Some((v, p)) => {
                let w = Obj::new(v, &p)?;
                w.allow_only(&["a", "c"])?;
                let (av, ap) = w.req("a")?;
                let (cv, cp) = w.req("c")?;
                WeightSpec::Constants {
                    a: as_f64(av, &ap)?,
                    c: as_f64(cv, &cp)?,
                }
            }
        };

        let (v, p) = o.req("box")?;
        let bo = Obj::new(v, &p)?;
        bo.allow_only(&["lo", "hi"])?;
        let (lv, lp) = bo.req("lo")?;
        let (hv, hp) = bo.req("hi")?;
        let bx =
            ChartBox::new(f64_vec(lv, &lp, n)?, f64_vec(hv, &hp, n)?).map_err(|e| schema_err(&p, e.to_string()))?;

        let mut samples = SampleCounts {
            points: 10,
            directions: 20,
        };
        if let Some((v, p)) = o.opt("samples") {
            let so = Obj::new(v, &p)?;
            so.allow_only(&["points", "directions"])?;
            if let Some((v, p)) = so.opt("points") {
                samples.points = as_uint(v, &p)? as usize;
            }
            if let Some((v, p)) = so.opt("directions") {
                samples.directions = as_uint(v, &p)? as usize;
                if samples.directions < n + 2 {
                    return Err(schema_err(&p, format!("need at least {} directions", n + 2)));
                }
            }
            if samples.points == 0 {
                return Err(schema_err(&child(&p, "points"), "need at least one point"));
            }
        }
        let seed = o.opt("seed").map(|(v, p)| as_uint(v, &p)).transpose()?.unwrap_or(0);

        let mut tolerances = Tolerances::default();
        if let Some((v, p)) = o.opt("tolerances") {
            let to = Obj::new(v, &p)?;
            to.allow_only(&["check", "spray", "curvature", "s_curvature", "unit"])?;
            for (key, slot) in [
                ("check", &mut tolerances.check),
                ("spray", &mut tolerances.spray),
                ("curvature", &mut tolerances.curvature),
                ("s_curvature", &mut tolerances.s_curvature),
                ("unit", &mut tolerances.unit),
            ] {
                if let Some((v, p)) = to.opt(key) {
                    let t = as_f64(v, &p)?;
                    if !(t > 0.0 && t.is_finite()) {
                        return Err(schema_err(&p, "tolerance must be positive"));
                    }
                    *slot = t;
                }
            }
        }

        Ok(Scenario {
            schema,
            name,
            description,
            dimension: n,
            representation,
            h,
            w,
            gauge,
            a,
            b,
            f,
            weights,
            bx,
            samples,
            seed,
            tolerances,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Builds the Kropina space the scenario describes.
    pub fn space(&self) -> Result<KropinaSpace> {
        let n = self.dimension;
        let parse = |s: &String| parse_expr(s, n).map_err(Error::from);
        let parse_vec = |v: &[String]| v.iter().map(parse).collect::<Result<Vec<Expr>>>();
        let parse_mat = |m: &[Vec<String>]| m.iter().map(|r| parse_vec(r)).collect::<Result<Vec<Vec<Expr>>>>();
        let f = parse(&self.f)?;
        let missing = |k: &str| schema_err(&child("", k), format!("missing required field `{k}`"));
        match self.representation {
            Representation::Nav => {
                let h = self.h.as_ref().ok_or_else(|| missing("h"))?;
                let w = self.w.as_ref().ok_or_else(|| missing("w"))?;
                let h =
                    RiemannianMetric::new(parse_mat(h)?, MetricRole::H).map_err(|e| schema_err("/h", e.to_string()))?;
                let gauge = self.gauge.as_ref().map(parse).transpose()?;
                KropinaSpace::from_nav(h, VectorFieldW::new(parse_vec(w)?), gauge, f)
            }
            Representation::Ab => {
                let a = self.a.as_ref().ok_or_else(|| missing("a"))?;
                let b = self.b.as_ref().ok_or_else(|| missing("b"))?;
                let a = RiemannianMetric::new(parse_mat(a)?, MetricRole::Alpha)
                    .map_err(|e| schema_err("/a", e.to_string()))?;
                KropinaSpace::from_ab(a, parse_vec(b)?, f)
            }
        }
    }

    pub fn weight_config(&self) -> Result<WeightConfig> {
        self.weights.config(self.dimension)
    }
}

/// A validated scenario with its space and weights.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub space: KropinaSpace,
    pub weights: WeightConfig,
}

/// Number of probe points used by load-time validation.
const PROBES: usize = 8;

impl LoadedScenario {
    /// Builds the space and checks positivity, `|W|_h = 1` and the
    /// admissible fraction at seeded probe points of the box.
    pub fn new(scenario: Scenario) -> Result<Self> {
        let space = scenario.space()?;
        let weights = scenario.weight_config()?;
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed ^ 0x5eed);
        for k in 0..PROBES {
            let x = if k == 0 {
                scenario
                    .bx
                    .lo
                    .iter()
                    .zip(&scenario.bx.hi)
                    .map(|(l, h)| 0.5 * (l + h))
                    .collect()
            } else {
                scenario.bx.sample(&mut rng)
            };
            space.check_point(&x, scenario.tolerances.unit)?;
            let frac = admissible_fraction(&space, &x, 400, &mut rng)?;
            if frac <= MIN_ADMISSIBLE {
                return Err(schema_err(
                    "/box",
                    format!("only {:.1}% of directions are admissible at {x:?}", 100.0 * frac),
                ));
            }
        }
        Ok(LoadedScenario {
            scenario,
            space,
            weights,
        })
    }

    pub fn is_nav(&self) -> bool {
        self.scenario.representation == Representation::Nav
    }
}

/// Resolves a registry name or reads a scenario file.
pub fn load_scenario(name_or_path: &str) -> Result<LoadedScenario> {
    let scenario = match builtin(name_or_path)? {
        Some(s) => s,
        None => {
            let path = Path::new(name_or_path);
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Io(format!(
                    "`{name_or_path}` is neither a built-in scenario nor a readable file: {e}"
                ))
            })?;
            Scenario::from_json_str(&text)?
        }
    };
    LoadedScenario::new(scenario)
}

fn strs<const N: usize>(v: [&str; N]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn identity(n: usize) -> Vec<Vec<String>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { "1" } else { "0" }.to_string()).collect())
        .collect()
}

fn nav(
    name: &str,
    description: &str,
    h: Vec<Vec<String>>,
    w: Vec<String>,
    f: &str,
    weights: &str,
    bx: ChartBox,
) -> Scenario {
    Scenario {
        schema: SCENARIO_SCHEMA.into(),
        name: name.into(),
        description: Some(description.into()),
        dimension: w.len(),
        representation: Representation::Nav,
        h: Some(h),
        w: Some(w),
        gauge: None,
        a: None,
        b: None,
        f: f.into(),
        weights: WeightSpec::Preset(weights.into()),
        bx,
        samples: SampleCounts {
            points: 10,
            directions: 20,
        },
        seed: 1,
        tolerances: Tolerances::default(),
    }
}

/// Names and one-line descriptions of the built-in scenarios.
pub const BUILTINS: [(&str, &str); 6] = [
    ("euclid_parallel", "flat R^3 with the constant wind e1, f = 0"),
    ("s3_hopf", "unit 3-sphere in Hopf coordinates with the unit Hopf field"),
    ("euclid_gaussian", "flat R^3, wind e1, Gaussian weight f = 0.2 |x|^2"),
    (
        "euclid_twist",
        "flat R^3 with the non-Killing unit wind (cos x2, sin x2, 0)",
    ),
    (
        "torus_wind",
        "flat 3-torus, constant oblique wind, periodic weight 0.2 sin(x1)",
    ),
    (
        "random:<seed>",
        "seeded (alpha, beta) data with polynomial coefficients",
    ),
];

/// The built-in scenario called `name`, if any.
pub fn builtin(name: &str) -> Result<Option<Scenario>> {
    let e1 = || strs(["1", "0", "0"]);
    Ok(Some(match name {
        "euclid_parallel" => nav(
            "euclid_parallel",
            BUILTINS[0].1,
            identity(3),
            e1(),
            "0",
            "pric",
            ChartBox::cube(3, 1.0),
        ),
        "s3_hopf" => nav(
            "s3_hopf",
            BUILTINS[1].1,
            vec![
                strs(["1", "0", "0"]),
                strs(["0", "sin(x1)^2", "0"]),
                strs(["0", "0", "cos(x1)^2"]),
            ],
            strs(["0", "1", "1"]),
            "0",
            "ricInf",
            ChartBox::new(vec![0.3, -1.0, -1.0], vec![1.2, 1.0, 1.0])?,
        ),
        "euclid_gaussian" => nav(
            "euclid_gaussian",
            BUILTINS[2].1,
            identity(3),
            e1(),
            "0.2*(x1^2 + x2^2 + x3^2)",
            "ricInf",
            ChartBox::cube(3, 1.0),
        ),
        "euclid_twist" => nav(
            "euclid_twist",
            BUILTINS[3].1,
            identity(3),
            strs(["cos(x2)", "sin(x2)", "0"]),
            "0",
            "ricInf",
            ChartBox::cube(3, 1.0),
        ),
        "torus_wind" => nav(
            "torus_wind",
            BUILTINS[4].1,
            identity(3),
            strs(["cos(0.6)", "sin(0.6)", "0"]),
            "0.2*sin(x1)",
            "ricInf",
            ChartBox::cube(3, std::f64::consts::PI),
        ),
        other => match other.strip_prefix("random:") {
            Some(seed) => {
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| Error::Invalid(format!("`{other}`: seed must be a nonnegative integer")))?;
                random_ab(seed)
            }
            None => return Ok(None),
        },
    }))
}

/// Seeded `(a, b)` data with quadratic coefficients, positive definite on
/// the cube of half-width 0.5.
fn random_ab(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3;
    let mut c = |lo: f64, hi: f64| -> String { format!("{:.3}", rng.random_range(lo..hi)) };
    let mut a = vec![vec![String::new(); n]; n];
    for i in 0..n {
        a[i][i] = format!("1 + {}*x{}^2", c(0.0, 0.3), (i + 1) % n + 1);
        for j in (i + 1)..n {
            let e = format!("{}*x{}", c(-0.15, 0.15), (i + j) % n + 1);
            a[i][j] = e.clone();
            a[j][i] = e;
        }
    }
    let b = vec![
        format!("1 + {}*x2 + {}*x1*x3", c(-0.3, 0.3), c(-0.2, 0.2)),
        format!("{}*x3 + {}*x1^2", c(-0.3, 0.3), c(-0.2, 0.2)),
        format!("{} + {}*x1*x2", c(-0.3, 0.3), c(-0.2, 0.2)),
    ];
    Scenario {
        schema: SCENARIO_SCHEMA.into(),
        name: format!("random:{seed}"),
        description: Some(BUILTINS[5].1.into()),
        dimension: n,
        representation: Representation::Ab,
        h: None,
        w: None,
        gauge: None,
        a: Some(a),
        b: Some(b),
        f: format!("{}*sin(x1) + {}*x2*x3", c(-0.5, 0.5), c(-0.5, 0.5)),
        weights: WeightSpec::Preset("ricInf".into()),
        bx: ChartBox::cube(n, 0.5),
        samples: SampleCounts {
            points: 10,
            directions: 20,
        },
        seed,
        tolerances: Tolerances::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load_and_validate() {
        for name in [
            "euclid_parallel",
            "s3_hopf",
            "euclid_gaussian",
            "euclid_twist",
            "torus_wind",
            "random:7",
        ] {
            let l = load_scenario(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(l.space.dim(), 3);
        }
        let p = load_scenario("euclid_parallel").unwrap();
        assert_eq!(p.scenario.w.as_ref().unwrap(), &strs(["1", "0", "0"]));
        assert_eq!(p.scenario.f, "0");
        assert!(load_scenario("no_such_scenario").is_err());
        assert!(builtin("random:x").is_err());
    }

    #[test]
    fn json_round_trip() {
        for name in ["s3_hopf", "random:3"] {
            let s = builtin(name).unwrap().unwrap();
            assert_eq!(Scenario::from_json_str(&s.to_json_pretty()).unwrap(), s);
        }
    }

    fn pointer_of(text: &str) -> String {
        match Scenario::from_json_str(text).unwrap_err() {
            Error::Schema { pointer, .. } => pointer,
            other => panic!("expected a schema error, got {other}"),
        }
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let mut v: Value = serde_json::from_str(&builtin("s3_hopf").unwrap().unwrap().to_json_pretty()).unwrap();
        let base = v.clone();
        v.as_object_mut().unwrap().remove("dimension");
        assert_eq!(pointer_of(&v.to_string()), "/dimension");

        let mut v = base.clone();
        v["h"][1][1] = Value::String("sin(x1".into());
        assert_eq!(pointer_of(&v.to_string()), "/h/1/1");

        let mut v = base.clone();
        v["w"][2] = Value::String("x4".into());
        assert_eq!(pointer_of(&v.to_string()), "/w/2");

        let mut v = base.clone();
        v["box"]["lo"][0] = Value::String("zero".into());
        assert_eq!(pointer_of(&v.to_string()), "/box/lo/0");

        let mut v = base.clone();
        v["colour"] = Value::Bool(true);
        assert_eq!(pointer_of(&v.to_string()), "/colour");

        let mut v = base.clone();
        v["a"] = v["h"].clone();
        assert_eq!(pointer_of(&v.to_string()), "/a");

        let mut v = base;
        v["weights"] = Value::String("ricN:3".into());
        assert_eq!(pointer_of(&v.to_string()), "/weights");
    }

    #[test]
    fn non_unit_wind_is_rejected_at_load() {
        let mut s = builtin("euclid_parallel").unwrap().unwrap();
        s.w = Some(strs(["1.1", "0", "0"]));
        assert!(matches!(LoadedScenario::new(s), Err(Error::NotUnit { .. })));
    }

    #[test]
    fn weight_specs() {
        assert_eq!(
            WeightSpec::parse("0.5, -1").unwrap(),
            WeightSpec::Constants { a: 0.5, c: -1.0 }
        );
        assert_eq!(WeightSpec::parse("ricN:7").unwrap().config(3).unwrap().c, 0.25);
        assert!(WeightSpec::parse("bogus").is_err());
    }
}

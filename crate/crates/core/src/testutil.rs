use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{parse_expr, Expr};
use crate::riemann::{MetricRole, RiemannianMetric, VectorFieldW};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn exprs(rows: &[&str], n: usize) -> Vec<Expr> {
    rows.iter().map(|s| parse_expr(s, n).unwrap()).collect()
}

pub fn metric(rows: &[&[&str]]) -> RiemannianMetric {
    let n = rows.len();
    RiemannianMetric::new(rows.iter().map(|r| exprs(r, n)).collect(), MetricRole::H).unwrap()
}

/// Diagonally dominant metric with trigonometric off-diagonal terms.
pub fn random_metric(n: usize, rng: &mut impl Rng) -> RiemannianMetric {
    let mut rows = vec![vec![String::new(); n]; n];
    for i in 0..n {
        for j in i..n {
            let c: f64 = rng.random_range(0.3..1.2);
            let d: f64 = rng.random_range(-1.0..1.0);
            let s = if i == j {
                format!("2 + 0.3*sin({c:.3}*x{} + {d:.3}) + 0.1*x{}^2", i + 1, (i + 1) % n + 1)
            } else {
                format!("0.25*sin({c:.3}*(x{} + x{}) + {d:.3})", i + 1, j + 1)
            };
            rows[i][j] = s.clone();
            rows[j][i] = s;
        }
    }
    let c = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_expr(s, n).unwrap()).collect())
        .collect();
    RiemannianMetric::new(c, MetricRole::H).unwrap()
}

pub fn random_field(n: usize, rng: &mut impl Rng) -> VectorFieldW {
    let comps = (0..n)
        .map(|i| {
            let c: f64 = rng.random_range(-1.0..1.0);
            let d: f64 = rng.random_range(0.2..1.0);
            parse_expr(&format!("{c:.3} + {d:.3}*cos(x{}) * x{}", (i + 1) % n + 1, i + 1), n).unwrap()
        })
        .collect();
    VectorFieldW::new(comps)
}

pub fn random_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-0.8..0.8)).collect()
}

pub fn hopf() -> (RiemannianMetric, VectorFieldW) {
    let h = metric(&[&["1", "0", "0"], &["0", "sin(x1)^2", "0"], &["0", "0", "cos(x1)^2"]]);
    let w = VectorFieldW::new(exprs(&["0", "1", "1"], 3));
    (h, w)
}

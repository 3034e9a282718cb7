//! Round 2- and 3-spheres in polar charts: Christoffel symbols and Ricci = (n-1) h.

use kropina::parse_expr;
use kropina::riemann::{christoffel, ricci_h, MetricRole, RiemannianMetric};

fn sphere(n: usize) -> kropina::Result<RiemannianMetric> {
    let mut g = vec![vec![parse_expr("0", n)?; n]; n];
    let mut warp = String::from("1");
    for i in 0..n {
        g[i][i] = parse_expr(&warp, n)?;
        warp = format!("{warp}*sin(x{})^2", i + 1);
    }
    RiemannianMetric::new(g, MetricRole::H)
}

fn main() -> kropina::Result<()> {
    for n in [2, 3] {
        let g = sphere(n)?;
        let x: Vec<f64> = (0..n).map(|i| 0.9 + 0.2 * i as f64).collect();
        let gamma = christoffel(&g, &x)?;
        let ric = ricci_h(&g, &x)?;
        let gv = g.values(&x)?;
        let gap = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (ric[i][j] - (n as f64 - 1.0) * gv[i][j]).abs())
            .fold(0.0, f64::max);
        println!(
            "S^{n} at {x:?}: Gamma^0_11 = {:+.6}, max |Ric - (n-1) h| = {gap:.2e}",
            gamma[0][1][1]
        );
    }
    Ok(())
}

//! Weighted Einstein checks: the Hopf sphere in every weight regime and the
//! flat Gaussian-weighted space, where the fitted 1-form is nonzero.

use kropina::einstein::{check_theorem, WeightConfig};
use kropina::sampling::sample_grid;
use kropina::workbench::load_scenario;

fn main() -> kropina::Result<()> {
    let hopf = load_scenario("s3_hopf")?;
    let samples = sample_grid(&hopf.space, &hopf.scenario.bx, 4, 12, 1)?;
    let nu_zero = WeightConfig::new(0.25, (6.0 - 4.0) / 16.0, 3)?;
    for cfg in [WeightConfig::ric_inf(3)?, nu_zero, WeightConfig::pric(3)?] {
        let r = check_theorem(&hopf.space, &cfg, None, true, &samples, 1e-6)?;
        println!(
            "s3_hopf a = {:.4} c = {:+.4} -> theorem {} {}",
            cfg.a, cfg.c, r.theorem, r.verdict
        );
        for c in &r.conditions {
            println!("    {:<24} {:.2e}", c.name, c.residual);
        }
    }
    let g = load_scenario("euclid_gaussian")?;
    let samples = sample_grid(&g.space, &g.scenario.bx, 3, 12, 2)?;
    let r = check_theorem(&g.space, &g.weights, None, true, &samples, 1e-6)?;
    println!("euclid_gaussian -> theorem {} {}", r.theorem, r.verdict);
    for p in &r.points {
        println!("    x = {:+.3?}  theta_fit = {:+.6?}", p.x, p.forms["theta_fit"]);
    }
    Ok(())
}

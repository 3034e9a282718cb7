//! Monte-Carlo Busemann-Hausdorff density of a Kropina metric against the
//! closed form (2/b)^n sqrt(det a).

use kropina::finsler::bh_density;
use kropina::workbench::load_scenario;

fn main() -> kropina::Result<()> {
    for (seed, name) in [(1, "s3_hopf"), (2, "random:2")] {
        let l = load_scenario(name)?;
        let x: Vec<f64> = l
            .scenario
            .bx
            .lo
            .iter()
            .zip(&l.scenario.bx.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        for samples in [10_000, 100_000, 400_000] {
            let est = bh_density(&l.space.ab_metric(), &x, samples, seed)?;
            let exact = est.closed_form.expect("Kropina closed form");
            println!(
                "{name:<10} {samples:>7} samples: sigma {:.6} +- {:.6}, closed form {:.6}, z = {:+.2}",
                est.sigma,
                est.std_err,
                exact,
                (est.sigma - exact) / est.std_err
            );
        }
    }
    Ok(())
}

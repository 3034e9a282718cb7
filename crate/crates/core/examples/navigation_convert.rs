//! Navigation data (h, W) to (alpha, beta) under two gauges and back; F is
//! the same in every form.

use kropina::finsler::FinslerMetric;
use kropina::sampling::sample_grid;
use kropina::workbench::{load_scenario, run_convert, LoadedScenario, Representation, RunOptions};

fn main() -> kropina::Result<()> {
    let nav = load_scenario("s3_hopf")?;
    let opts = RunOptions::default();
    let (doc, ab) = run_convert(&nav, Representation::Ab, Some("1 + 0.2*x1"), &opts);
    print!("{}", doc.render_text());
    let ab = LoadedScenario::new(ab.expect("conversion succeeds"))?;
    println!("alpha_11 = {}", ab.scenario.a.as_ref().unwrap()[1][1]);
    println!("beta     = {:?}", ab.scenario.b.as_ref().unwrap());
    let (doc, back) = run_convert(&ab, Representation::Nav, None, &opts);
    print!("{}", doc.render_text());
    let back = LoadedScenario::new(back.expect("conversion succeeds"))?;
    for p in sample_grid(&nav.space, &nav.scenario.bx, 2, 2, 4)? {
        for y in &p.dirs {
            let f = [&nav, &ab, &back].map(|l| l.space.ab_metric().norm(&p.x, y));
            println!(
                "F = {:.15} | {:.15} | {:.15}",
                f[0].clone()?,
                f[1].clone()?,
                f[2].clone()?
            );
        }
    }
    Ok(())
}

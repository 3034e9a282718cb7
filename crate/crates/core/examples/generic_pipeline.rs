//! The generic Finsler pipeline on a seeded (alpha, beta) Kropina metric:
//! spray, flag curvature trace, S-curvature and its derivative.

use kropina::finsler::{curvature_sample, FinslerMetric};
use kropina::sampling::sample_grid;
use kropina::workbench::load_scenario;

fn main() -> kropina::Result<()> {
    let l = load_scenario("random:11")?;
    let m = l.space.ab_metric();
    let density = l.space.weighted_density();
    for p in sample_grid(&l.space, &l.scenario.bx, 2, 2, 5)? {
        for y in &p.dirs {
            let cs = curvature_sample(&m, &density, Some(l.space.weight()), &p.x, y)?;
            println!("x = {:.3?}  y = {:.3?}", p.x, y);
            println!("  F = {:.6} (direct {:.6})", cs.f, m.norm(&p.x, y)?);
            println!("  G = {:.6?}", cs.spray);
            println!("  Ric = {:+.6}  S = {:+.6}  S' = {:+.6}", cs.ricci, cs.s, cs.s_dot);
        }
    }
    Ok(())
}

//! Closed-form spray, Ricci, S and S' of a Kropina metric next to the
//! generic pipeline, at one point of a seeded scenario.

use kropina::finsler::curvature_sample;
use kropina::forms::{ab_invariants, kropina_ricci_closed, kropina_spray_closed, s_closed, s_dot_closed};
use kropina::sampling::sample_grid;
use kropina::workbench::load_scenario;

fn main() -> kropina::Result<()> {
    let l = load_scenario("random:3")?;
    let s = &l.space;
    let p = &sample_grid(s, &l.scenario.bx, 1, 3, 9)?[0];
    let inv = ab_invariants(s.alpha(), s.beta(), s.weight(), &p.x)?;
    println!("x = {:.4?}, |beta|^2 = {:.6}", p.x, inv.b2);
    for y in &p.dirs {
        let g = curvature_sample(&s.ab_metric(), &s.weighted_density(), None, &p.x, y)?;
        println!("y = {y:.4?}");
        println!("  spray  closed {:+.10?}", kropina_spray_closed(&inv, y));
        println!("         generic {:+.10?}", g.spray);
        println!(
            "  Ric    closed {:+.10}  generic {:+.10}",
            kropina_ricci_closed(&inv, y),
            g.ricci
        );
        println!("  S      closed {:+.10}  generic {:+.10}", s_closed(&inv, y), g.s);
        println!(
            "  S'     closed {:+.10}  generic {:+.10}",
            s_dot_closed(&inv, y),
            g.s_dot
        );
    }
    Ok(())
}

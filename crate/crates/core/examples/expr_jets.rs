//! Parse an expression, seed a jet at a point, and read off partial
//! derivatives next to their finite-difference estimates.

use kropina::fd::fd_partial_auto;
use kropina::jet::{Jet, MultiIndex};
use kropina::{parse_expr, Scalar};

fn main() -> kropina::Result<()> {
    let e = parse_expr("x1^2 * sin(x2) + exp(x1*x2) / (2 + cos(x3))", 3)?;
    let x = [0.4, -0.7, 1.1];
    let jet = e.eval(&Jet::seed(&x, 3))?;
    println!("f = {e}");
    println!("f(x) = {:.12}", jet.value());
    for vars in [&[0][..], &[1], &[0, 1], &[2, 2], &[0, 1, 2], &[1, 1, 1]] {
        let idx = MultiIndex::from_vars(3, vars);
        let fd = fd_partial_auto(|p: &[f64]| e.eval(p), &x, &idx)?;
        println!(
            "d{:?}: jet {:+.12}  fd {:+.12}",
            idx.exponents(),
            jet.partial(&idx)?,
            fd
        );
    }
    Ok(())
}

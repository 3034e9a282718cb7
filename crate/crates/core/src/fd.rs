//! Finite-difference derivative oracle, independent of the jet machinery.
//!
//! Each variable with exponent `e` in the multi-index gets a second-order
//! central stencil for the `e`-th derivative; stencils are combined by tensor
//! product. One Richardson level then cancels the `h^2` term, leaving
//! `O(h^4)` truncation error.

use crate::error::{Error, Result};
use crate::jet::MultiIndex;

/// Default step for first derivatives.
pub const DEFAULT_STEP: f64 = 1e-4;

/// A step that balances truncation against roundoff for a derivative of the
/// given total degree in double precision.
pub fn default_step(degree: usize) -> f64 {
    match degree {
        0 | 1 => DEFAULT_STEP,
        2 => 1e-3,
        _ => 1e-2,
    }
}

fn stencil(order: u8) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => unreachable!("stencil order checked by caller"),
    }
}

fn central<F>(f: &F, point: &[f64], idx: &MultiIndex, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let active: Vec<(usize, u8)> = idx
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| (v, e))
        .collect();
    let mut total = 0.0;
    let mut counters = vec![0usize; active.len()];
    let mut x = point.to_vec();
    loop {
        let mut weight = 1.0;
        x.copy_from_slice(point);
        for (slot, &(var, e)) in active.iter().enumerate() {
            let (shift, w) = stencil(e)[counters[slot]];
            x[var] += shift as f64 * h;
            weight *= w;
        }
        let v = f(&x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(x));
        }
        total += weight * v;

        let mut slot = 0;
        loop {
            if slot == active.len() {
                let deg = idx.degree() as i32;
                return Ok(total / h.powi(deg));
            }
            counters[slot] += 1;
            if counters[slot] < stencil(active[slot].1).len() {
                break;
            }
            counters[slot] = 0;
            slot += 1;
        }
    }
}

/// Estimates the partial derivative `d^idx f` at `point`.
///
/// `idx` must have total degree at most 3.
pub fn fd_partial<F>(f: F, point: &[f64], idx: &MultiIndex, step: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if idx.nvars() != point.len() {
        return Err(Error::Dimension {
            expected: point.len(),
            got: idx.nvars(),
        });
    }
    if idx.degree() > 3 {
        return Err(Error::OrderOverflow {
            degree: idx.degree(),
            order: 3,
        });
    }
    if idx.degree() == 0 {
        let v = f(point)?;
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(point.to_vec()))
        };
    }
    let coarse = central(&f, point, idx, step)?;
    let fine = central(&f, point, idx, step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// [`fd_partial`] with [`default_step`] for the index degree.
pub fn fd_partial_auto<F>(f: F, point: &[f64], idx: &MultiIndex) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    fd_partial(f, point, idx, default_step(idx.degree()))
}

/// [`fd_partial`] over the steps `default_step / 2^k`, `k < halvings`,
/// returning the estimate closest to its predecessor. Suits functions whose
/// length scale is shorter than the default step.
pub fn fd_partial_converged<F>(f: F, point: &[f64], idx: &MultiIndex, halvings: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut h = default_step(idx.degree());
    let mut prev = fd_partial(&f, point, idx, h)?;
    let mut best = (f64::INFINITY, prev);
    for _ in 1..halvings {
        h /= 2.0;
        let next = fd_partial(&f, point, idx, h)?;
        if (next - prev).abs() < best.0 {
            best = ((next - prev).abs(), next);
        }
        prev = next;
    }
    Ok(best.1)
}

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_derivative_of_sin() {
        let d = fd_partial(|x| Ok(x[0].sin()), &[0.0], &MultiIndex::new(vec![1]), 1e-3).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn second_derivative_of_cube() {
        let d = fd_partial(|x| Ok(x[0].powi(3)), &[1.0], &MultiIndex::new(vec![2]), DEFAULT_STEP).unwrap();
        assert!((d - 6.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn mixed_second_derivative() {
        let d = fd_partial(
            |x| Ok(x[0] * x[1]),
            &[1.0, 1.0],
            &MultiIndex::new(vec![1, 1]),
            DEFAULT_STEP,
        )
        .unwrap();
        assert!((d - 1.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn third_derivative_with_default_step() {
        let idx = MultiIndex::new(vec![2, 1]);
        // d^3/dx^2 dy of x^2 y^2 e^x at (0.5, 0.3)
        let f = |x: &[f64]| Ok(x[0] * x[0] * x[1] * x[1] * x[0].exp());
        let (a, b) = (0.5f64, 0.3f64);
        let exact = 2.0 * b * a.exp() * (2.0 + 4.0 * a + a * a);
        let d = fd_partial_auto(f, &[a, b], &idx).unwrap();
        assert!(rel_diff(d, exact, 1.0) < 1e-8, "{d} vs {exact}");
    }

    #[test]
    fn converged_step_tracks_short_length_scale() {
        let idx = MultiIndex::new(vec![3]);
        // d^3/dx^3 of 1/(x - 0.97) at 0.9 is -6 / 0.07^4
        let f = |x: &[f64]| Ok(1.0 / (x[0] - 0.97));
        let exact = -6.0 / 0.07f64.powi(4);
        assert!(rel_diff(fd_partial_auto(f, &[0.9], &idx).unwrap(), exact, 1.0) > 1e-4);
        let d = fd_partial_converged(f, &[0.9], &idx, 6).unwrap();
        assert!(rel_diff(d, exact, 1.0) < 1e-6, "{d} vs {exact}");
    }

    #[test]
    fn rejects_nonfinite_and_high_degree() {
        let e = fd_partial(|x| Ok(1.0 / x[0]), &[0.0], &MultiIndex::new(vec![1]), 1e-4);
        assert!(e.is_ok()); // stencil skips the singular point itself
        let e = fd_partial(|x| Ok(1.0 / x[0]), &[0.0], &MultiIndex::new(vec![2]), 1e-4);
        assert!(matches!(e, Err(Error::NonFinite(_))));
        let e = fd_partial(|x| Ok(x[0]), &[0.0], &MultiIndex::new(vec![4]), 1e-4);
        assert!(matches!(e, Err(Error::OrderOverflow { .. })));
    }
}

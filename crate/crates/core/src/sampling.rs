//! Seeded sampling of base points and admissible directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::KropinaSpace;
use crate::linalg;

/// Rejection threshold on `W_0 = h(W, y)` for `h`-unit directions.
pub const W0_CUTOFF: f64 = 0.05;

const MAX_REJECTIONS: usize = 100_000;

/// Axis-aligned box in the coordinate chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ChartBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(h > l)) {
            return Err(Error::Invalid("sampling box has no volume".into()));
        }
        Ok(ChartBox { lo, hi })
    }

    pub fn cube(n: usize, half: f64) -> Self {
        ChartBox {
            lo: vec![-half; n],
            hi: vec![half; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| rng.random_range(*l..*h))
            .collect()
    }
}

/// A base point with its admissible directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePoint {
    pub x: Vec<f64>,
    pub dirs: Vec<Vec<f64>>,
}

/// `count` directions uniform on the `h`-unit sphere at `x` with
/// `W_0 > cutoff`.
pub fn sample_directions(
    space: &KropinaSpace,
    x: &[f64],
    count: usize,
    cutoff: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<f64>>> {
    let n = space.dim();
    let h = space.h().check_positive_definite(x)?;
    let chol = nalgebra::Cholesky::new(linalg::to_dmatrix(&h)).ok_or_else(|| Error::NotPositiveDefinite {
        role: "h".into(),
        x: x.to_vec(),
    })?;
    let lt = chol.l().transpose();
    let w_low = space.w().lowered(space.h(), x)?;
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0;
    while out.len() < count {
        let z = nalgebra::DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let norm = z.norm();
        if norm == 0.0 {
            continue;
        }
        // y = L^{-T} z / |z| has h(y, y) = 1
        let y = lt
            .solve_upper_triangular(&(z / norm))
            .ok_or(Error::Singular("Cholesky factor of h"))?;
        let y: Vec<f64> = y.iter().copied().collect();
        if linalg::dotf(&w_low, &y) > cutoff {
            out.push(y);
        } else {
            rejected += 1;
            if rejected > MAX_REJECTIONS {
                return Err(Error::DegenerateSublevel("no admissible directions"));
            }
        }
    }
    Ok(out)
}

/// `points` base points in `bx`, each with `dirs` directions. Point `i`
/// draws from stream `i` of the seeded generator.
pub fn sample_grid(
    space: &KropinaSpace,
    bx: &ChartBox,
    points: usize,
    dirs: usize,
    seed: u64,
) -> Result<Vec<SamplePoint>> {
    if bx.dim() != space.dim() {
        return Err(Error::Dimension {
            expected: space.dim(),
            got: bx.dim(),
        });
    }
    (0..points)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let x = bx.sample(&mut rng);
            let dirs = sample_directions(space, &x, dirs, W0_CUTOFF, &mut rng)?;
            Ok(SamplePoint { x, dirs })
        })
        .collect()
}

/// Fraction of Euclidean-uniform directions at `x` lying in the cone.
pub fn admissible_fraction(space: &KropinaSpace, x: &[f64], trials: usize, rng: &mut impl Rng) -> Result<f64> {
    let w_low = space.w().lowered(space.h(), x)?;
    let n = space.dim();
    let mut hits = 0;
    for _ in 0..trials {
        let y: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if linalg::dotf(&w_low, &y) > 0.0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::testutil::*;

    #[test]
    fn directions_are_unit_and_admissible() {
        let (h, w) = hopf();
        let space = KropinaSpace::from_nav(h.clone(), w.clone(), None, Expr::constant(0.0)).unwrap();
        let bx = ChartBox::new(vec![0.3, -1.0, -1.0], vec![1.2, 1.0, 1.0]).unwrap();
        let grid = sample_grid(&space, &bx, 4, 30, 9).unwrap();
        for p in &grid {
            for y in &p.dirs {
                assert!((h.norm(&p.x, y).unwrap() - 1.0).abs() < 1e-12);
                assert!(linalg::dotf(&w.lowered(&h, &p.x).unwrap(), y) > W0_CUTOFF);
            }
        }
        assert_eq!(grid, sample_grid(&space, &bx, 4, 30, 9).unwrap());
    }

    #[test]
    fn degenerate_box_rejected() {
        assert!(ChartBox::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }
}

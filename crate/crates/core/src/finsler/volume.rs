use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::FinslerMetric;
use crate::error::{Error, Result};

const CHUNK: usize = 4096;
const PROBES: usize = 512;

/// Axis-aligned box `center +- half_widths`.
#[derive(Debug, Clone, PartialEq)]
pub struct SublevelBox {
    pub center: Vec<f64>,
    pub half_widths: Vec<f64>,
}

impl SublevelBox {
    pub fn volume(&self) -> f64 {
        self.half_widths.iter().map(|w| 2.0 * w).product()
    }
}

/// Volume of the Euclidean unit ball in dimension `n`.
pub fn ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * ball_volume(n - 2),
    }
}

/// Monte-Carlo estimate of the Busemann-Hausdorff density.
#[derive(Debug, Clone)]
pub struct BhEstimate {
    pub sigma: f64,
    pub std_err: f64,
    /// Estimated volume of `{y : F(x, y) < 1}`.
    pub volume: f64,
    pub volume_err: f64,
    pub samples: usize,
    pub closed_form: Option<f64>,
}

/// Box of twice the largest radial extent seen over random unit probes.
pub(super) fn probe_box<M: FinslerMetric + ?Sized>(m: &M, x: &[f64]) -> Result<SublevelBox> {
    let n = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut reach: f64 = 0.0;
    for _ in 0..PROBES {
        let mut u: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        u.iter_mut().for_each(|v| *v /= norm);
        if m.in_domain(x, &u)? {
            let f = m.energy(x, &u)?.sqrt();
            if f > 0.0 {
                reach = reach.max(1.0 / f);
            }
        }
    }
    if reach == 0.0 || !reach.is_finite() {
        return Err(Error::DegenerateSublevel("no admissible probe direction"));
    }
    Ok(SublevelBox {
        center: vec![0.0; n],
        half_widths: vec![2.0 * reach; n],
    })
}

/// `sigma_BH(x) = Vol(B^n) / Vol{y : F(x, y) < 1}` by uniform sampling in
/// the metric's bounding box. Each chunk of samples draws from its own
/// stream of the seeded generator, so the estimate does not depend on
/// scheduling.
pub fn bh_density<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], samples: usize, seed: u64) -> Result<BhEstimate> {
    let n = m.dim();
    let bx = m.sublevel_box(x)?;
    if bx.half_widths.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::DegenerateSublevel("bounding box has no volume"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let hits: Result<Vec<usize>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut y = vec![0.0; n];
            let mut hit = 0;
            for _ in 0..count {
                for i in 0..n {
                    y[i] = bx.center[i] + bx.half_widths[i] * rng.random_range(-1.0..1.0);
                }
                if m.in_domain(x, &y)? && m.energy(x, &y)? < 1.0 {
                    hit += 1;
                }
            }
            Ok(hit)
        })
        .collect();
    let hits: usize = hits?.iter().sum();
    if hits == 0 {
        return Err(Error::DegenerateSublevel("no sample fell inside the unit sublevel set"));
    }
    let p = hits as f64 / samples as f64;
    let volume = bx.volume() * p;
    let volume_err = bx.volume() * (p * (1.0 - p) / samples as f64).sqrt();
    let sigma = ball_volume(n) / volume;
    Ok(BhEstimate {
        sigma,
        std_err: sigma * volume_err / volume,
        volume,
        volume_err,
        samples,
        closed_form: m.bh_closed_form(x).transpose()?,
    })
}

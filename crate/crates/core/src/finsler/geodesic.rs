use super::{distortion, spray_generic, Density, FinslerMetric};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fd::{default_step, fd_partial};
use crate::jet::MultiIndex;

/// Samples `(t, c(t), c'(t))` of an integrated geodesic.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

impl GeodesicPath {
    pub fn last(&self) -> (&[f64], &[f64]) {
        (
            self.points.last().expect("nonempty"),
            self.velocities.last().expect("nonempty"),
        )
    }
}

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

/// Classical RK4 on `c'' = -2 G(c, c')`. Negative `t_end` integrates
/// backwards in time.
pub fn geodesic_flow<M: FinslerMetric + ?Sized>(
    m: &M,
    x: &[f64],
    y: &[f64],
    t_end: f64,
    steps: usize,
) -> Result<GeodesicPath> {
    if steps == 0 {
        return Err(Error::StepUnderflow);
    }
    let dt = t_end / steps as f64;
    if t_end != 0.0 && dt.abs() < 1e-14 * t_end.abs().max(1.0) {
        return Err(Error::StepUnderflow);
    }
    let accel = |c: &[f64], v: &[f64], t: f64| -> Result<Vec<f64>> {
        spray_generic(m, c, v)
            .map(|g| g.iter().map(|gi| -2.0 * gi).collect())
            .map_err(|e| match e {
                Error::OutsideDomain { .. } => Error::LeftDomain { t },
                other => other,
            })
    };
    let mut path = GeodesicPath {
        times: vec![0.0],
        points: vec![x.to_vec()],
        velocities: vec![y.to_vec()],
    };
    let (mut c, mut v) = (x.to_vec(), y.to_vec());
    for step in 0..steps {
        let t = step as f64 * dt;
        let k1c = v.clone();
        let k1v = accel(&c, &v, t)?;
        let c2 = axpy(dt / 2.0, &k1c, &c);
        let v2 = axpy(dt / 2.0, &k1v, &v);
        let k2v = accel(&c2, &v2, t + dt / 2.0)?;
        let c3 = axpy(dt / 2.0, &v2, &c);
        let v3 = axpy(dt / 2.0, &k2v, &v);
        let k3v = accel(&c3, &v3, t + dt / 2.0)?;
        let c4 = axpy(dt, &v3, &c);
        let v4 = axpy(dt, &k3v, &v);
        let k4v = accel(&c4, &v4, t + dt)?;
        for i in 0..c.len() {
            c[i] += dt / 6.0 * (k1c[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        if !m.in_domain(&c, &v)? {
            return Err(Error::LeftDomain { t: t + dt });
        }
        path.times.push(t + dt);
        path.points.push(c.clone());
        path.velocities.push(v.clone());
    }
    Ok(path)
}

/// Differentiates quantities along the geodesic through `(x, y)` by
/// integrating to short times on both sides and taking finite differences.
pub struct FlowOracle<'a, M: ?Sized> {
    metric: &'a M,
    x: Vec<f64>,
    y: Vec<f64>,
    substeps: usize,
}

pub fn flow_oracle<'a, M: FinslerMetric + ?Sized>(metric: &'a M, x: &[f64], y: &[f64]) -> FlowOracle<'a, M> {
    FlowOracle {
        metric,
        x: x.to_vec(),
        y: y.to_vec(),
        substeps: 16,
    }
}

impl<M: FinslerMetric + ?Sized> FlowOracle<'_, M> {
    fn state(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if t == 0.0 {
            return Ok((self.x.clone(), self.y.clone()));
        }
        let path = geodesic_flow(self.metric, &self.x, &self.y, t, self.substeps)?;
        let (c, v) = path.last();
        Ok((c.to_vec(), v.to_vec()))
    }

    fn derivative<Q>(&self, q: Q, degree: usize) -> Result<f64>
    where
        Q: Fn(&[f64], &[f64]) -> Result<f64>,
    {
        let idx = MultiIndex::new(vec![degree as u8]);
        fd_partial(
            |t| {
                let (c, v) = self.state(t[0])?;
                q(&c, &v)
            },
            &[0.0],
            &idx,
            default_step(degree),
        )
    }

    /// `d/dt tau(c, c')` at 0.
    pub fn s(&self, density: &Density) -> Result<f64> {
        self.derivative(|c, v| distortion(self.metric, density, c, v), 1)
    }

    /// `d^2/dt^2 tau(c, c')` at 0.
    pub fn s_dot(&self, density: &Density) -> Result<f64> {
        self.derivative(|c, v| distortion(self.metric, density, c, v), 2)
    }

    /// `d^2/dt^2 f(c)` at 0.
    pub fn hess(&self, f: &Expr) -> Result<f64> {
        self.derivative(|c, _| f.eval(c), 2)
    }

    /// `F(c, c')` at the end of a path, for conservation checks.
    pub fn norm_drift(&self, t_end: f64, steps: usize) -> Result<f64> {
        let path = geodesic_flow(self.metric, &self.x, &self.y, t_end, steps)?;
        let f0 = self.metric.norm(&self.x, &self.y)?;
        let mut worst: f64 = 0.0;
        for (c, v) in path.points.iter().zip(&path.velocities) {
            worst = worst.max((self.metric.norm(c, v)? - f0).abs());
        }
        Ok(worst)
    }
}

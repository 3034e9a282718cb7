//! Closed-form spray, Ricci curvature and S-curvature of `alpha^2 / beta`
//! in terms of the covariant data of `beta`.

use super::invariants::{AbAt, AbInvariants};

fn alpha_spray(inv: &AbInvariants, y: &[f64]) -> Vec<f64> {
    let n = inv.dim();
    (0..n)
        .map(|i| {
            let g = &inv.christoffel[i];
            0.5 * (0..n)
                .map(|j| (0..n).map(|k| g[j][k] * y[j] * y[k]).sum::<f64>())
                .sum::<f64>()
        })
        .collect()
}

/// `G^i = G_alpha^i + T^i`.
pub fn kropina_spray_closed(inv: &AbInvariants, y: &[f64]) -> Vec<f64> {
    let at = inv.at(y);
    let b2 = inv.b2;
    let ga = alpha_spray(inv, y);
    let q = at.alpha2 / at.beta;
    let c_b = (q * at.s0 + at.r00) / (2.0 * b2);
    let c_y = (at.s0 + at.r00 * at.beta / at.alpha2) / b2;
    (0..inv.dim())
        .map(|i| ga[i] - q / 2.0 * at.s_up0[i] + c_b * inv.b_up[i] - c_y * y[i])
        .collect()
}

fn ricci_correction(inv: &AbInvariants, at: &AbAt) -> f64 {
    let n = inv.dim() as f64;
    let (b2, f) = (inv.b2, at.f);
    let b4 = b2 * b2;
    let (r00, r0, s0) = (at.r00, at.r0, at.s0);
    let mut t = 3.0 * (n - 1.0) / (b4 * f * f) * r00 * r00;
    t += (n - 1.0) / (f * b4) * (2.0 * r00 * s0 - 4.0 * r00 * r0 - 4.0 * f * r0 * s0 - f * s0 * s0);
    t += (n - 1.0) / (b2 * f) * (at.r00_0 + f * at.s0_0 + f * f * at.s_s0);
    t += ((r0 + s0).powi(2) - inv.r_scalar * (r00 + f * s0)) / b4;
    t += (f * at.s0_b + at.r00_b - (at.r0_0 + at.s0_0) + (r00 + f * s0) * inv.trace_r + 2.0 * n * at.r0_s0
        - f * at.r_s0
        - f * at.r0_s
        - f * f / 2.0 * inv.s_sq)
        / b2;
    t - f * at.div_s0 - f * f / 4.0 * inv.s_mixed_sq
}

/// `Ric = Ric^alpha(y) + T(y)`.
pub fn kropina_ricci_closed(inv: &AbInvariants, y: &[f64]) -> f64 {
    let at = inv.at(y);
    at.ricci00 + ricci_correction(inv, &at)
}

/// S-curvature of the Busemann-Hausdorff density.
pub fn s_bh_closed(inv: &AbInvariants, y: &[f64]) -> f64 {
    let at = inv.at(y);
    let n = inv.dim() as f64;
    (n + 1.0) / inv.b2 * (at.r0 - at.r00 / at.f)
}

/// `Hess_F f (y) = f_ij y^i y^j - 2 f_i G^i` with the closed spray.
pub fn hess_f_closed(inv: &AbInvariants, y: &[f64]) -> f64 {
    let at = inv.at(y);
    let g = kropina_spray_closed(inv, y);
    at.f_yy - 2.0 * g.iter().zip(&inv.f_grad).map(|(a, b)| a * b).sum::<f64>()
}

/// S-curvature of the weighted density `exp(-(n+1) f) sigma_BH`.
pub fn s_closed(inv: &AbInvariants, y: &[f64]) -> f64 {
    let n = inv.dim() as f64;
    s_bh_closed(inv, y) + (n + 1.0) * inv.at(y).f0
}

/// `dS/dt` along the geodesic for the weighted density.
pub fn s_dot_closed(inv: &AbInvariants, y: &[f64]) -> f64 {
    let at = inv.at(y);
    let n = inv.dim() as f64;
    let (b2, alpha2, beta) = (inv.b2, at.alpha2, at.beta);
    let b4 = b2 * b2;
    let (r00, r0, s0, r) = (at.r00, at.r0, at.s0, inv.r_scalar);
    let ba = beta / alpha2;
    let first = (at.r0_0 - ba * at.r00_0 + alpha2 / beta * at.r_s0 - 2.0 * at.r0_s0) / b2;
    let second = (-(alpha2 / beta * s0 + r00) * r + 2.0 * ba * r00 * (3.0 * r0 - s0) + 2.0 * r0 * (s0 - r0)
        - 4.0 * ba * ba * r00 * r00)
        / b4;
    (n + 1.0) * (first + second + hess_f_closed(inv, y))
}

//! The separated radial operator `L_{k,μ} u = u″ + u′/r − (k²/r² + μ)u`.
//!
//! In `s = log r` the first-order term drops out:
//! `L = e^{-2s}(∂_ss − k²) − μ`, so on log grids only a second difference is
//! needed. Its denominator is taken as `(2cosh(k·h) − 2)/k²` instead of `h²`,
//! which makes the stencil annihilate the homogeneous solutions `r^{±k}`,
//! `log r` and constants exactly (it reduces to `h²` as `k·h → 0` and is a
//! second-order-consistent perturbation of it).

use num_complex::Complex64;

use super::{RadialProfile, SpacingPolicy};
use crate::{Error, Result};

/// Image of a profile under the mode operator. Endpoint rows use one-sided
/// differences and are excluded from residual norms.
#[derive(Debug, Clone)]
pub struct OperatorImage {
    pub profile: RadialProfile,
    /// Node indices computed with one-sided stencils.
    pub boundary_inaccurate: [usize; 2],
}

/// Denominator of the second difference in `s` for circle frequency `k`.
pub(crate) fn log_denominator(k: i32, h: f64) -> f64 {
    if k == 0 {
        h * h
    } else {
        let kh = k as f64 * h;
        (2.0 * kh.cosh() - 2.0) / ((k * k) as f64)
    }
}

/// Interior tridiagonal row `(a, b, c)` of `L_{k,μ}` at node `i`:
/// `a·u_{i-1} + b·u_i + c·u_{i+1}`.
pub(crate) fn interior_row(
    grid_nodes: &[f64],
    policy: SpacingPolicy,
    log_h: Option<f64>,
    k: i32,
    mu: f64,
    i: usize,
) -> (f64, f64, f64) {
    let r = grid_nodes[i];
    match policy {
        SpacingPolicy::Log => {
            let h = log_h.expect("log grid has a log step");
            let denom = log_denominator(k, h);
            let w = 1.0 / (r * r * denom);
            let kk = (k * k) as f64;
            (w, -2.0 * w - kk / (r * r) - mu, w)
        }
        SpacingPolicy::Uniform => {
            let hm = r - grid_nodes[i - 1];
            let hp = grid_nodes[i + 1] - r;
            let denom = hm * hp * (hm + hp);
            // u″: 2[h₋ u_{i+1} + h₊ u_{i-1} − (h₋+h₊)u_i]/denom
            // u′: [h₋² u_{i+1} − h₊² u_{i-1} + (h₊²−h₋²)u_i]/denom
            let kk = (k * k) as f64;
            let a = (2.0 * hp - hp * hp / r) / denom;
            let c = (2.0 * hm + hm * hm / r) / denom;
            let b = (-2.0 * (hm + hp) + (hp * hp - hm * hm) / r) / denom - kk / (r * r) - mu;
            (a, b, c)
        }
    }
}

/// Applies `L_{k,μ}` by finite differences; one-sided at the two endpoints.
pub fn mode_operator_apply(profile: &RadialProfile) -> Result<OperatorImage> {
    let n = profile.grid.len();
    if n < 4 {
        return Err(Error::GridTooCoarse { need: 4, got: n });
    }
    let nodes = profile.grid.nodes();
    let k = profile.mode.k;
    let mu = profile.mode.mu;
    let u = &profile.values;
    let mut out = vec![Complex64::new(0.0, 0.0); n];

    match profile.grid.policy() {
        SpacingPolicy::Log => {
            let h = profile.grid.log_step().unwrap();
            let denom = log_denominator(k, h);
            let kk = (k * k) as f64;
            for i in 1..n - 1 {
                let r = nodes[i];
                let dss = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / denom;
                out[i] = dss / (r * r) - (kk / (r * r) + mu) * u[i];
            }
            // one-sided second difference in s (second order)
            let dss0 = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
            out[0] = dss0 / (nodes[0] * nodes[0]) - (kk / (nodes[0] * nodes[0]) + mu) * u[0];
            let m = n - 1;
            let dssm = (2.0 * u[m] - 5.0 * u[m - 1] + 4.0 * u[m - 2] - u[m - 3]) / (h * h);
            out[m] = dssm / (nodes[m] * nodes[m]) - (kk / (nodes[m] * nodes[m]) + mu) * u[m];
        }
        SpacingPolicy::Uniform => {
            let kk = (k * k) as f64;
            for i in 1..n - 1 {
                let (a, b, c) = interior_row(nodes, SpacingPolicy::Uniform, None, k, mu, i);
                out[i] = a * u[i - 1] + b * u[i] + c * u[i + 1];
            }
            let h = nodes[1] - nodes[0];
            let d2_0 = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
            let d1_0 = (-1.5 * u[0] + 2.0 * u[1] - 0.5 * u[2]) / h;
            out[0] = d2_0 + d1_0 / nodes[0] - (kk / (nodes[0] * nodes[0]) + mu) * u[0];
            let m = n - 1;
            let hm = nodes[m] - nodes[m - 1];
            let d2_m = (2.0 * u[m] - 5.0 * u[m - 1] + 4.0 * u[m - 2] - u[m - 3]) / (hm * hm);
            let d1_m = (1.5 * u[m] - 2.0 * u[m - 1] + 0.5 * u[m - 2]) / hm;
            out[m] = d2_m + d1_m / nodes[m] - (kk / (nodes[m] * nodes[m]) + mu) * u[m];
        }
    }

    Ok(OperatorImage {
        profile: RadialProfile {
            mode: profile.mode,
            grid: profile.grid.clone(),
            values: out,
        },
        boundary_inaccurate: [0, n - 1],
    })
}

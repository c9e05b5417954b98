//! Weighted L² norms on fibred annuli and sectors, and the naively weighted
//! Schauder-type seminorm.
//!
//! With L²-orthonormal fiber modes the annulus norm is a plain Parseval sum;
//! the sector norm keeps the θ cross terms by direct quadrature, which is the
//! whole point of the no-concentration comparison: per mode the two norms are
//! proportional with ratio `half_width/π`, for mode sums only `≤` survives.

use num_complex::Complex64;

use super::{RadialGrid, SpacingPolicy, SpectralField};
use crate::{Error, Result};

/// Quadrature points `(r, q)` on `[r1, r2]` such that `∫ g(r)·r dr ≈ Σ g(r_j)·q_j`,
/// clipping the window into the grid and interpolating at the cut radii.
fn radial_window(grid: &RadialGrid, r1: f64, r2: f64) -> Result<Vec<(f64, f64)>> {
    if r1 >= r2 {
        return Err(Error::RangeOutsideGrid {
            lo: r1,
            hi: r2,
            grid_lo: grid.r_min(),
            grid_hi: grid.r_max(),
        });
    }
    if r1 < grid.r_min() - 1e-12 || r2 > grid.r_max() + 1e-12 {
        return Err(Error::RangeOutsideGrid {
            lo: r1,
            hi: r2,
            grid_lo: grid.r_min(),
            grid_hi: grid.r_max(),
        });
    }
    let mut pts: Vec<f64> = vec![r1];
    for &r in grid.nodes() {
        if r > r1 && r < r2 {
            pts.push(r);
        }
    }
    pts.push(r2);

    // trapezoid in the grid's natural coordinate
    let coord = |r: f64| match grid.policy() {
        SpacingPolicy::Log => r.ln(),
        SpacingPolicy::Uniform => r,
    };
    let jac = |r: f64| match grid.policy() {
        SpacingPolicy::Log => r * r, // g·r dr = g·e^{2s} ds
        SpacingPolicy::Uniform => r,
    };
    let n = pts.len();
    let mut out = Vec::with_capacity(n);
    for (j, &r) in pts.iter().enumerate() {
        let left = if j == 0 {
            coord(pts[0])
        } else {
            coord(pts[j - 1])
        };
        let right = if j == n - 1 {
            coord(pts[n - 1])
        } else {
            coord(pts[j + 1])
        };
        let w = 0.5 * (right - left);
        out.push((r, w * jac(r)));
    }
    Ok(out)
}

/// Linear interpolation of a mode profile at radius `r` (in the grid's
/// natural coordinate).
fn interp(grid: &RadialGrid, values: &[Complex64], r: f64) -> Complex64 {
    let nodes = grid.nodes();
    match nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
        Ok(i) => values[i],
        Err(0) => values[0],
        Err(i) if i >= nodes.len() => values[nodes.len() - 1],
        Err(i) => {
            let (a, b) = (nodes[i - 1], nodes[i]);
            let t = match grid.policy() {
                SpacingPolicy::Log => (r.ln() - a.ln()) / (b.ln() - a.ln()),
                SpacingPolicy::Uniform => (r - a) / (b - a),
            };
            values[i - 1] * (1.0 - t) + values[i] * t
        }
    }
}

/// Weighted L² norm `|r^β v|_{L²[A(R1,R2)]}` with measure `r dr dθ dY`,
/// evaluated modewise (Parseval in θ and Y).
pub fn annulus_norm(field: &SpectralField, r1: f64, r2: f64, weight: f64) -> Result<f64> {
    let window = radial_window(&field.grid, r1, r2)?;
    let mut total = 0.0;
    for (_, values) in field.modes() {
        let mut acc = 0.0;
        for &(r, q) in &window {
            let v = interp(&field.grid, values, r);
            acc += v.norm_sqr() * r.powf(2.0 * weight) * q;
        }
        total += 2.0 * std::f64::consts::PI * acc;
    }
    Ok(total.sqrt())
}

/// Unweighted L² norm over the fibred sector
/// `(R−1, R+1) × (θ₀−half_width, θ₀+half_width) × Y`, with θ cross terms
/// retained by direct Simpson quadrature of `|Σ_k v_{k,μ}(r)e^{ikθ}|²`.
pub fn sector_norm(
    field: &SpectralField,
    r_center: f64,
    half_width: f64,
    theta0: f64,
) -> Result<f64> {
    if half_width > std::f64::consts::PI || half_width <= 0.0 {
        return Err(Error::Invalid(format!(
            "sector half-width {half_width} outside (0, π]"
        )));
    }
    let window = radial_window(&field.grid, r_center - 1.0, r_center + 1.0)?;

    // group mode data by fiber ordinal, interpolated onto the window points
    let ordinals = field.active_ordinals();
    let mut groups: Vec<Vec<(i32, Vec<Complex64>)>> = vec![Vec::new(); ordinals.len()];
    for (mode, values) in field.modes() {
        let gi = ordinals.binary_search(&mode.mu_ordinal).unwrap();
        let at_window: Vec<Complex64> = window
            .iter()
            .map(|&(r, _)| interp(&field.grid, values, r))
            .collect();
        groups[gi].push((mode.k, at_window));
    }

    // composite Simpson in θ
    let n_theta = 2048usize; // even
    let h = 2.0 * half_width / n_theta as f64;
    let mut total = 0.0;
    for group in &groups {
        for jt in 0..=n_theta {
            let theta = theta0 - half_width + jt as f64 * h;
            let w_theta = if jt == 0 || jt == n_theta {
                h / 3.0
            } else if jt % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
            for (jr, &(_, q)) in window.iter().enumerate() {
                let mut sum = Complex64::new(0.0, 0.0);
                for (k, vals) in group {
                    sum += vals[jr] * Complex64::from_polar(1.0, *k as f64 * theta);
                }
                total += sum.norm_sqr() * q * w_theta;
            }
        }
    }
    Ok(total.sqrt())
}

/// Naively weighted seminorm: `sup_l l^β · max_{j ≤ order} sup_{A(l,l+2)} |∂^j v|`,
/// with θ differentiation spectral (per-mode `ik` factors) and radial
/// differentiation by centered finite differences. Hölder quotients are out
/// of scope; this is the supremum part only.
pub fn weighted_holder_seminorm(field: &SpectralField, weight: f64, order: usize) -> Result<f64> {
    if order > 4 {
        return Err(Error::Invalid(format!("order {order} exceeds 4")));
    }
    let grid = &field.grid;
    if grid.r_max() - grid.r_min() < 2.0 {
        return Err(Error::InvalidGrid(
            "grid shorter than one width-2 annulus".into(),
        ));
    }
    let nodes = grid.nodes();
    let n = nodes.len();
    let n_theta = 128usize;

    // radial derivative ladders per mode: D^0 v, D^1 v, ..., D^order v
    let mut ladders: Vec<(i32, Vec<Vec<Complex64>>)> = Vec::new();
    for (mode, values) in field.modes() {
        let mut ladder = vec![values.to_vec()];
        for _ in 0..order {
            let prev = ladder.last().unwrap();
            ladder.push(radial_derivative(nodes, prev));
        }
        ladders.push((mode.k, ladder));
    }

    // per-node amplitude: max over derivative split (a radial, b angular)
    let mut amplitude = vec![0.0f64; n];
    for (i, amp) in amplitude.iter_mut().enumerate() {
        let mut m = 0.0f64;
        for total_order in 0..=order {
            for a in 0..=total_order {
                let b = total_order - a;
                for jt in 0..n_theta {
                    let theta = 2.0 * std::f64::consts::PI * jt as f64 / n_theta as f64;
                    let mut sum = Complex64::new(0.0, 0.0);
                    for (k, ladder) in &ladders {
                        let ik_b = Complex64::new(0.0, *k as f64).powu(b as u32);
                        sum += ladder[a][i] * ik_b * Complex64::from_polar(1.0, *k as f64 * theta);
                    }
                    m = m.max(sum.norm());
                }
            }
        }
        *amp = m;
    }

    let mut sup = 0.0f64;
    for (i, &l) in nodes.iter().enumerate() {
        if l + 2.0 > grid.r_max() + 1e-12 {
            break;
        }
        let mut window_sup = 0.0f64;
        for (j, &r) in nodes.iter().enumerate().skip(i) {
            if r > l + 2.0 {
                break;
            }
            window_sup = window_sup.max(amplitude[j]);
        }
        sup = sup.max(l.powf(weight) * window_sup);
    }
    Ok(sup)
}

pub(crate) fn radial_derivative(nodes: &[f64], values: &[Complex64]) -> Vec<Complex64> {
    let n = nodes.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        let hm = nodes[i] - nodes[i - 1];
        let hp = nodes[i + 1] - nodes[i];
        // second-order first derivative on a nonuniform stencil
        out[i] = (values[i + 1] * (hm * hm) - values[i - 1] * (hp * hp)
            + values[i] * (hp * hp - hm * hm))
            / (hm * hp * (hm + hp));
    }
    out[0] = (values[1] - values[0]) / (nodes[1] - nodes[0]);
    out[n - 1] = (values[n - 1] - values[n - 2]) / (nodes[n - 1] - nodes[n - 2]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber_spectrum::FiberSpectrum;
    use crate::spectral_laplace::RadialGrid;

    fn torus() -> FiberSpectrum {
        FiberSpectrum::flat_torus(&[1.0, 1.0], 400.0).unwrap()
    }

    #[test]
    fn unit_mode_annulus_norm_is_2pi() {
        // v = r^{-1}: ∫₁^e r^{-2}·r dr = 1, so norm² = 2π
        let spec = torus();
        let grid = RadialGrid::log(1.0, std::f64::consts::E, 4097).unwrap();
        let mut field = SpectralField::zero(spec.clone(), grid);
        field
            .set_mode_fn(spec.mode(1, 0).unwrap(), |r| Complex64::new(1.0 / r, 0.0))
            .unwrap();
        let n = annulus_norm(&field, 1.0, std::f64::consts::E, 0.0).unwrap();
        let expect = (2.0 * std::f64::consts::PI).sqrt();
        assert!((n / expect - 1.0).abs() < 1e-6, "{n} vs {expect}");
    }

    #[test]
    fn weight_is_definitional() {
        let spec = torus();
        let grid = RadialGrid::log(1.0, 50.0, 256).unwrap();
        let beta = 1.3;
        let mut plain = SpectralField::zero(spec.clone(), grid.clone());
        plain
            .set_mode_fn(spec.mode(2, 1).unwrap(), |r| {
                Complex64::new(r.powf(-1.7), 0.2 / r)
            })
            .unwrap();
        let mut pre_weighted = SpectralField::zero(spec.clone(), grid);
        pre_weighted
            .set_mode_fn(spec.mode(2, 1).unwrap(), |r| {
                Complex64::new(r.powf(-1.7), 0.2 / r) * r.powf(beta)
            })
            .unwrap();
        // node-aligned window so both routes share sample points exactly
        let (lo, hi) = (plain.grid.nodes()[20], plain.grid.nodes()[200]);
        let a = annulus_norm(&plain, lo, hi, beta).unwrap();
        let b = annulus_norm(&pre_weighted, lo, hi, 0.0).unwrap();
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_norms_vanish() {
        let spec = torus();
        let grid = RadialGrid::log(1.0, 100.0, 64).unwrap();
        let field = SpectralField::zero(spec, grid);
        assert_eq!(annulus_norm(&field, 2.0, 50.0, 1.0).unwrap(), 0.0);
        assert_eq!(sector_norm(&field, 10.0, 0.1, 0.0).unwrap(), 0.0);
        assert_eq!(weighted_holder_seminorm(&field, 0.0, 0).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_sector_ratio() {
        let spec = torus();
        let grid = RadialGrid::log(1.0, 2000.0, 1024).unwrap();
        for r_center in [10.0, 100.0, 1000.0] {
            let mut field = SpectralField::zero(spec.clone(), grid.clone());
            field
                .set_mode_fn(spec.mode(3, 1).unwrap(), |r| {
                    Complex64::new(r.powf(-0.7), 0.0)
                })
                .unwrap();
            let hw = 1.0 / r_center;
            let sec = sector_norm(&field, r_center, hw, 0.37).unwrap();
            let ann = annulus_norm(&field, r_center - 1.0, r_center + 1.0, 0.0).unwrap();
            let ratio = (sec * sec) / (ann * ann);
            let expect = 1.0 / (std::f64::consts::PI * r_center);
            assert!(
                (ratio / expect - 1.0).abs() < 1e-8,
                "R = {r_center}: {ratio} vs {expect}"
            );
        }
    }

    #[test]
    fn sector_below_annulus_and_cross_terms_exceed() {
        let spec = torus();
        let grid = RadialGrid::log(1.0, 200.0, 512).unwrap();
        let r_center = 50.0;
        let mut field = SpectralField::zero(spec.clone(), grid);
        field
            .set_mode_fn(spec.mode(1, 0).unwrap(), |r| Complex64::new(1.0 / r, 0.0))
            .unwrap();
        field
            .set_mode_fn(spec.mode(2, 0).unwrap(), |r| Complex64::new(1.0 / r, 0.0))
            .unwrap();
        let hw = 1.0 / r_center;
        // constructive interference at θ₀ = 0 for equal-phase modes
        let sec = sector_norm(&field, r_center, hw, 0.0).unwrap();
        let ann = annulus_norm(&field, r_center - 1.0, r_center + 1.0, 0.0).unwrap();
        assert!(sec <= ann);
        let single_mode_share = ann * ann / (std::f64::consts::PI * r_center);
        assert!(
            sec * sec > single_mode_share,
            "cross terms should push the sector above the per-mode share: {} vs {}",
            sec * sec,
            single_mode_share
        );
    }

    #[test]
    fn holder_seminorm_basics() {
        let spec = torus();
        let grid = RadialGrid::log(1.0, 100.0, 512).unwrap();
        let mut field = SpectralField::zero(spec.clone(), grid);
        field
            .set_mode_fn(spec.mode(1, 0).unwrap(), |r| {
                Complex64::new(r.powi(-2), 0.0)
            })
            .unwrap();
        // weight 2, order 0: l²·sup_{[l,l+2]} r^{-2} = l²·l^{-2} = 1 at the
        // inner edge of each annulus
        let s = weighted_holder_seminorm(&field, 2.0, 0).unwrap();
        assert!((s - 1.0).abs() < 0.05, "{s}");
        // weight 0, order 0 is the plain sup-norm
        let sup = weighted_holder_seminorm(&field, 0.0, 0).unwrap();
        assert!((sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_window_rejected() {
        let spec = torus();
        let grid = RadialGrid::log(1.0, 100.0, 64).unwrap();
        let field = SpectralField::zero(spec, grid);
        assert!(matches!(
            annulus_norm(&field, 0.5, 10.0, 0.0),
            Err(Error::RangeOutsideGrid { .. })
        ));
        assert!(matches!(
            annulus_norm(&field, 50.0, 200.0, 0.0),
            Err(Error::RangeOutsideGrid { .. })
        ));
    }
}

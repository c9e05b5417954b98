//! Neumann Poincaré constants on flat annuli and the product composition
//! `∫∫(u−ū)² ≤ (P_A + P_Y)·∫∫|∇u|²` on annulus × fiber.
//!
//! The annulus constant comes from per-Fourier-mode radial eigensolves of
//! `−(r u′)′ + (k²/r)u = λ r u` with Neumann ends, minimized over |k| ≤
//! cutoff; a dense two-dimensional discretization serves as brute-force
//! oracle. The product inequality is implemented in mean-subtracted form (the
//! statement with no mean subtraction fails for constants).

use nalgebra::DMatrix;

use super::SpectralField;
use crate::fiber_spectrum::FiberSpectrum;
use crate::{Error, Result};

/// Radial resolution of the per-mode eigensolves.
const RADIAL_NODES: usize = 800;

/// `P_A = 1/λ₁` with λ₁ the smallest positive Neumann eigenvalue of the flat
/// two-dimensional annulus `[r1, r2]`, from per-mode radial solves.
pub fn neumann_poincare_annulus(r1: f64, r2: f64, fourier_cutoff: u32) -> Result<f64> {
    if fourier_cutoff < 1 {
        return Err(Error::Invalid("fourier_cutoff must be at least 1".into()));
    }
    if !(r2 > r1) || !(r1 >= 1.0) {
        return Err(Error::InvalidGrid(format!(
            "annulus [{r1}, {r2}] must satisfy r2 > r1 ≥ 1"
        )));
    }
    let mut lambda_min = f64::INFINITY;
    for k in 0..=fourier_cutoff {
        let (diag, off) = radial_mode_matrix(r1, r2, k, RADIAL_NODES);
        // k = 0 has the constant in its kernel; skip to the next eigenvalue
        let which = if k == 0 { 1 } else { 0 };
        let lambda = tridiagonal_eigenvalue(&diag, &off, which);
        if lambda < lambda_min {
            lambda_min = lambda;
        }
    }
    if !(lambda_min > 0.0) {
        return Err(Error::Eigensolve(format!(
            "nonpositive smallest eigenvalue {lambda_min}"
        )));
    }
    Ok(1.0 / lambda_min)
}

/// Symmetrized tridiagonal `(diag, off)` of the radial Neumann problem for
/// circle frequency `k` on `[r1, r2]` with `n` nodes.
fn radial_mode_matrix(r1: f64, r2: f64, k: u32, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (r2 - r1) / (n - 1) as f64;
    let r = |i: usize| r1 + i as f64 * h;
    let kk = (k * k) as f64;
    // stiffness (tridiagonal) and lumped mass per node
    let mut a_diag = vec![0.0; n];
    let mut a_off = vec![0.0; n - 1];
    let mut mass = vec![0.0; n];
    for i in 0..n - 1 {
        let rh = 0.5 * (r(i) + r(i + 1));
        let c = rh / h;
        a_diag[i] += c;
        a_diag[i + 1] += c;
        a_off[i] -= c;
    }
    for (i, m) in mass.iter_mut().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
        *m = r(i) * w;
        a_diag[i] += kk / r(i) * w;
    }
    // similarity transform to a standard symmetric problem
    for i in 0..n {
        a_diag[i] /= mass[i];
    }
    for i in 0..n - 1 {
        a_off[i] /= (mass[i] * mass[i + 1]).sqrt();
    }
    (a_diag, a_off)
}

/// `which`-th smallest eigenvalue of a symmetric tridiagonal matrix by Sturm
/// sequence bisection.
fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], which: usize) -> f64 {
    let n = diag.len();
    let count_below = |x: f64| -> usize {
        let mut cnt = 0usize;
        let mut q = diag[0] - x;
        if q < 0.0 {
            cnt += 1;
        }
        for i in 1..n {
            let e2 = off[i - 1] * off[i - 1];
            let denom = if q.abs() < 1e-300 { -1e-300 } else { q };
            q = diag[i] - x - e2 / denom;
            if q < 0.0 {
                cnt += 1;
            }
        }
        cnt
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let row = off.get(i.wrapping_sub(1)).map_or(0.0, |v| v.abs())
            + off.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(diag[i] - row);
        hi = hi.max(diag[i] + row);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) > which {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Dense 2D Neumann eigensolve on the annulus, the brute-force oracle for
/// [`neumann_poincare_annulus`]. Returns the Poincaré constant.
pub fn brute_force_neumann_poincare(r1: f64, r2: f64, n_r: usize, n_theta: usize) -> Result<f64> {
    if !(r2 > r1) || n_r < 4 || n_theta < 8 {
        return Err(Error::InvalidGrid("degenerate brute-force grid".into()));
    }
    let h_r = (r2 - r1) / (n_r - 1) as f64;
    let h_t = 2.0 * std::f64::consts::PI / n_theta as f64;
    let n = n_r * n_theta;
    let idx = |i: usize, j: usize| i * n_theta + (j % n_theta);
    let r = |i: usize| r1 + i as f64 * h_r;
    let cell = |i: usize| {
        if i == 0 || i == n_r - 1 {
            0.5 * h_r
        } else {
            h_r
        }
    };

    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut mass = vec![0.0; n];
    for i in 0..n_r {
        for j in 0..n_theta {
            mass[idx(i, j)] = r(i) * cell(i) * h_t;
        }
    }
    // radial edges
    for i in 0..n_r - 1 {
        let rh = 0.5 * (r(i) + r(i + 1));
        let c = rh * h_t / h_r;
        for j in 0..n_theta {
            let (p, q) = (idx(i, j), idx(i + 1, j));
            a[(p, p)] += c;
            a[(q, q)] += c;
            a[(p, q)] -= c;
            a[(q, p)] -= c;
        }
    }
    // angular edges (periodic)
    for i in 0..n_r {
        let c = cell(i) / (r(i) * h_t);
        for j in 0..n_theta {
            let (p, q) = (idx(i, j), idx(i, j + 1));
            a[(p, p)] += c;
            a[(q, q)] += c;
            a[(p, q)] -= c;
            a[(q, p)] -= c;
        }
    }
    // symmetrize against the mass weights
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] /= (mass[i] * mass[j]).sqrt();
        }
    }
    let eigen = a.symmetric_eigenvalues();
    let max = eigen.iter().cloned().fold(0.0f64, f64::max);
    let lambda1 = eigen
        .iter()
        .cloned()
        .filter(|&l| l > 1e-9 * max)
        .fold(f64::INFINITY, f64::min);
    if !lambda1.is_finite() {
        return Err(Error::Eigensolve("no positive eigenvalue found".into()));
    }
    Ok(1.0 / lambda1)
}

/// One field's verdict in [`poincare_product_check`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct PoincareCase {
    pub mean_subtracted_l2: f64,
    pub gradient_energy: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PoincareReport {
    pub p_a: f64,
    pub p_y: f64,
    pub cases: Vec<PoincareCase>,
    pub all_pass: bool,
}

/// Mean-subtracted product Poincaré inequality
/// `∫∫(u−ū)² ≤ (P_A + P_Y)·∫∫|∇u|²` checked field by field.
pub fn poincare_product_check(
    p_a: f64,
    spec: &FiberSpectrum,
    fields: &[SpectralField],
) -> Result<PoincareReport> {
    let p_y = spec.poincare_constant;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut cases = Vec::with_capacity(fields.len());
    for field in fields {
        if field.spectrum != *spec {
            return Err(Error::FieldMismatch(
                "field spectrum differs from the check's spectrum".into(),
            ));
        }
        let grid = &field.grid;
        let nodes = grid.nodes();
        let volume = two_pi * spec.volume * grid.integrate_r_dr(|_, _| 1.0);

        // global mean: only the (0,0) mode contributes, ψ₀ = 1/√Vol
        let sqrt_vol = spec.volume.sqrt();
        let mut mean = 0.0;
        for (mode, values) in field.modes() {
            if mode.k == 0 && mode.mu_ordinal == 0 {
                mean = two_pi * sqrt_vol * grid.integrate_r_dr(|i, _| values[i].re) / volume;
                // imaginary parts of real fields vanish; keep the real mean
            }
        }

        let mut l2 = 0.0;
        let mut grad = 0.0;
        for (mode, values) in field.modes() {
            let shift = if mode.k == 0 && mode.mu_ordinal == 0 {
                mean * sqrt_vol
            } else {
                0.0
            };
            l2 += two_pi
                * grid.integrate_r_dr(|i, _| {
                    let v = values[i] - shift;
                    v.norm_sqr()
                });
            let dv = super::norms_radial_derivative(nodes, values);
            let kk = (mode.k * mode.k) as f64;
            grad += two_pi
                * grid.integrate_r_dr(|i, r| {
                    dv[i].norm_sqr() + (kk / (r * r) + mode.mu) * values[i].norm_sqr()
                });
        }
        let bound = (p_a + p_y) * grad;
        cases.push(PoincareCase {
            mean_subtracted_l2: l2,
            gradient_energy: grad,
            bound,
            pass: l2 <= bound * (1.0 + 1e-9) + 1e-30,
        });
    }
    let all_pass = cases.iter().all(|c| c.pass);
    Ok(PoincareReport {
        p_a,
        p_y,
        cases,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_laplace::RadialGrid;
    use num_complex::Complex64;

    #[test]
    fn thin_annulus_constant_near_mean_radius_squared() {
        let p = neumann_poincare_annulus(10.0, 10.1, 4).unwrap();
        assert!((p / 101.0 - 1.0).abs() < 0.05, "{p}");
        let brute = brute_force_neumann_poincare(10.0, 10.1, 12, 64).unwrap();
        assert!((p / brute - 1.0).abs() < 0.01, "{p} vs {brute}");
    }

    #[test]
    fn scaling_law_is_exact() {
        let p1 = neumann_poincare_annulus(1.5, 3.0, 6).unwrap();
        let p2 = neumann_poincare_annulus(3.0, 6.0, 6).unwrap();
        assert!((p2 / (4.0 * p1) - 1.0).abs() < 1e-6, "{p2} vs {}", 4.0 * p1);
    }

    #[test]
    fn degenerate_annulus_rejected() {
        assert!(neumann_poincare_annulus(2.0, 2.0, 4).is_err());
        assert!(neumann_poincare_annulus(2.0, 3.0, 0).is_err());
    }

    #[test]
    fn fiber_eigenfunction_saturates_fiber_term() {
        let spec = FiberSpectrum::flat_torus(&[1.0, 1.0], 200.0).unwrap();
        let grid = RadialGrid::uniform(1.0, 2.0, 64).unwrap();
        let mut field = SpectralField::zero(spec.clone(), grid);
        field
            .set_mode_fn(spec.mode(0, 1).unwrap(), |_| Complex64::new(1.0, 0.0))
            .unwrap();
        let p_a = neumann_poincare_annulus(1.0, 2.0, 8).unwrap();
        let report = poincare_product_check(p_a, &spec, &[field]).unwrap();
        let case = &report.cases[0];
        let ratio = case.mean_subtracted_l2 / case.gradient_energy;
        assert!((ratio - spec.poincare_constant).abs() < 1e-10 * ratio);
        assert!(case.pass);
    }

    #[test]
    fn constant_field_trivially_passes() {
        let spec = FiberSpectrum::flat_torus(&[1.0, 1.0], 200.0).unwrap();
        let grid = RadialGrid::uniform(1.0, 2.0, 64).unwrap();
        let mut field = SpectralField::zero(spec.clone(), grid);
        field
            .set_mode_fn(spec.mode(0, 0).unwrap(), |_| Complex64::new(3.7, 0.0))
            .unwrap();
        let report = poincare_product_check(101.0, &spec, &[field]).unwrap();
        let case = &report.cases[0];
        assert!(case.mean_subtracted_l2 < 1e-20);
        assert!(case.gradient_energy < 1e-20);
        assert!(case.pass);
    }
}

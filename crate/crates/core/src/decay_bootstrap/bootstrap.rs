//! One doubling step: synthesize the eigenvalue field of `i∂∂̄φ`, evaluate
//! `Q`, fit its exponent (≈ 2β), push `Q` back through the mode solver, and
//! fit the re-solved form's exponent.
//!
//! The eigenvalue surrogate is trace-exact: base eigenvalue `Δ_ℂ` of the mode
//! sum (finite differences in r, spectral in θ), and `d−1` isotropic fiber
//! eigenvalues summing to `Δ_Y` (each separated mode contributes `−μ·v`
//! exactly). Mixed second derivatives are dropped; they decay two orders
//! faster and do not move the fitted exponents at desk scale.
//!
//! Feeding `Q` back: the `k ≠ 0` base modes go through the Green solver with
//! decaying boundary data; the `k = 0` fiber-average sector uses the identity
//! `i∂∂̄φ̄ = (Q̄/4)·i dz dz̄` and needs no solve.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;

use super::ma::{ma_nonlinearity, HermitianEigenField};
use super::{fit_decay_exponent, DecayReport};
use crate::fiber_spectrum::FiberSpectrum;
use crate::spectral_laplace::{mode_greens_solve, mode_operator_apply, RadialGrid, SpectralField};
use crate::{Error, Result};

/// Reports from one bootstrap step.
#[derive(Debug, Clone, Serialize)]
pub struct BootstrapStep {
    pub q_report: DecayReport,
    pub resolved_report: DecayReport,
}

/// One row of the chained-bootstrap table, with the per-annulus samples
/// behind the two fits (for plot-data emission).
#[derive(Debug, Clone, Serialize)]
pub struct BootstrapChainRow {
    pub step: usize,
    pub beta_in: f64,
    pub beta_q: f64,
    pub beta_out: f64,
    pub r2_q: f64,
    pub r2_out: f64,
    pub q_samples: Vec<(f64, f64)>,
    pub out_samples: Vec<(f64, f64)>,
}

/// Synthetic multi-mode field with envelope `r^{-beta}`: deterministic
/// seeded coefficients on the given `(k, ordinal)` modes.
pub fn synthesize_decaying_field(
    spectrum: &FiberSpectrum,
    grid: &RadialGrid,
    beta: f64,
    modes: &[(i32, usize)],
    amplitude: f64,
    seed: u64,
) -> Result<SpectralField> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut field = SpectralField::zero(spectrum.clone(), grid.clone());
    for &(k, ord) in modes {
        let mode = spectrum.mode(k, ord)?;
        let c = Complex64::from_polar(
            amplitude * rng.random_range(0.5..1.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        field.set_mode_fn(mode, |r| c * r.powf(-beta))?;
    }
    Ok(field)
}

/// Trace-exact diagonal eigenvalue surrogate of `i∂∂̄φ` on an `(r, θ)` grid.
pub fn eigenfield_of(
    phi: &SpectralField,
    dimension: usize,
    n_theta: usize,
) -> Result<HermitianEigenField> {
    if dimension < 1 {
        return Err(Error::Invalid("dimension must be positive".into()));
    }
    let grid = &phi.grid;
    let n = grid.len();

    // per-mode base part Δ_ℂ v = L_{k,0} v + ... : reuse the operator with
    // μ stripped, i.e. (L_{k,μ} v) + μ v
    let mut base_modes: Vec<(i32, Vec<Complex64>)> = Vec::new();
    let mut fiber_modes: Vec<(i32, f64, Vec<Complex64>)> = Vec::new();
    for (mode, values) in phi.modes() {
        let profile = phi.profile(&mode).expect("mode iterated from field");
        let image = mode_operator_apply(&profile)?;
        let base: Vec<Complex64> = image
            .profile
            .values
            .iter()
            .zip(values)
            .map(|(lu, v)| lu + mode.mu * v)
            .collect();
        base_modes.push((mode.k, base));
        fiber_modes.push((mode.k, mode.mu, values.to_vec()));
    }

    let mut out = HermitianEigenField::zeros(dimension, grid.clone(), n_theta)?;
    let fiber_dirs = dimension.saturating_sub(1);
    for ir in 0..n {
        for it in 0..n_theta {
            let theta = std::f64::consts::TAU * it as f64 / n_theta as f64;
            let mut lam_base = 0.0;
            for (k, vals) in &base_modes {
                lam_base += (vals[ir] * Complex64::from_polar(1.0, *k as f64 * theta)).re;
            }
            let mut lam_fiber_total = 0.0;
            for (k, mu, vals) in &fiber_modes {
                lam_fiber_total -=
                    mu * (vals[ir] * Complex64::from_polar(1.0, *k as f64 * theta)).re;
            }
            let mut evals = Vec::with_capacity(dimension);
            for _ in 0..fiber_dirs {
                evals.push(lam_fiber_total / fiber_dirs as f64);
            }
            evals.push(lam_base);
            out.set(ir, it, &evals)?;
        }
    }
    Ok(out)
}

/// Window sup-norms `(l, sup over A(l, l+2))` at node-aligned window starts,
/// log-spaced between `r_lo` and `r_hi`.
pub(crate) fn window_sup_norms(
    grid: &RadialGrid,
    sample: impl Fn(usize) -> f64,
    r_lo: f64,
    r_hi: f64,
    count: usize,
) -> Vec<(f64, f64)> {
    let nodes = grid.nodes();
    let mut out = Vec::new();
    for j in 0..count {
        let target = r_lo * (r_hi / r_lo).powf(j as f64 / (count - 1) as f64);
        let start = nodes.partition_point(|&r| r < target);
        if start >= nodes.len() {
            break;
        }
        let l = nodes[start];
        if l + 2.0 > grid.r_max() {
            break;
        }
        let mut sup = 0.0f64;
        for (i, &r) in nodes.iter().enumerate().skip(start) {
            if r > l + 2.0 {
                break;
            }
            sup = sup.max(sample(i));
        }
        out.push((l, sup));
    }
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

/// One bootstrap step on `phi`.
pub fn bootstrap_step(
    phi: &SpectralField,
    dimension: usize,
    beta_in: f64,
) -> Result<BootstrapStep> {
    if !(beta_in > 0.0) {
        return Err(Error::InsufficientDecay(beta_in));
    }
    let n_theta = 64usize;
    let grid = &phi.grid;

    let eig = eigenfield_of(phi, dimension, n_theta)?;
    let q = ma_nonlinearity(&eig);
    if let Some(&first) = q.kahler_violations.first() {
        return Err(Error::KahlerViolation {
            count: q.kahler_violations.len(),
            first,
        });
    }

    // fit window: far enough out for the quadratic term to dominate, away
    // from both grid ends
    let r_lo = (100.0 / beta_in)
        .min(grid.r_max() / 8.0)
        .max(grid.r_min() * 4.0);
    let r_hi = grid.r_max() / 2.0;
    let sup_at = |i: usize| {
        let mut m = 0.0f64;
        for it in 0..n_theta {
            m = m.max(q.values[i * n_theta + it].abs());
        }
        m
    };
    let q_samples = window_sup_norms(grid, sup_at, r_lo, r_hi, 14);
    let q_report = fit_decay_exponent(&q_samples)?;

    // θ-DFT of Q onto base modes
    let k_max = 2 * phi
        .modes()
        .map(|(m, _)| m.k.abs())
        .max()
        .unwrap_or(0)
        .max(1);
    let mut resolved_modes: Vec<(i32, Vec<Complex64>)> = Vec::new();
    for k in -k_max..=k_max {
        let mut coeff = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (i, c) in coeff.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for it in 0..n_theta {
                let theta = std::f64::consts::TAU * it as f64 / n_theta as f64;
                acc += q.values[i * n_theta + it] * Complex64::from_polar(1.0, -(k as f64) * theta);
            }
            *c = acc / n_theta as f64;
        }
        if k == 0 {
            // fiber-average sector: i∂∂̄ coefficient is Q̄/4 directly
            resolved_modes.push((0, coeff.iter().map(|v| v * 0.25).collect()));
        } else {
            // Green solve with decaying (zero) boundary data, then the base
            // second-derivative combination by finite differences
            let mode = phi.spectrum.mode(k, 0)?;
            let rhs =
                crate::spectral_laplace::RadialProfile::new(mode, grid.clone(), coeff.clone())?;
            let sol = mode_greens_solve(mode, &rhs, Complex64::new(0.0, 0.0))?;
            let image = mode_operator_apply(&sol.profile)?;
            resolved_modes.push((k, image.profile.values.iter().map(|v| v * 0.25).collect()));
        }
    }

    let resolved_at = |i: usize| {
        let mut m = 0.0f64;
        for it in 0..n_theta {
            let theta = std::f64::consts::TAU * it as f64 / n_theta as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, vals) in &resolved_modes {
                acc += vals[i] * Complex64::from_polar(1.0, *k as f64 * theta);
            }
            m = m.max(acc.re.abs());
        }
        m
    };
    let resolved_samples = window_sup_norms(grid, resolved_at, r_lo, r_hi, 14);
    let resolved_report = fit_decay_exponent(&resolved_samples)?;

    Ok(BootstrapStep {
        q_report,
        resolved_report,
    })
}

/// Chains bootstrap steps: each step synthesizes a fresh field whose envelope
/// exponent is the previous step's measured output.
pub fn run_bootstrap_chain(
    beta0: f64,
    steps: usize,
    dimension: usize,
    seed: u64,
) -> Result<Vec<BootstrapChainRow>> {
    let spectrum = FiberSpectrum::from_pairs(
        vec![(0.0, 1), (1.0, 1), (2.0, 1), (3.0, 1), (4.0, 1)],
        1.0,
        true,
    )?;
    let grid = RadialGrid::log(1.0, 6000.0, 1024)?;
    let modes = [(0i32, 1usize), (1, 2), (-1, 2), (2, 3), (3, 4)];
    let mut rows = Vec::new();
    let mut beta_in = beta0;
    for step in 0..steps {
        let amplitude = 0.05;
        let phi = synthesize_decaying_field(
            &spectrum,
            &grid,
            beta_in,
            &modes,
            amplitude,
            seed.wrapping_add(step as u64),
        )?;
        let result = bootstrap_step(&phi, dimension, beta_in)?;
        let samples = |rep: &DecayReport| {
            rep.radii
                .iter()
                .zip(&rep.sup_norms)
                .map(|(&r, &n)| (r, n))
                .collect::<Vec<_>>()
        };
        rows.push(BootstrapChainRow {
            step,
            beta_in,
            beta_q: result.q_report.exponent,
            beta_out: result.resolved_report.exponent,
            r2_q: result.q_report.r_squared,
            r2_out: result.resolved_report.r_squared,
            q_samples: samples(&result.q_report),
            out_samples: samples(&result.resolved_report),
        });
        beta_in = result.resolved_report.exponent;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_spectrum() -> FiberSpectrum {
        FiberSpectrum::from_pairs(
            vec![(0.0, 1), (1.0, 1), (2.0, 1), (3.0, 1), (4.0, 1)],
            1.0,
            true,
        )
        .unwrap()
    }

    #[test]
    fn zero_field_gives_zero_q() {
        let spectrum = test_spectrum();
        let grid = RadialGrid::log(1.0, 2000.0, 256).unwrap();
        let phi = SpectralField::zero(spectrum, grid);
        let eig = eigenfield_of(&phi, 3, 16).unwrap();
        let q = ma_nonlinearity(&eig);
        assert!(q.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_mode_quadratic_dominance() {
        // envelope r^{-1/2} in d = 3: Q exponent ≈ 1 on far annuli
        let spectrum = test_spectrum();
        let grid = RadialGrid::log(1.0, 6000.0, 1024).unwrap();
        let phi = synthesize_decaying_field(&spectrum, &grid, 0.5, &[(1, 1)], 0.05, 3).unwrap();
        let step = bootstrap_step(&phi, 3, 0.5).unwrap();
        assert!(
            (step.q_report.exponent - 1.0).abs() < 0.1,
            "Q exponent {}",
            step.q_report.exponent
        );
    }

    #[test]
    fn doubling_chain_two_steps() {
        let rows = run_bootstrap_chain(0.5, 2, 3, 42).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].beta_out - 1.0).abs() < 0.15, "{:?}", rows[0]);
        assert!((rows[1].beta_out - 2.0).abs() < 0.15 * 2.0, "{:?}", rows[1]);
    }

    #[test]
    fn insufficient_decay_rejected() {
        let spectrum = test_spectrum();
        let grid = RadialGrid::log(1.0, 2000.0, 256).unwrap();
        let phi = SpectralField::zero(spectrum, grid);
        assert!(matches!(
            bootstrap_step(&phi, 3, 0.0),
            Err(Error::InsufficientDecay(_))
        ));
    }

    #[test]
    fn kahler_violation_detected() {
        let spectrum = test_spectrum();
        let grid = RadialGrid::log(1.0, 6000.0, 512).unwrap();
        // fiber eigenvalue −μ·v/(d−1) = −2·r^{-0.1} dips below −1 near r_min
        let mut phi = SpectralField::zero(spectrum.clone(), grid);
        phi.set_mode_fn(spectrum.mode(0, 4).unwrap(), |r| {
            Complex64::new(r.powf(-0.1), 0.0)
        })
        .unwrap();
        let err = bootstrap_step(&phi, 3, 0.1).unwrap_err();
        assert!(matches!(err, Error::KahlerViolation { .. }), "{err:?}");
    }
}

//! The volume-form nonlinearity `Q` and the fiber-average identity.
//!
//! With `λ` the model-relative eigenvalues of `i∂∂̄φ`, the volume-form
//! equation `Π(1 + λᵢ) = 1` expands to `e₁(λ) = −Σ_{j≥2} e_j(λ)`, so the
//! trace equation reads `Δφ = Q` with `Q = −Σ_{j≥2} e_j(λ)`, quadratic at
//! leading order.

use num_complex::Complex64;
use serde::Serialize;

use crate::spectral_laplace::{RadialGrid, SpectralField};
use crate::{Error, Result};

/// Eigenvalues of a real (1,1)-form relative to the model metric, sampled on
/// a radial × angular grid; `d` sorted reals per sample.
#[derive(Debug, Clone)]
pub struct HermitianEigenField {
    pub dimension: usize,
    pub grid: RadialGrid,
    pub n_theta: usize,
    eigenvalues: Vec<f64>,
}

impl HermitianEigenField {
    pub fn zeros(dimension: usize, grid: RadialGrid, n_theta: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        if n_theta < 4 {
            return Err(Error::Invalid("need at least 4 angular samples".into()));
        }
        let n = grid.len() * n_theta * dimension;
        Ok(Self {
            dimension,
            grid,
            n_theta,
            eigenvalues: vec![0.0; n],
        })
    }

    pub fn from_fn(
        dimension: usize,
        grid: RadialGrid,
        n_theta: usize,
        f: impl Fn(f64, f64) -> Vec<f64>,
    ) -> Result<Self> {
        let mut field = Self::zeros(dimension, grid, n_theta)?;
        for ir in 0..field.grid.len() {
            let r = field.grid.nodes()[ir];
            for it in 0..n_theta {
                let theta = 2.0 * std::f64::consts::PI * it as f64 / n_theta as f64;
                let evals = f(r, theta);
                field.set(ir, it, &evals)?;
            }
        }
        Ok(field)
    }

    pub fn num_samples(&self) -> usize {
        self.grid.len() * self.n_theta
    }

    fn offset(&self, ir: usize, it: usize) -> usize {
        (ir * self.n_theta + it) * self.dimension
    }

    pub fn at(&self, ir: usize, it: usize) -> &[f64] {
        let o = self.offset(ir, it);
        &self.eigenvalues[o..o + self.dimension]
    }

    /// Stores one sample's eigenvalues, sorting them ascending.
    pub fn set(&mut self, ir: usize, it: usize, evals: &[f64]) -> Result<()> {
        if evals.len() != self.dimension {
            return Err(Error::Invalid(format!(
                "expected {} eigenvalues, got {}",
                self.dimension,
                evals.len()
            )));
        }
        let o = self.offset(ir, it);
        let slot = &mut self.eigenvalues[o..o + self.dimension];
        slot.copy_from_slice(evals);
        slot.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(())
    }

    /// Global minimum eigenvalue with its `(r_index, θ_index)` witness.
    pub fn min_eigenvalue(&self) -> (f64, (usize, usize)) {
        let mut best = f64::INFINITY;
        let mut witness = (0, 0);
        for ir in 0..self.grid.len() {
            for it in 0..self.n_theta {
                let v = self.at(ir, it)[0]; // sorted ascending
                if v < best {
                    best = v;
                    witness = (ir, it);
                }
            }
        }
        (best, witness)
    }

    /// Flat sample index for reporting.
    pub fn flat_index(&self, ir: usize, it: usize) -> usize {
        ir * self.n_theta + it
    }
}

/// Output of [`ma_nonlinearity`]: `Q` per sample plus per-sample flags where
/// the Kähler condition `1 + λᵢ > 0` fails.
#[derive(Debug, Clone, Serialize)]
pub struct MaOutput {
    pub values: Vec<f64>,
    pub kahler_violations: Vec<usize>,
}

/// `Q = −Σ_{j≥2} e_j(λ)` per sample; identically zero in dimension 1.
pub fn ma_nonlinearity(field: &HermitianEigenField) -> MaOutput {
    let d = field.dimension;
    let mut values = Vec::with_capacity(field.num_samples());
    let mut violations = Vec::new();
    for ir in 0..field.grid.len() {
        for it in 0..field.n_theta {
            let evals = field.at(ir, it);
            if evals.iter().any(|&l| 1.0 + l <= 0.0) {
                violations.push(field.flat_index(ir, it));
            }
            values.push(q_from_eigenvalues(evals, d));
        }
    }
    MaOutput {
        values,
        kahler_violations: violations,
    }
}

/// Elementary-symmetric expansion of `Π(1+λᵢ) − 1 − e₁`.
pub fn q_from_eigenvalues(evals: &[f64], d: usize) -> f64 {
    debug_assert_eq!(evals.len(), d);
    if d <= 1 {
        return 0.0;
    }
    // e_j via incremental products: coeffs[j] = e_j after each eigenvalue
    let mut coeffs = vec![0.0; d + 1];
    coeffs[0] = 1.0;
    for (i, &l) in evals.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            coeffs[j] += l * coeffs[j - 1];
        }
    }
    -coeffs[2..=d].iter().sum::<f64>()
}

/// The fiber-average sector needs no solve: the averaged equation is the flat
/// base Laplacian, so the averaged (1,1)-form is `(Q̄/4)·i dz dz̄` directly.
/// Input must be fiber-constant (μ = 0 modes only); returns the base-form
/// coefficient samples `Q̄/4` as a field on the same modes.
pub fn base_part_identity(q_avg: &SpectralField) -> Result<SpectralField> {
    let quarter = Complex64::new(0.25, 0.0);
    let mut out = SpectralField::zero(q_avg.spectrum.clone(), q_avg.grid.clone());
    for (mode, values) in q_avg.modes() {
        if mode.mu_ordinal != 0 {
            return Err(Error::FieldMismatch(format!(
                "fiber-average identity applied to non-constant mode (k={}, μ={})",
                mode.k, mode.mu
            )));
        }
        out.set_mode(mode, values.iter().map(|v| v * quarter).collect())?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber_spectrum::FiberSpectrum;
    use rand::Rng;
    use rand::SeedableRng;

    fn small_grid() -> RadialGrid {
        RadialGrid::log(1.0, 10.0, 16).unwrap()
    }

    #[test]
    fn dimension_one_vanishes() {
        let field =
            HermitianEigenField::from_fn(1, small_grid(), 8, |r, t| vec![0.3 * (r + t).sin()])
                .unwrap();
        let out = ma_nonlinearity(&field);
        assert!(out.values.iter().all(|&q| q == 0.0));
        assert!(out.kahler_violations.is_empty());
    }

    #[test]
    fn two_dimensional_product() {
        // λ = (a, b): Q = −ab
        let (a, b) = (0.3, -0.2);
        let field = HermitianEigenField::from_fn(2, small_grid(), 8, |_, _| vec![a, b]).unwrap();
        let out = ma_nonlinearity(&field);
        for q in out.values {
            assert!((q + a * b).abs() < 1e-15);
        }
    }

    #[test]
    fn three_dimensional_diagonal() {
        // λ = (t,t,t): e₂ = 3t², e₃ = t³, Q = −(3t² + t³)
        let t = 0.11;
        let field = HermitianEigenField::from_fn(3, small_grid(), 8, |_, _| vec![t, t, t]).unwrap();
        let out = ma_nonlinearity(&field);
        for q in out.values {
            assert!((q + 3.0 * t * t + t * t * t).abs() < 1e-15);
        }
    }

    #[test]
    fn kahler_violations_flagged() {
        let grid = small_grid();
        let mut field = HermitianEigenField::zeros(2, grid.clone(), 8).unwrap();
        field.set(3, 5, &[-1.5, 0.2]).unwrap();
        let out = ma_nonlinearity(&field);
        assert_eq!(out.kahler_violations, vec![field.flat_index(3, 5)]);
        let (min, witness) = field.min_eigenvalue();
        assert_eq!(min, -1.5);
        assert_eq!(witness, (3, 5));
    }

    #[test]
    fn trace_identity_on_unit_volume_tuples() {
        // solve Π(1+λ) = 1 for the last eigenvalue, then e₁ + Σ_{j≥2} e_j = 0
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for d in 2..=5usize {
            for _ in 0..200 {
                let mut evals: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-0.4..0.4)).collect();
                let prod: f64 = evals.iter().map(|l| 1.0 + l).product();
                evals.push(1.0 / prod - 1.0);
                let q = q_from_eigenvalues(&evals, d);
                let e1: f64 = evals.iter().sum();
                // Π(1+λ) = 1 forces e₁ = Q exactly
                assert!((e1 - q).abs() < 1e-12, "e1 = {e1}, Q = {q}, d = {d}");
            }
        }
    }

    #[test]
    fn quadratic_leading_order() {
        // ma(t·λ)/t² approaches the pure e₂ term as t → 0
        let lam = [0.37, -0.21, 0.11];
        let e2 = lam[0] * lam[1] + lam[0] * lam[2] + lam[1] * lam[2];
        let mut ratios = Vec::new();
        for t in [1e-2, 1e-3] {
            let scaled: Vec<f64> = lam.iter().map(|l| l * t).collect();
            let q = q_from_eigenvalues(&scaled, 3);
            ratios.push(q / (t * t));
        }
        for r in &ratios {
            assert!((r / -e2 - 1.0).abs() < 0.01, "ratio {r} vs {}", -e2);
        }
    }

    #[test]
    fn base_identity_definitional_quarter() {
        let spec = FiberSpectrum::flat_torus(&[1.0, 1.0], 200.0).unwrap();
        let grid = small_grid();
        let mut q = SpectralField::zero(spec.clone(), grid.clone());
        q.set_mode_fn(spec.mode(0, 0).unwrap(), |r| {
            Complex64::new(r.powi(-2), 0.0)
        })
        .unwrap();
        let coeff = base_part_identity(&q).unwrap();
        let mode = spec.mode(0, 0).unwrap();
        for (i, &r) in grid.nodes().iter().enumerate() {
            let v = coeff.mode_values(&mode).unwrap()[i];
            assert!((v.re - r.powi(-2) / 4.0).abs() < 1e-16);
        }

        // zero in, zero out
        let zero = SpectralField::zero(spec.clone(), grid.clone());
        let out = base_part_identity(&zero).unwrap();
        assert_eq!(out.num_modes(), 0);

        // fiber mode rejected
        let mut bad = SpectralField::zero(spec.clone(), grid);
        bad.set_mode_fn(spec.mode(0, 1).unwrap(), |_| Complex64::new(1.0, 0.0))
            .unwrap();
        assert!(base_part_identity(&bad).is_err());
    }
}

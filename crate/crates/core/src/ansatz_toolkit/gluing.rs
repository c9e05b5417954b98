//! Gluing positivity: assemble `ω̲ = ω̃ + i∂∂̄(χφ) + t·b₀` on a grid and
//! check positive definiteness.
//!
//! Per the expansion `i∂∂̄(χφ) = χ·i∂∂̄φ + φ·i∂∂̄χ + 2Re(i∂χ∧∂̄φ)`, only the
//! first term survives where `∇χ = 0`; the other two live on the ramp of χ
//! and touch the base direction (χ is pulled back from the base, so `∂χ`
//! kills fiber vectors). The Hermitian reference `H_χ = ω̃ + χ·i∂∂̄φ` is
//! positive by hypothesis; the cutoff terms are measured on the grid as
//! `c₁` (mixed, H_χ-normalized), `c₂` (base-base), with `c₃ = c₁²/2` from the
//! Cauchy–Schwarz split, and the threshold is `t_min = 1000(c₂+c₃+1)`.
//!
//! The fiber gradient of a separated mode enters through its L²-exact
//! magnitude `√μ·|v|`; mixed second derivatives are not tracked (they belong
//! to `i∂∂̄φ` itself, which the eigenvalue surrogate diagonalizes).

use num_complex::Complex64;
use serde::Serialize;

use super::cutoff::CutoffProfile;
use crate::decay_bootstrap::HermitianEigenField;
use crate::spectral_laplace::{mode_operator_apply, SpectralField};
use crate::{Error, Result};

/// Inputs to [`glue_ansatz`]: the background form (model-relative fiber/base
/// eigenvalues), the potential, and the two radial cutoffs of the lemma.
pub struct GluingInput<'a> {
    /// Fiber eigenvalue of ω̃ relative to the model (constant surrogate).
    pub omega_tilde_fiber: f64,
    /// Base eigenvalue of ω̃ relative to the model.
    pub omega_tilde_base: f64,
    /// Total complex dimension d ≥ 2.
    pub dimension: usize,
    /// The potential, defined on the whole grid (covering `r > R−3`).
    pub phi: &'a SpectralField,
    /// Ramp-up cutoff χ (0 below R, 1 above R+1).
    pub chi: &'a CutoffProfile,
    /// Ramp-up cutoff φ-bump support (0 below R−2, 1 above R−1).
    pub varphi: &'a CutoffProfile,
    /// Bump strength t ≥ 0.
    pub t: f64,
    /// Angular sample count.
    pub n_theta: usize,
}

/// Assembled form plus the measured constants of the positivity proof.
#[derive(Debug, Clone)]
pub struct GluedAnsatz {
    pub eigenfield: HermitianEigenField,
    pub constants: GluingConstants,
    /// Minimum eigenvalue of the Hermitian reference `H_χ` over the grid.
    pub h_chi_min: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GluingConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub t_min: f64,
}

/// Global minimum eigenvalue with its witness sample.
pub fn positivity_check(field: &HermitianEigenField) -> (f64, (usize, usize)) {
    field.min_eigenvalue()
}

/// Assembles the glued form's eigenvalue field and measures the proof's
/// constants.
pub fn glue_ansatz(input: &GluingInput<'_>) -> Result<GluedAnsatz> {
    let d = input.dimension;
    if d < 2 {
        return Err(Error::Invalid(
            "gluing needs a fiber direction (d ≥ 2)".into(),
        ));
    }
    if input.omega_tilde_fiber <= 0.0 || input.omega_tilde_base <= 0.0 {
        return Err(Error::Invalid("ω̃ must be positive on the grid".into()));
    }
    // support ordering: the ramp of χ must sit inside the plateau of varphi
    let (chi_lo, chi_plateau_lo) = (input.chi.breakpoints[0], input.chi.breakpoints[1]);
    let (varphi_plateau_lo, varphi_plateau_hi) = input.varphi.plateau();
    if chi_lo < varphi_plateau_lo || chi_plateau_lo > varphi_plateau_hi {
        return Err(Error::MisorderedSupports(format!(
            "ramp of χ [{chi_lo}, {chi_plateau_lo}] outside plateau of φ-cutoff \
             [{varphi_plateau_lo}, {varphi_plateau_hi}]"
        )));
    }
    let grid = &input.phi.grid;
    if grid.r_min() > chi_lo - 1.0 {
        return Err(Error::MisorderedSupports(format!(
            "potential grid starts at {} but must cover r > {}",
            grid.r_min(),
            chi_lo - 1.0
        )));
    }

    let n = grid.len();
    let n_theta = input.n_theta.max(8);
    let fiber_dirs = d - 1;

    // per-mode pieces of the synthesis
    struct ModeData {
        k: i32,
        mu: f64,
        values: Vec<Complex64>,
        base_second: Vec<Complex64>, // Δ_ℂ v per mode
        radial_deriv: Vec<Complex64>,
    }
    let mut modes = Vec::new();
    for (mode, values) in input.phi.modes() {
        let profile = input.phi.profile(&mode).expect("iterated mode");
        let image = mode_operator_apply(&profile)?;
        let base_second: Vec<Complex64> = image
            .profile
            .values
            .iter()
            .zip(values)
            .map(|(lu, v)| lu + mode.mu * v)
            .collect();
        let radial_deriv = crate::spectral_laplace::norms_radial_derivative(grid.nodes(), values);
        modes.push(ModeData {
            k: mode.k,
            mu: mode.mu,
            values: values.to_vec(),
            base_second,
            radial_deriv,
        });
    }

    let mut eigenfield = HermitianEigenField::zeros(d, grid.clone(), n_theta)?;
    let mut c1 = 0.0f64;
    let mut c2 = 0.0f64;
    let mut h_chi_min = f64::INFINITY;

    // first pass: measure c1, c2 on supp ∇χ and record H_χ
    let mut samples = vec![(0.0f64, 0.0f64, 0.0f64, 0.0f64); n * n_theta];
    for ir in 0..n {
        let r = grid.nodes()[ir];
        let chi = input.chi.closed_form(r);
        let dchi = input.chi.derivative(r);
        let ddchi = input.chi.second_derivative(r);
        for it in 0..n_theta {
            let theta = std::f64::consts::TAU * it as f64 / n_theta as f64;
            let mut phi_val = 0.0;
            let mut base_second = 0.0;
            let mut fiber_trace = 0.0;
            let mut grad_base = Complex64::new(0.0, 0.0);
            let mut grad_fiber_sq = 0.0;
            for m in &modes {
                let phase = Complex64::from_polar(1.0, m.k as f64 * theta);
                let v = (m.values[ir] * phase).re;
                phi_val += v;
                base_second += (m.base_second[ir] * phase).re;
                fiber_trace += -m.mu * v;
                // (∂_r + i∂_θ/r) of the synthesized mode, for the base pairing
                grad_base += (m.radial_deriv[ir]
                    + Complex64::new(0.0, m.k as f64 / r) * m.values[ir])
                    * phase;
                grad_fiber_sq += m.mu * (m.values[ir] * phase).norm_sqr();
            }
            let h_fiber = input.omega_tilde_fiber + chi * fiber_trace / fiber_dirs as f64;
            let h_base = input.omega_tilde_base + chi * base_second;
            h_chi_min = h_chi_min.min(h_fiber.min(h_base));

            // cutoff terms live on the ramp only
            let (p_bb, mixed) = if dchi != 0.0 || ddchi != 0.0 {
                let lap_chi = ddchi + dchi / r;
                let p_bb = phi_val * lap_chi + dchi * grad_base.re;
                let mixed = 0.5 * dchi * grad_fiber_sq.sqrt();
                (p_bb, mixed)
            } else {
                (0.0, 0.0)
            };
            if (dchi != 0.0 || ddchi != 0.0) && h_fiber > 0.0 && h_base > 0.0 {
                c1 = c1.max(2.0 * mixed.abs() / (h_fiber * h_base).sqrt());
                c2 = c2.max((-p_bb / h_base).max(0.0));
            }
            samples[ir * n_theta + it] = (h_fiber, h_base, p_bb, mixed);
        }
    }
    let c3 = 0.5 * c1 * c1;
    let t_min = 1000.0 * (c2 + c3 + 1.0);

    // second pass: assemble eigenvalues of H_χ + cutoff terms + t·b₀
    for ir in 0..n {
        let r = grid.nodes()[ir];
        let varphi = input.varphi.closed_form(r);
        for it in 0..n_theta {
            let (h_fiber, h_base, p_bb, mixed) = samples[ir * n_theta + it];
            let bb = h_base + p_bb + input.t * varphi;
            // arrow matrix: one fiber direction couples to the base
            let half_tr = 0.5 * (h_fiber + bb);
            let disc = (0.25 * (h_fiber - bb) * (h_fiber - bb) + mixed * mixed).sqrt();
            let mut evals = Vec::with_capacity(d);
            evals.push(half_tr - disc);
            for _ in 1..fiber_dirs {
                evals.push(h_fiber);
            }
            evals.push(half_tr + disc);
            eigenfield.set(ir, it, &evals)?;
        }
    }

    Ok(GluedAnsatz {
        eigenfield,
        constants: GluingConstants { c1, c2, c3, t_min },
        h_chi_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz_toolkit::cutoff::CutoffKind;
    use crate::fiber_spectrum::FiberSpectrum;
    use crate::spectral_laplace::RadialGrid;

    fn setup(phi_amplitude: f64) -> (FiberSpectrum, SpectralField, CutoffProfile, CutoffProfile) {
        let spec =
            FiberSpectrum::from_pairs(vec![(0.0, 1), (1.0, 1), (2.5, 1)], 1.0, true).unwrap();
        let grid = RadialGrid::uniform(6.0, 20.0, 512).unwrap();
        let r_glue = 10.0;
        let chi =
            CutoffProfile::ramp_up(CutoffKind::SmoothMollified, r_glue, r_glue + 1.0).unwrap();
        let varphi =
            CutoffProfile::ramp_up(CutoffKind::SmoothMollified, r_glue - 2.0, r_glue - 1.0)
                .unwrap();
        let mut phi = SpectralField::zero(spec.clone(), grid);
        phi.set_mode_fn(spec.mode(1, 1).unwrap(), |r| {
            Complex64::new(phi_amplitude * (-0.2 * r).exp(), 0.0)
        })
        .unwrap();
        phi.set_mode_fn(spec.mode(0, 2).unwrap(), |r| {
            Complex64::new(phi_amplitude * 0.7 / r, 0.0)
        })
        .unwrap();
        (spec, phi, chi, varphi)
    }

    #[test]
    fn zero_potential_positive_for_all_t() {
        let (_, phi0, chi, varphi) = setup(0.0);
        for t in [0.0, 1.0, 100.0] {
            let glued = glue_ansatz(&GluingInput {
                omega_tilde_fiber: 1.0,
                omega_tilde_base: 1.0,
                dimension: 3,
                phi: &phi0,
                chi: &chi,
                varphi: &varphi,
                t,
                n_theta: 16,
            })
            .unwrap();
            let (min, _) = positivity_check(&glued.eigenfield);
            assert!(min >= 1.0 - 1e-12, "t = {t}: min {min}");
        }
    }

    #[test]
    fn threshold_gives_third_of_reference() {
        let (_, phi, chi, varphi) = setup(0.4);
        let probe = glue_ansatz(&GluingInput {
            omega_tilde_fiber: 1.0,
            omega_tilde_base: 1.0,
            dimension: 3,
            phi: &phi,
            chi: &chi,
            varphi: &varphi,
            t: 0.0,
            n_theta: 16,
        })
        .unwrap();
        let t_min = probe.constants.t_min;
        assert!(t_min >= 1000.0);
        let glued = glue_ansatz(&GluingInput {
            omega_tilde_fiber: 1.0,
            omega_tilde_base: 1.0,
            dimension: 3,
            phi: &phi,
            chi: &chi,
            varphi: &varphi,
            t: t_min,
            n_theta: 16,
        })
        .unwrap();
        let (min, _) = positivity_check(&glued.eigenfield);
        assert!(
            min >= glued.h_chi_min / 3.0,
            "min {min} vs H_χ/3 = {}",
            glued.h_chi_min / 3.0
        );
    }

    #[test]
    fn adversarial_phi_fails_at_t_zero() {
        // large potential: the ramp terms overwhelm the base direction
        let (_, phi, chi, varphi) = setup(40.0);
        let glued = glue_ansatz(&GluingInput {
            omega_tilde_fiber: 1.0,
            omega_tilde_base: 1.0,
            dimension: 3,
            phi: &phi,
            chi: &chi,
            varphi: &varphi,
            t: 0.0,
            n_theta: 16,
        });
        // either H_χ itself breaks (hypothesis violated) or the assembled
        // form has a negative witness; the lemma's interesting case is the
        // latter, arranged by keeping χ·i∂∂̄φ mild but ∂χ·∂̄φ large
        match glued {
            Ok(g) => {
                let (min, witness) = positivity_check(&g.eigenfield);
                assert!(
                    min < 0.0,
                    "expected a negative witness, got {min} at {witness:?}"
                );
            }
            Err(e) => panic!("assembly should not error: {e}"),
        }
    }

    #[test]
    fn misordered_supports_rejected() {
        let (_, phi, chi, _) = setup(0.1);
        // varphi plateau starts after χ's ramp: misordered
        let bad_varphi = CutoffProfile::ramp_up(CutoffKind::SmoothMollified, 10.5, 11.5).unwrap();
        let err = glue_ansatz(&GluingInput {
            omega_tilde_fiber: 1.0,
            omega_tilde_base: 1.0,
            dimension: 3,
            phi: &phi,
            chi: &chi,
            varphi: &bad_varphi,
            t: 1.0,
            n_theta: 8,
        })
        .unwrap_err();
        assert!(matches!(err, Error::MisorderedSupports(_)));
    }
}

//! Decay iteration machinery: fiber-average splitting, the volume-form
//! nonlinearity, decay-exponent fits, one doubling step of the bootstrap,
//! and the dyadic energy-decay law.

mod bootstrap;
mod ma;

pub use bootstrap::{
    bootstrap_step, run_bootstrap_chain, synthesize_decaying_field, BootstrapChainRow,
    BootstrapStep,
};
pub use ma::{
    base_part_identity, ma_nonlinearity, q_from_eigenvalues, HermitianEigenField, MaOutput,
};

use serde::Serialize;

use crate::spectral_laplace::SpectralField;
use crate::{Error, Result};

/// Splits a field into its fiber-constant part (the μ = 0 sector, a pullback
/// from the base) and the zero-fiber-mean remainder. Exact partition, no
/// arithmetic.
pub fn fiber_average_split(field: &SpectralField) -> (SpectralField, SpectralField) {
    let mut avg = SpectralField::zero(field.spectrum.clone(), field.grid.clone());
    let mut zero_mean = SpectralField::zero(field.spectrum.clone(), field.grid.clone());
    for (mode, values) in field.modes() {
        let target = if mode.mu_ordinal == 0 {
            &mut avg
        } else {
            &mut zero_mean
        };
        target
            .set_mode(mode, values.to_vec())
            .expect("mode valid in the source field");
    }
    (avg, zero_mean)
}

/// Least-squares fit of `log(sup-norm)` against `log r` over annuli.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    pub sup_norms: Vec<f64>,
    /// Fitted decay exponent β̂ (positive for decaying data).
    pub exponent: f64,
    pub r_squared: f64,
    /// (min, max) of the log-residuals around the fit line.
    pub residual_band: (f64, f64),
}

/// Fits the decay exponent from per-annulus sup-norms.
///
/// Requires at least 5 annuli spanning one decade in `r`; rejects
/// nonpositive norms (a zero sup-norm has no log).
pub fn fit_decay_exponent(samples: &[(f64, f64)]) -> Result<DecayReport> {
    if samples.len() < 5 {
        return Err(Error::DecayFit(format!(
            "need at least 5 annuli, got {}",
            samples.len()
        )));
    }
    let r_lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let r_hi = samples.iter().map(|s| s.0).fold(0.0f64, f64::max);
    if r_hi / r_lo < 10.0 {
        return Err(Error::DecayFit(format!(
            "annuli span only a factor {:.3}, need a decade",
            r_hi / r_lo
        )));
    }
    if samples.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(Error::DecayFit("nonpositive sup-norm".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let mut band = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in xs.iter().zip(&ys) {
        let resid = y - (intercept + slope * x);
        ss_res += resid * resid;
        ss_tot += (y - my) * (y - my);
        band.0 = band.0.min(resid);
        band.1 = band.1.max(resid);
    }
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(DecayReport {
        radii: samples.iter().map(|s| s.0).collect(),
        sup_norms: samples.iter().map(|s| s.1).collect(),
        exponent: -slope,
        r_squared,
        residual_band: band,
    })
}

/// Dirichlet-energy samples at dyadic radii with contraction factor `mu_c`.
#[derive(Debug, Clone, Serialize)]
pub struct EnergySequence {
    pub r0: f64,
    pub values: Vec<f64>,
    pub mu_c: f64,
}

impl EnergySequence {
    /// Exact geometric sequence `E(2ⁿ r₀) = μⁿ E(r₀)`.
    pub fn geometric(r0: f64, e0: f64, mu_c: f64, len: usize) -> Result<Self> {
        check_contraction(mu_c)?;
        let values = (0..len).map(|n| e0 * mu_c.powi(n as i32)).collect();
        Ok(Self { r0, values, mu_c })
    }

    /// Sub-geometric sequence: each step contracts by at least `mu_c`.
    pub fn sub_geometric(
        r0: f64,
        e0: f64,
        mu_c: f64,
        len: usize,
        rng: &mut impl rand::Rng,
    ) -> Result<Self> {
        check_contraction(mu_c)?;
        let mut values = Vec::with_capacity(len);
        let mut e = e0;
        for _ in 0..len {
            values.push(e);
            let ratio: f64 = mu_c * rng.random_range(0.2..=1.0);
            e *= ratio;
        }
        Ok(Self { r0, values, mu_c })
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.values.len())
            .map(|n| self.r0 * 2f64.powi(n as i32))
            .collect()
    }

    /// Largest value of `E(2ⁿr₀)·2^{nβ₀}/E(r₀)`; the decay law demands ≤ 1.
    pub fn power_law_excess(&self) -> f64 {
        let beta0 = energy_decay_exponent(self.mu_c).expect("validated on construction");
        let e0 = self.values[0];
        self.values
            .iter()
            .enumerate()
            .map(|(n, &e)| e * 2f64.powf(n as f64 * beta0) / e0)
            .fold(0.0, f64::max)
    }

    /// The constant `C` in `E(r) ≤ C·r^{-β₀}` pinned at `r₀`.
    pub fn power_law_constant(&self) -> f64 {
        let beta0 = energy_decay_exponent(self.mu_c).expect("validated on construction");
        self.values[0] * self.r0.powf(beta0)
    }

    /// Invariants: values nonincreasing and consecutive ratios ≤ mu_c,
    /// up to `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for w in self.values.windows(2) {
            if w[1] > w[0] {
                return Err(Error::Invalid(format!(
                    "energy sequence increases: {} then {}",
                    w[0], w[1]
                )));
            }
            if w[0] > 0.0 && w[1] / w[0] > self.mu_c + tol {
                return Err(Error::Invalid(format!(
                    "contraction ratio {} exceeds μ = {}",
                    w[1] / w[0],
                    self.mu_c
                )));
            }
        }
        Ok(())
    }
}

fn check_contraction(mu_c: f64) -> Result<()> {
    if !(mu_c > 0.0 && mu_c < 1.0) {
        return Err(Error::ContractionOutOfRange(mu_c));
    }
    Ok(())
}

/// `β₀ = −log μ / log 2`: the polynomial rate implied by dyadic contraction.
pub fn energy_decay_exponent(mu_c: f64) -> Result<f64> {
    check_contraction(mu_c)?;
    Ok(-mu_c.ln() / 2f64.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber_spectrum::FiberSpectrum;
    use crate::spectral_laplace::RadialGrid;
    use num_complex::Complex64;
    use rand::SeedableRng;

    #[test]
    fn split_is_an_exact_partition() {
        let spec = FiberSpectrum::flat_torus(&[1.0, 1.0], 200.0).unwrap();
        let grid = RadialGrid::log(1.0, 100.0, 64).unwrap();
        let mut field = SpectralField::zero(spec.clone(), grid);
        field
            .set_mode_fn(spec.mode(1, 0).unwrap(), |r| Complex64::new(1.0 / r, 0.3))
            .unwrap();
        field
            .set_mode_fn(spec.mode(0, 1).unwrap(), |r| {
                Complex64::new(r.powi(-2), 0.0)
            })
            .unwrap();
        field
            .set_mode_fn(spec.mode(-2, 2).unwrap(), |r| Complex64::new(0.0, 1.0 / r))
            .unwrap();
        let (avg, zero_mean) = fiber_average_split(&field);
        assert_eq!(avg.num_modes(), 1);
        assert_eq!(zero_mean.num_modes(), 2);
        let recomposed = avg
            .linear_combination(
                Complex64::new(1.0, 0.0),
                &zero_mean,
                Complex64::new(1.0, 0.0),
            )
            .unwrap();
        for (mode, values) in field.modes() {
            let got = recomposed.mode_values(&mode).unwrap();
            for (a, b) in values.iter().zip(got) {
                assert_eq!(a, b); // exact, 0 ulp
            }
        }
    }

    #[test]
    fn split_pure_cases() {
        let spec = FiberSpectrum::flat_torus(&[1.0, 1.0], 200.0).unwrap();
        let grid = RadialGrid::log(1.0, 100.0, 64).unwrap();
        let mut constant = SpectralField::zero(spec.clone(), grid.clone());
        constant
            .set_mode_fn(spec.mode(3, 0).unwrap(), |r| Complex64::new(1.0 / r, 0.0))
            .unwrap();
        let (avg, rest) = fiber_average_split(&constant);
        assert_eq!(avg.num_modes(), 1);
        assert_eq!(rest.num_modes(), 0);

        let mut pure = SpectralField::zero(spec.clone(), grid);
        pure.set_mode_fn(spec.mode(0, 2).unwrap(), |r| Complex64::new(1.0 / r, 0.0))
            .unwrap();
        let (avg, rest) = fiber_average_split(&pure);
        assert_eq!(avg.num_modes(), 0);
        assert_eq!(rest.num_modes(), 1);
    }

    #[test]
    fn exact_power_law_fit() {
        let samples: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let r = 5.0 * 1.5f64.powi(i);
                (r, 2.3 * r.powf(-1.5))
            })
            .collect();
        let report = fit_decay_exponent(&samples).unwrap();
        assert!((report.exponent - 1.5).abs() < 1e-6);
        assert!(report.r_squared >= 1.0 - 1e-9);
    }

    #[test]
    fn oscillating_power_law_fit_stays_near_slope() {
        let samples: Vec<(f64, f64)> = (0..24)
            .map(|i| {
                let r = 3.0 * 1.4f64.powi(i);
                (r, r.powf(-2.0) * (1.0 + 0.1 * (r.ln()).sin()))
            })
            .collect();
        let report = fit_decay_exponent(&samples).unwrap();
        assert!(
            report.exponent > 1.8 && report.exponent < 2.2,
            "{}",
            report.exponent
        );
    }

    #[test]
    fn constant_data_fits_zero_exponent() {
        let samples: Vec<(f64, f64)> = (0..8).map(|i| (2.0 * 2f64.powi(i), 7.0)).collect();
        let report = fit_decay_exponent(&samples).unwrap();
        assert!(report.exponent.abs() < 1e-9);
    }

    #[test]
    fn fit_preconditions() {
        let too_few = vec![(1.0, 1.0), (2.0, 0.5), (4.0, 0.25), (8.0, 0.125)];
        assert!(fit_decay_exponent(&too_few).is_err());
        let narrow: Vec<(f64, f64)> = (0..8).map(|i| (10.0 + i as f64, 1.0)).collect();
        assert!(fit_decay_exponent(&narrow).is_err());
        let negative: Vec<(f64, f64)> = (0..8)
            .map(|i| (2f64.powi(i), if i == 3 { -1.0 } else { 1.0 }))
            .collect();
        assert!(fit_decay_exponent(&negative).is_err());
    }

    #[test]
    fn energy_exponent_closed_forms() {
        assert_eq!(energy_decay_exponent(0.5).unwrap(), 1.0);
        assert_eq!(energy_decay_exponent(0.25).unwrap(), 2.0);
        assert!(energy_decay_exponent(0.0).is_err());
        assert!(energy_decay_exponent(1.0).is_err());
        assert!(energy_decay_exponent(-0.2).is_err());
    }

    #[test]
    fn geometric_sequence_fits_its_exponent() {
        let seq = EnergySequence::geometric(4.0, 3.0, 0.3, 12).unwrap();
        let samples: Vec<(f64, f64)> = seq.radii().into_iter().zip(seq.values.clone()).collect();
        let report = fit_decay_exponent(&samples).unwrap();
        let expect = -0.3f64.ln() / 2f64.ln();
        assert!(
            (report.exponent - expect).abs() < 1e-10,
            "{}",
            report.exponent
        );
        assert!((expect - 1.736_965_594_166_206).abs() < 1e-12);
        assert!(seq.power_law_excess() <= 1.0 + 1e-12);
    }

    #[test]
    fn sub_geometric_sequences_obey_the_law() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for mu_c in [0.5, 0.25, 0.3, 0.77] {
            let seq = EnergySequence::sub_geometric(2.0, 1.0, mu_c, 20, &mut rng).unwrap();
            assert!(seq.power_law_excess() <= 1.0 + 1e-12);
            seq.validate(1e-12).unwrap();
        }
    }
}

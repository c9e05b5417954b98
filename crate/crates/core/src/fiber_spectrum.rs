//! The compact fiber, represented purely through its Laplace spectrum.
//!
//! All end-analysis factors through eigenmodes of `−Δ_Y`, so the fiber is
//! carried as a sorted list of (eigenvalue, multiplicity) pairs plus its
//! volume and Neumann Poincaré constant. A flat torus constructor provides
//! the concrete desk-scale fiber; any spectrum exercises the same code paths.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance for grouping equal eigenvalues.
pub const EIGENVALUE_GROUP_TOL: f64 = 1e-12;

/// Discrete spectrum of `−Δ_Y` on the compact fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSpectrum {
    /// Sorted `(μ, multiplicity)` pairs, strictly increasing in μ, starting at μ = 0.
    pub eigenvalues: Vec<(f64, u32)>,
    /// Vol(Y).
    pub volume: f64,
    /// Neumann Poincaré constant P_Y = 1/μ₁.
    pub poincare_constant: f64,
    /// Records the b¹(Y) = 0 hypothesis; metadata only, gates no numerics here.
    pub b1_zero: bool,
}

/// Index of one separated mode: circle frequency, fiber eigenvalue, and the
/// ordinal of that eigenvalue in the owning spectrum (resolving multiplicity
/// is the caller's business; profiles of equal μ are distinguished by ordinal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeIndex {
    pub k: i32,
    pub mu: f64,
    pub mu_ordinal: usize,
}

impl ModeIndex {
    pub fn new(k: i32, mu: f64, mu_ordinal: usize) -> Self {
        Self { k, mu, mu_ordinal }
    }

    /// Deterministic total order: by ordinal, then k. Used for every
    /// mode-summed reduction so output is schedule-independent.
    pub fn sort_key(&self) -> (usize, i32) {
        (self.mu_ordinal, self.k)
    }
}

/// One invariant violation found by [`FiberSpectrum::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpectrumViolation {
    NotSorted { index: usize },
    NegativeEigenvalue { index: usize, mu: f64 },
    FirstNotZero { mu0: f64 },
    ZeroMultiplicity { index: usize },
    NoPositiveEigenvalue,
    NonPositiveVolume { volume: f64 },
    PoincareMismatch { stored: f64, recomputed: f64 },
}

impl std::fmt::Display for SpectrumViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NotSorted { index } => {
                write!(f, "eigenvalues not strictly increasing at index {index}")
            }
            Self::NegativeEigenvalue { index, mu } => {
                write!(f, "negative eigenvalue {mu} at index {index}")
            }
            Self::FirstNotZero { mu0 } => write!(f, "first eigenvalue is {mu0}, expected 0"),
            Self::ZeroMultiplicity { index } => write!(f, "zero multiplicity at index {index}"),
            Self::NoPositiveEigenvalue => write!(f, "no positive eigenvalue"),
            Self::NonPositiveVolume { volume } => write!(f, "volume {volume} not positive"),
            Self::PoincareMismatch { stored, recomputed } => {
                write!(f, "poincare_constant {stored} != 1/μ₁ = {recomputed}")
            }
        }
    }
}

impl FiberSpectrum {
    /// Assembles a spectrum from raw pairs, deriving P_Y = 1/μ₁.
    pub fn from_pairs(eigenvalues: Vec<(f64, u32)>, volume: f64, b1_zero: bool) -> Result<Self> {
        let gap = eigenvalues
            .iter()
            .find(|(mu, _)| *mu > 0.0)
            .map(|(mu, _)| *mu)
            .ok_or(Error::MissingSpectralGap)?;
        let spec = Self {
            eigenvalues,
            volume,
            poincare_constant: 1.0 / gap,
            b1_zero,
        };
        let violations = spec.validate();
        if violations.is_empty() {
            Ok(spec)
        } else {
            Err(Error::InvalidSpectrum(
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    /// All flat-torus eigenvalues `4π²·Σ(mᵢ/Lᵢ)²` up to `cutoff`, with
    /// multiplicities from lattice-point counting; volume is `Π Lᵢ`.
    pub fn flat_torus(side_lengths: &[f64], cutoff: f64) -> Result<Self> {
        if side_lengths.is_empty() {
            return Err(Error::EmptySideLengths);
        }
        if side_lengths.iter().any(|&l| l <= 0.0) || !cutoff.is_finite() || cutoff <= 0.0 {
            return Err(Error::InvalidSpectrum(
                "side lengths and cutoff must be positive".into(),
            ));
        }
        let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        let mut raw = Vec::new();
        // m_i ranges over |m_i| <= L_i * sqrt(cutoff) / (2π)
        let bounds: Vec<i64> = side_lengths
            .iter()
            .map(|&l| (l * (cutoff / four_pi2).sqrt()).floor() as i64)
            .collect();
        let mut m: Vec<i64> = bounds.iter().map(|&b| -b).collect();
        // odometer over the integer box
        'outer: loop {
            let mu = four_pi2
                * m.iter()
                    .zip(side_lengths)
                    .map(|(&mi, &li)| (mi as f64 / li).powi(2))
                    .sum::<f64>();
            if mu <= cutoff {
                raw.push(mu);
            }
            for d in 0..m.len() {
                if m[d] < bounds[d] {
                    m[d] += 1;
                    continue 'outer;
                }
                m[d] = -bounds[d];
            }
            break;
        }
        raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut grouped: Vec<(f64, u32)> = Vec::new();
        for mu in raw {
            match grouped.last_mut() {
                Some((last, mult)) if mu - *last <= EIGENVALUE_GROUP_TOL * mu.max(1.0) => {
                    *mult += 1
                }
                _ => grouped.push((mu, 1)),
            }
        }
        let smallest_positive = grouped.iter().find(|(mu, _)| *mu > 0.0).map(|(mu, _)| *mu);
        match smallest_positive {
            None => {
                // cutoff below the smallest positive eigenvalue: the gap is empty
                let gap = four_pi2
                    * side_lengths
                        .iter()
                        .map(|&l| 1.0 / (l * l))
                        .fold(f64::INFINITY, f64::min);
                Err(Error::NoGapBelowCutoff {
                    cutoff,
                    smallest: gap,
                })
            }
            Some(_) => Self::from_pairs(grouped, side_lengths.iter().product(), true),
        }
    }

    /// `k₀ = sqrt(min{μ : μ > 0})`, the spectral-gap rate.
    pub fn smallest_positive_sqrt(&self) -> Result<f64> {
        self.eigenvalues
            .iter()
            .find(|(mu, _)| *mu > 0.0)
            .map(|(mu, _)| mu.sqrt())
            .ok_or(Error::MissingSpectralGap)
    }

    /// Smallest positive eigenvalue μ₁.
    pub fn spectral_gap(&self) -> Result<f64> {
        self.smallest_positive_sqrt().map(|k0| k0 * k0)
    }

    /// Reports every violated invariant; empty iff valid. Never errors.
    pub fn validate(&self) -> Vec<SpectrumViolation> {
        let mut out = Vec::new();
        if let Some(&(mu0, _)) = self.eigenvalues.first() {
            if mu0 != 0.0 {
                out.push(SpectrumViolation::FirstNotZero { mu0 });
            }
        }
        for (i, w) in self.eigenvalues.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                out.push(SpectrumViolation::NotSorted { index: i + 1 });
            }
        }
        for (i, &(mu, mult)) in self.eigenvalues.iter().enumerate() {
            if mu < 0.0 {
                out.push(SpectrumViolation::NegativeEigenvalue { index: i, mu });
            }
            if mult == 0 {
                out.push(SpectrumViolation::ZeroMultiplicity { index: i });
            }
        }
        let gap = self.eigenvalues.iter().find(|(mu, _)| *mu > 0.0);
        match gap {
            None => out.push(SpectrumViolation::NoPositiveEigenvalue),
            Some(&(mu1, _)) => {
                let recomputed = 1.0 / mu1;
                if (self.poincare_constant - recomputed).abs()
                    > EIGENVALUE_GROUP_TOL * recomputed.abs().max(1.0)
                {
                    out.push(SpectrumViolation::PoincareMismatch {
                        stored: self.poincare_constant,
                        recomputed,
                    });
                }
            }
        }
        if self.volume <= 0.0 {
            out.push(SpectrumViolation::NonPositiveVolume {
                volume: self.volume,
            });
        }
        out
    }

    /// Distinct eigenvalue at `ordinal`, if present.
    pub fn eigenvalue(&self, ordinal: usize) -> Option<f64> {
        self.eigenvalues.get(ordinal).map(|(mu, _)| *mu)
    }

    /// Mode index for `(k, ordinal)`, checking the ordinal exists.
    pub fn mode(&self, k: i32, mu_ordinal: usize) -> Result<ModeIndex> {
        self.eigenvalue(mu_ordinal)
            .map(|mu| ModeIndex::new(k, mu, mu_ordinal))
            .ok_or(Error::UnknownMode { k, mu_ordinal })
    }

    /// Lossless JSON serialization (serde_json round-trips f64 exactly).
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

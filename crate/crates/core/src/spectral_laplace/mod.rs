//! Mode-decomposed Laplace machinery on the end `[R, ∞) × S¹ × Y`.
//!
//! A function on the end is stored as radial profiles per separated mode
//! `(k, μ)`: circle frequency `k` and fiber eigenvalue `μ`. The separated
//! operator for the flat model metric is
//!
//! ```text
//! L_{k,μ} u = u″ + u′/r − (k²/r² + μ) u
//! ```
//!
//! Fiber eigenfunctions are taken L²-orthonormal, so every Parseval factor
//! per mode is 1; the μ = 0 eigenfunction is the constant `1/√Vol(Y)`.

mod greens;
mod norms;
mod operator;
mod poincare;

pub use greens::{harmonic_mode, mode_greens_solve, solve_full, BoundarySlice, GreensSolution};
pub(crate) use norms::radial_derivative as norms_radial_derivative;
pub use norms::{annulus_norm, sector_norm, weighted_holder_seminorm};
pub use operator::{mode_operator_apply, OperatorImage};
pub use poincare::{
    brute_force_neumann_poincare, neumann_poincare_annulus, poincare_product_check, PoincareCase,
    PoincareReport,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

use crate::fiber_spectrum::{FiberSpectrum, ModeIndex};
use crate::{Error, Result};

/// Node placement rule for [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpacingPolicy {
    Log,
    Uniform,
}

/// Radii of the end, `r_min ≥ 1`, at least 16 strictly increasing nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    policy: SpacingPolicy,
}

impl RadialGrid {
    /// Log-spaced grid (the default for end analysis).
    pub fn log(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        Self::check_bounds(r_min, r_max, n)?;
        let s0 = r_min.ln();
        let s1 = r_max.ln();
        let mut nodes: Vec<f64> = (0..n)
            .map(|i| (s0 + (s1 - s0) * i as f64 / (n - 1) as f64).exp())
            .collect();
        // pin the ends exactly
        nodes[0] = r_min;
        nodes[n - 1] = r_max;
        Ok(Self {
            nodes,
            policy: SpacingPolicy::Log,
        })
    }

    pub fn uniform(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        Self::check_bounds(r_min, r_max, n)?;
        let mut nodes: Vec<f64> = (0..n)
            .map(|i| r_min + (r_max - r_min) * i as f64 / (n - 1) as f64)
            .collect();
        nodes[0] = r_min;
        nodes[n - 1] = r_max;
        Ok(Self {
            nodes,
            policy: SpacingPolicy::Uniform,
        })
    }

    fn check_bounds(r_min: f64, r_max: f64, n: usize) -> Result<()> {
        if !(r_min >= 1.0) {
            return Err(Error::InvalidGrid(format!("r_min = {r_min} must be ≥ 1")));
        }
        if !(r_max > r_min) {
            return Err(Error::InvalidGrid(format!(
                "r_max = {r_max} must exceed r_min = {r_min}"
            )));
        }
        if n < 16 {
            return Err(Error::GridTooCoarse { need: 16, got: n });
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn policy(&self) -> SpacingPolicy {
        self.policy
    }

    /// Uniform step in `s = log r`, when the policy is log.
    pub fn log_step(&self) -> Option<f64> {
        match self.policy {
            SpacingPolicy::Log => {
                Some((self.r_max().ln() - self.r_min().ln()) / (self.len() - 1) as f64)
            }
            SpacingPolicy::Uniform => None,
        }
    }

    /// `∫ f(r) r dr` over the whole grid by trapezoid (in log coordinates on
    /// log grids, where smooth power-law integrands become exponentials).
    pub fn integrate_r_dr(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        let n = self.len();
        let mut sum = 0.0;
        for i in 0..n - 1 {
            let (r0, r1) = (self.nodes[i], self.nodes[i + 1]);
            let (f0, f1) = (f(i, r0), f(i + 1, r1));
            match self.policy {
                // ∫ f r dr = ∫ f e^{2s} ds, trapezoid in s
                SpacingPolicy::Log => {
                    let ds = (r1 / r0).ln();
                    sum += 0.5 * (f0 * r0 * r0 + f1 * r1 * r1) * ds;
                }
                SpacingPolicy::Uniform => sum += 0.5 * (f0 * r0 + f1 * r1) * (r1 - r0),
            }
        }
        sum
    }
}

/// One mode's complex radial samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub mode: ModeIndex,
    pub grid: RadialGrid,
    pub values: Vec<Complex64>,
}

impl RadialProfile {
    pub fn new(mode: ModeIndex, grid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldMismatch(format!(
                "profile has {} values on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::FieldMismatch("non-finite profile value".into()));
        }
        Ok(Self { mode, grid, values })
    }

    pub fn zero(mode: ModeIndex, grid: RadialGrid) -> Self {
        let n = grid.len();
        Self {
            mode,
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Samples from a real-valued radial function.
    pub fn from_fn(mode: ModeIndex, grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid
            .nodes()
            .iter()
            .map(|&r| Complex64::new(f(r), 0.0))
            .collect();
        Self { mode, grid, values }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// A function on the end: one radial profile per mode, all on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub spectrum: FiberSpectrum,
    pub grid: RadialGrid,
    profiles: BTreeMap<(usize, i32), Vec<Complex64>>,
}

impl SpectralField {
    pub fn zero(spectrum: FiberSpectrum, grid: RadialGrid) -> Self {
        Self {
            spectrum,
            grid,
            profiles: BTreeMap::new(),
        }
    }

    /// Inserts (or replaces) a mode's samples.
    pub fn set_mode(&mut self, mode: ModeIndex, values: Vec<Complex64>) -> Result<()> {
        let mu = self
            .spectrum
            .eigenvalue(mode.mu_ordinal)
            .ok_or(Error::UnknownMode {
                k: mode.k,
                mu_ordinal: mode.mu_ordinal,
            })?;
        if (mu - mode.mu).abs() > 1e-12 * mu.max(1.0) {
            return Err(Error::FieldMismatch(format!(
                "mode μ = {} disagrees with spectrum ordinal {} (μ = {mu})",
                mode.mu, mode.mu_ordinal
            )));
        }
        if values.len() != self.grid.len() {
            return Err(Error::FieldMismatch(format!(
                "mode values length {} vs grid {}",
                values.len(),
                self.grid.len()
            )));
        }
        self.profiles.insert((mode.mu_ordinal, mode.k), values);
        Ok(())
    }

    pub fn set_mode_fn(&mut self, mode: ModeIndex, f: impl Fn(f64) -> Complex64) -> Result<()> {
        let values = self.grid.nodes().iter().map(|&r| f(r)).collect();
        self.set_mode(mode, values)
    }

    /// Modes in deterministic sorted order (fiber ordinal, then k).
    pub fn modes(&self) -> impl Iterator<Item = (ModeIndex, &[Complex64])> {
        self.profiles.iter().map(|(&(ord, k), v)| {
            let mu = self.spectrum.eigenvalue(ord).expect("validated on insert");
            (ModeIndex::new(k, mu, ord), v.as_slice())
        })
    }

    pub fn mode_values(&self, mode: &ModeIndex) -> Option<&[Complex64]> {
        self.profiles
            .get(&(mode.mu_ordinal, mode.k))
            .map(|v| v.as_slice())
    }

    pub fn num_modes(&self) -> usize {
        self.profiles.len()
    }

    pub fn profile(&self, mode: &ModeIndex) -> Option<RadialProfile> {
        self.mode_values(mode).map(|v| RadialProfile {
            mode: *mode,
            grid: self.grid.clone(),
            values: v.to_vec(),
        })
    }

    /// Conjugate symmetry `v_{-k,μ} = conj(v_{k,μ})`, the reality condition.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        self.profiles
            .iter()
            .all(|(&(ord, k), v)| match self.profiles.get(&(ord, -k)) {
                None => false,
                Some(w) => v
                    .iter()
                    .zip(w)
                    .all(|(a, b)| (a - b.conj()).norm() <= tol * (a.norm() + b.norm()).max(1.0)),
            })
    }

    /// Pointwise linear combination `a·self + b·other` (same grid/spectrum).
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.grid != other.grid || self.spectrum != other.spectrum {
            return Err(Error::FieldMismatch(
                "linear combination requires a shared grid and spectrum".into(),
            ));
        }
        let mut out = Self::zero(self.spectrum.clone(), self.grid.clone());
        let keys: std::collections::BTreeSet<_> = self
            .profiles
            .keys()
            .chain(other.profiles.keys())
            .copied()
            .collect();
        let n = self.grid.len();
        for key in keys {
            let zero = vec![Complex64::new(0.0, 0.0); n];
            let x = self.profiles.get(&key).unwrap_or(&zero);
            let y = other.profiles.get(&key).unwrap_or(&zero);
            let vals: Vec<Complex64> = x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
            out.profiles.insert(key, vals);
        }
        Ok(out)
    }

    /// Synthesized value at `(r_index, θ)` times the fiber eigenfunction slot:
    /// `Σ_modes v_{k,μ}(r) e^{ikθ}` restricted to one fiber ordinal.
    pub fn synthesize_at(&self, mu_ordinal: usize, r_index: usize, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(ord, k), v) in &self.profiles {
            if ord == mu_ordinal {
                let phase = Complex64::from_polar(1.0, k as f64 * theta);
                acc += v[r_index] * phase;
            }
        }
        acc
    }

    /// Fiber ordinals that actually carry modes, sorted.
    pub fn active_ordinals(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.profiles.keys().map(|&(ord, _)| ord).collect();
        v.dedup();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Canonical JSON with a content hash of the owning spectrum.
    pub fn to_json(&self) -> Result<String> {
        let spectrum_json = serde_json::to_string(&self.spectrum)?;
        let hash = hex_digest(spectrum_json.as_bytes());
        let doc = SerializedField {
            grid: self.grid.clone(),
            spectrum: self.spectrum.clone(),
            spectrum_hash: hash,
            modes: self
                .modes()
                .map(|(m, v)| SerializedMode {
                    k: m.k,
                    mu: m.mu,
                    mu_ordinal: m.mu_ordinal,
                    values: v.iter().map(|c| [c.re, c.im]).collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: SerializedField = serde_json::from_str(s)?;
        let spectrum_json = serde_json::to_string(&doc.spectrum)?;
        if hex_digest(spectrum_json.as_bytes()) != doc.spectrum_hash {
            return Err(Error::Serde("spectrum hash mismatch".into()));
        }
        let mut field = Self::zero(doc.spectrum, doc.grid);
        for m in doc.modes {
            field.set_mode(
                ModeIndex::new(m.k, m.mu, m.mu_ordinal),
                m.values
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect(),
            )?;
        }
        Ok(field)
    }
}

#[derive(Serialize, Deserialize)]
struct SerializedField {
    grid: RadialGrid,
    spectrum: FiberSpectrum,
    spectrum_hash: String,
    modes: Vec<SerializedMode>,
}

#[derive(Serialize, Deserialize)]
struct SerializedMode {
    k: i32,
    mu: f64,
    mu_ordinal: usize,
    values: Vec<[f64; 2]>,
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants_enforced() {
        assert!(RadialGrid::log(0.5, 10.0, 32).is_err());
        assert!(RadialGrid::log(1.0, 1.0, 32).is_err());
        assert!(matches!(
            RadialGrid::log(1.0, 10.0, 8),
            Err(Error::GridTooCoarse { .. })
        ));
        let g = RadialGrid::log(1.0, 1000.0, 512).unwrap();
        assert_eq!(g.len(), 512);
        assert_eq!(g.r_min(), 1.0);
        assert_eq!(g.r_max(), 1000.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn field_round_trip() {
        let spec = FiberSpectrum::flat_torus(&[1.0, 1.0], 100.0).unwrap();
        let grid = RadialGrid::log(1.0, 100.0, 64).unwrap();
        let mut field = SpectralField::zero(spec.clone(), grid);
        let mode = spec.mode(2, 1).unwrap();
        field
            .set_mode_fn(mode, |r| Complex64::new(r.powi(-2), 0.1 / r))
            .unwrap();
        let json = field.to_json().unwrap();
        let back = SpectralField::from_json(&json).unwrap();
        assert_eq!(field, back);
    }

    #[test]
    fn set_mode_rejects_bad_ordinal() {
        let spec = FiberSpectrum::flat_torus(&[1.0, 1.0], 100.0).unwrap();
        let grid = RadialGrid::log(1.0, 100.0, 64).unwrap();
        let mut field = SpectralField::zero(spec, grid);
        let bogus = ModeIndex::new(0, 123.0, 99);
        assert!(field.set_mode(bogus, vec![]).is_err());
    }

    #[test]
    fn conjugate_symmetry_detected() {
        let spec = FiberSpectrum::flat_torus(&[1.0, 1.0], 100.0).unwrap();
        let grid = RadialGrid::log(1.0, 100.0, 64).unwrap();
        let mut field = SpectralField::zero(spec.clone(), grid);
        let plus = spec.mode(1, 0).unwrap();
        let minus = spec.mode(-1, 0).unwrap();
        field
            .set_mode_fn(plus, |r| Complex64::new(1.0 / r, 0.5 / r))
            .unwrap();
        field
            .set_mode_fn(minus, |r| Complex64::new(1.0 / r, -0.5 / r))
            .unwrap();
        assert!(field.is_conjugate_symmetric(1e-14));
    }
}

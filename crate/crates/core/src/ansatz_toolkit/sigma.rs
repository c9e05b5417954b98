//! Averaging over the cyclic action: rotation by a primitive n-th root on
//! the base paired with a per-mode unit phase on the fiber.
//!
//! The average is computed orbit by orbit with a canonical traversal
//! (starting at each orbit's minimal θ-index), so applying it twice
//! reproduces the output exactly when the fiber phases multiply exactly
//! (trivial phases and the fourth-root subgroup {±1, ±i} are exact in
//! floating point; general roots of unity cost an ulp).

use num_complex::Complex64;

use super::iddbar::{DiskGrid, Grid2};
use crate::{Error, Result};

/// Samples on the punctured disk × fiber-mode slots, with the σ-phase each
/// slot transforms by.
#[derive(Debug, Clone)]
pub struct EquivariantSamples {
    pub grid: DiskGrid,
    /// Unit phase per fiber slot: `(σ*φ)_j = phase_j · φ_j∘σ`.
    pub fiber_phases: Vec<Complex64>,
    pub data: Vec<Grid2>,
}

impl EquivariantSamples {
    pub fn new(grid: DiskGrid, fiber_phases: Vec<Complex64>, data: Vec<Grid2>) -> Result<Self> {
        if fiber_phases.len() != data.len() {
            return Err(Error::FieldMismatch(
                "one fiber phase per data slot required".into(),
            ));
        }
        Ok(Self {
            grid,
            fiber_phases,
            data,
        })
    }

    /// Applies the action once: θ-shift by `2π/order` with the slot phase.
    pub fn apply_action(&self, order: usize) -> Result<Self> {
        let shift = self.shift(order)?;
        let n_theta = self.grid.n_theta;
        let mut out = self.clone();
        for (slot, g) in self.data.iter().enumerate() {
            let phase = self.fiber_phases[slot];
            for ir in 0..g.n_rho {
                for it in 0..n_theta {
                    out.data[slot].set(ir, it, phase * g.at(ir, (it + shift) % n_theta));
                }
            }
        }
        Ok(out)
    }

    fn shift(&self, order: usize) -> Result<usize> {
        if order < 2 {
            return Err(Error::Invalid("action order must be ≥ 2".into()));
        }
        if self.grid.n_theta % order != 0 {
            return Err(Error::GridNotRotationClosed {
                n_theta: self.grid.n_theta,
                order,
            });
        }
        Ok(self.grid.n_theta / order)
    }
}

/// `(1/n)·Σ_m (σ^m)*φ`, orbit by orbit in canonical order.
pub fn sigma_average(samples: &EquivariantSamples, order: usize) -> Result<EquivariantSamples> {
    let shift = samples.shift(order)?;
    let n_theta = samples.grid.n_theta;
    let mut out = samples.clone();
    for (slot, g) in samples.data.iter().enumerate() {
        let phase = samples.fiber_phases[slot];
        // phase powers from one table, used identically everywhere
        let mut pows = Vec::with_capacity(order);
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..order {
            pows.push(p);
            p *= phase;
        }
        let mut terms = vec![Complex64::new(0.0, 0.0); order];
        for ir in 0..g.n_rho {
            for orbit_start in 0..shift {
                // canonical traversal from the minimal θ-index of the orbit
                for (m, term) in terms.iter_mut().enumerate() {
                    *term = pows[m] * g.at(ir, (orbit_start + m * shift) % n_theta);
                }
                // an already-invariant orbit averages to itself exactly
                let acc = if terms.iter().all(|t| *t == terms[0]) {
                    terms[0]
                } else {
                    terms.iter().sum::<Complex64>() / order as f64
                };
                // write each orbit element so that applying σ* returns the
                // previous element exactly: value_m = conj-power · A
                for m in 0..order {
                    let it = (orbit_start + m * shift) % n_theta;
                    out.data[slot].set(ir, it, pows[m].conj() * acc);
                }
            }
        }
    }
    Ok(out)
}

//! Cutoff profiles: trapezoid (exact integrals, quadrature fixtures) and
//! smooth mollified (honest derivative bounds wherever `∇χ` enters).
//!
//! A profile rises from 0 to 1 on `[b0, b1]`, holds the plateau on
//! `[b1, b2]`, and falls back to 0 on `[b2, b3]`. Ramp-up profiles set
//! `b2 = b3 = ∞`.

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutoffKind {
    Trapezoid,
    SmoothMollified,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutoffProfile {
    pub kind: CutoffKind,
    /// `[support_lo, plateau_lo, plateau_hi, support_hi]`; the last two may
    /// be infinite for a pure ramp-up.
    pub breakpoints: [f64; 4],
    /// Samples on a fine uniform grid over the finite part of the support.
    pub samples: Vec<f64>,
    pub sample_step: f64,
}

impl CutoffProfile {
    /// The standard bump: support `[1, 4]`, plateau `[2, 3]`.
    pub fn standard(kind: CutoffKind) -> Self {
        Self::new(kind, [1.0, 2.0, 3.0, 4.0]).expect("standard breakpoints are valid")
    }

    pub fn new(kind: CutoffKind, breakpoints: [f64; 4]) -> Result<Self> {
        let [a, b, c, d] = breakpoints;
        if !(a <= b && b <= c && c <= d) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidCutoff(format!(
                "breakpoints {breakpoints:?} not ordered"
            )));
        }
        let hi = if d.is_finite() { d } else { c.max(b) + 1.0 };
        let n = 4096usize;
        let step = (hi * 1.05).max(1e-12) / n as f64;
        let mut profile = Self {
            kind,
            breakpoints,
            samples: Vec::new(),
            sample_step: step,
        };
        profile.samples = (0..=n)
            .map(|i| profile.closed_form(i as f64 * step))
            .collect();
        Ok(profile)
    }

    /// Ramp from 0 to 1 over `[a, b]`, staying 1 afterwards.
    pub fn ramp_up(kind: CutoffKind, a: f64, b: f64) -> Result<Self> {
        Self::new(kind, [a, b, f64::INFINITY, f64::INFINITY])
    }

    /// Plateau-only indicator of `[a, b]` (zero-width ramps).
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(CutoffKind::Trapezoid, [a, a, b, b])
    }

    fn ramp(&self, t: f64) -> f64 {
        match self.kind {
            CutoffKind::Trapezoid => t.clamp(0.0, 1.0),
            CutoffKind::SmoothMollified => {
                if t <= 0.0 {
                    0.0
                } else if t >= 1.0 {
                    1.0
                } else {
                    let sa = (-1.0 / t).exp();
                    let sb = (-1.0 / (1.0 - t)).exp();
                    sa / (sa + sb)
                }
            }
        }
    }

    fn ramp_derivative(&self, t: f64) -> f64 {
        match self.kind {
            CutoffKind::Trapezoid => {
                if (0.0..1.0).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffKind::SmoothMollified => {
                if t <= 0.0 || t >= 1.0 {
                    0.0
                } else {
                    let sa = (-1.0 / t).exp();
                    let sb = (-1.0 / (1.0 - t)).exp();
                    let da = sa / (t * t);
                    let db = -sb / ((1.0 - t) * (1.0 - t));
                    (da * (sa + sb) - sa * (da + db)) / ((sa + sb) * (sa + sb))
                }
            }
        }
    }

    pub fn closed_form(&self, y: f64) -> f64 {
        let [a, b, c, d] = self.breakpoints;
        if y < a || y > d {
            0.0
        } else if y < b {
            self.ramp((y - a) / (b - a))
        } else if y <= c {
            1.0
        } else {
            self.ramp((d - y) / (d - c))
        }
    }

    /// First derivative; exact for the smooth kind, piecewise-constant slope
    /// for the trapezoid.
    pub fn derivative(&self, y: f64) -> f64 {
        let [a, b, c, d] = self.breakpoints;
        if y <= a || y >= d {
            0.0
        } else if y < b {
            self.ramp_derivative((y - a) / (b - a)) / (b - a)
        } else if y <= c {
            0.0
        } else {
            -self.ramp_derivative((d - y) / (d - c)) / (d - c)
        }
    }

    /// Second derivative by a centered difference of [`Self::derivative`].
    pub fn second_derivative(&self, y: f64) -> f64 {
        let h = 1e-5;
        (self.derivative(y + h) - self.derivative(y - h)) / (2.0 * h)
    }

    /// `≡ 1` region, possibly unbounded above.
    pub fn plateau(&self) -> (f64, f64) {
        (self.breakpoints[1], self.breakpoints[2])
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[3])
    }

    /// Invariant check: values in `[0,1]`, 1 on the plateau, 0 outside the
    /// support, at the sample resolution.
    pub fn validate(&self) -> Result<()> {
        for (i, &v) in self.samples.iter().enumerate() {
            let y = i as f64 * self.sample_step;
            if !(0.0..=1.0 + 1e-15).contains(&v) {
                return Err(Error::InvalidCutoff(format!("value {v} at y = {y}")));
            }
            let (p_lo, p_hi) = self.plateau();
            if y >= p_lo && y <= p_hi && (v - 1.0).abs() > 1e-15 {
                return Err(Error::InvalidCutoff(format!("plateau broken at y = {y}")));
            }
            let (s_lo, s_hi) = self.support();
            if (y < s_lo || y > s_hi) && v != 0.0 {
                return Err(Error::InvalidCutoff(format!("support broken at y = {y}")));
            }
        }
        Ok(())
    }
}

/// `Γ_χ = ∫₀^∞ χ(y)·y dy` with a Richardson error estimate. Pieces are split
/// at the breakpoints, so the trapezoid case (piecewise-quadratic integrand)
/// is integrated exactly by Simpson.
pub fn cutoff_gamma(chi: &CutoffProfile) -> (f64, f64) {
    let coarse = gamma_quadrature(chi, 512);
    let fine = gamma_quadrature(chi, 1024);
    (fine, (fine - coarse).abs())
}

fn gamma_quadrature(chi: &CutoffProfile, panels_per_piece: usize) -> f64 {
    let [a, b, c, d] = chi.breakpoints;
    let hi = if d.is_finite() { d } else { c + 1.0 };
    let pieces = [(a, b), (b, c.min(hi)), (c.min(hi), hi)];
    let mut total = 0.0;
    for &(lo, hi) in &pieces {
        if hi <= lo {
            continue;
        }
        total += simpson(lo, hi, panels_per_piece, |y| chi.closed_form(y) * y);
    }
    total
}

pub(crate) fn simpson(lo: f64, hi: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = panels.max(2) & !1; // even
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

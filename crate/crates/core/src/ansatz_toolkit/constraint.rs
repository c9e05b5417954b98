//! The constraint bump: given the integral error `Err`, place a radial
//! (1,1)-bump `η = s·χ(ρt)·(i/2)du dū` far enough out (`t > t₀`) and solve
//! for the amplitude `s₀` so that `d∫η∧ω^{d−1} = Err`.
//!
//! The quasi-model metric is a conformal factor `λ(ρ) ∈ [1/K, K]` times the
//! product model; the target integral is then exactly linear in `s`, and for
//! `K = 1` the bounds of the `s₀` interval collapse to the closed form.

use serde::Serialize;

use super::cutoff::{simpson, CutoffProfile};
use crate::{Error, Result};

/// Parameters of the constraint lemma.
#[derive(Debug, Clone, Serialize)]
pub struct ConstraintParams {
    /// Quasi-isometry constant K ≥ 1.
    pub quasi_isometry: f64,
    /// Complex dimension d.
    pub dimension: usize,
    /// Order of the orbifold group.
    pub ord_sigma: u32,
    /// Fiber volume Vol(Y).
    pub vol_y: f64,
    /// Cutoff moment Γ_χ.
    pub gamma_chi: f64,
    /// The integral error `Err` the bump must absorb.
    pub err: f64,
    /// Volume-growth exponent β > 0 of the model.
    pub beta: f64,
    /// Radius beyond which the end coordinate is valid.
    pub r0: f64,
}

impl ConstraintParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.quasi_isometry >= 1.0) {
            return Err(Error::InvalidConstraintParams(format!(
                "K = {} must be ≥ 1",
                self.quasi_isometry
            )));
        }
        if self.dimension < 1 {
            return Err(Error::InvalidConstraintParams("d must be ≥ 1".into()));
        }
        if self.ord_sigma < 2 {
            return Err(Error::InvalidConstraintParams(format!(
                "ord_σ = {} must be ≥ 2",
                self.ord_sigma
            )));
        }
        for (name, v) in [
            ("vol_y", self.vol_y),
            ("gamma_chi", self.gamma_chi),
            ("r0", self.r0),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidConstraintParams(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidConstraintParams(format!(
                "beta = {} must be positive (strictly super-linear volume growth)",
                self.beta
            )));
        }
        Ok(())
    }

    fn factorial(&self) -> f64 {
        (1..=self.dimension).map(|i| i as f64).product()
    }

    /// Denominator `2π·d!·Vol(Y)·Γ_χ` shared by every formula here.
    fn common_denominator(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.factorial() * self.vol_y * self.gamma_chi
    }
}

/// Threshold `t₀`: beyond it the metric's super-quadratic growth in `t`
/// dominates the `O(t²)` bump amplitude no matter the sign of `Err`.
pub fn constraint_t0(params: &ConstraintParams) -> Result<f64> {
    params.validate()?;
    if params.err == 0.0 {
        return Ok(10.0 / params.r0);
    }
    let k = params.quasi_isometry;
    let power = 1000.0
        * 32f64.powf(2.0 + 2.0 * params.beta)
        * k.powi(params.dimension as i32)
        * params.ord_sigma as f64
        * params.err.abs()
        / params.common_denominator();
    Ok((10.0 / params.r0).max(power.powf(1.0 / (2.0 * params.beta))))
}

/// Everything the solve produces.
#[derive(Debug, Clone, Serialize)]
pub struct ConstraintSolution {
    pub t0: f64,
    /// The `t` the amplitude was solved at.
    pub t: f64,
    /// Predicted open interval for `s₀` (ordered endpoints; collapses for K = 1).
    pub s0_interval: (f64, f64),
    /// Root-found amplitude.
    pub s0: f64,
    /// `sup |η|` relative to the flat `(i/2)du dū`, i.e. `|s₀|`.
    pub eta_amplitude: f64,
}

/// Solves `d∫η∧ω^{d−1} = Err` for `s` on the concrete quasi-model metric
/// `λ(ρ)·(model)` at the given `t` (defaults to `2·max(t0, 10/r0)` when
/// `None`). `lambda` must take values in `[1/K, K]`.
pub fn constraint_solve(
    params: &ConstraintParams,
    chi: &CutoffProfile,
    lambda: impl Fn(f64) -> f64,
    t_override: Option<f64>,
) -> Result<ConstraintSolution> {
    params.validate()?;
    let t0 = constraint_t0(params)?;
    let t = t_override.unwrap_or(2.0 * t0.max(10.0 / params.r0));
    if params.err == 0.0 {
        return Ok(ConstraintSolution {
            t0,
            t,
            s0_interval: (0.0, 0.0),
            s0: 0.0,
            eta_amplitude: 0.0,
        });
    }

    let denom = params.common_denominator();
    let ord = params.ord_sigma as f64;
    let k_pow = params.quasi_isometry.powi(params.dimension as i32 - 1);
    let inner = ord * params.err.abs() * t * t / (k_pow * denom);
    let outer = k_pow * ord * params.err.abs() * t * t / denom;
    let s0_interval = if params.err > 0.0 {
        (inner, outer)
    } else {
        (-outer, -inner)
    };

    // target integral F(s) = s·C with
    // C = 2π·d!·Vol(Y)/ord_σ · ∫ χ(ρt)·λ(ρ)^{d−1}·ρ dρ, integrated piecewise
    // against the cutoff's breakpoints
    let d_fact = params.factorial();
    let coef_prefix = 2.0 * std::f64::consts::PI * d_fact * params.vol_y / ord;
    let [b0, b1, b2, b3] = chi.breakpoints;
    let hi = if b3.is_finite() { b3 } else { b2 + 1.0 };
    let mut integral = 0.0;
    for (lo, up) in [(b0, b1), (b1, b2.min(hi)), (b2.min(hi), hi)] {
        if up <= lo {
            continue;
        }
        // substitute y = ρ·t
        integral += simpson(lo / t, up / t, 2048, |rho| {
            chi.closed_form(rho * t) * lambda(rho).powi(params.dimension as i32 - 1) * rho
        });
    }
    let coef = coef_prefix * integral;
    if coef == 0.0 {
        return Err(Error::InvalidConstraintParams(
            "cutoff integral vanishes; bump cannot absorb any error".into(),
        ));
    }

    // the map s ↦ s·coef − Err is exactly linear; bracket and bisect anyway
    // so the solve stays honest if the metric model ever changes
    let root = {
        let target = |s: f64| s * coef - params.err;
        let mut lo = -2.0 * s0_interval.0.abs().max(s0_interval.1.abs()) - 1.0;
        let mut hi = -lo;
        debug_assert!(target(lo) < 0.0 && target(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if target(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() <= 1e-16 * hi.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    };

    Ok(ConstraintSolution {
        t0,
        t,
        s0_interval,
        s0: root,
        eta_amplitude: root.abs(),
    })
}

/// Minimum model-relative eigenvalue of `ω + η` on a fine ρ-grid around the
/// bump support: base direction `λ(ρ) + s₀·χ(ρt)·ρ^{2+2β}`, fiber directions
/// `λ(ρ)`.
pub fn assembled_min_eigenvalue(
    params: &ConstraintParams,
    chi: &CutoffProfile,
    lambda: impl Fn(f64) -> f64,
    t: f64,
    s0: f64,
) -> (f64, f64) {
    let (s_lo, s_hi) = chi.support();
    let hi = if s_hi.is_finite() { s_hi } else { s_lo + 5.0 };
    let rho_lo = 0.25 * s_lo / t;
    let rho_hi = 2.5 * hi / t;
    let n = 4096;
    let mut min = f64::INFINITY;
    let mut witness = rho_lo;
    for i in 0..=n {
        let rho = rho_lo + (rho_hi - rho_lo) * i as f64 / n as f64;
        let lam = lambda(rho);
        let base = lam + s0 * chi.closed_form(rho * t) * rho.powf(2.0 + 2.0 * params.beta);
        let local = base.min(lam);
        if local < min {
            min = local;
            witness = rho;
        }
    }
    (min, witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz_toolkit::cutoff::CutoffKind;

    fn params(k: f64, err: f64) -> ConstraintParams {
        ConstraintParams {
            quasi_isometry: k,
            dimension: 3,
            ord_sigma: 2,
            vol_y: 1.0,
            gamma_chi: 5.0,
            err,
            beta: 1.0,
            r0: 100.0,
        }
    }

    #[test]
    fn t0_plug_in_value() {
        // d = 3, K = 10, ord = 2, Vol = 1, Γ = 5, Err = 1, β = 1:
        // t0 = sqrt(1000·32⁴·10³·2/(2π·6·5))
        let p = params(10.0, 1.0);
        let t0 = constraint_t0(&p).unwrap();
        let expect = (1000.0 * 32f64.powi(4) * 1000.0 * 2.0
            / (2.0 * std::f64::consts::PI * 6.0 * 5.0))
            .sqrt();
        assert!((t0 / expect - 1.0).abs() < 1e-14, "{t0} vs {expect}");
    }

    #[test]
    fn zero_error_needs_no_bump() {
        let p = params(3.0, 0.0);
        let chi = CutoffProfile::standard(CutoffKind::Trapezoid);
        let sol = constraint_solve(&p, &chi, |_| 1.0, None).unwrap();
        assert_eq!(sol.s0, 0.0);
        assert_eq!(sol.eta_amplitude, 0.0);
        assert_eq!(sol.t0, 10.0 / p.r0);
    }

    #[test]
    fn exact_model_collapses_the_interval() {
        let p = params(1.0, 0.7);
        let chi = CutoffProfile::standard(CutoffKind::Trapezoid);
        let sol = constraint_solve(&p, &chi, |_| 1.0, None).unwrap();
        let d_fact = 6.0;
        let closed = p.ord_sigma as f64 * p.err * sol.t * sol.t
            / (2.0 * std::f64::consts::PI * d_fact * p.vol_y * p.gamma_chi);
        assert!(
            (sol.s0 / closed - 1.0).abs() < 1e-10,
            "{} vs {closed}",
            sol.s0
        );
        assert!((sol.s0_interval.0 / closed - 1.0).abs() < 1e-12);
        assert!((sol.s0_interval.1 / closed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quasi_metric_lands_strictly_inside() {
        let p = params(4.0, -1.3);
        let chi = CutoffProfile::standard(CutoffKind::Trapezoid);
        // conformal factor strictly inside (1/K, K)
        let lambda = |rho: f64| (0.9 * 4f64.ln() * (7.0 * rho).sin()).exp();
        let sol = constraint_solve(&p, &chi, lambda, None).unwrap();
        assert!(
            sol.s0 > sol.s0_interval.0 && sol.s0 < sol.s0_interval.1,
            "{} not inside {:?}",
            sol.s0,
            sol.s0_interval
        );
        // negative error: the bump is negative but the form stays positive
        // above threshold
        for factor in [1.01, 2.0, 10.0] {
            let t = sol.t0 * factor;
            let at_t = constraint_solve(&p, &chi, lambda, Some(t)).unwrap();
            let (min, _) = assembled_min_eigenvalue(&p, &chi, lambda, t, at_t.s0);
            assert!(min > 0.0, "min eigenvalue {min} at t = {t}");
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = params(1.0, 1.0);
        p.beta = 0.0;
        assert!(constraint_t0(&p).is_err());
        let mut p = params(0.5, 1.0);
        p.quasi_isometry = 0.5;
        assert!(constraint_t0(&p).is_err());
        let mut p = params(1.0, 1.0);
        p.ord_sigma = 1;
        assert!(constraint_t0(&p).is_err());
    }
}

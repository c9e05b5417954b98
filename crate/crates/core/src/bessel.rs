//! Modified Bessel functions `I_n`, `K_n` for integer order, with scaled
//! variants `e^{-x}·I_n` and `e^{x}·K_n` that stay finite on the whole end.
//!
//! The radial mode operator `u″ + u′/r − (k²/r² + μ)u` with μ > 0 has the
//! homogeneous pair `I_k(√μ·r)`, `K_k(√μ·r)`; only ratios and the
//! cross-products `I(r_<)K(r_>)` ever enter the solvers, so everything is
//! assembled from the scaled values.
//!
//! Implementation: ascending series for `I` at moderate argument and the
//! large-argument expansion beyond; `K₀`, `K₁` by series below x = 2 and by
//! trapezoidal quadrature of `∫ e^{-x cosh t} cosh(nt) dt` above (the
//! integrand is even and analytic, so the trapezoid rule converges
//! spectrally), then stable upward recurrence in the order.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^{-x} I_n(x)` for `x > 0`, integer `n ≥ 0`.
pub fn bessel_i_scaled(n: u32, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let switch = 30.0 + 2.0 * (n as f64) * (n as f64);
    if x <= switch.min(650.0) {
        series_i(n, x) * (-x).exp()
    } else {
        asymptotic_i_scaled(n, x)
    }
}

/// `e^{x} K_n(x)` for `x > 0`, integer `n ≥ 0`.
pub fn bessel_k_scaled(n: u32, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let (k0, k1) = if x <= 2.0 {
        (series_k0(x) * x.exp(), series_k1(x) * x.exp())
    } else if x <= 40.0 {
        (quadrature_k_scaled(0, x), quadrature_k_scaled(1, x))
    } else {
        (asymptotic_k_scaled(0, x), asymptotic_k_scaled(1, x))
    };
    // upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m is stable for K
    let mut km1 = k0;
    let mut k = k1;
    if n == 0 {
        return k0;
    }
    for m in 1..n {
        let next = km1 + (2.0 * m as f64 / x) * k;
        km1 = k;
        k = next;
    }
    k
}

/// `I_n(x)`; overflows for x beyond ~700 like the function itself.
pub fn bessel_i(n: u32, x: f64) -> f64 {
    bessel_i_scaled(n, x) * x.exp()
}

/// `K_n(x)`.
pub fn bessel_k(n: u32, x: f64) -> f64 {
    bessel_k_scaled(n, x) * (-x).exp()
}

/// Scaled derivative pair at `x`: `(e^{-x}I_n'(x), e^{x}K_n'(x))`.
pub fn derivatives_scaled(n: u32, x: f64) -> (f64, f64) {
    let ip = if n == 0 {
        bessel_i_scaled(1, x)
    } else {
        0.5 * (bessel_i_scaled(n - 1, x) + bessel_i_scaled(n + 1, x))
    };
    let kp = if n == 0 {
        -bessel_k_scaled(1, x)
    } else {
        -0.5 * (bessel_k_scaled(n - 1, x) + bessel_k_scaled(n + 1, x))
    };
    (ip, kp)
}

/// `x·(I_n'(x)K_n(x) − I_n(x)K_n'(x))`, identically 1 in exact arithmetic.
/// Exposed so solvers can enforce the pair-validation tolerance.
pub fn wronskian_check(n: u32, x: f64) -> f64 {
    let i = bessel_i_scaled(n, x);
    let k = bessel_k_scaled(n, x);
    // ip = e^{-x}·I', kp = e^{x}·K'; the e^{±x} factors cancel in the products
    let (ip, kp) = derivatives_scaled(n, x);
    x * (ip * k - i * kp)
}

fn series_i(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    // (x/2)^n / n!
    let mut term = 1.0;
    for m in 1..=n {
        term *= half / m as f64;
    }
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= q / (m * (m + n as f64));
        sum += term;
        if term <= f64::EPSILON * sum {
            return sum;
        }
        m += 1.0;
        if m > 600.0 {
            return sum;
        }
    }
}

fn asymptotic_i_scaled(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    let mut prev = f64::INFINITY;
    loop {
        let odd = 2.0 * j - 1.0;
        term *= -(mu - odd * odd) / (j * 8.0 * x);
        if term.abs() >= prev {
            break; // divergent tail reached
        }
        sum += term;
        prev = term.abs();
        if term.abs() <= f64::EPSILON * sum.abs() || j > 60.0 {
            break;
        }
        j += 1.0;
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

fn asymptotic_k_scaled(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    let mut prev = f64::INFINITY;
    loop {
        let odd = 2.0 * j - 1.0;
        term *= (mu - odd * odd) / (j * 8.0 * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() <= f64::EPSILON * sum.abs() || j > 60.0 {
            break;
        }
        j += 1.0;
    }
    sum * (std::f64::consts::PI / (2.0 * x)).sqrt()
}

fn series_k0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..=40 {
        term *= q / ((k * k) as f64);
        harmonic += 1.0 / k as f64;
        sum += term * harmonic;
        if term * harmonic <= f64::EPSILON * sum.max(1.0) {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * series_i(0, x) + sum
}

fn series_k1(x: f64) -> f64 {
    let q = 0.25 * x * x;
    // Σ_k [ψ(k+1) + ψ(k+2)] q^k / (k!(k+1)!), ψ(1) = −γ
    let mut term = 1.0;
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = 1.0 - EULER_GAMMA;
    let mut sum = psi_a + psi_b;
    for k in 1..=40 {
        term *= q / ((k * (k + 1)) as f64);
        psi_a += 1.0 / k as f64;
        psi_b += 1.0 / (k + 1) as f64;
        let t = term * (psi_a + psi_b);
        sum += t;
        if t.abs() <= f64::EPSILON * sum.abs().max(1.0) {
            break;
        }
    }
    1.0 / x + (0.5 * x).ln() * series_i(1, x) - 0.25 * x * sum
}

fn quadrature_k_scaled(n: u32, x: f64) -> f64 {
    // e^{x} K_n(x) = ∫_0^∞ e^{x(1 − cosh t)} cosh(nt) dt; even analytic
    // integrand, so plain trapezoid with small h is spectrally accurate.
    let h = 0.02;
    // choose T with x(cosh T − 1) − nT ≥ 45
    let mut t_max = (1.0_f64 + 47.0 / x).acosh();
    for _ in 0..8 {
        t_max = (1.0 + (45.0 + n as f64 * t_max) / x).acosh();
    }
    let steps = (t_max / h).ceil() as usize;
    let mut sum = 0.5; // t = 0 contributes e^0·cosh(0)/... weight 1/2
    for i in 1..=steps {
        let t = i as f64 * h;
        sum += (x * (1.0 - t.cosh())).exp() * (n as f64 * t).cosh();
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_argument_reference_values() {
        // reference values from standard tables
        assert!((bessel_i(0, 1.0) - 1.266_065_877_752_008_2).abs() < 1e-14);
        assert!((bessel_i(1, 1.0) - 0.565_159_103_992_485_1).abs() < 1e-14);
        assert!((bessel_i(2, 1.0) - 0.135_747_669_767_038_28).abs() < 1e-14);
        assert!((bessel_k(0, 1.0) - 0.421_024_438_240_708_34).abs() < 1e-14);
        assert!((bessel_k(1, 1.0) - 0.601_907_230_197_234_6).abs() < 1e-14);
        assert!((bessel_k(2, 1.0) - 1.624_838_898_635_177_4).abs() < 1e-13);
    }

    #[test]
    fn moderate_argument_reference_values() {
        assert!((bessel_i(0, 10.0) / 2815.716_628_466_254 - 1.0).abs() < 1e-13);
        assert!((bessel_i(1, 10.0) / 2670.988_303_701_255 - 1.0).abs() < 1e-13);
        assert!((bessel_k(0, 10.0) / 1.778_006_231_616_765e-5 - 1.0).abs() < 1e-12);
        assert!((bessel_k(1, 10.0) / 1.864_877_345_382_558_5e-5 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wronskian_identity_across_ranges() {
        for n in 0..=8u32 {
            for &x in &[
                0.3, 1.0, 1.9, 2.1, 5.0, 19.0, 25.0, 39.0, 41.0, 80.0, 300.0, 2000.0, 9000.0,
            ] {
                let w = wronskian_check(n, x);
                assert!(
                    (w - 1.0).abs() < 1e-10,
                    "Wronskian off at n={n}, x={x}: {w}"
                );
            }
        }
    }

    #[test]
    fn scaled_values_stay_finite_far_out() {
        let k = bessel_k_scaled(3, 9000.0);
        let i = bessel_i_scaled(3, 9000.0);
        assert!(k.is_finite() && k > 0.0);
        assert!(i.is_finite() && i > 0.0);
        // I_n K_n = (1/2x)(1 + O(1/x²))
        assert!((k * i * 2.0 * 9000.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn k0_asymptotic_rate_near_unity() {
        // d/dr [−log K₀(r)] ≈ 1 + 1/(2r) for large r
        let r1 = 30.0;
        let r2 = 30.5;
        let lk1 = bessel_k_scaled(0, r1).ln() - r1;
        let lk2 = bessel_k_scaled(0, r2).ln() - r2;
        let rate = -(lk2 - lk1) / (r2 - r1);
        assert!((rate - 1.0).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn quadrature_and_series_agree_at_seam() {
        for n in 0..=1u32 {
            let series = if n == 0 {
                series_k0(2.0) * 2.0f64.exp()
            } else {
                series_k1(2.0) * 2.0f64.exp()
            };
            let quad = quadrature_k_scaled(n, 2.0);
            assert!(
                (series / quad - 1.0).abs() < 1e-12,
                "n={n}: {series} vs {quad}"
            );
        }
        // asymptotic-vs-quadrature seam at x = 40
        for n in 0..=1u32 {
            let a = asymptotic_k_scaled(n, 40.0);
            let q = quadrature_k_scaled(n, 40.0);
            assert!((a / q - 1.0).abs() < 1e-12, "n={n}: {a} vs {q}");
        }
    }
}

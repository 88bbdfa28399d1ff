//! Real Gamma function with exact pole semantics for the reciprocal.
//!
//! Arguments below 1 are shifted into `[1, 2)` by the upward recurrence
//! `Γ(x) = Γ(x + n) / (x (x + 1) ... (x + n - 1))`; the core is a Lanczos
//! approximation (g = 7, nine coefficients) with relative error near 1e-15.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `true` when `x` is one of `0, -1, -2, ...`.
pub fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Lanczos approximation, valid for `x >= 0.5`.
fn lanczos(x: f64) -> f64 {
    let xm1 = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (xm1 + i as f64);
    }
    let t = xm1 + LANCZOS_G + 0.5;
    // split the power so that Γ(171) does not overflow in the intermediate
    let half = t.powf(0.5 * (xm1 + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * acc
}

/// Rising product `x (x + 1) ... (x + n - 1)` together with the shifted
/// argument `x + n >= 1`.
fn shift_up(x: f64) -> (f64, f64) {
    let mut product = 1.0;
    let mut y = x;
    while y < 1.0 {
        product *= y;
        y += 1.0;
    }
    (product, y)
}

/// Γ(n) = (n - 1)! for integers `1 <= n <= 23`, where the product is exact.
fn small_factorial(x: f64) -> Option<f64> {
    if (1.0..=23.0).contains(&x) && x == x.floor() {
        Some((1..x as u32).map(f64::from).product())
    } else {
        None
    }
}

/// Γ(x) for real `x`; the poles `0, -1, -2, ...` are reported as errors.
pub fn gamma_real(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("gamma of NaN".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if let Some(f) = small_factorial(x) {
        return Ok(f);
    }
    if x >= 1.0 {
        return Ok(lanczos(x));
    }
    let (product, y) = shift_up(x);
    Ok(lanczos(y) / product)
}

/// 1/Γ(x), a total function that is exactly zero at `0, -1, -2, ...`.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if let Some(f) = small_factorial(x) {
        return 1.0 / f;
    }
    if x >= 1.0 {
        if x > 171.7 {
            return 0.0;
        }
        return 1.0 / lanczos(x);
    }
    // one factor of the rising product is exactly zero at a pole
    let (product, y) = shift_up(x);
    product / lanczos(y)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection keeps the Lanczos form in its accurate range
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let xm1 = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (xm1 + i as f64);
    }
    let t = xm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (xm1 + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Γ(n + 1/2) = (2n)! √π / (4^n n!)
    fn gamma_half_integer(n: u32) -> f64 {
        factorial(2 * n) * PI.sqrt() / (4f64.powi(n as i32) * factorial(n))
    }

    #[test]
    fn closed_forms() {
        assert!((gamma_real(0.5).unwrap() - 1.772_453_850_9).abs() < 1e-10);
        assert!((gamma_real(-0.5).unwrap() + 3.544_907_701_8).abs() < 1e-10);
        assert!(matches!(gamma_real(0.0), Err(Error::GammaPole(_))));
        assert!(matches!(gamma_real(-3.0), Err(Error::GammaPole(_))));
        for n in 1..20u32 {
            let g = gamma_real(f64::from(n)).unwrap();
            let exact = factorial(n - 1);
            assert!(((g - exact) / exact).abs() < 1e-13, "n = {n}");
        }
        for n in 0..15u32 {
            let g = gamma_real(f64::from(n) + 0.5).unwrap();
            let exact = gamma_half_integer(n);
            assert!(((g - exact) / exact).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn negative_half_integers_via_reflection_identity() {
        // Γ(1/2 - n) Γ(1/2 + n) = π / cos(π n) = (-1)^n π
        for n in 1..25u32 {
            let x = 0.5 - f64::from(n);
            let lhs = gamma_real(x).unwrap() * gamma_half_integer(n);
            let rhs = if n % 2 == 0 { PI } else { -PI };
            assert!(((lhs - rhs) / rhs).abs() < 1e-12, "n = {n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn reciprocal_is_zero_at_poles() {
        for k in 0..40 {
            assert_eq!(reciprocal_gamma(-f64::from(k)), 0.0);
        }
        assert_eq!(reciprocal_gamma(1.0), 1.0);
        assert!((reciprocal_gamma(-0.5) + 0.282_094_791_8).abs() < 1e-10);
    }

    #[test]
    fn reciprocal_times_gamma_is_one() {
        let mut x = -29.5;
        while x <= 30.0 {
            if !is_nonpositive_integer(x) {
                let prod = reciprocal_gamma(x) * gamma_real(x).unwrap();
                assert!((prod - 1.0).abs() < 1e-12, "x = {x}: {prod}");
            }
            x += 0.173;
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.1, 0.7, 1.0, 2.5, 10.0, 55.5, 150.0] {
            let direct = gamma_real(x).unwrap().ln();
            assert!((ln_gamma(x) - direct).abs() < 1e-12 * direct.abs().max(1.0), "x = {x}");
        }
    }
}

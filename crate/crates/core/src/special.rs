//! Gamma-function helpers.
//!
//! Every Gamma argument that appears in sphere and Gegenbauer-ball integrals is a
//! positive multiple of 1/2, so those are computed by the exact recurrence down to
//! `Γ(1) = 1` or `Γ(1/2) = √π`. Other arguments go through `statrs`.

use std::f64::consts::PI;

/// Largest argument handled by the half-integer product; beyond it `Γ` overflows anyway.
const PRODUCT_LIMIT: f64 = 170.0;

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    match half_integer_steps(x) {
        Some(twice) => gamma_half_integer(twice),
        None => statrs::function::gamma::gamma(x),
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    match half_integer_steps(x) {
        Some(twice) => gamma_half_integer(twice).ln(),
        None => statrs::function::gamma::ln_gamma(x),
    }
}

/// `Γ(a) / Γ(b)`, evaluated in log space when the factors would overflow.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    if a < PRODUCT_LIMIT && b < PRODUCT_LIMIT {
        if let (Some(ta), Some(tb)) = (half_integer_steps(a), half_integer_steps(b)) {
            return gamma_half_integer(ta) / gamma_half_integer(tb);
        }
    }
    (ln_gamma(a) - ln_gamma(b)).exp()
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a + b)`.
pub fn beta(a: f64, b: f64) -> f64 {
    if let (Some(ta), Some(tb), Some(tc)) = (
        half_integer_steps(a),
        half_integer_steps(b),
        half_integer_steps(a + b),
    ) {
        if a + b < PRODUCT_LIMIT {
            return gamma_half_integer(ta) * gamma_half_integer(tb) / gamma_half_integer(tc);
        }
    }
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Surface measure `|S^dim| = 2 π^((dim+1)/2) / Γ((dim+1)/2)`; `|S^0| = 2` (two points).
pub fn sphere_area(dim: usize) -> f64 {
    let h = (dim as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

fn half_integer_steps(x: f64) -> Option<u32> {
    let twice = 2.0 * x;
    if x > 0.0 && x <= PRODUCT_LIMIT && twice.fract() == 0.0 {
        Some(twice as u32)
    } else {
        None
    }
}

/// `Γ(twice / 2)` by the downward recurrence.
fn gamma_half_integer(twice: u32) -> f64 {
    let (mut value, mut arg) = if twice % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = twice as f64 / 2.0;
    while arg < target {
        value *= arg;
        arg += 1.0;
    }
    value
}

//! Independent oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

pub mod fd;

use std::f64::consts::PI;

/// `I0(x)` from `(1/pi) int_0^pi exp(x cos t) dt` by the trapezoidal rule,
/// which converges geometrically for this periodic integrand.
pub fn i0_integral(x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let mut sum = 0.5 * (x.exp() + (-x).exp());
    for k in 1..m {
        sum += (x * (k as f64 * h).cos()).exp();
    }
    sum * h / PI
}

/// `K0(x)` from `int_0^inf exp(-x cosh t) dt` by the trapezoidal rule on a
/// truncated half-line.
pub fn k0_integral(x: f64) -> f64 {
    let t_max = (2.0 * (750.0 / x).ln().max(1.0)).max(4.0);
    let m = 4000;
    let h = t_max / m as f64;
    let mut sum = 0.5 * (-x).exp();
    for k in 1..=m {
        sum += (-x * (k as f64 * h).cosh()).exp();
    }
    sum * h
}

/// Exact ground state of the circle of radius `r`: `lambda = -kappa^2` with
/// `I0(kappa r) K0(kappa r) = 1 / (alpha r)`.
pub fn circle_ground_state(alpha: f64, r: f64) -> f64 {
    let f = |kappa: f64| i0_integral(kappa * r) * k0_integral(kappa * r) - 1.0 / (alpha * r);
    let (mut lo, mut hi) = (1e-8, 50.0 / r);
    assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let kappa = 0.5 * (lo + hi);
    -kappa * kappa
}

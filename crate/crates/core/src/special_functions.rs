//! The Macdonald function `K0` (modified Bessel function of the second kind,
//! order zero) and the integral identity it satisfies.
//!
//! Two regimes:
//! * `x <= K0_SWITCH`: the ascending series
//!   `K0(x) = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 H_k`.
//! * `x > K0_SWITCH`: the exponentially scaled large-argument form
//!   `K0(x) = sqrt(pi / 2x) e^{-x} / S(x)`, where `S` is evaluated by Steed's
//!   continued fraction. The plain asymptotic series `1 - 1/(8x) + 9/(2(8x)^2) - ...`
//!   only reaches about 1e-3 at `x = 2`, the continued fraction is its
//!   convergent resummation and holds full precision there.

use crate::error::{domain, Result};
use crate::quadrature::gauss20;
use serde::Serialize;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switch point between the series and the continued fraction.
pub const K0_SWITCH: f64 = 2.0;

/// Beyond this `e^{-x}` underflows and `K0` is reported as zero.
const UNDERFLOW_X: f64 = 740.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum K0Regime {
    SeriesSmallX,
    AsymptoticLargeX,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct K0Eval {
    pub x: f64,
    pub value: f64,
    pub regime: K0Regime,
    /// Set when the true value is below the smallest representable double.
    pub underflow: bool,
}

/// `K0(x)` with regime and underflow metadata.
pub fn macdonald_k0(x: f64) -> Result<K0Eval> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("K0 requires a finite positive argument, got {x}")));
    }
    if x <= K0_SWITCH {
        return Ok(K0Eval { x, value: k0_series(x), regime: K0Regime::SeriesSmallX, underflow: false });
    }
    let value = if x > UNDERFLOW_X { 0.0 } else { k0_scaled_cf(x) * (-x).exp() };
    Ok(K0Eval { x, value, regime: K0Regime::AsymptoticLargeX, underflow: value == 0.0 })
}

/// `K0(x)` on the hot path. Returns NaN for `x <= 0` and 0 past underflow.
#[inline]
pub fn k0(x: f64) -> f64 {
    if x <= 0.0 || x.is_nan() {
        f64::NAN
    } else if x <= K0_SWITCH {
        k0_series(x)
    } else if x > UNDERFLOW_X {
        0.0
    } else {
        k0_scaled_cf(x) * (-x).exp()
    }
}

/// `e^x K0(x)`.
pub fn k0_scaled(x: f64) -> f64 {
    if x <= 0.0 || x.is_nan() {
        f64::NAN
    } else if x <= K0_SWITCH {
        k0_series(x) * x.exp()
    } else {
        k0_scaled_cf(x)
    }
}

/// `I0(x)` from its power series; accurate for moderate `x` (used up to the switch point).
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Ascending series, `0 < x <= 2`.
pub(crate) fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    let mut harmonic = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term * harmonic < 1e-18 * tail.abs().max(1e-300) {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// Steed's continued fraction for `e^x K0(x)`, `x >= 2`.
pub(crate) fn k0_scaled_cf(x: f64) -> f64 {
    const MAX_ITER: usize = 10_000;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() / s
}

/// Numerically integrates `K0(kappa c |t|)` over the real line.
///
/// The closed form is `pi / (kappa c)`; this is the self-test for that identity.
/// The integrand is log-singular at 0 and decays like `e^{-kappa c t}`, so the
/// half-line is mapped with `t = e^v` and cut where `kappa c t` exceeds the
/// underflow limit.
pub fn k0_integral_check(kappa: f64, c: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) || !(c > 0.0 && c.is_finite()) {
        return Err(domain(format!("kappa and c must be positive, got kappa={kappa}, c={c}")));
    }
    let rate = kappa * c;
    let v_lo = (1e-30 / rate).ln();
    let v_hi = (UNDERFLOW_X / rate).ln();
    let panels = ((v_hi - v_lo) / 0.25).ceil() as usize;
    let width = (v_hi - v_lo) / panels as f64;
    let rule = gauss20();
    let half_line: f64 = (0..panels)
        .map(|p| {
            let a = v_lo + p as f64 * width;
            rule.integrate(a, a + width, |v| {
                let t = v.exp();
                k0(rate * t) * t
            })
        })
        .sum();
    Ok(2.0 * half_line)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // Reference values from mpmath.besselk(0, x) at 30 digits.
    const REFERENCE: &[(f64, f64)] = &[
        (1e-8, 18.5366122596107784),
        (0.1, 2.42706902470201661),
        (0.5, 0.924419071227665862),
        (1.0, 0.421024438240708333),
        (2.0, 0.113893872749533436),
        (2.5, 0.062347553200366186),
        (5.0, 0.00369109833404259427),
        (10.0, 1.77800623161676518e-5),
        (50.0, 3.41016774978949551e-23),
        (300.0, 3.72369485488914326e-132),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, want) in REFERENCE {
            let got = k0(x);
            let rel = ((got - want) / want).abs();
            assert!(rel <= 1e-12, "K0({x}) = {got}, want {want}, rel {rel:e}");
        }
    }

    #[test]
    fn small_argument_oracle_at_one() {
        // 20 terms of the ascending series, summed independently.
        let x: f64 = 1.0;
        let q = x * x / 4.0;
        let (mut i0, mut tail, mut fact, mut h) = (0.0, 0.0, 1.0, 0.0);
        for k in 0..20 {
            if k > 0 {
                fact *= k as f64;
                h += 1.0 / k as f64;
            }
            let t = q.powi(k) / (fact * fact);
            i0 += t;
            tail += t * h;
        }
        let oracle = -((x / 2.0).ln() + EULER_GAMMA) * i0 + tail;
        assert!((k0(1.0) - oracle).abs() < 1e-15);
        assert!((k0(1.0) - 0.421024438240708).abs() < 1e-14);
    }

    #[test]
    fn logarithmic_behaviour_near_zero() {
        let mut prev = f64::INFINITY;
        for e in 2..8 {
            let x = 10f64.powi(-e);
            let resid = (k0(x) + (x / 2.0).ln() + EULER_GAMMA).abs();
            // O(x^2 ln x)
            assert!(resid <= x * x * (1.0 - x.ln()), "x={x} resid={resid}");
            assert!(resid < prev);
            prev = resid;
        }
    }

    #[test]
    fn regime_continuity_at_switch() {
        let x = K0_SWITCH;
        let series = k0_series(x);
        let cf = k0_scaled_cf(x) * (-x).exp();
        assert!((series - cf).abs() <= 1e-11 * series, "series {series} cf {cf}");
    }

    #[test]
    fn large_argument_underflow() {
        let e = macdonald_k0(700.0).unwrap();
        assert!(e.value > 0.0 && e.value < 1e-300);
        assert_eq!(e.regime, K0Regime::AsymptoticLargeX);
        let e = macdonald_k0(800.0).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.underflow);
    }

    #[test]
    fn domain_errors() {
        assert!(macdonald_k0(0.0).is_err());
        assert!(macdonald_k0(-1.0).is_err());
        assert!(macdonald_k0(f64::NAN).is_err());
        assert!(k0(0.0).is_nan());
        assert!(k0_integral_check(0.0, 1.0).is_err());
        assert!(k0_integral_check(1.0, -1.0).is_err());
    }

    #[test]
    fn integral_identity() {
        for (kappa, c) in [(1.0, 1.0), (2.0, 0.5), (10.0, 1.0), (0.3, 0.7)] {
            let got = k0_integral_check(kappa, c).unwrap();
            assert!((got - PI / (kappa * c)).abs() < 1e-10, "{kappa} {c}: {got}");
        }
    }

    #[test]
    fn scaled_matches_unscaled() {
        for x in [0.3, 1.9, 2.1, 7.0, 40.0] {
            assert!((k0_scaled(x) * (-x).exp() - k0(x)).abs() <= 1e-14 * k0(x));
        }
    }
}

//! Asymptotic straightness of unbounded curves.

use super::{Curve, CurveKind};
use crate::error::{domain, Result};
use serde::Serialize;

/// `1 - |gamma(s) - gamma(t)| / |s - t|`.
pub fn straightness_deficit(curve: &Curve, s: f64, t: f64) -> Result<f64> {
    if s == t {
        return Err(domain("straightness deficit needs distinct parameters"));
    }
    let chord = curve.point_at(s).distance(curve.point_at(t));
    Ok((1.0 - chord / (s - t).abs()).clamp(0.0, 1.0))
}

/// Fit of the decay model `d (1 + |s + t|^{2 mu})^{-1/2}` to the largest
/// deficit found at each scale `|s + t|` inside the sector `omega <= s/t <= 1/omega`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A2Fit {
    pub omega: f64,
    pub d: f64,
    /// `f64::INFINITY` when every sampled deficit vanishes.
    pub mu: f64,
    pub consistent: bool,
    /// `(|s + t|, max deficit)` pairs the fit was made to.
    pub samples: Vec<(f64, f64)>,
}

const SCALES: usize = 40;
const RATIOS: usize = 9;

pub fn fit_a2(curve: &Curve, omega: f64) -> Result<A2Fit> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(domain(format!("sector parameter must lie in (0, 1), got {omega}")));
    }
    let CurveKind::Infinite { .. } = curve.kind() else {
        return Err(domain("asymptotic straightness is defined for unbounded curves only"));
    };
    let (lo, hi) = curve.domain();
    let reach = lo.abs().min(hi.abs());
    let top = 2.0 * reach * omega.max(0.5);
    let bottom = 1.0f64.min(0.01 * top);
    let mut samples = Vec::with_capacity(SCALES);
    for k in 0..SCALES {
        let sigma = bottom * (top / bottom).powf(k as f64 / (SCALES - 1) as f64);
        let mut worst: f64 = 0.0;
        for j in 0..RATIOS {
            // s/t runs geometrically from omega to 1.
            let q = omega.powf(j as f64 / (RATIOS - 1) as f64);
            let t = sigma / (1.0 + q);
            let s = q * t;
            if s == t {
                continue;
            }
            for sign in [1.0, -1.0] {
                let (a, b) = (sign * s, sign * t);
                if a.min(b) >= lo && a.max(b) <= hi {
                    worst = worst.max(straightness_deficit(curve, a, b)?);
                }
            }
        }
        samples.push((sigma, worst));
    }
    let tiny = 1e-14;
    let fitted: Vec<(f64, f64)> = samples.iter().copied().filter(|&(_, v)| v > tiny).collect();
    if fitted.len() < 3 {
        return Ok(A2Fit { omega, d: 0.0, mu: f64::INFINITY, consistent: true, samples });
    }
    let residual = |mu: f64| -> (f64, f64) {
        let model: Vec<f64> = fitted.iter().map(|&(x, _)| -0.5 * (1.0 + x.powf(2.0 * mu)).ln()).collect();
        let log_d = fitted.iter().zip(&model).map(|(&(_, v), m)| v.ln() - m).sum::<f64>() / fitted.len() as f64;
        let err = fitted.iter().zip(&model).map(|(&(_, v), m)| (v.ln() - log_d - m).powi(2)).sum();
        (err, log_d)
    };
    let mu = golden_section(|mu| residual(mu).0, 0.0, 6.0);
    let d = residual(mu).1.exp();
    Ok(A2Fit { omega, d, mu, consistent: mu > 0.5, samples })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..120 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Builtin;
    use std::f64::consts::PI;

    #[test]
    fn line_has_no_deficit() {
        let line = Curve::line(100.0).unwrap();
        assert_eq!(straightness_deficit(&line, -3.0, 7.5).unwrap(), 0.0);
        let fit = fit_a2(&line, 0.5).unwrap();
        assert!(fit.consistent);
        assert_eq!(fit.d, 0.0);
    }

    #[test]
    fn angle_deficit_across_vertex() {
        let beta = PI / 3.0;
        let angle = Curve::angle(beta, 10.0).unwrap();
        for s in [0.1, 1.0, 5.0] {
            let v = straightness_deficit(&angle, -s, s).unwrap();
            assert!((v - (1.0 - (0.5 * beta).sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_parameters_are_rejected() {
        let line = Curve::line(10.0).unwrap();
        assert!(straightness_deficit(&line, 1.0, 1.0).is_err());
    }

    #[test]
    fn parabola_deficit_decays() {
        let p = Curve::builtin(Builtin::Parabola { a: 0.5 }, 200.0).unwrap();
        let mut previous = f64::INFINITY;
        for s in [2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
            let v = straightness_deficit(&p, s, 1.01 * s).unwrap();
            assert!(v < previous, "s={s}: {v} >= {previous}");
            previous = v;
        }
        let fit = fit_a2(&p, 0.5).unwrap();
        assert!(fit.consistent, "mu = {}", fit.mu);
    }

    #[test]
    fn loops_are_rejected() {
        assert!(fit_a2(&Curve::circle(1.0).unwrap(), 0.5).is_err());
    }
}

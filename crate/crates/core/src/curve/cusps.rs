//! Cusp detection on the raw parametrization.

use super::Curve;
use crate::defaults::CUSP_DIFF_STEP;

/// Samples used to bracket minima of the raw speed.
const SCAN_POINTS: usize = 2000;

/// Raw parameters where the velocity `|gamma'(t)|` (centered difference with
/// step `CUSP_DIFF_STEP`) falls below `tol` and the chord-arc ratio of
/// shrinking windows around the point tends to zero. Endpoints are excluded.
pub fn detect_cusps(curve: &Curve, tol: f64) -> Vec<f64> {
    let (a, b) = curve.raw_domain();
    if !(b > a) {
        return Vec::new();
    }
    let margin = 4.0 * CUSP_DIFF_STEP + 1e-9 * (b - a);
    let inside = |t: f64| t > a + margin && t < b - margin;

    let mut candidates: Vec<f64> = curve.known_singular_raw().into_iter().filter(|&t| inside(t)).collect();

    let h = (b - a) / SCAN_POINTS as f64;
    let grid: Vec<f64> = (0..=SCAN_POINTS).map(|i| a + h * i as f64).collect();
    let speeds: Vec<f64> = grid.iter().map(|&t| speed(curve, t)).collect();
    let slow = 0.05 * speeds.iter().cloned().fold(0.0, f64::max);
    for i in 1..SCAN_POINTS {
        if speeds[i] < slow && speeds[i] < speeds[i - 1] && speeds[i] <= speeds[i + 1] {
            let t = golden_min(|t| speed(curve, t), grid[i - 1], grid[i + 1]);
            if inside(t) {
                candidates.push(t);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|x, y| (*x - *y).abs() <= 10.0 * CUSP_DIFF_STEP);
    candidates.retain(|&t| speed(curve, t) < tol && ratio_collapses(curve, t, (b - a).min(2.0 * (t - a)).min(2.0 * (b - t))));
    candidates
}

fn speed(curve: &Curve, t: f64) -> f64 {
    let h = CUSP_DIFF_STEP;
    (curve.raw_point(t + h) - curve.raw_point(t - h)).norm() / (2.0 * h)
}

/// Chord over arc for the window `[t - r, t + r]` at shrinking radii; a cusp
/// folds the two sides together so the ratio decays to zero.
fn ratio_collapses(curve: &Curve, t: f64, span: f64) -> bool {
    let mut r = 0.5 * span;
    let mut previous = f64::INFINITY;
    let mut last = f64::INFINITY;
    let resolvable = 1e-10 * curve.length();
    for _ in 0..8 {
        r *= 0.5;
        let chord = curve.raw_point(t + r).distance(curve.raw_point(t - r));
        let arc = curve.arc_of_raw(t + r) - curve.arc_of_raw(t - r);
        if !(arc > resolvable) {
            break;
        }
        let ratio = chord / arc;
        if ratio > previous * (1.0 + 1e-9) {
            return false;
        }
        previous = ratio;
        last = ratio;
    }
    last < 0.1
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Builtin, Curve};
    use crate::defaults::CUSP_SPEED_TOL;

    #[test]
    fn spinode_and_rhamphoid_have_one_cusp_at_zero() {
        for c in [Curve::spinode().unwrap(), Curve::rhamphoid().unwrap()] {
            assert_eq!(detect_cusps(&c, CUSP_SPEED_TOL), vec![0.0]);
        }
    }

    #[test]
    fn higher_cusp_family_member() {
        let c = Curve::builtin(Builtin::CuspFamily { n: 2, m: 3, t_max: 1.0 }, 1.0).unwrap();
        assert_eq!(detect_cusps(&c, CUSP_SPEED_TOL), vec![0.0]);
    }

    #[test]
    fn regular_curves_have_none() {
        assert!(detect_cusps(&Curve::circle(1.0).unwrap(), CUSP_SPEED_TOL).is_empty());
        assert!(detect_cusps(&Curve::angle(1.0, 10.0).unwrap(), CUSP_SPEED_TOL).is_empty());
        let e = Curve::builtin(Builtin::Ellipse { a: 3.0, b: 0.2 }, 1.0).unwrap();
        assert!(detect_cusps(&e, CUSP_SPEED_TOL).is_empty());
    }
}

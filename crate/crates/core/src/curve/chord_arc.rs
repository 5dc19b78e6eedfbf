//! Chord-arc constant: the infimum of chord over geodesic distance.

use super::{cusps::detect_cusps, ChainLink, Curve, CurveSource};
use crate::defaults::{CUSP_SPEED_TOL, DIAGONAL_FLOOR, POINT_MATCH_TOL, SELF_INTERSECTION_SEPARATION, STRAIGHT_SNAP};
use crate::error::{domain, Result};
use crate::point::{turning_angle, Point2};
use rayon::prelude::*;
use serde::Serialize;

/// Points per axis in a refinement window.
const WINDOW_POINTS: i32 = 9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChordArcEstimate {
    /// The chord-arc constant: the refined estimate combined with the local
    /// limits at corners, and zero when a cusp or self-intersection is found.
    pub value: f64,
    /// Grid-and-refinement estimate over pairs away from the diagonal.
    pub estimate: f64,
    /// Estimate after the coarse grid and after each refinement level.
    pub levels: Vec<f64>,
    pub argmin: (f64, f64),
    /// Smallest tangent-turning limit over the singular points, with its location.
    pub local_limit: Option<(f64, f64)>,
    /// Arc-length positions of detected cusps.
    pub cusps: Vec<f64>,
    pub self_intersection: bool,
}

impl ChordArcEstimate {
    pub fn is_degenerate(&self) -> bool {
        self.self_intersection || !self.cusps.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    ratio: f64,
    s: f64,
    t: f64,
}

impl Candidate {
    const NONE: Candidate = Candidate { ratio: f64::INFINITY, s: f64::NAN, t: f64::NAN };

    fn better(self, other: Candidate) -> Candidate {
        let key = |c: &Candidate| (c.ratio, c.s, c.t);
        let (a, b) = (key(&self), key(&other));
        let ord = a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2));
        if ord.is_le() {
            self
        } else {
            other
        }
    }
}

/// Estimates `c(curve)` from an `m`-point arc-length grid refined `levels`
/// times around the running minimizer.
pub fn chord_arc_constant(curve: &Curve, m: usize, levels: usize) -> Result<ChordArcEstimate> {
    if m < 16 {
        return Err(domain(format!("chord-arc grid needs at least 16 points, got {m}")));
    }
    let length = curve.length();
    let floor = DIAGONAL_FLOOR * length;
    let grid = grid_params(curve, m);
    let points: Vec<Point2> = grid.iter().map(|&s| curve.point_at(s)).collect();

    let separation = SELF_INTERSECTION_SEPARATION * length;
    let (best, touching) = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut best = Candidate::NONE;
            let mut touching = false;
            for j in i + 1..grid.len() {
                let geo = curve.geodesic_unchecked(grid[i], grid[j]);
                if geo < floor {
                    continue;
                }
                let chord = points[i].distance(points[j]);
                if chord < POINT_MATCH_TOL && geo > separation {
                    touching = true;
                }
                best = best.better(Candidate { ratio: chord / geo, s: grid[i], t: grid[j] });
            }
            (best, touching)
        })
        .reduce(|| (Candidate::NONE, false), |a, b| (a.0.better(b.0), a.1 || b.1));

    let self_intersection = touching || polyline_crosses(&points, curve.is_loop());

    let mut best = best;
    let mut trail = vec![best.ratio.min(1.0)];
    let mut hs = local_spacing(&grid, best.s);
    let mut ht = local_spacing(&grid, best.t);
    for _ in 0..levels {
        let (s0, t0) = (best.s, best.t);
        hs *= 0.5;
        ht *= 0.5;
        let half = WINDOW_POINTS / 2;
        let ss: Vec<f64> = (-half..=half).filter_map(|k| clamp_param(curve, s0 + hs * k as f64)).collect();
        let ts: Vec<f64> = (-half..=half).filter_map(|k| clamp_param(curve, t0 + ht * k as f64)).collect();
        let ps: Vec<Point2> = ss.iter().map(|&s| curve.point_at(s)).collect();
        let pt: Vec<Point2> = ts.iter().map(|&t| curve.point_at(t)).collect();
        for (i, &s) in ss.iter().enumerate() {
            for (j, &t) in ts.iter().enumerate() {
                let geo = curve.geodesic_unchecked(s, t);
                if geo < floor {
                    continue;
                }
                let (a, b) = if s <= t { (s, t) } else { (t, s) };
                best = best.better(Candidate { ratio: ps[i].distance(pt[j]) / geo, s: a, t: b });
            }
        }
        trail.push(best.ratio.min(1.0));
    }
    let estimate = *trail.last().unwrap();

    let local_limit = curve
        .singular_points()
        .into_iter()
        .map(|p| (p, turning_limit(curve, p)))
        .min_by(|a, b| a.1.total_cmp(&b.1));

    let cusps: Vec<f64> = detect_cusps(curve, CUSP_SPEED_TOL).into_iter().map(|t| curve.arc_of_raw(t)).collect();

    let mut value = if estimate > 1.0 - STRAIGHT_SNAP { 1.0 } else { estimate };
    let mut argmin = (best.s, best.t);
    if let Some((p, lim)) = local_limit {
        if lim < value && lim <= 1.0 - STRAIGHT_SNAP {
            value = lim;
            argmin = (p, p);
        }
    }
    if let Some(&p) = cusps.first() {
        value = 0.0;
        argmin = (p, p);
    }
    if self_intersection {
        value = 0.0;
    }
    Ok(ChordArcEstimate { value, estimate, levels: trail, argmin, local_limit, cusps, self_intersection })
}

/// Coarse grid: `m` uniform arc-length nodes, plus `m` nodes on every finite
/// link of a chained curve so a short core between long rays is resolved, plus
/// the singular points themselves.
fn grid_params(curve: &Curve, m: usize) -> Vec<f64> {
    let (lo, hi) = curve.domain();
    let count = if curve.is_loop() { m } else { m + 1 };
    let h = (hi - lo) / m as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| lo + h * i as f64).collect();
    if let CurveSource::Chain(links) = curve.source() {
        let mut start = lo;
        for link in links {
            let len = link.length();
            if !matches!(link, ChainLink::Straight { .. }) && len > 0.0 {
                grid.extend((0..=m).map(|i| start + len * i as f64 / m as f64));
            }
            start += len;
        }
    }
    grid.extend(curve.singular_points());
    grid.retain(|&s| s >= lo && s <= hi && !(curve.is_loop() && s >= hi));
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (hi - lo));
    grid
}

fn local_spacing(grid: &[f64], s: f64) -> f64 {
    let i = grid.partition_point(|&g| g < s);
    let mut h = f64::INFINITY;
    if i > 0 {
        h = h.min(s - grid[i - 1]);
    }
    if i + 1 < grid.len() {
        h = h.min(grid[i + 1] - s);
    }
    if i < grid.len() && grid[i] > s {
        h = h.min(grid[i] - s);
    }
    if !h.is_finite() || h <= 0.0 {
        h = (grid[grid.len() - 1] - grid[0]) / grid.len() as f64;
    }
    h
}

fn clamp_param(curve: &Curve, s: f64) -> Option<f64> {
    if curve.is_loop() {
        return Some(s);
    }
    let (lo, hi) = curve.domain();
    (s >= lo && s <= hi).then_some(s)
}

/// Limit of the chord-arc ratio for pairs shrinking onto `s`: `cos(theta/2)`
/// for a tangent turning by `theta`.
fn turning_limit(curve: &Curve, s: f64) -> f64 {
    let step = 1e-9 * curve.length().max(1.0);
    let before = curve.one_sided_tangent(s, step, false);
    let after = curve.one_sided_tangent(s, step, true);
    (0.5 * turning_angle(before, after)).cos().clamp(0.0, 1.0)
}

/// Whether two non-adjacent edges of the sample polyline cross.
fn polyline_crosses(points: &[Point2], closed: bool) -> bool {
    let n = points.len();
    let edges = if closed { n } else { n - 1 };
    let edge = |k: usize| (points[k], points[(k + 1) % n]);
    (0..edges).into_par_iter().any(|a| {
        (a + 2..edges).any(|b| {
            if closed && a == 0 && b == edges - 1 {
                return false;
            }
            let (p, q) = edge(a);
            let (r, s) = edge(b);
            segments_cross(p, q, r, s)
        })
    })
}

/// Proper crossing; orientations within rounding of zero (collinear pieces of
/// one straight edge) do not count.
fn segments_cross(p: Point2, q: Point2, r: Point2, s: Point2) -> bool {
    let eps = 1e-12 * (q - p).norm() * (s - r).norm();
    let d1 = (q - p).cross(r - p);
    let d2 = (q - p).cross(s - p);
    let d3 = (s - r).cross(p - r);
    let d4 = (s - r).cross(q - r);
    let strict = |a: f64, b: f64| a.abs() > eps && b.abs() > eps && a * b < 0.0;
    strict(d1, d2) && strict(d3, d4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Builtin;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn line_is_exactly_one() {
        let c = chord_arc_constant(&Curve::line(100.0).unwrap(), 64, 6).unwrap();
        assert_eq!(c.value, 1.0);
    }

    #[test]
    fn angles_give_half_angle_sine() {
        for beta in [PI / 6.0, PI / 3.0, FRAC_PI_2, 2.0 * PI / 3.0, PI] {
            let c = chord_arc_constant(&Curve::angle(beta, 1.0).unwrap(), 128, 6).unwrap();
            assert!((c.value - (0.5 * beta).sin()).abs() <= 1e-6, "beta {beta}: {}", c.value);
        }
    }

    #[test]
    fn circle_is_two_over_pi() {
        let c = chord_arc_constant(&Curve::circle(3.0).unwrap(), 128, 6).unwrap();
        assert!((c.value - 2.0 / PI).abs() < 1e-4);
        assert!(!c.is_degenerate());
    }

    #[test]
    fn spinode_refinement_decreases_and_flags_cusp() {
        let c = chord_arc_constant(&Curve::spinode().unwrap(), 128, 6).unwrap();
        assert_eq!(c.levels.len(), 7);
        for w in c.levels.windows(2) {
            assert!(w[1] < w[0], "{:?}", c.levels);
        }
        assert!(c.estimate <= 0.05);
        assert_eq!(c.cusps.len(), 1);
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn figure_eight_is_self_intersecting() {
        let pts: Vec<Point2> = (0..200)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 200.0;
                Point2::new(t.sin(), (2.0 * t).sin() / 2.0)
            })
            .collect();
        let c = chord_arc_constant(&Curve::polyline(pts, true).unwrap(), 64, 2).unwrap();
        assert!(c.self_intersection);
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn square_corner_limit() {
        let sq = Curve::polyline(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)],
            true,
        )
        .unwrap();
        let c = chord_arc_constant(&sq, 64, 6).unwrap();
        let corner = FRAC_PI_2 / 2.0;
        assert!((c.local_limit.unwrap().1 - corner.sin()).abs() < 1e-9);
        assert!(c.value <= corner.sin() + 1e-12);
    }

    #[test]
    fn ellipse_estimate_is_below_one() {
        let e = Curve::builtin(Builtin::Ellipse { a: 2.0, b: 1.0 }, 1.0).unwrap();
        let c = chord_arc_constant(&e, 64, 4).unwrap();
        assert!(c.value > 0.0 && c.value < 2.0 / PI);
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(chord_arc_constant(&Curve::circle(1.0).unwrap(), 8, 1).is_err());
    }
}

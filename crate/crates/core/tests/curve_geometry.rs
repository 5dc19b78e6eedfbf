use leaky_core::curve::{
    arc_length_reparametrize, chord_arc_constant, detect_cusps, extend_piece, fit_a2, split_at, straightness_deficit,
};
use leaky_core::{Builtin, Curve, CurveKind, Error, ExtensionStrategy, Point2};
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::Arc;

fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    let m = 2000;
    let h = TAU / m as f64;
    (0..m).map(|k| k as f64 * h).map(|t| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt()).sum::<f64>() * h
}

/// Minimum chord/arc ratio over all pairs of `m` equally spaced points.
fn brute_force_chord_arc(curve: &Curve, m: usize) -> f64 {
    let (lo, hi) = curve.domain();
    let s: Vec<f64> = (0..m).map(|k| lo + (hi - lo) * k as f64 / (m - 1) as f64).collect();
    let p: Vec<Point2> = s.iter().map(|&x| curve.point_at(x)).collect();
    let mut best: f64 = 1.0;
    for i in 0..m {
        for j in i + 1..m {
            let arc = curve.geodesic_distance(s[i], s[j]).unwrap();
            if arc > 1e-12 {
                best = best.min(p[i].distance(p[j]) / arc);
            }
        }
    }
    best
}

#[test]
fn ellipse_length_and_reparametrization() {
    let curve = Curve::builtin(Builtin::Ellipse { a: 2.0, b: 0.7 }, 1.0).unwrap();
    let want = ellipse_perimeter(2.0, 0.7);
    assert!((curve.length() - want).abs() < 1e-10 * want);
    let samples = arc_length_reparametrize(&curve, 400).unwrap();
    let gaps: Vec<f64> = samples.points.windows(2).map(|w| w[0].distance(w[1])).collect();
    // Equal arcs of length h have chords short by at most h^3 k^2 / 24.
    let kmax = 2.0 / (0.7 * 0.7);
    let h = samples.spacing;
    for g in gaps {
        assert!(g <= h * (1.0 + 1e-12) && h - g <= 1.5 * h.powi(3) * kmax * kmax / 24.0, "chord {g}, spacing {h}");
    }
}

#[test]
fn loop_geodesic_wraps() {
    let circle = Curve::circle(1.0).unwrap();
    let d = circle.geodesic_distance(0.1, TAU - 0.1).unwrap();
    assert!((d - 0.2).abs() < 1e-12);
    let line = Curve::line(10.0).unwrap();
    assert!((line.geodesic_distance(-3.0, 4.0).unwrap() - 7.0).abs() < 1e-12);
    assert!(matches!(line.geodesic_distance(-11.0, 0.0), Err(Error::Domain(_))));
}

#[test]
fn chord_arc_against_brute_force() {
    let curves = [
        Curve::builtin(Builtin::Ellipse { a: 2.0, b: 0.7 }, 1.0).unwrap(),
        Curve::builtin(Builtin::CircularArc { radius: 1.0, sweep: 4.0 }, 1.0).unwrap(),
        Curve::builtin(Builtin::Parabola { a: 0.5 }, 4.0).unwrap(),
    ];
    for curve in curves {
        let est = chord_arc_constant(&curve, 128, 6).unwrap();
        let brute = brute_force_chord_arc(&curve, 1200);
        assert!(est.value <= brute + 1e-9, "{curve}: {} above {brute}", est.value);
        assert!(brute - est.value < 2e-3, "{curve}: {} vs {brute}", est.value);
    }
}

#[test]
fn chord_arc_of_corners() {
    let square = Curve::polyline(
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)],
        true,
    )
    .unwrap();
    // Midpoints of opposite sides: chord 1, arc 2.
    let est = chord_arc_constant(&square, 128, 6).unwrap();
    assert!((est.value - 0.5).abs() < 1e-9, "{}", est.value);
    let corner = Curve::polyline(vec![Point2::new(1.0, 0.0), Point2::ORIGIN, Point2::new(0.0, 1.0)], false).unwrap();
    assert!((chord_arc_constant(&corner, 128, 6).unwrap().value - FRAC_1_SQRT_2).abs() < 1e-9);
    assert_eq!(square.singular_points().len(), 4);
}

#[test]
fn polyline_and_sampled_circles_agree() {
    let m = 720;
    let pts: Vec<Point2> = (0..m).map(|k| Point2::from_angle(TAU * k as f64 / m as f64)).collect();
    let mut samples: Vec<(f64, Point2)> = pts.iter().enumerate().map(|(k, &p)| (k as f64, p)).collect();
    samples.push((m as f64, pts[0]));
    let poly = Curve::polyline(pts, true).unwrap();
    let sampled = Curve::sampled(samples, true).unwrap();
    assert!((poly.length() - TAU).abs() < 1e-4);
    assert!((sampled.length() - TAU).abs() < 1e-4);
    for curve in [poly, sampled] {
        let c = chord_arc_constant(&curve, 128, 4).unwrap().value;
        assert!((c - 2.0 / PI).abs() < 1e-3, "{curve}: {c}");
    }
}

#[test]
fn cusps_are_found_only_where_present() {
    for (n, m) in [(1, 1), (1, 2), (2, 3)] {
        let curve = Curve::builtin(Builtin::CuspFamily { n, m, t_max: 1.0 }, 1.0).unwrap();
        let cusps = detect_cusps(&curve, 1e-8);
        assert_eq!(cusps.len(), 1, "n = {n}, m = {m}");
        assert!(cusps[0].abs() < 1e-6);
        let est = chord_arc_constant(&curve, 128, 6).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.is_degenerate());
    }
    for curve in [Curve::circle(2.0).unwrap(), Curve::angle(1.0, 5.0).unwrap()] {
        assert!(detect_cusps(&curve, 1e-8).is_empty(), "{curve}");
    }
}

#[test]
fn self_intersection_zeroes_the_constant() {
    let figure_eight = Curve::polyline(
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
        true,
    )
    .unwrap();
    let est = chord_arc_constant(&figure_eight, 64, 3).unwrap();
    assert!(est.self_intersection);
    assert_eq!(est.value, 0.0);
}

#[test]
fn angle_splits_into_straight_pieces() {
    let angle = Arc::new(Curve::angle(PI / 3.0, 20.0).unwrap());
    let singular = angle.singular_points();
    assert_eq!(singular.len(), 1);
    let mut parts = split_at(&angle, &singular).unwrap();
    assert_eq!(parts.piece_count(), 2);
    parts.extend_all(&ExtensionStrategy::TangentRays { truncation: 20.0 }).unwrap();
    for c in parts.constants().unwrap() {
        assert_eq!(c, 1.0);
    }
}

#[test]
fn closed_loop_extension_of_an_arc() {
    let arc = Arc::new(Curve::builtin(Builtin::CircularArc { radius: 1.0, sweep: 2.0 }, 1.0).unwrap());
    let (closed, est) = extend_piece(&arc, &ExtensionStrategy::CloseLoop).unwrap();
    assert!(closed.is_loop());
    assert!(est.value > 0.0 && est.value <= 1.0);
    let (lo, hi) = arc.domain();
    for s in [lo, 0.5 * (lo + hi), hi] {
        assert!(closed.point_at(s).distance(arc.point_at(s)) < 1e-9);
    }
}

#[test]
fn straightness_at_infinity() {
    let line = Curve::line(100.0).unwrap();
    assert_eq!(straightness_deficit(&line, -50.0, 30.0).unwrap(), 0.0);
    assert!(fit_a2(&line, 0.5).unwrap().consistent);
    let angle = Curve::angle(PI / 2.0, 100.0).unwrap();
    let d = straightness_deficit(&angle, -10.0, 10.0).unwrap();
    assert!((d - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-9);
    // Same-side pairs far out on a parabola straighten.
    assert!(fit_a2(&Curve::builtin(Builtin::Parabola { a: 1.0 }, 100.0).unwrap(), 0.5).unwrap().consistent);
    assert!(fit_a2(&Curve::circle(1.0).unwrap(), 0.5).is_err());
    assert!(matches!(Curve::line(100.0).unwrap().kind(), CurveKind::Infinite { .. }));
}

fn transformed(points: &[Point2], angle: f64, shift: Point2, scale: f64) -> Vec<Point2> {
    let (s, c) = angle.sin_cos();
    points.iter().map(|p| Point2::new(c * p.x - s * p.y, s * p.x + c * p.y) * scale + shift).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chord_arc_is_a_similarity_invariant(
        angle in 0.0f64..TAU,
        dx in -10.0f64..10.0,
        dy in -10.0f64..10.0,
        scale in 0.1f64..10.0,
        bend in 0.3f64..2.5,
    ) {
        let base = vec![Point2::new(-1.0, 0.0), Point2::new(0.0, 0.0), Point2::new(bend.cos(), bend.sin()), Point2::new(2.0, 2.0)];
        let a = chord_arc_constant(&Curve::polyline(base.clone(), false).unwrap(), 64, 4).unwrap().value;
        let moved = transformed(&base, angle, Point2::new(dx, dy), scale);
        let b = chord_arc_constant(&Curve::polyline(moved, false).unwrap(), 64, 4).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn refinement_never_increases(a in 0.5f64..3.0, b in 0.5f64..3.0) {
        let est = chord_arc_constant(&Curve::builtin(Builtin::Ellipse { a, b }, 1.0).unwrap(), 32, 5).unwrap();
        prop_assert!(est.levels.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(est.value <= est.levels[0]);
    }
}

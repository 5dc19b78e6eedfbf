//! Quadrature nodes and weights on a curve (or a union of curves).

use crate::curve::{Curve, CurveKind, EndKind};
use crate::error::{domain, Error, Result};
use crate::point::Point2;
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DomainTag {
    LoopPeriodic { length: f64 },
    TruncatedLine { truncation: f64 },
    Segment { length: f64 },
    /// Several curves discretized together (a graph).
    Union { parts: usize },
}

/// Treatment of the logarithmic singularity on the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum DiagonalRule {
    /// Locally corrected trapezoidal weight: the node's self-term carries the
    /// zeta-function correction of the logarithm, so the rule keeps the order
    /// of the off-diagonal quadrature.
    #[default]
    Corrected,
    /// Exact integral of the kernel over the node's own panel, the logarithm
    /// integrated in closed form and the remainder by Gauss-Legendre of the given order.
    PanelIntegral { order: usize },
}

/// How nodes are spread over a stretch between breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Grading {
    Uniform,
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone)]
pub struct Discretization {
    /// Arc-length parameters on the owning curve.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub points: Vec<Point2>,
    /// Index into `curves` of the curve each node lies on.
    pub part: Vec<usize>,
    pub curves: Vec<Arc<Curve>>,
    pub domain: DomainTag,
    pub rule: DiagonalRule,
}

impl Discretization {
    /// `n` nodes on `curve`. Smooth loops use the periodic trapezoidal rule.
    /// Otherwise the domain is cut at singular points, and each stretch gets a
    /// midpoint rule in a graded variable that clusters nodes at corners, cusps
    /// and free ends; truncation ends are left uniform.
    pub fn new(curve: &Arc<Curve>, n: usize, rule: DiagonalRule) -> Result<Self> {
        if n < 8 {
            return Err(domain(format!("at least 8 nodes required, got {n}")));
        }
        if let DiagonalRule::PanelIntegral { order } = rule {
            if order == 0 {
                return Err(domain("panel quadrature order must be positive"));
            }
        }
        let (lo, hi) = curve.domain();
        let length = hi - lo;
        let singular = curve.singular_points();
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);

        if curve.is_loop() && singular.is_empty() {
            let h = length / n as f64;
            nodes.extend((0..n).map(|j| lo + h * j as f64));
            weights.resize(n, h);
        } else {
            let mut stretches: Vec<(f64, f64, Grading)> = Vec::new();
            if curve.is_loop() {
                for (k, &a) in singular.iter().enumerate() {
                    let b = if k + 1 < singular.len() { singular[k + 1] } else { singular[0] + length };
                    stretches.push((a, b, Grading::Both));
                }
            } else {
                let mut cuts = vec![lo];
                cuts.extend(singular.iter().copied());
                cuts.push(hi);
                let last = cuts.len() - 2;
                let [start_end, finish_end] = curve.ends();
                for k in 0..=last {
                    let left = k > 0 || start_end == EndKind::Free;
                    let right = k < last || finish_end == EndKind::Free;
                    let grading = match (left, right) {
                        (true, true) => Grading::Both,
                        (true, false) => Grading::Left,
                        (false, true) => Grading::Right,
                        (false, false) => Grading::Uniform,
                    };
                    stretches.push((cuts[k], cuts[k + 1], grading));
                }
            }
            let counts = allocate(&stretches.iter().map(|s| s.1 - s.0).collect::<Vec<_>>(), n);
            for (&(a, b, grading), &m) in stretches.iter().zip(&counts) {
                graded_midpoints(a, b, m, grading, &mut nodes, &mut weights);
            }
        }
        let points: Vec<Point2> = nodes.iter().map(|&s| curve.point_at(s)).collect();
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateCurve("non-finite node on curve".into()));
        }
        let domain = match curve.kind() {
            CurveKind::Loop { length } => DomainTag::LoopPeriodic { length },
            CurveKind::Infinite { truncation } => DomainTag::TruncatedLine { truncation },
            CurveKind::Segment { length } => DomainTag::Segment { length },
        };
        let count = nodes.len();
        Ok(Self { nodes, weights, points, part: vec![0; count], curves: vec![Arc::clone(curve)], domain, rule })
    }

    /// Concatenates discretizations of several curves.
    pub fn union(parts: Vec<Discretization>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(domain("union of no discretizations"));
        };
        let rule = first.rule;
        if parts.iter().any(|p| p.rule != rule) {
            return Err(domain("all parts must share the diagonal rule"));
        }
        let count = parts.len();
        let mut out = Self {
            nodes: Vec::new(),
            weights: Vec::new(),
            points: Vec::new(),
            part: Vec::new(),
            curves: Vec::new(),
            domain: DomainTag::Union { parts: count },
            rule,
        };
        for p in parts {
            let offset = out.curves.len();
            out.nodes.extend(p.nodes);
            out.weights.extend(p.weights);
            out.points.extend(p.points);
            out.part.extend(p.part.into_iter().map(|k| k + offset));
            out.curves.extend(p.curves);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest weight, the effective mesh width for resolution checks.
    pub fn max_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    /// Distance along the owning curve, when both nodes lie on the same one.
    pub fn geodesic(&self, i: usize, j: usize) -> Option<f64> {
        (self.part[i] == self.part[j]).then(|| self.curves[self.part[i]].geodesic_unchecked(self.nodes[i], self.nodes[j]))
    }
}

/// Splits `n` nodes over stretches in proportion to their lengths, at least
/// four per stretch.
fn allocate(lengths: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = lengths.iter().sum();
    let mut counts: Vec<usize> = lengths.iter().map(|l| ((l / total) * n as f64).floor().max(4.0) as usize).collect();
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by(|&a, &b| lengths[b].total_cmp(&lengths[a]));
    let mut assigned: usize = counts.iter().sum();
    let mut k = 0;
    while assigned < n {
        counts[order[k % order.len()]] += 1;
        assigned += 1;
        k += 1;
    }
    while assigned > n && counts.iter().any(|&c| c > 4) {
        let i = order[k % order.len()];
        if counts[i] > 4 {
            counts[i] -= 1;
            assigned -= 1;
        }
        k += 1;
    }
    counts
}

/// Cubic Kress sigmoid `x^3 / (x^3 + (1 - x)^3)`.
fn kress(x: f64) -> f64 {
    let a = x * x * x;
    a / (1.0 - 3.0 * x + 3.0 * x * x)
}

/// Ramp map on `[0, 1]` with `v' = 2 kress`: nodes cluster at 0 and the
/// spacing at 1 joins a uniform mesh with two matching derivatives.
fn ramp(sigma: f64) -> (f64, f64) {
    let d = 1.0 - 3.0 * sigma + 3.0 * sigma * sigma;
    let v = 2.0 * (sigma * sigma / 6.0 + sigma / 3.0 + d.ln() / 9.0);
    (v, 2.0 * kress(sigma))
}

/// Midpoint nodes on `[a, b]`, with a ramp-graded stretch at each graded end
/// and a uniform mesh between of the same spacing.
fn graded_midpoints(a: f64, b: f64, m: usize, grading: Grading, nodes: &mut Vec<f64>, weights: &mut Vec<f64>) {
    let len = b - a;
    let (left, right) = match grading {
        Grading::Uniform => (false, false),
        Grading::Left => (true, false),
        Grading::Right => (false, true),
        Grading::Both => (true, true),
    };
    let k = left as usize + right as usize;
    let m_g = if k == 0 { 0 } else { ((2 * m) as f64 / (4 + k) as f64).round().max(1.0) as usize };
    let m_u = m - k * m_g;
    let ramp_len = len * m_g as f64 / (2 * m_u + k * m_g) as f64;
    let ramp_nodes: Vec<(f64, f64)> = (0..m_g)
        .map(|j| {
            let (v, dv) = ramp((j as f64 + 0.5) / m_g as f64);
            (ramp_len * v, ramp_len * dv / m_g as f64)
        })
        .collect();
    if left {
        for &(x, w) in &ramp_nodes {
            nodes.push(a + x);
            weights.push(w);
        }
    }
    let ua = if left { a + ramp_len } else { a };
    let ub = if right { b - ramp_len } else { b };
    if m_u > 0 {
        let h = (ub - ua) / m_u as f64;
        for j in 0..m_u {
            nodes.push(ua + h * (j as f64 + 0.5));
            weights.push(h);
        }
    }
    if right {
        for &(x, w) in ramp_nodes.iter().rev() {
            nodes.push(b - x);
            weights.push(w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Builtin;
    use std::f64::consts::{PI, TAU};

    fn total_matches(c: Curve, n: usize) {
        let c = Arc::new(c);
        let d = Discretization::new(&c, n, DiagonalRule::Corrected).unwrap();
        assert_eq!(d.len(), n);
        assert!(d.weights.iter().all(|&w| w > 0.0));
        let rel = (d.total_weight() - c.length()).abs() / c.length();
        assert!(rel <= 1e-10, "{c}: relative weight error {rel}");
        for w in d.nodes.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn weights_sum_to_length() {
        total_matches(Curve::circle(1.0).unwrap(), 64);
        total_matches(Curve::angle(PI / 3.0, 100.0).unwrap(), 512);
        total_matches(Curve::line(50.0).unwrap(), 100);
        total_matches(Curve::spinode().unwrap(), 256);
        total_matches(Curve::builtin(Builtin::CircularArc { radius: 1.0, sweep: 2.0 }, 1.0).unwrap(), 200);
        total_matches(
            Curve::polyline(vec![Point2::ORIGIN, Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)], true)
                .unwrap(),
            128,
        );
    }

    #[test]
    fn smooth_loop_is_uniform() {
        let c = Arc::new(Curve::circle(2.0).unwrap());
        let d = Discretization::new(&c, 32, DiagonalRule::Corrected).unwrap();
        assert!(d.weights.iter().all(|&w| (w - 2.0 * TAU / 32.0).abs() < 1e-15));
        assert!(matches!(d.domain, DomainTag::LoopPeriodic { .. }));
    }

    #[test]
    fn corners_are_graded() {
        let c = Arc::new(Curve::angle(PI / 2.0, 10.0).unwrap());
        let d = Discretization::new(&c, 200, DiagonalRule::Corrected).unwrap();
        let near = d.nodes.iter().zip(&d.weights).filter(|(s, _)| s.abs() < 0.1).map(|(_, w)| *w).fold(f64::INFINITY, f64::min);
        assert!(near < 1e-3 * 20.0 / 200.0);
        assert!(matches!(d.domain, DomainTag::TruncatedLine { truncation } if truncation == 10.0));
    }

    #[test]
    fn union_tracks_parts() {
        let a = Arc::new(Curve::circle(1.0).unwrap());
        let b = Arc::new(Curve::line(5.0).unwrap());
        let u = Discretization::union(vec![
            Discretization::new(&a, 16, DiagonalRule::Corrected).unwrap(),
            Discretization::new(&b, 20, DiagonalRule::Corrected).unwrap(),
        ])
        .unwrap();
        assert_eq!(u.len(), 36);
        assert_eq!(u.part[15], 0);
        assert_eq!(u.part[16], 1);
        assert!(u.geodesic(0, 20).is_none());
        assert!(u.geodesic(16, 20).is_some());
    }

    #[test]
    fn rejects_small_n() {
        let c = Arc::new(Curve::circle(1.0).unwrap());
        assert!(Discretization::new(&c, 4, DiagonalRule::Corrected).is_err());
    }
}

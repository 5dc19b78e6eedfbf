//! Leaky quantum graphs: finitely many curves meeting only at their ends.

use super::composite_bound;
use super::report::{BoundKind, PieceReport, SpectralReport};
use crate::curve::{arc_length_reparametrize, extend_piece, ChordArcEstimate, Curve, CurveKind, EndKind, ExtensionStrategy};
use crate::defaults::POINT_MATCH_TOL;
use crate::error::{Error, Result};
use crate::point::Point2;
use rayon::prelude::*;
use std::sync::Arc;

/// Samples per edge for the intersection check.
const EDGE_SAMPLES: usize = 256;

#[derive(Debug, Clone)]
pub struct GraphEdge {
    pub curve: Arc<Curve>,
    pub extension: ExtensionStrategy,
}

#[derive(Debug, Clone)]
pub struct LeakyGraph {
    pub vertices: Vec<Point2>,
    pub edges: Vec<GraphEdge>,
}

impl LeakyGraph {
    /// Checks that every free edge end sits on a vertex and that edges meet
    /// only at shared vertices (at the resolution of the edge samples).
    pub fn new(vertices: Vec<Point2>, edges: Vec<GraphEdge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidGraph("graph has no edges".into()));
        }
        let scale = edges.iter().map(|e| e.curve.length()).fold(0.0, f64::max).max(1.0);
        let tol = POINT_MATCH_TOL * scale;
        let vertex_of = |p: Point2| vertices.iter().position(|v| v.distance(p) <= tol);
        let mut ends = Vec::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            if e.curve.is_loop() {
                return Err(Error::InvalidGraph(format!("edge {k} is a closed curve")));
            }
            let (lo, hi) = e.curve.domain();
            let mut pair = [None, None];
            for (side, s) in [lo, hi].into_iter().enumerate() {
                if e.curve.ends()[side] == EndKind::Free {
                    let v = vertex_of(e.curve.point_at(s)).ok_or_else(|| {
                        Error::InvalidGraph(format!("edge {k} ends at a point that is not a vertex"))
                    })?;
                    pair[side] = Some(v);
                }
            }
            ends.push(pair);
        }
        let samples: Vec<Vec<Point2>> = edges
            .iter()
            .map(|e| arc_length_reparametrize(&e.curve, EDGE_SAMPLES).map(|s| s.points))
            .collect::<Result<_>>()?;
        for a in 0..edges.len() {
            for b in a + 1..edges.len() {
                let shared: Vec<Point2> = ends[a]
                    .iter()
                    .flatten()
                    .filter(|v| ends[b].iter().flatten().any(|w| w == *v))
                    .map(|&v| vertices[v])
                    .collect();
                if edges_touch(&samples[a], &samples[b], &shared, tol) {
                    return Err(Error::InvalidGraph(format!("edges {a} and {b} intersect away from a shared vertex")));
                }
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Equal-angle star of `arms` rays of length `truncation` from the origin.
    pub fn star(arms: usize, truncation: f64) -> Result<Self> {
        let edges = (0..arms)
            .map(|k| {
                let angle = std::f64::consts::TAU * k as f64 / arms as f64;
                let ray = Curve::builtin(crate::curve::Builtin::Ray { origin: Point2::ORIGIN, angle }, truncation)?;
                Ok(GraphEdge { curve: Arc::new(ray), extension: ExtensionStrategy::TangentRays { truncation } })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vec![Point2::ORIGIN], edges)
    }

    pub fn has_unbounded_edge(&self) -> bool {
        self.edges.iter().any(|e| matches!(e.curve.kind(), CurveKind::Infinite { .. }))
    }
}

fn edges_touch(a: &[Point2], b: &[Point2], shared: &[Point2], tol: f64) -> bool {
    // Sample segments touching a shared vertex are allowed to meet there.
    let near_shared = |p: Point2, q: Point2| shared.iter().any(|v| v.distance(p) <= tol || v.distance(q) <= tol);
    for i in 0..a.len() - 1 {
        let (p, q) = (a[i], a[i + 1]);
        if near_shared(p, q) {
            continue;
        }
        for j in 0..b.len() - 1 {
            let (r, s) = (b[j], b[j + 1]);
            if near_shared(r, s) {
                continue;
            }
            if segment_distance(p, q, r, s) <= tol {
                return true;
            }
        }
    }
    false
}

fn segment_distance(p: Point2, q: Point2, r: Point2, s: Point2) -> f64 {
    let d1 = (q - p).cross(r - p);
    let d2 = (q - p).cross(s - p);
    let d3 = (s - r).cross(p - r);
    let d4 = (s - r).cross(q - r);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment(p, r, s).min(point_segment(q, r, s)).min(point_segment(r, p, q)).min(point_segment(s, p, q))
}

fn point_segment(x: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    let t = if len2 > 0.0 { ((x - a).dot(d) / len2).clamp(0.0, 1.0) } else { 0.0 };
    x.distance(a + d * t)
}

/// Extends every edge and evaluates the composite bound with `N` = edge count.
pub fn graph_bound(graph: &LeakyGraph, alpha: f64) -> Result<SpectralReport> {
    let extended: Vec<(Curve, ChordArcEstimate)> = graph
        .edges
        .par_iter()
        .enumerate()
        .map(|(k, e)| {
            extend_piece(&e.curve, &e.extension)
                .map_err(|err| Error::GraphBoundUnavailable { edge: k, reason: err.to_string() })
        })
        .collect::<Result<_>>()?;
    let cs: Vec<f64> = extended.iter().map(|(_, est)| est.value).collect();
    let bound = composite_bound(alpha, &cs)?;
    let pieces = extended.iter().map(|(ext, est)| PieceReport { c: est.value, extension: ext.label() }).collect();
    let ess = if graph.has_unbounded_edge() { -alpha * alpha / 4.0 } else { 0.0 };
    Ok(SpectralReport {
        curve: format!("graph({} edges)", graph.edge_count()),
        alpha,
        ess_threshold: ess,
        ess_diagnostic_only: false,
        bound,
        bound_kind: BoundKind::Graph { n: graph.edge_count() },
        direct_bound: None,
        composite_bound: Some(bound),
        pieces,
        states: Vec::new(),
        diagnostics: Vec::new(),
    })
}

//! Cutting a curve into pieces and extending each piece to a curve with a
//! positive chord-arc constant.

use super::chord_arc::{chord_arc_constant, ChordArcEstimate};
use super::{ChainLink, Curve, CurveKind, EndKind};
use crate::defaults::{CHORD_ARC_GRID, EXTENSION_C_FLOOR, POINT_MATCH_TOL, REFINEMENT_LEVELS};
use crate::error::{domain, Error, Result};
use crate::point::Point2;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub enum ExtensionStrategy {
    /// Straight rays of length `truncation` along the end tangents at free ends.
    TangentRays { truncation: f64 },
    /// Close the piece into a loop with a C1 pair of circular arcs.
    CloseLoop,
    Explicit(Arc<Curve>),
}

#[derive(Debug, Clone)]
pub struct PieceEntry {
    pub piece: Arc<Curve>,
    pub extension: Option<Arc<Curve>>,
    pub chord_arc: Option<ChordArcEstimate>,
}

impl PieceEntry {
    pub fn c(&self) -> Option<f64> {
        self.chord_arc.as_ref().map(|e| e.value)
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub parent: Arc<Curve>,
    pub pieces: Vec<PieceEntry>,
}

impl Decomposition {
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Extends every piece with the same strategy.
    pub fn extend_all(&mut self, strategy: &ExtensionStrategy) -> Result<()> {
        for i in 0..self.pieces.len() {
            self.extend(i, strategy)?;
        }
        Ok(())
    }

    pub fn extend(&mut self, index: usize, strategy: &ExtensionStrategy) -> Result<()> {
        let entry = &mut self.pieces[index];
        let (ext, est) = extend_piece(&entry.piece, strategy).map_err(|e| match e {
            Error::ExtensionFailure { reason, .. } => {
                Error::ExtensionFailure { piece: format!("#{index} ({})", entry.piece.label()), reason }
            }
            other => other,
        })?;
        entry.extension = Some(Arc::new(ext));
        entry.chord_arc = Some(est);
        Ok(())
    }

    /// Chord-arc constants of the extensions, if all pieces are extended.
    pub fn constants(&self) -> Option<Vec<f64>> {
        self.pieces.iter().map(PieceEntry::c).collect()
    }
}

/// Cuts `curve` at the arc-length positions `params`. Open curves give
/// `params.len() + 1` pieces; loops give `params.len()` arcs, the last one
/// wrapping through the start.
pub fn split_at(curve: &Arc<Curve>, params: &[f64]) -> Result<Decomposition> {
    let (lo, hi) = curve.domain();
    if params.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("split parameters must be strictly increasing"));
    }
    let inside = |p: f64| if curve.is_loop() { p >= lo && p < hi } else { p > lo && p < hi };
    if let Some(p) = params.iter().find(|&&p| !inside(p)) {
        return Err(domain(format!("split parameter {p} outside ({lo}, {hi})")));
    }
    let mut bounds = Vec::new();
    if curve.is_loop() {
        if params.is_empty() {
            bounds.push((lo, hi));
        } else {
            for w in params.windows(2) {
                bounds.push((w[0], w[1]));
            }
            bounds.push((*params.last().unwrap(), params[0] + curve.length()));
        }
    } else {
        let mut cuts = vec![lo];
        cuts.extend_from_slice(params);
        cuts.push(hi);
        bounds.extend(cuts.windows(2).map(|w| (w[0], w[1])));
    }
    let pieces = bounds
        .into_iter()
        .map(|(a, b)| {
            Ok(PieceEntry { piece: Arc::new(Curve::piece(curve, a, b)?), extension: None, chord_arc: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition { parent: Arc::clone(curve), pieces })
}

/// Builds an extension of `piece` and checks that its chord-arc constant
/// exceeds `EXTENSION_C_FLOOR`.
pub fn extend_piece(piece: &Arc<Curve>, strategy: &ExtensionStrategy) -> Result<(Curve, ChordArcEstimate)> {
    let fail = |reason: String| Error::ExtensionFailure { piece: piece.label(), reason };
    let ext = match strategy {
        ExtensionStrategy::TangentRays { truncation } => tangent_rays(piece, *truncation).map_err(|e| fail(e.to_string()))?,
        ExtensionStrategy::CloseLoop => close_loop(piece).map_err(|e| fail(e.to_string()))?,
        ExtensionStrategy::Explicit(curve) => {
            check_contains(curve, piece).map_err(fail)?;
            (**curve).clone()
        }
    };
    let est = chord_arc_constant(&ext, CHORD_ARC_GRID, REFINEMENT_LEVELS)?;
    if est.self_intersection {
        return Err(fail("extension self-intersects".into()));
    }
    if !(est.value > EXTENSION_C_FLOOR) {
        return Err(fail(format!("extension has chord-arc constant {} (floor {EXTENSION_C_FLOOR})", est.value)));
    }
    Ok((ext, est))
}

fn end_step(piece: &Curve) -> f64 {
    1e-9 * piece.length().max(1.0)
}

fn tangent_rays(piece: &Arc<Curve>, truncation: f64) -> Result<Curve> {
    if !(truncation > 0.0 && truncation.is_finite()) {
        return Err(domain(format!("ray truncation must be positive, got {truncation}")));
    }
    if piece.is_loop() {
        return Err(domain("a loop has no free ends to extend"));
    }
    let (a, b) = piece.domain();
    let [start_end, finish_end] = piece.ends();
    let step = end_step(piece);
    let mut links = Vec::new();
    let mut origin = a;
    if start_end == EndKind::Free {
        let d = piece.one_sided_tangent(a, step, true);
        links.push(ChainLink::Straight { start: piece.point_at(a) - d * truncation, direction: d, length: truncation });
        origin -= truncation;
    }
    links.push(ChainLink::Sub { curve: Arc::clone(piece), start: a, end: b });
    if finish_end == EndKind::Free {
        let d = piece.one_sided_tangent(b, step, false);
        links.push(ChainLink::Straight { start: piece.point_at(b), direction: d, length: truncation });
    }
    let kind = match piece.kind() {
        CurveKind::Infinite { truncation: t } => CurveKind::Infinite { truncation: t.max(truncation) },
        _ => CurveKind::Infinite { truncation },
    };
    Curve::chain(links, kind, [EndKind::Truncated, EndKind::Truncated], origin)
}

fn close_loop(piece: &Arc<Curve>) -> Result<Curve> {
    if piece.is_loop() {
        return Ok((**piece).clone());
    }
    if piece.ends().contains(&EndKind::Truncated) {
        return Err(domain("cannot close a truncated unbounded piece into a loop"));
    }
    let (a, b) = piece.domain();
    let step = end_step(piece);
    let p1 = piece.point_at(b);
    let t1 = piece.one_sided_tangent(b, step, false);
    let p2 = piece.point_at(a);
    let t2 = piece.one_sided_tangent(a, step, true);
    let mut links = vec![ChainLink::Sub { curve: Arc::clone(piece), start: a, end: b }];
    links.extend(biarc(p1, t1, p2, t2)?);
    Curve::chain(links, CurveKind::Loop { length: 0.0 }, [EndKind::Free, EndKind::Free], a)
}

/// Two circular arcs of equal tangent length from `(p1, t1)` to `(p2, t2)`
/// with a common tangent at the joint.
fn biarc(p1: Point2, t1: Point2, p2: Point2, t2: Point2) -> Result<Vec<ChainLink>> {
    let v = p2 - p1;
    if v.norm() <= POINT_MATCH_TOL {
        return Err(domain("piece endpoints coincide"));
    }
    let t = t1 + t2;
    let vt = v.dot(t);
    let denom = 2.0 * (1.0 - t1.dot(t2));
    let d = if denom.abs() < 1e-12 {
        if vt <= 0.0 {
            return Err(domain("no biarc joins the end tangents"));
        }
        v.dot(v) / (2.0 * vt)
    } else {
        (-vt + (vt * vt + denom * v.dot(v)).sqrt()) / denom
    };
    if !(d > 0.0 && d.is_finite()) {
        return Err(domain("no biarc joins the end tangents"));
    }
    let joint = (p1 + t1 * d + p2 - t2 * d) * 0.5;
    let first = circular_link(p1, t1, joint).unwrap_or_else(|(a, b)| straight(a, b));
    let second = reversed(circular_link(p2, -t2, joint).unwrap_or_else(|(a, b)| straight(a, b)));
    Ok(vec![first, second])
}

fn reversed(link: ChainLink) -> ChainLink {
    match link {
        ChainLink::Straight { start, direction, length } => {
            ChainLink::Straight { start: start + direction * length, direction: -direction, length }
        }
        ChainLink::Arc { center, radius, start_angle, sweep } => {
            ChainLink::Arc { center, radius, start_angle: start_angle + sweep, sweep: -sweep }
        }
        sub => sub,
    }
}

/// Arc leaving `p` with unit tangent `t` and ending at `q`; `Err` holds the
/// endpoints when the arc degenerates to a straight segment.
fn circular_link(p: Point2, t: Point2, q: Point2) -> std::result::Result<ChainLink, (Point2, Point2)> {
    let w = q - p;
    let n = t.perp();
    let wn = w.dot(n);
    if wn.abs() <= 1e-12 * w.norm() {
        return Err((p, q));
    }
    let r = w.dot(w) / (2.0 * wn);
    let center = p + n * r;
    let a0 = (p - center).y.atan2((p - center).x);
    let a1 = (q - center).y.atan2((q - center).x);
    let sweep = if r > 0.0 {
        (a1 - a0).rem_euclid(std::f64::consts::TAU)
    } else {
        -(a0 - a1).rem_euclid(std::f64::consts::TAU)
    };
    Ok(ChainLink::Arc { center, radius: r.abs(), start_angle: a0, sweep })
}

fn straight(p: Point2, q: Point2) -> ChainLink {
    let w = q - p;
    ChainLink::Straight { start: p, direction: w.normalized(), length: w.norm() }
}

/// Every sampled node of `piece` must lie on `ext`.
fn check_contains(ext: &Curve, piece: &Curve) -> std::result::Result<(), String> {
    let dense = 4096;
    let (lo, hi) = ext.domain();
    let h = (hi - lo) / dense as f64;
    let params: Vec<f64> = (0..=dense).map(|i| lo + h * i as f64).collect();
    let pts: Vec<Point2> = params.iter().map(|&s| ext.point_at(s)).collect();
    let (a, b) = piece.domain();
    let tol = 1e-6 * piece.length().max(1.0);
    for k in 0..=64 {
        let s = a + (b - a) * k as f64 / 64.0;
        let p = piece.point_at(s);
        let nearest = (0..pts.len()).min_by(|&i, &j| pts[i].distance(p).total_cmp(&pts[j].distance(p))).unwrap();
        let lo_s = params[nearest.saturating_sub(1)];
        let hi_s = params[(nearest + 1).min(dense)];
        let dist = golden_distance(ext, p, lo_s, hi_s);
        if dist > tol {
            return Err(format!("piece point at s={s} is {dist:.3e} away from the extension"));
        }
    }
    Ok(())
}

fn golden_distance(curve: &Curve, p: Point2, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |s: f64| curve.point_at(s).distance(p);
    let mut best = f(a).min(f(b));
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        let (fc, fd) = (f(c), f(d));
        best = best.min(fc).min(fd);
        if fc < fd {
            b = d;
        } else {
            a = c;
        }
        if b - a < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    best
}

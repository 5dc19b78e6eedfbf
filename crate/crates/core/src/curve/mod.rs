//! Planar curves, their arc-length parametrization, and the geometric
//! quantities the spectral estimates depend on.

mod arc_table;
pub mod chord_arc;
pub mod cusps;
pub mod decomposition;
pub mod straightness;

use crate::error::{domain, Error, Result};
use crate::point::Point2;
use arc_table::ArcTable;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

pub use chord_arc::{chord_arc_constant, ChordArcEstimate};
pub use cusps::detect_cusps;
pub use decomposition::{extend_piece, split_at, Decomposition, ExtensionStrategy, PieceEntry};
pub use straightness::{fit_a2, straightness_deficit, A2Fit};

/// Cells in the raw-parameter arc-length tables.
const TABLE_CELLS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    Loop { length: f64 },
    /// Unbounded curve, represented on a truncated arc-length window.
    Infinite { truncation: f64 },
    Segment { length: f64 },
}

/// Whether a curve end is a genuine endpoint or an artificial truncation of an
/// unbounded branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndKind {
    Free,
    Truncated,
}

/// Catalogue of analytic curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Builtin {
    /// The x-axis.
    Line,
    /// Two half-lines meeting at the origin with opening angle `beta`,
    /// symmetric about the positive y-axis.
    Angle { beta: f64 },
    Circle { radius: f64 },
    /// Arc of a circle centred at the origin, symmetric about the positive x-axis.
    CircularArc { radius: f64, sweep: f64 },
    /// `t -> (t^{2n}, t^{2m+1})` on `[-t_max, t_max]`, cusp at `t = 0`.
    CuspFamily { n: u32, m: u32, t_max: f64 },
    /// `t -> (t, a t^2)`.
    Parabola { a: f64 },
    /// `t -> (a cos t, b sin t)`.
    Ellipse { a: f64, b: f64 },
    /// Half-line from `origin` in direction `angle`.
    Ray { origin: Point2, angle: f64 },
}

impl Builtin {
    pub fn spinode() -> Self {
        Builtin::CuspFamily { n: 1, m: 1, t_max: 1.0 }
    }

    pub fn rhamphoid() -> Self {
        Builtin::CuspFamily { n: 1, m: 2, t_max: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(domain(format!("{what} must be positive and finite, got {v}")))
            }
        };
        match *self {
            Builtin::Line => Ok(()),
            Builtin::Angle { beta } => {
                if beta > 0.0 && beta <= PI {
                    Ok(())
                } else {
                    Err(domain(format!("angle opening must lie in (0, pi], got {beta}")))
                }
            }
            Builtin::Circle { radius } => positive(radius, "radius"),
            Builtin::CircularArc { radius, sweep } => {
                positive(radius, "radius")?;
                if sweep > 0.0 && sweep < TAU {
                    Ok(())
                } else {
                    Err(domain(format!("arc sweep must lie in (0, 2pi), got {sweep}")))
                }
            }
            Builtin::CuspFamily { n, m, t_max } => {
                if n < 1 || m < n {
                    return Err(domain(format!("cusp family requires m >= n >= 1, got n={n}, m={m}")));
                }
                positive(t_max, "t_max")
            }
            Builtin::Parabola { a } => positive(a, "parabola coefficient"),
            Builtin::Ellipse { a, b } => {
                positive(a, "semi-axis a")?;
                positive(b, "semi-axis b")
            }
            Builtin::Ray { origin, angle } => {
                if origin.is_finite() && angle.is_finite() {
                    Ok(())
                } else {
                    Err(domain("ray origin and angle must be finite"))
                }
            }
        }
    }

    /// Raw parametrization.
    fn raw_point(&self, t: f64) -> Point2 {
        match *self {
            Builtin::Line => Point2::new(t, 0.0),
            Builtin::Angle { beta } => {
                let (s, c) = (0.5 * beta).sin_cos();
                Point2::new(t * s, t.abs() * c)
            }
            Builtin::Circle { radius } => Point2::from_angle(t / radius) * radius,
            Builtin::CircularArc { radius, .. } => Point2::from_angle(t / radius) * radius,
            Builtin::CuspFamily { n, m, .. } => Point2::new(t.powi(2 * n as i32), t.powi(2 * m as i32 + 1)),
            Builtin::Parabola { a } => Point2::new(t, a * t * t),
            Builtin::Ellipse { a, b } => Point2::new(a * t.cos(), b * t.sin()),
            Builtin::Ray { origin, angle } => origin + Point2::from_angle(angle) * t,
        }
    }

    /// Analytic raw speed `|gamma'(t)|`.
    fn raw_speed(&self, t: f64) -> f64 {
        match *self {
            Builtin::CuspFamily { n, m, .. } => {
                let dx = 2.0 * n as f64 * t.powi(2 * n as i32 - 1);
                let dy = (2 * m + 1) as f64 * t.powi(2 * m as i32);
                dx.hypot(dy)
            }
            Builtin::Parabola { a } => (1.0 + 4.0 * a * a * t * t).sqrt(),
            Builtin::Ellipse { a, b } => (a * t.sin()).hypot(b * t.cos()),
            _ => 1.0,
        }
    }

    fn label(&self) -> String {
        match *self {
            Builtin::Line => "line".into(),
            Builtin::Angle { beta } => format!("angle(beta={beta})"),
            Builtin::Circle { radius } => format!("circle(R={radius})"),
            Builtin::CircularArc { radius, sweep } => format!("circular_arc(R={radius}, sweep={sweep})"),
            Builtin::CuspFamily { n: 1, m: 1, t_max } => format!("spinode(t_max={t_max})"),
            Builtin::CuspFamily { n: 1, m: 2, t_max } => format!("rhamphoid(t_max={t_max})"),
            Builtin::CuspFamily { n, m, t_max } => format!("cusp_family(n={n}, m={m}, t_max={t_max})"),
            Builtin::Parabola { a } => format!("parabola(a={a})"),
            Builtin::Ellipse { a, b } => format!("ellipse(a={a}, b={b})"),
            Builtin::Ray { origin, angle } => format!("ray(origin=({}, {}), angle={angle})", origin.x, origin.y),
        }
    }
}

/// One link of a chained (extended) curve, parametrized by arc length.
#[derive(Debug, Clone)]
pub enum ChainLink {
    Straight { start: Point2, direction: Point2, length: f64 },
    /// Circular arc; `sweep` is signed (positive is counter-clockwise).
    Arc { center: Point2, radius: f64, start_angle: f64, sweep: f64 },
    /// The portion `[start, end]` of another curve's arc-length domain.
    Sub { curve: Arc<Curve>, start: f64, end: f64 },
}

impl ChainLink {
    pub fn length(&self) -> f64 {
        match self {
            ChainLink::Straight { length, .. } => *length,
            ChainLink::Arc { radius, sweep, .. } => radius * sweep.abs(),
            ChainLink::Sub { start, end, .. } => end - start,
        }
    }

    fn point_at(&self, local: f64) -> Point2 {
        match self {
            ChainLink::Straight { start, direction, .. } => *start + *direction * local,
            ChainLink::Arc { center, radius, start_angle, sweep } => {
                let angle = start_angle + sweep.signum() * local / radius;
                *center + Point2::from_angle(angle) * *radius
            }
            ChainLink::Sub { curve, start, .. } => curve.point_at(start + local),
        }
    }
}

#[derive(Debug, Clone)]
pub enum CurveSource {
    Builtin(Builtin),
    Polyline(Vec<Point2>),
    /// Samples `(t, point)` with strictly increasing `t`, interpolated linearly.
    Sampled(Vec<(f64, Point2)>),
    /// Sub-arc `[start, end]` of a parent curve, in the parent's arc-length coordinate.
    Piece { parent: Arc<Curve>, start: f64, end: f64 },
    Chain(Vec<ChainLink>),
}

#[derive(Debug, Clone)]
enum ArcMap {
    /// The raw parameter already is arc length.
    Identity,
    Table { table: ArcTable, origin: f64 },
    /// Piecewise-linear curves: raw parameter and cumulative arc length per vertex.
    Linear { raw: Vec<f64>, arc: Vec<f64>, points: Vec<Point2> },
    Chain { starts: Vec<f64> },
}

/// A planar curve with an arc-length coordinate `s` on `domain()`.
///
/// Loops use `[0, L)` and are evaluated periodically. Builtins with a
/// distinguished point (vertex, cusp, apex) put `s = 0` there.
#[derive(Debug, Clone)]
pub struct Curve {
    kind: CurveKind,
    source: CurveSource,
    domain: (f64, f64),
    ends: [EndKind; 2],
    map: ArcMap,
}

impl Curve {
    pub fn builtin(builtin: Builtin, truncation: f64) -> Result<Self> {
        builtin.validate()?;
        let truncated = || -> Result<f64> {
            if truncation > 0.0 && truncation.is_finite() {
                Ok(truncation)
            } else {
                Err(domain(format!("truncation must be positive, got {truncation}")))
            }
        };
        let source = CurveSource::Builtin(builtin);
        let free = [EndKind::Free, EndKind::Free];
        let cut = [EndKind::Truncated, EndKind::Truncated];
        let curve = match builtin {
            Builtin::Line | Builtin::Angle { .. } => {
                let t = truncated()?;
                Curve { kind: CurveKind::Infinite { truncation: t }, source, domain: (-t, t), ends: cut, map: ArcMap::Identity }
            }
            Builtin::Ray { .. } => {
                let t = truncated()?;
                Curve {
                    kind: CurveKind::Infinite { truncation: t },
                    source,
                    domain: (0.0, t),
                    ends: [EndKind::Free, EndKind::Truncated],
                    map: ArcMap::Identity,
                }
            }
            Builtin::Circle { radius } => {
                let l = TAU * radius;
                Curve { kind: CurveKind::Loop { length: l }, source, domain: (0.0, l), ends: free, map: ArcMap::Identity }
            }
            Builtin::CircularArc { radius, sweep } => {
                let half = 0.5 * radius * sweep;
                Curve {
                    kind: CurveKind::Segment { length: 2.0 * half },
                    source,
                    domain: (-half, half),
                    ends: free,
                    map: ArcMap::Identity,
                }
            }
            Builtin::CuspFamily { t_max, .. } => {
                let speed = |t: f64| builtin.raw_speed(t);
                let table = ArcTable::new(&speed, -t_max, t_max, TABLE_CELLS, &[0.0])?;
                let origin = table.arc_of_raw(&speed, 0.0);
                let total = table.total();
                Curve {
                    kind: CurveKind::Segment { length: total },
                    source,
                    domain: (-origin, total - origin),
                    ends: free,
                    map: ArcMap::Table { table, origin },
                }
            }
            Builtin::Parabola { a } => {
                let t = truncated()?;
                let raw_hi = parabola_raw_at_arc(a, t);
                let speed = |r: f64| builtin.raw_speed(r);
                let table = ArcTable::new(&speed, -raw_hi, raw_hi, TABLE_CELLS, &[0.0])?;
                let origin = table.arc_of_raw(&speed, 0.0);
                Curve {
                    kind: CurveKind::Infinite { truncation: t },
                    source,
                    domain: (-origin, table.total() - origin),
                    ends: cut,
                    map: ArcMap::Table { table, origin },
                }
            }
            Builtin::Ellipse { .. } => {
                let speed = |r: f64| builtin.raw_speed(r);
                let table = ArcTable::new(&speed, 0.0, TAU, TABLE_CELLS, &[])?;
                let l = table.total();
                Curve {
                    kind: CurveKind::Loop { length: l },
                    source,
                    domain: (0.0, l),
                    ends: free,
                    map: ArcMap::Table { table, origin: 0.0 },
                }
            }
        };
        Ok(curve)
    }

    pub fn line(truncation: f64) -> Result<Self> {
        Self::builtin(Builtin::Line, truncation)
    }

    pub fn angle(beta: f64, truncation: f64) -> Result<Self> {
        Self::builtin(Builtin::Angle { beta }, truncation)
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::builtin(Builtin::Circle { radius }, 1.0)
    }

    pub fn spinode() -> Result<Self> {
        Self::builtin(Builtin::spinode(), 1.0)
    }

    pub fn rhamphoid() -> Result<Self> {
        Self::builtin(Builtin::rhamphoid(), 1.0)
    }

    /// Polyline through `points`; with `closed` the last point joins the first
    /// (a repeated closing point is accepted).
    pub fn polyline(points: Vec<Point2>, closed: bool) -> Result<Self> {
        let mut pts = points;
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(domain("polyline points must be finite"));
        }
        if closed && pts.len() > 1 && pts[0].distance(*pts.last().unwrap()) <= crate::defaults::POINT_MATCH_TOL {
            pts.pop();
        }
        let needed = if closed { 3 } else { 2 };
        if pts.len() < needed {
            return Err(Error::DegenerateCurve(format!("polyline needs at least {needed} distinct points")));
        }
        let mut verts = pts.clone();
        if closed {
            verts.push(pts[0]);
        }
        let arc = cumulative_lengths(&verts)?;
        let len = *arc.last().unwrap();
        Ok(Curve {
            kind: if closed { CurveKind::Loop { length: len } } else { CurveKind::Segment { length: len } },
            source: CurveSource::Polyline(pts),
            domain: (0.0, len),
            ends: [EndKind::Free, EndKind::Free],
            map: ArcMap::Linear { raw: arc.clone(), arc, points: verts },
        })
    }

    /// Curve through `(t, point)` samples. A closed curve must end where it starts.
    pub fn sampled(samples: Vec<(f64, Point2)>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::DegenerateCurve("sampled curve needs at least two samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(domain("sample parameters must be strictly increasing"));
        }
        if samples.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(domain("samples must be finite"));
        }
        if closed && samples[0].1.distance(samples.last().unwrap().1) > crate::defaults::POINT_MATCH_TOL {
            return Err(domain("closed sampled curve must end at its starting point"));
        }
        let points: Vec<Point2> = samples.iter().map(|s| s.1).collect();
        let raw: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let arc = cumulative_lengths(&points)?;
        let len = *arc.last().unwrap();
        Ok(Curve {
            kind: if closed { CurveKind::Loop { length: len } } else { CurveKind::Segment { length: len } },
            source: CurveSource::Sampled(samples),
            domain: (0.0, len),
            ends: [EndKind::Free, EndKind::Free],
            map: ArcMap::Linear { raw, arc, points },
        })
    }

    /// Sub-arc `[start, end]` of `parent`. For loops `end` may exceed the
    /// period to wrap past `s = 0`.
    pub fn piece(parent: &Arc<Curve>, start: f64, end: f64) -> Result<Self> {
        let (lo, hi) = parent.domain;
        let within = |s: f64| s >= lo - 1e-12 * (1.0 + lo.abs()) && s <= hi + 1e-12 * (1.0 + hi.abs());
        let ok = if parent.is_loop() {
            within(start) && end > start && end - start <= parent.length() + 1e-12
        } else {
            within(start) && within(end) && end > start
        };
        if !ok {
            return Err(domain(format!("piece [{start}, {end}] outside parent domain [{lo}, {hi}]")));
        }
        let near = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
        let ends = if parent.is_loop() {
            [EndKind::Free, EndKind::Free]
        } else {
            [
                if near(start, lo) { parent.ends[0] } else { EndKind::Free },
                if near(end, hi) { parent.ends[1] } else { EndKind::Free },
            ]
        };
        let kind = match parent.kind {
            CurveKind::Infinite { truncation } if ends.contains(&EndKind::Truncated) => CurveKind::Infinite { truncation },
            _ => CurveKind::Segment { length: end - start },
        };
        Ok(Curve {
            kind,
            source: CurveSource::Piece { parent: Arc::clone(parent), start, end },
            domain: (start, end),
            ends,
            map: ArcMap::Identity,
        })
    }

    /// Concatenation of links, with the arc-length coordinate starting at `origin`.
    pub fn chain(links: Vec<ChainLink>, kind: CurveKind, ends: [EndKind; 2], origin: f64) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::DegenerateCurve("empty chain".into()));
        }
        let mut starts = Vec::with_capacity(links.len() + 1);
        let mut acc = origin;
        starts.push(acc);
        for link in &links {
            let l = link.length();
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::DegenerateCurve("chain link with invalid length".into()));
            }
            acc += l;
            starts.push(acc);
        }
        let kind = match kind {
            CurveKind::Loop { .. } => CurveKind::Loop { length: acc - origin },
            CurveKind::Segment { .. } => CurveKind::Segment { length: acc - origin },
            k => k,
        };
        Ok(Curve { kind, source: CurveSource::Chain(links), domain: (origin, acc), ends, map: ArcMap::Chain { starts } })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn source(&self) -> &CurveSource {
        &self.source
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn ends(&self) -> [EndKind; 2] {
        self.ends
    }

    pub fn is_loop(&self) -> bool {
        matches!(self.kind, CurveKind::Loop { .. })
    }

    /// Length of the (truncated) arc-length domain.
    pub fn length(&self) -> f64 {
        self.domain.1 - self.domain.0
    }

    pub fn label(&self) -> String {
        match &self.source {
            CurveSource::Builtin(b) => b.label(),
            CurveSource::Polyline(p) => format!("polyline({} points)", p.len()),
            CurveSource::Sampled(p) => format!("sampled({} points)", p.len()),
            CurveSource::Piece { parent, start, end } => format!("{}[{start:.6}, {end:.6}]", parent.label()),
            CurveSource::Chain(links) => {
                let inner: Vec<String> = links
                    .iter()
                    .map(|l| match l {
                        ChainLink::Straight { length, .. } => format!("ray({length})"),
                        ChainLink::Arc { radius, sweep, .. } => format!("arc(R={radius:.6}, sweep={sweep:.6})"),
                        ChainLink::Sub { curve, start, end } if (*start, *end) == curve.domain() => curve.label(),
                        ChainLink::Sub { curve, start, end } => format!("{}[{start:.6}, {end:.6}]", curve.label()),
                    })
                    .collect();
                inner.join(" + ")
            }
        }
    }

    fn wrap(&self, s: f64) -> f64 {
        match self.kind {
            CurveKind::Loop { length } => {
                let r = (s - self.domain.0).rem_euclid(length);
                self.domain.0 + r
            }
            _ => s,
        }
    }

    /// Point at arc length `s`. Loops are periodic; open curves are evaluated
    /// as given (callers keep `s` in the domain).
    pub fn point_at(&self, s: f64) -> Point2 {
        let s = self.wrap(s);
        match (&self.map, &self.source) {
            (ArcMap::Identity, CurveSource::Builtin(b)) => b.raw_point(s),
            (ArcMap::Identity, CurveSource::Piece { parent, .. }) => parent.point_at(s),
            (ArcMap::Table { table, origin }, CurveSource::Builtin(b)) => {
                let t = table.raw_of_arc(&|r| b.raw_speed(r), s + origin);
                b.raw_point(t)
            }
            (ArcMap::Linear { arc, points, .. }, _) => {
                let k = segment_index(arc, s);
                let span = arc[k + 1] - arc[k];
                let f = if span > 0.0 { ((s - arc[k]) / span).clamp(0.0, 1.0) } else { 0.0 };
                points[k] + (points[k + 1] - points[k]) * f
            }
            (ArcMap::Chain { starts }, CurveSource::Chain(links)) => {
                let k = segment_index(starts, s);
                links[k].point_at(s - starts[k])
            }
            _ => unreachable!("inconsistent curve representation"),
        }
    }

    /// Raw parameter interval of the source parametrization.
    pub fn raw_domain(&self) -> (f64, f64) {
        match (&self.map, &self.source) {
            (ArcMap::Table { table, .. }, _) => table.raw_range(),
            (ArcMap::Linear { raw, .. }, _) => (raw[0], *raw.last().unwrap()),
            (ArcMap::Identity, CurveSource::Piece { parent, start, end }) => {
                if parent.is_loop() {
                    // Raw coordinates of a wrapping loop piece are not monotone; use arc length.
                    (*start, *end)
                } else {
                    (parent.raw_of_arc(*start), parent.raw_of_arc(*end))
                }
            }
            _ => self.domain,
        }
    }

    /// Point at raw parameter `t` of the source parametrization.
    pub fn raw_point(&self, t: f64) -> Point2 {
        match (&self.map, &self.source) {
            (ArcMap::Table { .. }, CurveSource::Builtin(b)) => b.raw_point(t),
            (ArcMap::Linear { raw, points, .. }, _) => {
                let k = segment_index(raw, t);
                let f = (t - raw[k]) / (raw[k + 1] - raw[k]);
                points[k] + (points[k + 1] - points[k]) * f
            }
            (ArcMap::Identity, CurveSource::Piece { parent, .. }) if !parent.is_loop() => parent.raw_point(t),
            _ => self.point_at(t),
        }
    }

    /// Arc-length coordinate of raw parameter `t`.
    pub fn arc_of_raw(&self, t: f64) -> f64 {
        match (&self.map, &self.source) {
            (ArcMap::Table { table, origin }, CurveSource::Builtin(b)) => {
                table.arc_of_raw(&|r| b.raw_speed(r), t) - origin
            }
            (ArcMap::Linear { raw, arc, .. }, _) => {
                let k = segment_index(raw, t);
                let f = (t - raw[k]) / (raw[k + 1] - raw[k]);
                arc[k] + (arc[k + 1] - arc[k]) * f
            }
            (ArcMap::Identity, CurveSource::Piece { parent, .. }) if !parent.is_loop() => parent.arc_of_raw(t),
            _ => t,
        }
    }

    /// Raw parameter at arc-length coordinate `s`.
    pub fn raw_of_arc(&self, s: f64) -> f64 {
        let s = self.wrap(s);
        match (&self.map, &self.source) {
            (ArcMap::Table { table, origin }, CurveSource::Builtin(b)) => {
                table.raw_of_arc(&|r| b.raw_speed(r), s + origin)
            }
            (ArcMap::Linear { raw, arc, .. }, _) => {
                let k = segment_index(arc, s);
                let span = arc[k + 1] - arc[k];
                let f = if span > 0.0 { (s - arc[k]) / span } else { 0.0 };
                raw[k] + (raw[k + 1] - raw[k]) * f
            }
            (ArcMap::Identity, CurveSource::Piece { parent, .. }) if !parent.is_loop() => parent.raw_of_arc(s),
            _ => s,
        }
    }

    /// Arc-length positions where the tangent may jump: corners, cusps,
    /// polyline vertices and chain joints. Sorted, inside the domain.
    pub fn singular_points(&self) -> Vec<f64> {
        let (lo, hi) = self.domain;
        let mut out: Vec<f64> = match &self.source {
            CurveSource::Builtin(Builtin::Angle { .. }) => vec![0.0],
            CurveSource::Builtin(Builtin::CuspFamily { .. }) => vec![0.0],
            CurveSource::Builtin(_) => vec![],
            CurveSource::Polyline(_) | CurveSource::Sampled(_) => match &self.map {
                ArcMap::Linear { arc, .. } => {
                    if self.is_loop() {
                        arc[..arc.len() - 1].to_vec()
                    } else {
                        arc[1..arc.len() - 1].to_vec()
                    }
                }
                _ => vec![],
            },
            CurveSource::Piece { parent, start, end } => {
                let period = parent.is_loop().then(|| parent.length());
                let mut v = Vec::new();
                for p in parent.singular_points() {
                    let candidates = match period {
                        Some(l) => vec![p, p + l],
                        None => vec![p],
                    };
                    v.extend(candidates.into_iter().filter(|&c| c > *start && c < *end));
                }
                v
            }
            CurveSource::Chain(links) => {
                let ArcMap::Chain { starts } = &self.map else { unreachable!() };
                let mut v: Vec<f64> = starts[1..starts.len() - 1].to_vec();
                if self.is_loop() {
                    v.push(starts[0]);
                }
                for (k, link) in links.iter().enumerate() {
                    if let ChainLink::Sub { curve, start, end } = link {
                        for p in curve.singular_points() {
                            if p > *start && p < *end {
                                v.push(starts[k] + (p - start));
                            }
                        }
                    }
                }
                v
            }
        };
        if !self.is_loop() {
            out.retain(|&s| s > lo && s < hi);
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    /// Raw parameters known analytically to be singular (used as cusp candidates).
    pub(crate) fn known_singular_raw(&self) -> Vec<f64> {
        match &self.source {
            CurveSource::Builtin(Builtin::CuspFamily { .. }) | CurveSource::Builtin(Builtin::Angle { .. }) => vec![0.0],
            CurveSource::Piece { parent, .. } if !parent.is_loop() => {
                let (a, b) = self.raw_domain();
                parent.known_singular_raw().into_iter().filter(|&t| t > a && t < b).collect()
            }
            _ => vec![],
        }
    }

    /// Distance along the curve. For loops the shorter way round.
    pub fn geodesic_distance(&self, s: f64, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain;
        let slack = 1e-9 * (hi - lo).max(1.0);
        for v in [s, t] {
            if !(v >= lo - slack && v <= hi + slack) {
                return Err(domain(format!("parameter {v} outside [{lo}, {hi}]")));
            }
        }
        Ok(self.geodesic_unchecked(s, t))
    }

    #[inline]
    pub(crate) fn geodesic_unchecked(&self, s: f64, t: f64) -> f64 {
        let d = (s - t).abs();
        match self.kind {
            CurveKind::Loop { length } => {
                let d = d.rem_euclid(length);
                d.min(length - d)
            }
            _ => d,
        }
    }

    /// Unit tangent leaving `s` forward (`forward = true`) or arriving at `s`.
    pub(crate) fn one_sided_tangent(&self, s: f64, step: f64, forward: bool) -> Point2 {
        let p = self.point_at(s);
        if forward {
            (self.point_at(s + step) - p).normalized()
        } else {
            (p - self.point_at(s - step)).normalized()
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn cumulative_lengths(points: &[Point2]) -> Result<Vec<f64>> {
    let mut arc = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    arc.push(0.0);
    for w in points.windows(2) {
        acc += w[0].distance(w[1]);
        arc.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::DegenerateCurve("curve has zero length".into()));
    }
    Ok(arc)
}

/// Index `k` with `knots[k] <= x < knots[k+1]`, clamped to the valid range.
fn segment_index(knots: &[f64], x: f64) -> usize {
    let last = knots.len() - 2;
    match knots.binary_search_by(|k| k.total_cmp(&x)) {
        Ok(i) => i.min(last),
        Err(i) => i.saturating_sub(1).min(last),
    }
}

/// Raw parameter of the parabola `(t, a t^2)` at arc length `s` from the apex.
fn parabola_raw_at_arc(a: f64, s: f64) -> f64 {
    let arc = |t: f64| {
        let u = 2.0 * a * t;
        0.5 * t * (1.0 + u * u).sqrt() + u.asinh() / (4.0 * a)
    };
    let mut t = (s / a).sqrt().min(s);
    for _ in 0..100 {
        let f = arc(t) - s;
        let step = f / (1.0 + 4.0 * a * a * t * t).sqrt();
        t -= step;
        if step.abs() <= 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    t
}

/// Uniform arc-length samples of a curve.
#[derive(Debug, Clone)]
pub struct ArcSamples {
    pub curve: Curve,
    pub params: Vec<f64>,
    pub points: Vec<Point2>,
    pub spacing: f64,
}

/// Samples `curve` at `n` uniform arc-length steps: `L/n` apart on loops
/// (`n` samples), `length/n` apart on open or truncated curves (`n + 1`
/// samples including both ends).
pub fn arc_length_reparametrize(curve: &Curve, n: usize) -> Result<ArcSamples> {
    if n < 8 {
        return Err(domain(format!("at least 8 arc-length nodes required, got {n}")));
    }
    let (lo, _) = curve.domain();
    let spacing = curve.length() / n as f64;
    let count = if curve.is_loop() { n } else { n + 1 };
    let params: Vec<f64> = (0..count).map(|i| lo + spacing * i as f64).collect();
    let points: Vec<Point2> = params.iter().map(|&s| curve.point_at(s)).collect();
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateCurve("non-finite point on curve".into()));
    }
    Ok(ArcSamples { curve: curve.clone(), params, points, spacing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_samples_are_evenly_spaced() {
        let c = Curve::circle(1.0).unwrap();
        let s = arc_length_reparametrize(&c, 100).unwrap();
        assert_eq!(s.params.len(), 100);
        assert_relative_eq!(s.spacing, TAU / 100.0, max_relative = 1e-14);
        for w in s.points.windows(2) {
            let chord = w[0].distance(w[1]);
            assert_relative_eq!(chord, 2.0 * (PI / 100.0).sin(), max_relative = 1e-12);
        }
    }

    #[test]
    fn spinode_length_matches_closed_form() {
        let c = Curve::spinode().unwrap();
        let want = 2.0 * (8.0 / 27.0) * ((1.0f64 + 9.0 / 4.0).powf(1.5) - 1.0);
        assert_relative_eq!(c.length(), want, max_relative = 1e-12);
        let s = arc_length_reparametrize(&c, 200).unwrap();
        assert_relative_eq!(s.spacing, want / 200.0, max_relative = 1e-12);
        // Samples are unit speed: the arc between neighbours equals the spacing.
        for w in s.params.windows(2) {
            let t0 = c.raw_of_arc(w[0]);
            let t1 = c.raw_of_arc(w[1]);
            let arc = crate::quadrature::adaptive(&|t: f64| Builtin::spinode().raw_speed(t), t0, t1, 1e-15, 30).unwrap();
            assert_relative_eq!(arc, s.spacing, max_relative = 1e-10);
        }
        // Cusp at the arc-length origin.
        assert!(c.point_at(0.0).norm() < 1e-12);
    }

    #[test]
    fn polyline_spacing() {
        let c = Curve::polyline(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)], false).unwrap();
        assert_relative_eq!(c.length(), 2.0);
        let s = arc_length_reparametrize(&c, 8).unwrap();
        assert_eq!(s.points.len(), 9);
        assert_relative_eq!(s.spacing, 0.25);
        assert_relative_eq!(s.points[4].x, 1.0);
        assert_relative_eq!(s.points[6].y, 0.5);
    }

    #[test]
    fn chord_never_exceeds_arc() {
        let curves = [
            Curve::circle(2.0).unwrap(),
            Curve::spinode().unwrap(),
            Curve::angle(PI / 3.0, 10.0).unwrap(),
            Curve::builtin(Builtin::Ellipse { a: 2.0, b: 0.5 }, 1.0).unwrap(),
            Curve::builtin(Builtin::Parabola { a: 0.5 }, 10.0).unwrap(),
        ];
        for c in &curves {
            let s = arc_length_reparametrize(c, 64).unwrap();
            for i in 0..s.params.len() {
                for j in 0..s.params.len() {
                    let chord = s.points[i].distance(s.points[j]);
                    let geo = c.geodesic_distance(s.params[i], s.params[j]).unwrap();
                    assert!(chord <= geo * (1.0 + 1e-12) + 1e-14, "{c}: {chord} > {geo}");
                }
            }
        }
    }

    #[test]
    fn loops_close_up() {
        for c in [Curve::circle(1.5).unwrap(), Curve::builtin(Builtin::Ellipse { a: 1.0, b: 3.0 }, 1.0).unwrap()] {
            let (lo, hi) = c.domain();
            assert!(c.point_at(lo).distance(c.point_at(hi)) < 1e-9);
        }
    }

    #[test]
    fn geodesic_distance_examples() {
        let square = Curve::polyline(
            vec![Point2::new(0.0, 0.0), Point2::new(2.5, 0.0), Point2::new(2.5, 2.5), Point2::new(0.0, 2.5)],
            true,
        )
        .unwrap();
        assert_relative_eq!(square.length(), 10.0);
        assert_relative_eq!(square.geodesic_distance(1.0, 9.0).unwrap(), 2.0);
        assert_relative_eq!(square.geodesic_distance(2.0, 7.0).unwrap(), 5.0);
        let seg = Curve::polyline(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], false).unwrap();
        assert_relative_eq!(seg.geodesic_distance(0.3, 0.7).unwrap(), 0.4, max_relative = 1e-12);
        assert_relative_eq!(seg.geodesic_distance(0.7, 0.3).unwrap(), 0.4, max_relative = 1e-12);
        assert!(seg.geodesic_distance(0.3, 1.5).is_err());
    }

    #[test]
    fn geodesic_is_a_metric_on_loop_samples() {
        let c = Curve::builtin(Builtin::Ellipse { a: 1.0, b: 2.0 }, 1.0).unwrap();
        let s = arc_length_reparametrize(&c, 48).unwrap();
        let d = |i: usize, j: usize| c.geodesic_distance(s.params[i], s.params[j]).unwrap();
        for i in 0..48 {
            assert_eq!(d(i, i), 0.0);
            for j in 0..48 {
                assert_eq!(d(i, j), d(j, i));
                for k in 0..48 {
                    assert!(d(i, k) <= d(i, j) + d(j, k) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn cusp_family_requires_m_at_least_n() {
        assert!(Curve::builtin(Builtin::CuspFamily { n: 2, m: 1, t_max: 1.0 }, 1.0).is_err());
        assert!(Curve::builtin(Builtin::CuspFamily { n: 0, m: 1, t_max: 1.0 }, 1.0).is_err());
        assert!(Curve::builtin(Builtin::CuspFamily { n: 2, m: 3, t_max: 1.0 }, 1.0).is_ok());
    }

    #[test]
    fn sampled_curve_rejects_bad_input() {
        let p = Point2::new;
        assert!(Curve::sampled(vec![(0.0, p(0.0, 0.0)), (0.0, p(1.0, 0.0))], false).is_err());
        assert!(Curve::sampled(vec![(0.0, p(0.0, 0.0)), (1.0, p(1.0, 0.0)), (2.0, p(1.0, 1.0))], true).is_err());
        let c = Curve::sampled(vec![(0.0, p(0.0, 0.0)), (2.0, p(1.0, 0.0)), (3.0, p(1.0, 1.0))], false).unwrap();
        assert_relative_eq!(c.arc_of_raw(1.0), 0.5);
        assert_relative_eq!(c.raw_of_arc(1.5), 2.5);
    }

    #[test]
    fn parabola_truncation_is_arc_length() {
        let c = Curve::builtin(Builtin::Parabola { a: 0.25 }, 50.0).unwrap();
        let (lo, hi) = c.domain();
        assert_relative_eq!(lo, -50.0, max_relative = 1e-10);
        assert_relative_eq!(hi, 50.0, max_relative = 1e-10);
    }

    #[test]
    fn loop_pieces_wrap() {
        let c = Arc::new(Curve::circle(1.0).unwrap());
        let piece = Curve::piece(&c, 5.0, 5.0 + PI).unwrap();
        assert!(piece.point_at(5.0 + PI).distance(c.point_at(5.0 + PI - TAU)) < 1e-12);
        assert!(Curve::piece(&c, 1.0, 1.0 + 7.0).is_err());
    }
}

//! End-to-end reports: geometry, bounds, bound states and verdicts.

use super::graph::LeakyGraph;
use super::{composite_bound, essential_spectrum, single_bound};
use crate::birman_schwinger::{find_bound_states, BoundState, BoundStateSearch, DiagonalRule, Discretization};
use crate::curve::{chord_arc_constant, fit_a2, split_at, Curve, CurveKind, ExtensionStrategy};
use crate::defaults::{A2_SECTOR_OMEGA, CHORD_ARC_GRID, NODES, REFINEMENT_LEVELS, TOP_K, VERDICT_SLACK};
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Where the operative bound comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind {
    Single,
    Composite { n: usize, c: Vec<f64> },
    Graph { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceReport {
    pub c: f64,
    pub extension: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVerdict {
    pub lambda: f64,
    pub kappa: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    #[serde(default)]
    pub curve: String,
    pub alpha: f64,
    pub ess_threshold: f64,
    #[serde(default)]
    pub ess_diagnostic_only: bool,
    /// The operative (largest available) lower bound.
    pub bound: f64,
    pub bound_kind: BoundKind,
    #[serde(default)]
    pub direct_bound: Option<f64>,
    #[serde(default)]
    pub composite_bound: Option<f64>,
    pub pieces: Vec<PieceReport>,
    pub states: Vec<StateVerdict>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl SpectralReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Parses and validates a report.
    pub fn from_json(text: &str) -> Result<Self> {
        let report: SpectralReport =
            serde_json::from_str(text).map_err(|e| domain(format!("malformed report: {e}")))?;
        report.validate()?;
        Ok(report)
    }

    /// Structural checks: positive coupling, finite values, the bound below the
    /// essential threshold, and verdicts consistent with the bound.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(domain("report: alpha must be positive"));
        }
        if !self.bound.is_finite() || !self.ess_threshold.is_finite() {
            return Err(domain("report: bound and threshold must be finite"));
        }
        if self.ess_threshold < self.bound {
            return Err(domain("report: essential threshold lies below the lower bound"));
        }
        match &self.bound_kind {
            BoundKind::Composite { n, c } if *n != c.len() || *n == 0 => {
                return Err(domain("report: composite piece count does not match its constants"));
            }
            BoundKind::Graph { n } if *n == 0 => return Err(domain("report: graph without edges")),
            _ => {}
        }
        for p in &self.pieces {
            if !(p.c >= 0.0 && p.c <= 1.0) {
                return Err(domain(format!("report: piece constant {} outside [0, 1]", p.c)));
            }
        }
        for s in &self.states {
            if !(s.kappa > 0.0) || (s.lambda + s.kappa * s.kappa).abs() > 1e-12 * s.lambda.abs().max(1.0) {
                return Err(domain("report: state with inconsistent kappa and lambda"));
            }
            if s.pass != (s.lambda >= self.bound - VERDICT_SLACK) {
                return Err(domain("report: verdict disagrees with the bound"));
            }
        }
        Ok(())
    }

    pub fn all_pass(&self) -> bool {
        self.states.iter().all(|s| s.pass)
    }

    fn attach_states(&mut self, states: &[BoundState]) {
        self.states = states
            .iter()
            .map(|s| StateVerdict {
                lambda: s.lambda,
                kappa: s.kappa,
                residual: s.residual,
                pass: s.lambda >= self.bound - VERDICT_SLACK,
            })
            .collect();
    }
}

/// Numerical settings of the full pipeline.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    /// Nodes per curve (per edge for graphs).
    pub nodes: usize,
    pub chord_arc_grid: usize,
    pub refinement_levels: usize,
    pub top_k: usize,
    /// Search bracket in kappa; derived from the threshold and bound when unset.
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub rule: DiagonalRule,
    pub omega: f64,
    /// Cut positions for the composite bound; by default the singular points.
    pub split: Option<Vec<f64>>,
    pub extension: Option<ExtensionStrategy>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            nodes: NODES,
            chord_arc_grid: CHORD_ARC_GRID,
            refinement_levels: REFINEMENT_LEVELS,
            top_k: TOP_K,
            kappa_min: None,
            kappa_max: None,
            rule: DiagonalRule::Corrected,
            omega: A2_SECTOR_OMEGA,
            split: None,
            extension: None,
        }
    }
}

/// Smallest kappa searched on bounded curves when no bracket is given.
const LOOP_KAPPA_FLOOR: f64 = 1e-3;
/// Relative margins of the default bracket around the threshold and the bound.
const THRESHOLD_MARGIN: f64 = 1e-3;
const BOUND_MARGIN: f64 = 0.02;

/// Kappa interval searched for bound states given the essential threshold and
/// the lower bound, unless the settings fix it.
pub fn search_bracket(settings: &SolverSettings, ess: f64, bound: f64) -> (f64, f64) {
    let lo = settings.kappa_min.unwrap_or_else(|| {
        if ess < 0.0 {
            (-ess).sqrt() * (1.0 + THRESHOLD_MARGIN)
        } else {
            LOOP_KAPPA_FLOOR
        }
    });
    let hi = settings.kappa_max.unwrap_or_else(|| (-bound).sqrt() * (1.0 + BOUND_MARGIN));
    (lo, hi)
}

/// A report together with the discretization and raw search it was built from.
#[derive(Debug, Clone)]
pub struct Verification {
    pub report: SpectralReport,
    pub search: BoundStateSearch,
    pub disc: Discretization,
    pub bracket: (f64, f64),
}

/// Chord-arc constant, direct and composite bounds, essential threshold, and
/// the bound states of `curve`, each checked against the operative bound.
pub fn verify_curve(curve: &Arc<Curve>, alpha: f64, settings: &SolverSettings) -> Result<SpectralReport> {
    analyze_curve(curve, alpha, settings).map(|v| v.report)
}

pub fn verify_graph(graph: &LeakyGraph, alpha: f64, settings: &SolverSettings) -> Result<SpectralReport> {
    analyze_graph(graph, alpha, settings).map(|v| v.report)
}

/// [`verify_curve`] keeping the intermediate results.
pub fn analyze_curve(curve: &Arc<Curve>, alpha: f64, settings: &SolverSettings) -> Result<Verification> {
    let est = chord_arc_constant(curve, settings.chord_arc_grid, settings.refinement_levels)?;
    let mut diagnostics = Vec::new();
    let direct = match single_bound(alpha, est.value) {
        Ok(b) => Some(b),
        Err(Error::BoundUndefined(why)) => {
            diagnostics.push(format!("direct bound undefined: {why}"));
            None
        }
        Err(e) => return Err(e),
    };

    let cuts = match &settings.split {
        Some(c) => c.clone(),
        None => {
            let mut c = curve.singular_points();
            c.extend(est.cusps.iter().copied());
            c.sort_by(f64::total_cmp);
            c.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            c
        }
    };
    let mut composite = None;
    let mut pieces = Vec::new();
    if !cuts.is_empty() {
        let strategy = settings.extension.clone().unwrap_or_else(|| default_extension(curve));
        let outcome = split_at(curve, &cuts).and_then(|mut d| {
            d.extend_all(&strategy)?;
            Ok(d)
        });
        match outcome {
            Ok(d) => {
                let cs = d.constants().expect("all pieces extended");
                composite = Some((composite_bound(alpha, &cs)?, cs));
                pieces = d
                    .pieces
                    .iter()
                    .map(|p| PieceReport { c: p.c().unwrap(), extension: p.extension.as_ref().unwrap().label() })
                    .collect();
            }
            Err(e) => diagnostics.push(format!("composite bound unavailable: {e}")),
        }
    }

    let (bound, bound_kind) = match (direct, &composite) {
        (Some(d), Some((c, _))) if d >= *c => (d, BoundKind::Single),
        (_, Some((c, cs))) => (*c, BoundKind::Composite { n: cs.len(), c: cs.clone() }),
        (Some(d), None) => (d, BoundKind::Single),
        (None, None) => {
            return Err(Error::BoundUndefined(format!("no lower bound available for {}", curve.label())));
        }
    };
    if matches!(bound_kind, BoundKind::Single) {
        pieces.insert(0, PieceReport { c: est.value, extension: curve.label() });
    }

    let a2_ok = match curve.kind() {
        CurveKind::Infinite { .. } => {
            let fit = fit_a2(curve, settings.omega)?;
            if !fit.consistent {
                diagnostics.push(format!("asymptotic straightness not confirmed (fitted mu = {:.3})", fit.mu));
            }
            fit.consistent
        }
        _ => true,
    };
    let ess = essential_spectrum(curve.kind(), alpha, a2_ok);

    let report = SpectralReport {
        curve: curve.label(),
        alpha,
        ess_threshold: ess.threshold,
        ess_diagnostic_only: ess.diagnostic_only,
        bound,
        bound_kind,
        direct_bound: direct,
        composite_bound: composite.map(|c| c.0),
        pieces,
        states: Vec::new(),
        diagnostics,
    };
    let disc = Discretization::new(curve, settings.nodes, settings.rule)?;
    finish(report, disc, alpha, settings)
}

fn finish(mut report: SpectralReport, disc: Discretization, alpha: f64, settings: &SolverSettings) -> Result<Verification> {
    let bracket = search_bracket(settings, report.ess_threshold, report.bound);
    let search = find_bound_states(&disc, alpha, bracket.0, bracket.1, settings.top_k)?;
    report.diagnostics.extend(search.diagnostics.iter().cloned());
    report.attach_states(&search.states);
    Ok(Verification { report, search, disc, bracket })
}

fn default_extension(curve: &Curve) -> ExtensionStrategy {
    if curve.is_loop() {
        ExtensionStrategy::CloseLoop
    } else {
        let truncation = match curve.kind() {
            CurveKind::Infinite { truncation } => truncation,
            _ => crate::defaults::TRUNCATION,
        };
        ExtensionStrategy::TangentRays { truncation }
    }
}

/// Graph bound plus the bound states of the whole graph.
pub fn analyze_graph(graph: &LeakyGraph, alpha: f64, settings: &SolverSettings) -> Result<Verification> {
    let report = super::graph_bound(graph, alpha)?;
    let parts = graph
        .edges
        .iter()
        .map(|e| Discretization::new(&e.curve, settings.nodes, settings.rule))
        .collect::<Result<Vec<_>>>()?;
    let disc = Discretization::union(parts)?;
    finish(report, disc, alpha, settings)
}

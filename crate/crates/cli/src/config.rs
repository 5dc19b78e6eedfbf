//! TOML run configuration.
//!
//! ```toml
//! alpha = 1.0
//! top_k = 4
//!
//! [curve]
//! kind = "infinite"
//! source = "builtin"
//! params = { name = "angle", beta = 1.0471975511965976 }
//! truncation_T = 40.0
//! samples_n = 512
//! ```
//!
//! See the README for the full grammar.

use crate::error::CliError;
use leaky_core::birman_schwinger::log_spaced;
use leaky_core::curve::{EndKind, ExtensionStrategy};
use leaky_core::defaults::{CHORD_ARC_GRID, KAPPA_POINTS, NODES, REFINEMENT_LEVELS, TOP_K, TRUNCATION, A2_SECTOR_OMEGA};
use leaky_core::spectral_bounds::GraphEdge;
use leaky_core::{Builtin, Curve, CurveKind, DiagonalRule, LeakyGraph, Point2, SolverSettings};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;

const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Corrected,
    Panel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    TangentRays,
    CloseLoop,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    #[serde(default = "default_kappa_points")]
    pub kappa_points: usize,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default = "default_levels")]
    pub refinement_levels: usize,
    #[serde(default = "default_grid")]
    pub chord_arc_grid: usize,
    #[serde(default = "default_rule")]
    pub rule: Rule,
    #[serde(default = "default_panel_order")]
    pub panel_order: usize,
    #[serde(default = "default_omega")]
    pub omega: f64,
    pub extension: Option<Extension>,
    pub curve: Option<CurveRecord>,
    pub graph: Option<GraphRecord>,
    pub sweep: Option<SweepRecord>,
    /// Directory that relative sample paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_alpha() -> f64 {
    1.0
}
fn default_kappa_points() -> usize {
    KAPPA_POINTS
}
fn default_top_k() -> usize {
    TOP_K
}
fn default_levels() -> usize {
    REFINEMENT_LEVELS
}
fn default_grid() -> usize {
    CHORD_ARC_GRID
}
fn default_rule() -> Rule {
    Rule::Corrected
}
fn default_panel_order() -> usize {
    10
}
fn default_omega() -> f64 {
    A2_SECTOR_OMEGA
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRecord {
    /// `loop`, `infinite` or `segment`; checked against the constructed curve.
    pub kind: String,
    /// `builtin`, `polyline` or `sampled`.
    pub source: String,
    pub params: toml::Value,
    #[serde(rename = "truncation_T")]
    pub truncation: Option<f64>,
    pub samples_n: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphRecord {
    pub vertices: Vec<[f64; 2]>,
    pub samples_n: Option<usize>,
    pub edges: Vec<CurveRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Beta,
    Alpha,
    Kappa,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCommand {
    Cconst,
    Spectrum,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRecord {
    pub parameter: SweepParameter,
    pub command: SweepCommand,
    pub values: Option<Vec<f64>>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolylineParams {
    points: Vec<[f64; 2]>,
    #[serde(default)]
    closed: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledParams {
    path: PathBuf,
    #[serde(default)]
    closed: bool,
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    t: f64,
    x: f64,
    y: f64,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let mut config = Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => config_err(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(config_err(format!("alpha: must be positive, got {}", self.alpha)));
        }
        if let (Some(lo), Some(hi)) = (self.kappa_min, self.kappa_max) {
            if !(lo < hi) {
                return Err(config_err(format!("kappa_min ({lo}) must be below kappa_max ({hi})")));
            }
        }
        for (key, v) in [("kappa_min", self.kappa_min), ("kappa_max", self.kappa_max)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(config_err(format!("{key}: must be positive, got {v}")));
                }
            }
        }
        if self.kappa_points < 2 {
            return Err(config_err("kappa_points: need at least 2"));
        }
        if self.top_k == 0 {
            return Err(config_err("top_k: must be positive"));
        }
        if self.chord_arc_grid < 16 {
            return Err(config_err("chord_arc_grid: need at least 16"));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(config_err("omega: must lie in (0, 1)"));
        }
        match (&self.curve, &self.graph) {
            (Some(_), Some(_)) => return Err(config_err("give either [curve] or [graph], not both")),
            (Some(c), None) => check_nodes("curve.samples_n", c.samples_n)?,
            (None, Some(g)) => {
                check_nodes("graph.samples_n", g.samples_n)?;
                if g.edges.is_empty() {
                    return Err(config_err("graph.edges: at least one edge is required"));
                }
            }
            (None, None) => {}
        }
        if let Some(sweep) = &self.sweep {
            sweep.values()?;
        }
        Ok(())
    }

    pub fn curve_record(&self) -> Result<&CurveRecord, CliError> {
        self.curve.as_ref().ok_or_else(|| config_err("missing [curve] section"))
    }

    pub fn nodes(&self) -> usize {
        self.curve
            .as_ref()
            .and_then(|c| c.samples_n)
            .or_else(|| self.graph.as_ref().and_then(|g| g.samples_n))
            .unwrap_or(NODES)
    }

    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            nodes: self.nodes(),
            chord_arc_grid: self.chord_arc_grid,
            refinement_levels: self.refinement_levels,
            top_k: self.top_k,
            kappa_min: self.kappa_min,
            kappa_max: self.kappa_max,
            rule: match self.rule {
                Rule::Corrected => DiagonalRule::Corrected,
                Rule::Panel => DiagonalRule::PanelIntegral { order: self.panel_order },
            },
            omega: self.omega,
            split: None,
            extension: self.extension.map(|e| match e {
                Extension::CloseLoop => ExtensionStrategy::CloseLoop,
                Extension::TangentRays => ExtensionStrategy::TangentRays {
                    truncation: self.curve.as_ref().and_then(|c| c.truncation).unwrap_or(TRUNCATION),
                },
            }),
        }
    }

    pub fn build_curve(&self) -> Result<Arc<Curve>, CliError> {
        self.curve_record()?.build(&self.base_dir, "curve").map(Arc::new)
    }

    pub fn build_graph(&self) -> Result<LeakyGraph, CliError> {
        let g = self.graph.as_ref().ok_or_else(|| config_err("missing [graph] section"))?;
        let vertices: Vec<Point2> = g.vertices.iter().map(|&[x, y]| Point2::new(x, y)).collect();
        let edges = g
            .edges
            .iter()
            .enumerate()
            .map(|(k, record)| {
                let field = format!("graph.edges[{k}]");
                let curve = record.build(&self.base_dir, &field)?;
                if curve.is_loop() {
                    return Err(config_err(format!("{field}: graph edges must be open curves")));
                }
                let truncation = record.truncation.unwrap_or(TRUNCATION);
                Ok(GraphEdge { curve: Arc::new(curve), extension: ExtensionStrategy::TangentRays { truncation } })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(LeakyGraph::new(vertices, edges)?)
    }
}

fn check_nodes(field: &str, n: Option<usize>) -> Result<(), CliError> {
    match n {
        Some(n) if n < MIN_NODES => Err(config_err(format!("{field}: need at least {MIN_NODES} nodes, got {n}"))),
        _ => Ok(()),
    }
}

impl CurveRecord {
    pub fn build(&self, base_dir: &Path, field: &str) -> Result<Curve, CliError> {
        let truncation = self.truncation.unwrap_or(TRUNCATION);
        let params = self.params.clone();
        let bad = |e: toml::de::Error| config_err(format!("{field}.params: {}", e.message()));
        let curve = match self.source.as_str() {
            "builtin" => Curve::builtin(params.try_into::<Builtin>().map_err(bad)?, truncation)?,
            "polyline" => {
                let p: PolylineParams = params.try_into().map_err(bad)?;
                Curve::polyline(p.points.iter().map(|&[x, y]| Point2::new(x, y)).collect(), p.closed)?
            }
            "sampled" => {
                let p: SampledParams = params.try_into().map_err(bad)?;
                Curve::sampled(read_samples(&base_dir.join(&p.path))?, p.closed)?
            }
            other => {
                return Err(config_err(format!(
                    "{field}.source: unknown source `{other}`, expected builtin, polyline or sampled"
                )))
            }
        };
        let kind = match curve.kind() {
            CurveKind::Loop { .. } => "loop",
            CurveKind::Infinite { .. } => "infinite",
            CurveKind::Segment { .. } => "segment",
        };
        if kind != self.kind {
            return Err(config_err(format!("{field}.kind: declared `{}` but the curve is a {kind}", self.kind)));
        }
        if matches!(curve.kind(), CurveKind::Infinite { .. }) && curve.ends() != [EndKind::Truncated; 2] {
            return Err(config_err(format!("{field}: inconsistent ends for an unbounded curve")));
        }
        Ok(curve)
    }

    /// Replaces the `beta` parameter of an angle builtin.
    pub fn with_beta(&self, beta: f64) -> Result<Self, CliError> {
        let mut record = self.clone();
        let table = record
            .params
            .as_table_mut()
            .filter(|t| record_is_angle(t))
            .ok_or_else(|| config_err("sweep.parameter: beta sweeps need an angle builtin curve"))?;
        table.insert("beta".into(), toml::Value::Float(beta));
        Ok(record)
    }
}

fn record_is_angle(table: &toml::Table) -> bool {
    table.get("name").and_then(toml::Value::as_str) == Some("angle")
}

/// Reads a `t,x,y` CSV with a header row.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, Point2)>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    reader
        .deserialize::<SampleRow>()
        .enumerate()
        .map(|(k, row)| {
            row.map(|r| (r.t, Point2::new(r.x, r.y)))
                .map_err(|e| config_err(format!("{} row {}: {e}", path.display(), k + 2)))
        })
        .collect()
}

impl SweepRecord {
    /// Swept values in increasing order; duplicates are rejected.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let mut values = match (&self.values, self.from, self.to, self.count) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(from), Some(to), Some(count)) => {
                if count < 2 || !(from < to) {
                    return Err(config_err("sweep: need from < to and count >= 2"));
                }
                match self.spacing.unwrap_or(Spacing::Linear) {
                    Spacing::Linear => (0..count).map(|i| from + (to - from) * i as f64 / (count - 1) as f64).collect(),
                    Spacing::Log => log_spaced(from, to, count).map_err(|e| config_err(format!("sweep: {e}")))?,
                }
            }
            _ => return Err(config_err("sweep: give either `values` or all of `from`, `to`, `count`")),
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(config_err("sweep.values: need at least one finite value"));
        }
        values.sort_by(f64::total_cmp);
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(config_err("sweep.values: duplicate values"));
        }
        if self.parameter == SweepParameter::N && values.iter().any(|&v| v.fract() != 0.0 || v < MIN_NODES as f64) {
            return Err(config_err(format!("sweep.values: node counts must be integers >= {MIN_NODES}")));
        }
        if matches!(self.parameter, SweepParameter::Alpha | SweepParameter::Kappa | SweepParameter::Beta)
            && values[0] <= 0.0
        {
            return Err(config_err("sweep.values: must be positive"));
        }
        Ok(values)
    }
}

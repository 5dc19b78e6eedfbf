//! Command-line front end: reads a TOML run configuration, runs the
//! requested computation and writes CSV or JSON artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;

use clap::{Parser, Subcommand, ValueEnum};
use config::{RunConfig, SweepCommand, SweepParameter};
use error::CliError;
use leaky_core::birman_schwinger::{eigenvalue_curve, log_spaced, states_to_json, Discretization};
use leaky_core::curve::chord_arc_constant;
use leaky_core::special_functions::k0_integral_check;
use leaky_core::spectral_bounds::{analyze_curve, analyze_graph, Verification};
use leaky_core::SpectralReport;
use serde_json::{json, Map, Value};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Largest admissible residual of the integral self-test.
const SELFTEST_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "leaky", version, about = "Spectral bounds and bound states of leaky curves")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chord-arc constant of the configured curve.
    Cconst,
    /// Bound states and the top eigenvalue branches.
    Spectrum,
    /// Full report: lower bounds, essential threshold and checked bound states.
    Bound,
    /// Repeat a command over one parameter and tabulate the results.
    Sweep,
    /// Residuals of the K0 integral identity.
    #[command(name = "selftest-k0", hide = true)]
    SelftestK0,
    /// Re-read a written report and check it.
    #[command(hide = true)]
    Validate { report: PathBuf },
}

struct Output {
    out: Option<PathBuf>,
    verbose: bool,
}

impl Output {
    fn write(&self, path: Option<&Path>, text: &str) -> Result<(), CliError> {
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn note(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Config("--threads: must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let output = Output { out: cli.out.clone(), verbose: cli.verbose };
    let load = || -> Result<RunConfig, CliError> {
        let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
        RunConfig::from_path(path)
    };
    match cli.command {
        Command::Cconst => cconst(&load()?, cli.format.unwrap_or(Format::Json), &output),
        Command::Spectrum => spectrum(&load()?, cli.format.unwrap_or(Format::Json), &output),
        Command::Bound => bound(&load()?, cli.format.unwrap_or(Format::Json), &output),
        Command::Sweep => sweep(&load()?, cli.format.unwrap_or(Format::Csv), &output),
        Command::SelftestK0 => selftest_k0(cli.format.unwrap_or(Format::Csv), &output),
        Command::Validate { report } => {
            let text = std::fs::read_to_string(&report)?;
            let r = SpectralReport::from_json(&text)?;
            println!("valid report: bound {}, {} states", num(r.bound), r.states.len());
            Ok(())
        }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Rows as a JSON array of objects keyed by the header; empty cells become null.
fn json_rows(header: &[String], rows: &[Vec<String>]) -> String {
    let records: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            for (k, v) in header.iter().zip(row) {
                let value = if v.is_empty() {
                    Value::Null
                } else if let Ok(x) = v.parse::<f64>() {
                    json!(x)
                } else {
                    Value::String(v.clone())
                };
                m.insert(k.clone(), value);
            }
            Value::Object(m)
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("rows serialize")
}

fn table(header: &[String], rows: &[Vec<String>], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => csv_text(header, rows),
        Format::Json => Ok(json_rows(header, rows) + "\n"),
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn cconst(config: &RunConfig, format: Format, output: &Output) -> Result<(), CliError> {
    let curve = config.build_curve()?;
    let est = chord_arc_constant(&curve, config.chord_arc_grid, config.refinement_levels)?;
    let (s, t) = est.argmin;
    println!("c = {} at ({}, {})", num(est.value), num(s), num(t));
    if !est.cusps.is_empty() {
        output.note(format!("cusps at {:?}", est.cusps));
    }
    if est.self_intersection {
        output.note("self-intersection detected");
    }
    if let Some(path) = &output.out {
        let text = match format {
            Format::Json => {
                serde_json::to_string_pretty(&json!({
                    "curve": curve.label(),
                    "c": est.value,
                    "estimate": est.estimate,
                    "argmin": [s, t],
                    "levels": est.levels,
                    "cusps": est.cusps,
                    "self_intersection": est.self_intersection,
                }))
                .expect("estimate serializes")
                    + "\n"
            }
            Format::Csv => csv_text(&strings(&["c", "argmin_s", "argmin_t"]), &[vec![num(est.value), num(s), num(t)]])?,
        };
        output.write(Some(path), &text)?;
    }
    if est.value <= 0.0 {
        let why = if est.self_intersection { "self-intersection" } else { "cusp" };
        return Err(CliError::ZeroConstant(format!("chord-arc constant vanishes ({why})")));
    }
    Ok(())
}

fn analyze(config: &RunConfig) -> Result<Verification, CliError> {
    let settings = config.settings();
    Ok(if config.graph.is_some() {
        analyze_graph(&config.build_graph()?, config.alpha, &settings)?
    } else {
        analyze_curve(&config.build_curve()?, config.alpha, &settings)?
    })
}

fn eigen_csv(config: &RunConfig, disc: &Discretization, lo: f64, hi: f64) -> Result<String, CliError> {
    let kappas = log_spaced(lo, hi, config.kappa_points)?;
    Ok(eigenvalue_curve(disc, config.alpha, &kappas, config.top_k.min(disc.len()))?.to_csv())
}

fn spectrum(config: &RunConfig, format: Format, output: &Output) -> Result<(), CliError> {
    let v = analyze(config)?;
    for d in &v.report.diagnostics {
        output.note(d);
    }
    let states = states_to_json(&v.search.states) + "\n";
    let csv = eigen_csv(config, &v.disc, v.bracket.0, v.bracket.1)?;
    match &output.out {
        Some(path) => {
            output.write(Some(&path.with_extension("json")), &states)?;
            output.write(Some(&path.with_extension("csv")), &csv)?;
        }
        None => output.write(None, if format == Format::Json { &states } else { &csv })?,
    }
    output.note(format!("{} bound states, kappa in [{}, {}]", v.search.states.len(), v.bracket.0, v.bracket.1));
    Ok(())
}

fn bound(config: &RunConfig, format: Format, output: &Output) -> Result<(), CliError> {
    let report = analyze(config)?.report;
    for d in &report.diagnostics {
        output.note(d);
    }
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .states
                .iter()
                .map(|s| vec![num(s.lambda), num(s.kappa), num(s.residual), s.pass.to_string()])
                .collect();
            csv_text(&strings(&["lambda", "kappa", "residual", "pass"]), &rows)?
        }
    };
    output.write(output.out.as_deref(), &text)?;
    if let (Some(path), Format::Json) = (&output.out, format) {
        SpectralReport::from_json(&std::fs::read_to_string(path)?)?;
        output.note(format!("bound {} ({} states); report re-read and validated", num(report.bound), report.states.len()));
    }
    Ok(())
}

fn sweep(config: &RunConfig, format: Format, output: &Output) -> Result<(), CliError> {
    let spec = config.sweep.as_ref().ok_or_else(|| CliError::Config("missing [sweep] section".into()))?;
    let values = spec.values()?;
    let name = match spec.parameter {
        SweepParameter::Beta => "beta",
        SweepParameter::Alpha => "alpha",
        SweepParameter::Kappa => "kappa",
        SweepParameter::N => "n",
    };
    if spec.parameter == SweepParameter::Kappa {
        if spec.command != SweepCommand::Spectrum {
            return Err(CliError::Config("sweep.command: kappa sweeps tabulate eigenvalues, use `spectrum`".into()));
        }
        let disc = if config.graph.is_some() {
            let graph = config.build_graph()?;
            let parts = graph
                .edges
                .iter()
                .map(|e| Discretization::new(&e.curve, config.nodes(), config.settings().rule))
                .collect::<Result<Vec<_>, _>>()?;
            Discretization::union(parts)?
        } else {
            Discretization::new(&config.build_curve()?, config.nodes(), config.settings().rule)?
        };
        let eig = eigenvalue_curve(&disc, config.alpha, &values, config.top_k.min(disc.len()))?;
        let k = eig.mus.first().map_or(0, Vec::len);
        let mut header = vec![name.to_string()];
        header.extend((1..=k).map(|j| format!("mu_{j}")));
        let rows: Vec<Vec<String>> = eig
            .kappas
            .iter()
            .zip(&eig.mus)
            .map(|(kappa, mus)| std::iter::once(num(*kappa)).chain(mus.iter().map(|&m| num(m))).collect())
            .collect();
        return output.write(output.out.as_deref(), &table(&header, &rows, format)?);
    }

    let mut header = vec![name.to_string()];
    match spec.command {
        SweepCommand::Cconst => header.extend(strings(&["c", "argmin_s", "argmin_t"])),
        SweepCommand::Bound => header.extend(strings(&["bound", "ess_threshold", "states", "ground_lambda", "all_pass"])),
        SweepCommand::Spectrum => header.extend((1..=config.top_k).map(|j| format!("lambda_{j}"))),
    }
    let mut rows = Vec::with_capacity(values.len());
    for &value in &values {
        let mut c = config.clone();
        match spec.parameter {
            SweepParameter::Beta => c.curve = Some(config.curve_record()?.with_beta(value)?),
            SweepParameter::Alpha => c.alpha = value,
            SweepParameter::N => {
                let n = Some(value as usize);
                if let Some(curve) = c.curve.as_mut() {
                    curve.samples_n = n;
                }
                if let Some(graph) = c.graph.as_mut() {
                    graph.samples_n = n;
                }
            }
            SweepParameter::Kappa => unreachable!(),
        }
        let param = if spec.parameter == SweepParameter::N { format!("{}", value as usize) } else { num(value) };
        let mut row = vec![param];
        match spec.command {
            SweepCommand::Cconst => {
                let curve = c.build_curve()?;
                let est = chord_arc_constant(&curve, c.chord_arc_grid, c.refinement_levels)?;
                row.extend([num(est.value), num(est.argmin.0), num(est.argmin.1)]);
            }
            SweepCommand::Bound => {
                let r = analyze(&c)?.report;
                let ground = r.states.first().map_or(String::new(), |s| num(s.lambda));
                row.extend([num(r.bound), num(r.ess_threshold), r.states.len().to_string(), ground, r.all_pass().to_string()]);
            }
            SweepCommand::Spectrum => {
                let v = analyze(&c)?;
                row.extend((0..c.top_k).map(|j| v.search.states.get(j).map_or(String::new(), |s| num(s.lambda))));
            }
        }
        output.note(row.join(","));
        rows.push(row);
    }
    output.write(output.out.as_deref(), &table(&header, &rows, format)?)
}

fn selftest_k0(format: Format, output: &Output) -> Result<(), CliError> {
    let cases = [(1.0, 1.0), (2.0, 0.5), (10.0, 1.0), (0.1, 1.0), (3.0, 0.25)];
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (kappa, c) in cases {
        let integral = k0_integral_check(kappa, c)?;
        let expected = PI / (kappa * c);
        let residual = integral - expected;
        worst = worst.max(residual.abs());
        rows.push(vec![num(kappa), num(c), num(integral), num(expected), num(residual)]);
    }
    let header = strings(&["kappa", "c", "integral", "expected", "residual"]);
    output.write(output.out.as_deref(), &table(&header, &rows, format)?)?;
    if worst > SELFTEST_TOL {
        return Err(CliError::SelfTest(format!("largest residual {worst:e} exceeds {SELFTEST_TOL:e}")));
    }
    Ok(())
}

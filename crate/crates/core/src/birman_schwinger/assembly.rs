//! Dense Nyström matrices for the Birman-Schwinger operator and its
//! comparison operator.

use super::discretization::{DiagonalRule, Discretization};
use crate::error::{domain, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::special_functions::{k0, EULER_GAMMA};
use faer::Mat;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Nodes closer than this fraction of their weights count as duplicates.
const COINCIDENCE: f64 = 1e-6;

/// Symmetrized Nyström matrix `sqrt(w_i w_j) (alpha / 2 pi) K0(...)` at fixed
/// coupling and spectral parameter.
#[derive(Debug, Clone)]
pub struct BsMatrix {
    pub entries: Mat<f64>,
    pub alpha: f64,
    pub kappa: f64,
}

impl BsMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.read(i, j)
    }

    /// Largest `|B_ij - B_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in j + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

fn check_parameters(alpha: f64, kappa: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain(format!("coupling must be positive, got {alpha}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(domain(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}

/// `B_ij = (alpha / 2 pi) sqrt(w_i w_j) K0(kappa |gamma(s_i) - gamma(s_j)|)`.
pub fn assemble_bs_matrix(disc: &Discretization, alpha: f64, kappa: f64) -> Result<BsMatrix> {
    check_parameters(alpha, kappa)?;
    let distance = |i: usize, j: usize| disc.points[i].distance(disc.points[j]);
    let diagonal = |i: usize| match disc.rule {
        DiagonalRule::Corrected => corrected_diagonal(kappa, disc.weights[i]),
        DiagonalRule::PanelIntegral { order } => panel_diagonal(disc, i, kappa, 1.0, order, true),
    };
    assemble(disc, alpha, kappa, distance, diagonal)
}

/// Same assembly with the kernel `K0(kappa c dist_Gamma(s_i, s_j))`, which
/// dominates the true kernel entrywise whenever `c <= c(Gamma)`.
pub fn assemble_comparison_matrix(c: f64, disc: &Discretization, alpha: f64, kappa: f64) -> Result<BsMatrix> {
    check_parameters(alpha, kappa)?;
    if !(c > 0.0 && c <= 1.0) {
        return Err(domain(format!("comparison constant must lie in (0, 1], got {c}")));
    }
    if disc.curves.len() != 1 {
        return Err(domain("the comparison operator needs a single curve"));
    }
    let distance = |i: usize, j: usize| c * disc.geodesic(i, j).unwrap_or(f64::NAN);
    let diagonal = |i: usize| match disc.rule {
        DiagonalRule::Corrected => corrected_diagonal(kappa * c, disc.weights[i]),
        DiagonalRule::PanelIntegral { order } => panel_diagonal(disc, i, kappa, c, order, false),
    };
    assemble(disc, alpha, kappa, distance, diagonal)
}

fn assemble(
    disc: &Discretization,
    alpha: f64,
    kappa: f64,
    distance: impl Fn(usize, usize) -> f64 + Sync,
    diagonal: impl Fn(usize) -> f64 + Sync,
) -> Result<BsMatrix> {
    let n = disc.len();
    let scale = alpha / (2.0 * PI);
    let rows: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n - i];
            row[0] = scale * diagonal(i);
            for j in i + 1..n {
                let r = distance(i, j);
                if !(r > COINCIDENCE * disc.weights[i].min(disc.weights[j])) {
                    return Err(Error::Assembly(format!("nodes {i} and {j} coincide (distance {r:e})")));
                }
                row[j - i] = scale * (disc.weights[i] * disc.weights[j]).sqrt() * k0(kappa * r);
            }
            Ok(row)
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Assembly("non-finite matrix entry".into()));
    }
    let entries = Mat::from_fn(n, n, |i, j| if i <= j { rows[i][j - i] } else { rows[j][i - j] });
    Ok(BsMatrix { entries, alpha, kappa })
}

/// Self-term of the corrected trapezoidal rule for `K0(kappa |s - s_i|)` on a
/// locally uniform mesh of width `w`: `w (ln(4 pi / (kappa w)) - gamma_E)`.
pub fn corrected_diagonal(kappa: f64, w: f64) -> f64 {
    w * ((4.0 * PI / (kappa * w)).ln() - EULER_GAMMA)
}

/// Integral of `K0(kappa c d(s))` over the node's own panel `[s_i - w/2, s_i + w/2]`,
/// with `d` the chord (`chord = true`) or the arc-length offset. The logarithm is
/// integrated exactly; the bounded remainder by Gauss-Legendre on each half.
fn panel_diagonal(disc: &Discretization, i: usize, kappa: f64, c: f64, order: usize, chord: bool) -> f64 {
    let curve = &disc.curves[disc.part[i]];
    let s0 = disc.nodes[i];
    let half = 0.5 * disc.weights[i];
    let (lo, hi) = curve.domain();
    let (a, b) = if curve.is_loop() { (half, half) } else { ((s0 - lo).min(half), (hi - s0).min(half)) };
    let p0 = disc.points[i];
    let rule = GaussLegendre::new(order);
    let remainder = |u: f64| {
        let d = if chord { curve.point_at(s0 + u).distance(p0) } else { u.abs() };
        k0(kappa * c * d) + u.abs().ln()
    };
    let log_part = |x: f64| if x > 0.0 { x * x.ln() - x } else { 0.0 };
    let smooth = rule.integrate(-a, 0.0, remainder) + rule.integrate(0.0, b, remainder);
    // Scale back to the symmetrized entry, whose weight is the panel width.
    let integral = smooth - log_part(a) - log_part(b);
    integral * disc.weights[i] / (a + b)
}

/// Schur test bound `sqrt(max_i sum_j K_ij w_j * max_j sum_i K_ij w_i)` on the
/// unsymmetrized kernel-times-weight form of `b`.
pub fn schur_row_bound(b: &BsMatrix, disc: &Discretization) -> f64 {
    let n = b.n();
    let w = &disc.weights;
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = 0.0;
            let mut col = 0.0;
            for j in 0..n {
                let v = b.get(i, j);
                row += v * (w[j] / w[i]).sqrt();
                col += b.get(j, i) * (w[j] / w[i]).sqrt();
            }
            (row, col)
        })
        .collect();
    let max_row = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let max_col = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    (max_row * max_col).sqrt()
}

/// Norm of the comparison operator on a straight line, `alpha / (2 c kappa)`:
/// the supremum of its Fourier multiplier `alpha / (2 sqrt(c^2 kappa^2 + p^2))`.
pub fn bs_norm_line_analytic(alpha: f64, c: f64, kappa: f64) -> Result<f64> {
    for (v, what) in [(alpha, "coupling"), (c, "chord-arc constant"), (kappa, "kappa")] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!("{what} must be positive, got {v}")));
        }
    }
    Ok(alpha / (2.0 * c * kappa))
}

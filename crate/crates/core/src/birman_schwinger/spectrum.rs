//! Eigenvalue branches `mu_j(kappa)` and the bound states where they cross 1.

use super::assembly::assemble_bs_matrix;
use super::discretization::Discretization;
use super::eigen::{top_eigenpairs, top_eigenvalues};
use crate::defaults::{BRACKET_FLOOR, DEGENERACY_TOL, ROOT_TOL};
use crate::error::{domain, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// `count` points from `lo` to `hi`, equally spaced in `ln kappa`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(domain(format!("need 0 < lo < hi and at least two points, got [{lo}, {hi}] x {count}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect())
}

/// Top eigenvalues of the Birman-Schwinger matrix on a grid of `kappa`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenTable {
    pub kappas: Vec<f64>,
    /// One row per kappa, eigenvalues decreasing.
    pub mus: Vec<Vec<f64>>,
}

impl EigenTable {
    /// CSV with header `kappa,mu_1,...,mu_k`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let k = self.mus.first().map_or(0, Vec::len);
        let mut out = String::from("kappa");
        for j in 1..=k {
            write!(out, ",mu_{j}").unwrap();
        }
        out.push('\n');
        for (kappa, row) in self.kappas.iter().zip(&self.mus) {
            write!(out, "{kappa:.16e}").unwrap();
            for mu in row {
                write!(out, ",{mu:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn eigenvalue_curve(disc: &Discretization, alpha: f64, kappas: &[f64], top_k: usize) -> Result<EigenTable> {
    if top_k == 0 {
        return Err(domain("top_k must be positive"));
    }
    if kappas.is_empty() || kappas.windows(2).any(|w| !(w[1] > w[0])) || !(kappas[0] > 0.0) {
        return Err(domain("kappa grid must be positive and strictly increasing"));
    }
    let mus = kappas
        .par_iter()
        .map(|&kappa| top_eigenvalues(&assemble_bs_matrix(disc, alpha, kappa)?.entries, top_k))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenTable { kappas: kappas.to_vec(), mus })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    pub kappa: f64,
    pub lambda: f64,
    /// 1-based rank of the eigenvalue branch that crosses 1.
    pub branch: usize,
    /// Number of branches crossing 1 at the same kappa (within the degeneracy tolerance).
    pub multiplicity: usize,
    pub residual: f64,
    pub bracket: (f64, f64),
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
}

/// The external record of a bound state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStateRecord {
    pub kappa: f64,
    pub lambda: f64,
    pub branch: usize,
    pub residual: f64,
}

impl BoundState {
    pub fn record(&self) -> BoundStateRecord {
        BoundStateRecord { kappa: self.kappa, lambda: self.lambda, branch: self.branch, residual: self.residual }
    }
}

/// Serializes states as a JSON array of `{kappa, lambda, branch, residual}`.
pub fn states_to_json(states: &[BoundState]) -> String {
    let records: Vec<BoundStateRecord> = states.iter().map(BoundState::record).collect();
    serde_json::to_string_pretty(&records).expect("bound states serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport {
    pub branch: usize,
    pub mu_at_min: f64,
    pub mu_at_max: f64,
    pub crossed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStateSearch {
    /// Sorted by `lambda`, ground state first.
    pub states: Vec<BoundState>,
    pub branches: Vec<BranchReport>,
    pub diagnostics: Vec<String>,
}

/// Locates `mu_j(kappa) = 1` on `[kappa_min, kappa_max]` for the `top_k`
/// largest branches. Each branch is strictly decreasing in kappa, so a sign
/// change at the bracket ends gives exactly one root, found by the Illinois
/// variant of regula falsi in `ln kappa`.
pub fn find_bound_states(
    disc: &Discretization,
    alpha: f64,
    kappa_min: f64,
    kappa_max: f64,
    top_k: usize,
) -> Result<BoundStateSearch> {
    if !(kappa_min > 0.0 && kappa_max > kappa_min && kappa_max.is_finite()) {
        return Err(domain(format!("need 0 < kappa_min < kappa_max, got [{kappa_min}, {kappa_max}]")));
    }
    if top_k == 0 {
        return Err(domain("top_k must be positive"));
    }
    let h = disc.max_weight();
    if h > 0.25 / kappa_max {
        return Err(domain(format!(
            "mesh width {h:.4} does not resolve the kernel at kappa_max = {kappa_max} (need <= {:.4}); add nodes or shorten the truncation",
            0.25 / kappa_max
        )));
    }
    let mu = |kappa: f64| -> Result<Vec<f64>> { top_eigenvalues(&assemble_bs_matrix(disc, alpha, kappa)?.entries, top_k) };
    let (at_min, at_max) = rayon::join(|| mu(kappa_min), || mu(kappa_max));
    let (at_min, at_max) = (at_min?, at_max?);
    let k = at_min.len().min(at_max.len());

    let mut diagnostics = Vec::new();
    let branches: Vec<BranchReport> = (0..k)
        .map(|j| BranchReport {
            branch: j + 1,
            mu_at_min: at_min[j],
            mu_at_max: at_max[j],
            crossed: at_min[j] > 1.0 && at_max[j] < 1.0,
        })
        .collect();
    for b in &branches {
        if b.mu_at_max >= 1.0 {
            diagnostics.push(format!(
                "branch {} is still {:.6} at kappa_max; a deeper state may lie outside the bracket",
                b.branch, b.mu_at_max
            ));
        }
    }
    if k == top_k && at_min[k - 1] > 1.0 {
        diagnostics.push(format!("all {top_k} branches exceed 1 at kappa_min; more states may exist beyond top_k"));
    }
    if !branches.iter().any(|b| b.crossed) {
        diagnostics.push(format!("no branch crosses 1 on [{kappa_min}, {kappa_max}]"));
    }

    let roots = branches
        .par_iter()
        .filter(|b| b.crossed)
        .map(|b| {
            let j = b.branch - 1;
            let branch = |kappa: f64| -> Result<f64> { Ok(mu(kappa)?[j] - 1.0) };
            let (kappa, residual, bracket) = illinois(branch, kappa_min, kappa_max, at_min[j] - 1.0, at_max[j] - 1.0)?;
            let pairs = top_eigenpairs(&assemble_bs_matrix(disc, alpha, kappa)?.entries, j + 1)?;
            Ok(BoundState {
                kappa,
                lambda: -kappa * kappa,
                branch: b.branch,
                multiplicity: 1,
                residual,
                bracket,
                eigenvector: pairs[j].1.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut states = roots;
    states.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.branch.cmp(&b.branch)));
    let mut start = 0;
    while start < states.len() {
        let mut end = start + 1;
        while end < states.len() && (states[end].kappa - states[end - 1].kappa).abs() <= DEGENERACY_TOL {
            end += 1;
        }
        for s in &mut states[start..end] {
            s.multiplicity = end - start;
        }
        start = end;
    }
    Ok(BoundStateSearch { states, branches, diagnostics })
}

/// Root of a decreasing `f` with `f(lo) > 0 > f(hi)`, in the variable `ln kappa`.
/// Returns the root, `|f(root)|`, and the final bracket.
fn illinois(
    f: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
) -> Result<(f64, f64, (f64, f64))> {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let (mut fa, mut fb) = (f_lo, f_hi);
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..200 {
        if best.1.abs() <= ROOT_TOL || b.exp() - a.exp() <= BRACKET_FLOOR {
            break;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        // Fall back to bisection when the secant stalls at an end.
        let width = b - a;
        if !(x > a + 1e-3 * width && x < b - 1e-3 * width) {
            x = 0.5 * (a + b);
        }
        let fx = f(x.exp())?;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx > 0.0 {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    Ok((best.0.exp(), best.1.abs(), (a.exp(), b.exp())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illinois_finds_simple_root() {
        let (x, r, (a, b)) = illinois(|k: f64| Ok(2.0 - k), 0.5, 4.0, 1.5, -2.0).unwrap();
        assert!((x - 2.0).abs() < 1e-8);
        assert!(r <= ROOT_TOL);
        assert!(a <= x && x <= b);
    }

    #[test]
    fn illinois_on_steep_log_branch() {
        let f = |k: f64| Ok(-(k.ln()) / 10.0 - 0.3);
        let (x, r, _) = illinois(f, 1e-4, 10.0, f(1e-4).unwrap(), f(10.0).unwrap()).unwrap();
        assert!(r <= ROOT_TOL);
        assert!((x - (-3.0f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn log_grid() {
        let g = log_spaced(0.1, 10.0, 3).unwrap();
        assert!((g[1] - 1.0).abs() < 1e-14);
        assert!(log_spaced(1.0, 1.0, 5).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = EigenTable { kappas: vec![0.5, 1.0], mus: vec![vec![1.0, 0.5], vec![0.25, 0.125]] };
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "kappa,mu_1,mu_2");
        assert_eq!(lines[1], "5.0000000000000000e-1,1.0000000000000000e0,5.0000000000000000e-1");
    }
}

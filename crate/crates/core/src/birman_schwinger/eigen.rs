//! Symmetric eigenvalue routines.

use super::assembly::BsMatrix;
use crate::error::{domain, Error, Result};
use faer::{Mat, Side};

fn check_finite(m: &Mat<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(domain("eigenvalues need a non-empty square matrix"));
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m.read(i, j).is_finite() {
                return Err(Error::Assembly(format!("entry ({i}, {j}) is not finite")));
            }
        }
    }
    Ok(())
}

/// The `k` largest eigenvalues of a symmetric matrix, in decreasing order.
pub fn top_eigenvalues(m: &Mat<f64>, k: usize) -> Result<Vec<f64>> {
    check_finite(m)?;
    let values = m.selfadjoint_eigenvalues(Side::Lower);
    Ok(values.into_iter().rev().take(k).collect())
}

/// The `k` largest eigenpairs, eigenvalues decreasing, unit eigenvectors.
pub fn top_eigenpairs(m: &Mat<f64>, k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    check_finite(m)?;
    let n = m.nrows();
    let evd = m.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    Ok((0..k.min(n))
        .map(|r| {
            let c = n - 1 - r;
            let mut v: Vec<f64> = (0..n).map(|i| u.read(i, c)).collect();
            // Fix the sign so the largest component is positive.
            let big = v.iter().cloned().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
            if big < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            (s.read(c), v)
        })
        .collect())
}

/// Largest eigenvalue and its unit eigenvector, by full symmetric decomposition.
pub fn largest_eigenvalue(b: &BsMatrix) -> Result<(f64, Vec<f64>)> {
    Ok(top_eigenpairs(&b.entries, 1)?.remove(0))
}

/// Power iteration for the dominant eigenvalue of a symmetric matrix with a
/// positive dominant eigenvalue. Stops when the Rayleigh quotient changes by
/// less than `tol` (relative) and fails after `max_iter` steps.
pub fn power_iteration(m: &Mat<f64>, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    check_finite(m)?;
    let n = m.nrows();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut rayleigh = f64::NAN;
    for _ in 0..max_iter {
        let mut next = vec![0.0; n];
        for (j, &vj) in v.iter().enumerate() {
            for (i, x) in next.iter_mut().enumerate() {
                *x += m.read(i, j) * vj;
            }
        }
        let q: f64 = next.iter().zip(&v).map(|(a, b)| a * b).sum();
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Ok((0.0, v));
        }
        next.iter_mut().for_each(|x| *x /= norm);
        let converged = (q - rayleigh).abs() <= tol * q.abs().max(f64::MIN_POSITIVE);
        rayleigh = q;
        v = next;
        if converged {
            return Ok((rayleigh, v));
        }
    }
    Err(Error::Convergence { iterations: max_iter, rayleigh })
}

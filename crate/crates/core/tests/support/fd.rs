//! Finite-difference oracle: the five-point Laplacian on `[-a, a]^2` with
//! Dirichlet walls and the delta interaction smeared over the grid points
//! within `h` of the curve (a strip of width `2h` and depth `alpha / 2h`).
//! The lowest eigenvalue comes from shifted inverse iteration, each solve by
//! conjugate gradients preconditioned with the sine-transform Poisson solver.

use rustdct::{Dst1, DctPlanner};
use std::sync::Arc;

pub struct FdProblem {
    n: usize,
    h: f64,
    /// Potential at each interior grid point (row-major).
    potential: Vec<f64>,
    dst: Arc<dyn Dst1<f64>>,
    laplace_1d: Vec<f64>,
}

impl FdProblem {
    /// Interior grid of `[-half_width, half_width]^2` with spacing `h`;
    /// `distance(x, y)` is the distance from a point to the curve.
    pub fn new(half_width: f64, h: f64, alpha: f64, distance: impl Fn(f64, f64) -> f64) -> Self {
        let cells = (2.0 * half_width / h).round() as usize;
        let n = cells - 1;
        let coord = |i: usize| -half_width + h * (i + 1) as f64;
        let depth = alpha / (2.0 * h);
        let mut potential = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if distance(coord(j), coord(i)) < h {
                    potential[i * n + j] = -depth;
                }
            }
        }
        let dst = DctPlanner::new().plan_dst1(n);
        let laplace_1d = (0..n)
            .map(|k| (2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos()) / (h * h))
            .collect();
        Self { n, h, potential, dst, laplace_1d }
    }

    /// `(-Delta_h + V) x`.
    fn apply_h(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let inv = 1.0 / (self.h * self.h);
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                let mut s = 4.0 * x[k];
                if j > 0 {
                    s -= x[k - 1];
                }
                if j + 1 < n {
                    s -= x[k + 1];
                }
                if i > 0 {
                    s -= x[k - n];
                }
                if i + 1 < n {
                    s -= x[k + n];
                }
                out[k] = s * inv + self.potential[k] * x[k];
            }
        }
    }

    fn dst2d(&self, x: &mut [f64]) {
        let n = self.n;
        for row in x.chunks_mut(n) {
            self.dst.process_dst1(row);
        }
        let mut col = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = x[i * n + j];
            }
            self.dst.process_dst1(&mut col);
            for i in 0..n {
                x[i * n + j] = col[i];
            }
        }
    }

    /// Solves `(-Delta_h - shift) x = b` exactly in the sine basis.
    fn precondition(&self, b: &[f64], shift: f64) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        self.dst2d(&mut x);
        let norm = (2.0 / (n + 1) as f64).powi(2);
        for i in 0..n {
            for j in 0..n {
                x[i * n + j] *= norm / (self.laplace_1d[i] + self.laplace_1d[j] - shift);
            }
        }
        self.dst2d(&mut x);
        x
    }

    /// Preconditioned CG for `(H - shift) x = b`, starting from `x`.
    fn solve(&self, b: &[f64], shift: f64, x: &mut [f64], tol: f64) {
        let len = b.len();
        let mut ax = vec![0.0; len];
        self.apply_h(x, &mut ax);
        let mut r: Vec<f64> = (0..len).map(|k| b[k] - (ax[k] - shift * x[k])).collect();
        let b_norm = dot(b, b).sqrt();
        let mut z = self.precondition(&r, shift);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..2000 {
            if dot(&r, &r).sqrt() <= tol * b_norm {
                break;
            }
            self.apply_h(&p, &mut ax);
            for k in 0..len {
                ax[k] -= shift * p[k];
            }
            let step = rz / dot(&p, &ax);
            for k in 0..len {
                x[k] += step * p[k];
                r[k] -= step * ax[k];
            }
            z = self.precondition(&r, shift);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..len {
                p[k] = z[k] + beta * p[k];
            }
        }
    }

    /// Lowest eigenvalue of `H`; `shift` must lie below it.
    pub fn ground_state(&self, shift: f64) -> f64 {
        let len = self.n * self.n;
        let mut v: Vec<f64> = self.potential.iter().map(|&p| if p < 0.0 { 1.0 } else { 0.1 }).collect();
        normalize(&mut v);
        let mut next = v.clone();
        let mut hv = vec![0.0; len];
        let mut previous = f64::INFINITY;
        let mut lambda = f64::NAN;
        for _ in 0..50 {
            self.solve(&v, shift, &mut next, 1e-10);
            normalize(&mut next);
            self.apply_h(&next, &mut hv);
            lambda = dot(&next, &hv);
            v.copy_from_slice(&next);
            if (lambda - previous).abs() <= 1e-10 * lambda.abs() {
                break;
            }
            previous = lambda;
        }
        lambda
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

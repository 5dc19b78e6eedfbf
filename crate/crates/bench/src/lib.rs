//! Fixtures shared by the benchmarks.

use leaky_core::{Curve, DiagonalRule, Discretization};
use std::sync::Arc;

pub fn circle_mesh(n: usize) -> Discretization {
    Discretization::new(&Arc::new(Curve::circle(1.0).unwrap()), n, DiagonalRule::Corrected).unwrap()
}

pub fn angle_mesh(n: usize) -> Discretization {
    let angle = Curve::angle(std::f64::consts::FRAC_PI_3, 40.0).unwrap();
    Discretization::new(&Arc::new(angle), n, DiagonalRule::Corrected).unwrap()
}

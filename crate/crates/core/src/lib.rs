//! Spectral lower bounds and bound states for two-dimensional Schrödinger
//! operators with an attractive delta interaction supported on planar curves
//! ("leaky" quantum wires and graphs).
//!
//! The pipeline is: describe a [`Curve`], estimate its chord-arc constant,
//! turn that into a lower bound on the spectrum, and compute the actual bound
//! states from the Birman-Schwinger operator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birman_schwinger;
pub mod curve;
pub mod defaults;
pub mod error;
pub mod point;
pub mod quadrature;
pub mod special_functions;
pub mod spectral_bounds;

pub use birman_schwinger::{BoundState, BsMatrix, DiagonalRule, Discretization, EigenTable};
pub use curve::{Builtin, ChordArcEstimate, Curve, CurveKind, Decomposition, ExtensionStrategy};
pub use error::{Error, Result};
pub use point::Point2;
pub use spectral_bounds::{LeakyGraph, SolverSettings, SpectralReport};

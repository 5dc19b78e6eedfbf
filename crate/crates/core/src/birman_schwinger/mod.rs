//! Nyström discretization of the Birman-Schwinger operator
//! `(alpha / 2 pi) K0(kappa |gamma(s) - gamma(s')|)` and bound states from
//! its eigenvalue branches.

pub mod assembly;
pub mod discretization;
pub mod eigen;
pub mod spectrum;

pub use assembly::{
    assemble_bs_matrix, assemble_comparison_matrix, bs_norm_line_analytic, corrected_diagonal, schur_row_bound, BsMatrix,
};
pub use discretization::{DiagonalRule, Discretization, DomainTag};
pub use eigen::{largest_eigenvalue, power_iteration, top_eigenpairs, top_eigenvalues};
pub use spectrum::{
    eigenvalue_curve, find_bound_states, log_spaced, states_to_json, BoundState, BoundStateRecord, BoundStateSearch,
    BranchReport, EigenTable,
};

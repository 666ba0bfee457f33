//! Empirical α, β and 2-mixing coefficients over discretised event
//! algebras, covariance decay, and decay-rate fits.
//!
//! The suprema are exact over the finite algebras generated by the cell
//! grids, so they are lower approximations of the mixing coefficients.

mod curves;
mod estimators;
mod table;

pub use curves::{
    batch_se, covariance_curve, decay_fit, estimate_curve, CovarianceCurve, DecayFit, EstimateConfig, EstimateCurve,
    FitClass, LineFit,
};
pub use estimators::{
    alpha_hat, alpha_sup, alpha_sup_with_hints, beta_hat, beta_sup, estimates_on, two_mix_hat, two_mix_sup, AlphaHat,
    EXACT_SIDE_LIMIT, HEURISTIC_RESTARTS,
};
pub use table::{
    build_table, lead_coordinate_matrix, Anchor, CellMatrix, JointCellTable, BATCHES, SAMPLE_LIMIT, SIDE_CELL_LIMIT,
    TABLE_CELL_LIMIT,
};

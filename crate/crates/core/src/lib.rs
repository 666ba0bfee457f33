//! Mixing-rate bounds and empirical mixing estimators for time-varying
//! ARCH(p) and stationary ARCH(∞) processes.
//!
//! The crate is organised bottom-up:
//!
//! * [`process_models`]: process specifications, innovation laws,
//!   assumption checks and reproducible path simulation.
//! * [`volterra`]: the P/Q split of a future value into a part driven by
//!   fresh innovations and a part linear in the conditioning past, plus the
//!   ψ-inversion of the ARCH(∞) coefficient sequence.
//! * [`density_analysis`]: total-variation distances between scale mixtures
//!   of the innovation density and the certified Lipschitz constants.
//! * [`bounds`]: the η-minimisation and the α/β/2-mixing bound curves.
//! * [`mixing_estimation`]: contingency-table estimators of α, β and the
//!   2-mixing coefficient from simulated ensembles.
//! * [`cli`]: the `archmix` command-line driver.

pub mod bounds;
pub mod cli;
pub mod density_analysis;
pub mod error;
pub mod mixing_estimation;
pub mod process_models;
pub mod quadrature;
pub mod special;
pub mod volterra;

pub use error::{Error, Result};

//! Acquisition functions and their maximization.
//!
//! Every score here is to be maximized. MES and its additive and
//! hyperparameter-marginalized forms are built on [`g`]; the classical
//! baselines (UCB, PI, EI, EST, add-GP-UCB) share the same optimizer.

mod functions;
mod optimize;
mod spec;

pub use crate::gp::PointPrediction;
pub use functions::{
    add_gp_ucb_alpha, add_gp_ucb_beta, add_mes_alpha, ei_alpha, est_alpha, finite_set_beta, g, ln_g, mes_alpha,
    mes_alpha_marginal, pi_alpha, ucb_alpha,
};
pub use optimize::{
    optimize_acquisition, optimize_acquisition_per_component, optimize_over_candidates, refine_locally, Optimum,
};
pub use spec::{AcquisitionSpec, Sampler};

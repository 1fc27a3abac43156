//! The optimization loops: initial design, then repeated model fit,
//! max-value sampling, acquisition maximization and evaluation.

mod config;
mod run;
mod trace;

pub use config::{BoConfig, DecompositionSpec};
pub use run::{model_adaptation_step, run, run_add_mes, run_mes, Adaptation};
pub use trace::{BoTrace, IterationRecord, Observation};

//! Benchmark objectives, regret metrics and the experiment runner that
//! turns a grid of methods × objectives × repetitions into CSV tables.

mod experiment;
mod objectives;
mod regret;
mod spec;

pub use experiment::{
    quantile, read_csv, run_experiment, summarize, write_csv, ExperimentResult, FailureRow, RegretRow, RunResult,
    SummaryRow, FAILURE_HEADER, REGRET_HEADER, SUMMARY_HEADER,
};
pub use objectives::{
    eggholder, michalewicz, sample_synthetic_additive_objective, sample_synthetic_gp_objective, shekel, shekel_center,
    KnownMax, Objective, EGGHOLDER_ARGMIN, EGGHOLDER_MAX, MIN_SYNTHETIC_FEATURES,
};
pub use regret::{inference_regret, posterior_inference_regret, simple_regret};
pub use spec::{BenchDecomposition, ExperimentSpec, Instance, LoopSettings, ObjectiveKind, ObjectiveSpec, RunSpec};

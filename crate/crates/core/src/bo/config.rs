use serde::{Deserialize, Serialize};

use crate::acquisition::AcquisitionSpec;
use crate::error::{Error, Result};
use crate::gp::{KernelParams, Partition};
use crate::maxvalue::FeatureSearch;

/// Where an additive model's dimension groups come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DecompositionSpec {
    Fixed {
        groups: Vec<Vec<usize>>,
    },
    /// Searched once, right after the initial design. With `sample_points`,
    /// the search scores that many extra uniform evaluations, which are
    /// used for nothing else; otherwise it scores the initial design.
    Learn {
        n_candidates: usize,
        max_group_size: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_points: Option<usize>,
    },
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_refit_budget() -> usize {
    200
}

fn default_features() -> usize {
    1000
}

fn default_probes() -> usize {
    2000
}

/// Settings for one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoConfig {
    pub acquisition: AcquisitionSpec,
    /// Number of queries `T` after the initial design.
    pub iterations: usize,
    /// Prior kernel; also the starting point of every refit.
    pub kernel: KernelParams,
    /// Uniformly random observations made before the first query.
    #[serde(default = "one")]
    pub initial_design: usize,
    /// Refit hyperparameters when `t` is a multiple of this; never if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refit_every: Option<usize>,
    #[serde(default = "default_refit_budget")]
    pub refit_budget: usize,
    /// Random features per map on the feature sampler path.
    #[serde(default = "default_features")]
    pub n_features: usize,
    /// Representative points for the Gumbel fit; `min(10000, 500·d)` if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    /// Floor sampled maxima just above the best observation.
    #[serde(default = "yes")]
    pub clamp: bool,
    /// Standard deviation of Gaussian noise added to every evaluation.
    #[serde(default)]
    pub observation_noise: f64,
    /// Acquisition optimizer probes per input dimension.
    #[serde(default = "default_probes")]
    pub probes_per_dim: usize,
    #[serde(default)]
    pub feature_search: FeatureSearch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSpec>,
    /// Record the posterior-mean maximizer after every observation.
    #[serde(default = "yes")]
    pub track_inference: bool,
    #[serde(default)]
    pub seed: u64,
}

impl BoConfig {
    /// Defaults for everything but the essentials.
    pub fn new(acquisition: AcquisitionSpec, iterations: usize, kernel: KernelParams) -> Self {
        Self {
            acquisition,
            iterations,
            kernel,
            initial_design: 1,
            refit_every: None,
            refit_budget: default_refit_budget(),
            n_features: default_features(),
            grid_size: None,
            clamp: true,
            observation_noise: 0.0,
            probes_per_dim: default_probes(),
            feature_search: FeatureSearch::default(),
            decomposition: None,
            track_inference: true,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Check every field; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.acquisition.validate()?;
        self.kernel.validate().map_err(|e| Error::Config(format!("kernel: {e}")))?;
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if self.refit_every == Some(0) {
            return bad("refit_every must be at least 1".into());
        }
        if self.n_features == 0 {
            return bad("n_features must be at least 1".into());
        }
        if matches!(self.grid_size, Some(n) if n < 2) {
            return bad("grid_size must be at least 2".into());
        }
        if !(self.observation_noise >= 0.0 && self.observation_noise.is_finite()) {
            return bad(format!("observation_noise must be finite and non-negative, got {}", self.observation_noise));
        }
        if self.probes_per_dim == 0 {
            return bad("probes_per_dim must be at least 1".into());
        }
        let fs = &self.feature_search;
        if fs.restarts == 0 || fs.probes_per_dim == 0 {
            return bad("feature_search.restarts and feature_search.probes_per_dim must be at least 1".into());
        }
        let additive = self.acquisition.is_additive();
        if additive && self.refit_every.is_some() {
            return bad("refit_every is not supported with additive acquisitions".into());
        }
        match &self.decomposition {
            Some(_) if !additive => bad("decomposition is only used by additive acquisitions".into()),
            Some(DecompositionSpec::Fixed { groups }) => Partition::new(groups.clone(), self.kernel.dim())
                .map(|_| ())
                .map_err(|e| Error::Config(format!("decomposition.groups: {e}"))),
            Some(DecompositionSpec::Learn { n_candidates, max_group_size, sample_points }) => {
                if *n_candidates == 0 || *max_group_size == 0 {
                    bad("decomposition.n_candidates and decomposition.max_group_size must be at least 1".into())
                } else if sample_points.is_some_and(|n| n < 2) {
                    bad("decomposition.sample_points must be at least 2".into())
                } else if sample_points.is_none() && self.initial_design < 2 {
                    bad("a learned decomposition needs initial_design of at least 2".into())
                } else {
                    Ok(())
                }
            }
            None => Ok(()),
        }
    }
}

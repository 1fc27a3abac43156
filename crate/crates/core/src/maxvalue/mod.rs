//! Samplers for the function maximum `y*`.
//!
//! Two routes are provided. The Gumbel route discretizes the domain, treats
//! the posterior marginals on the grid as independent, and fits a Gumbel
//! distribution to the resulting max-CDF by matching its quartiles. The
//! feature route draws whole posterior functions as random-Fourier-feature
//! linear models and maximizes each draw over the box.

mod features;
mod grid;
mod gumbel;

use serde::{Deserialize, Serialize};

pub use features::{
    build_feature_map, maximize_feature_function, sample_max_features, sample_max_features_blocks, FeatureMap,
    FeaturePosterior, FeatureSearch,
};
pub use grid::{default_grid_size, GridStats};
pub use gumbel::{GumbelParams, EULER_GAMMA, LOWER_QUANTILE, UPPER_QUANTILE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleSource {
    Gumbel,
    Feature,
}

/// A set of sampled maxima `Y*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxValueSamples {
    pub values: Vec<f64>,
    pub source: SampleSource,
    /// Additive-model component the samples belong to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
}

impl MaxValueSamples {
    pub fn new(values: Vec<f64>, source: SampleSource) -> Self {
        assert!(!values.is_empty(), "at least one max-value sample is required");
        Self { values, source, component: None }
    }

    pub fn for_component(mut self, m: usize) -> Self {
        self.component = Some(m);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raise every sample to at least `floor`.
    pub fn floor_at(&mut self, floor: f64) {
        for v in &mut self.values {
            *v = v.max(floor);
        }
    }
}

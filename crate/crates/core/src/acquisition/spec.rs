use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::KernelParams;

/// How max-value samples are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    #[default]
    Gumbel,
    Feature,
}

fn default_samples() -> usize {
    1
}

/// Which acquisition function drives the loop, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AcquisitionSpec {
    /// Max-value entropy search with `samples` draws of `y*`.
    Mes {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        sampler: Sampler,
    },
    /// Per-component MES on an additive model.
    AddMes {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        sampler: Sampler,
    },
    /// MES summed over a fixed set of hyperparameter settings.
    MesMarginal {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        sampler: Sampler,
        hyperparameters: Vec<KernelParams>,
    },
    /// GP-UCB; without `beta`, the finite-set schedule of [`super::finite_set_beta`].
    Ucb {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    /// Probability of improvement over `incumbent + margin`; the margin
    /// defaults to the observation noise standard deviation.
    Pi {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        margin: Option<f64>,
    },
    Ei,
    /// EST with `m` set to the mean of the fitted Gumbel.
    Est,
    /// Per-component UCB with `β_t^(m) = |A_m| log(2t)/5`.
    AddGpUcb,
    /// Uniform random queries.
    Random,
}

impl AcquisitionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Mes { samples, .. } | Self::AddMes { samples, .. } if *samples == 0 => {
                Err(Error::Config("acquisition.samples must be at least 1".into()))
            }
            Self::MesMarginal { samples, hyperparameters, .. } => {
                if *samples == 0 {
                    return Err(Error::Config("acquisition.samples must be at least 1".into()));
                }
                if hyperparameters.is_empty() {
                    return Err(Error::Config("acquisition.hyperparameters must be non-empty".into()));
                }
                for (i, h) in hyperparameters.iter().enumerate() {
                    h.validate().map_err(|e| Error::Config(format!("acquisition.hyperparameters[{i}]: {e}")))?;
                }
                Ok(())
            }
            Self::Ucb { beta: Some(b) } if !(*b >= 0.0) => {
                Err(Error::Config(format!("acquisition.beta must be non-negative, got {b}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether the loop must run on an additive model.
    pub fn is_additive(&self) -> bool {
        matches!(self, Self::AddMes { .. } | Self::AddGpUcb)
    }

    /// Number of `y*` draws per iteration, when the method samples them.
    pub fn samples(&self) -> Option<usize> {
        match self {
            Self::Mes { samples, .. } | Self::AddMes { samples, .. } | Self::MesMarginal { samples, .. } => {
                Some(*samples)
            }
            _ => None,
        }
    }

    pub fn sampler(&self) -> Option<Sampler> {
        match self {
            Self::Mes { sampler, .. } | Self::AddMes { sampler, .. } | Self::MesMarginal { sampler, .. } => {
                Some(*sampler)
            }
            Self::Est => Some(Sampler::Gumbel),
            _ => None,
        }
    }

    /// Short label, e.g. `mes-gumbel-100`.
    pub fn label(&self) -> String {
        let s = |s: &Sampler| match s {
            Sampler::Gumbel => "gumbel",
            Sampler::Feature => "feature",
        };
        match self {
            Self::Mes { samples, sampler } => format!("mes-{}-{samples}", s(sampler)),
            Self::AddMes { samples, sampler } => format!("add-mes-{}-{samples}", s(sampler)),
            Self::MesMarginal { samples, sampler, .. } => format!("mes-marginal-{}-{samples}", s(sampler)),
            Self::Ucb { .. } => "ucb".into(),
            Self::Pi { .. } => "pi".into(),
            Self::Ei => "ei".into(),
            Self::Est => "est".into(),
            Self::AddGpUcb => "add-gp-ucb".into(),
            Self::Random => "random".into(),
        }
    }
}

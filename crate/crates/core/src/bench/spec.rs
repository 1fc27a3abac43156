use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::acquisition::AcquisitionSpec;
use crate::bo::{BoConfig, DecompositionSpec};
use crate::error::{Error, Result};
use crate::gp::{fit_hyperparameters, KernelParams, ObservationSet, Partition};
use crate::maxvalue::FeatureSearch;
use crate::rng::{substream, uniform_in};

use super::objectives::{
    sample_synthetic_additive_objective, sample_synthetic_gp_objective, KnownMax, Objective, MIN_SYNTHETIC_FEATURES,
};

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn ten() -> usize {
    10
}

fn synthetic_features() -> usize {
    MIN_SYNTHETIC_FEATURES
}

fn default_pretrain() -> usize {
    200
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

fn default_certify() -> usize {
    100_000
}

/// The function family of a benchmark objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveKind {
    Eggholder,
    Shekel {
        #[serde(default = "ten")]
        dim: usize,
    },
    Michalewicz {
        dim: usize,
    },
    Quadratic {
        center: Vec<f64>,
    },
    /// A fresh prior draw per repetition.
    SyntheticGp {
        dim: usize,
        scale: f64,
        bandwidth: f64,
        #[serde(default = "synthetic_features")]
        n_features: usize,
    },
    /// A sum of prior draws on random dimension groups, fresh per repetition.
    SyntheticAdditive {
        dim: usize,
        group_size: usize,
        scale: f64,
        bandwidth: f64,
        #[serde(default = "synthetic_features")]
        n_features: usize,
    },
    /// `−‖x − ½‖²` where `x₀ ≤ threshold`, NaN elsewhere; exercises failure
    /// handling.
    NanRegion {
        dim: usize,
        threshold: f64,
    },
}

/// One benchmark objective and how to model it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    #[serde(flatten)]
    pub kind: ObjectiveKind,
    /// Overrides the default name (family plus dimension).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Standard deviation of the noise added to every observation.
    #[serde(default)]
    pub noise_std: f64,
    /// Model kernel. Synthetic objectives default to their generating
    /// kernel; the others are fitted on `pretrain` random evaluations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelParams>,
    #[serde(default = "default_pretrain")]
    pub pretrain: usize,
}

impl ObjectiveSpec {
    pub fn new(kind: ObjectiveKind) -> Self {
        Self { kind, name: None, noise_std: 0.0, kernel: None, pretrain: default_pretrain() }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ObjectiveKind::Eggholder => 2,
            ObjectiveKind::Shekel { dim }
            | ObjectiveKind::Michalewicz { dim }
            | ObjectiveKind::SyntheticGp { dim, .. }
            | ObjectiveKind::SyntheticAdditive { dim, .. }
            | ObjectiveKind::NanRegion { dim, .. } => *dim,
            ObjectiveKind::Quadratic { center } => center.len(),
        }
    }

    pub fn label(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        let d = self.dim();
        match &self.kind {
            ObjectiveKind::Eggholder => "eggholder".into(),
            ObjectiveKind::Shekel { .. } => format!("shekel{d}"),
            ObjectiveKind::Michalewicz { .. } => format!("michalewicz{d}"),
            ObjectiveKind::Quadratic { .. } => format!("quadratic{d}"),
            ObjectiveKind::SyntheticGp { .. } => format!("synthetic_gp{d}"),
            ObjectiveKind::SyntheticAdditive { .. } => format!("synthetic_additive{d}"),
            ObjectiveKind::NanRegion { .. } => format!("nan_region{d}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let label = self.label();
        let bad = |msg: String| Err(Error::Config(format!("objective {label}: {msg}")));
        if self.dim() == 0 {
            return bad("dim must be at least 1".into());
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return bad(format!("noise_std must be finite and non-negative, got {}", self.noise_std));
        }
        if let Some(k) = &self.kernel {
            k.validate().map_err(|e| Error::Config(format!("objective {label}: kernel: {e}")))?;
            if k.dim() != self.dim() {
                return bad(format!("kernel has {} bandwidths for a {}-d objective", k.dim(), self.dim()));
            }
        } else if self.pretrain < 2 && !self.is_synthetic() {
            return bad("pretrain must be at least 2 when no kernel is given".into());
        }
        match &self.kind {
            ObjectiveKind::SyntheticGp { scale, bandwidth, n_features, .. }
            | ObjectiveKind::SyntheticAdditive { scale, bandwidth, n_features, .. } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return bad(format!("scale must be positive, got {scale}"));
                }
                if !(*bandwidth > 0.0 && bandwidth.is_finite()) {
                    return bad(format!("bandwidth must be positive, got {bandwidth}"));
                }
                if *n_features < MIN_SYNTHETIC_FEATURES {
                    return bad(format!("n_features must be at least {MIN_SYNTHETIC_FEATURES}"));
                }
                if let ObjectiveKind::SyntheticAdditive { group_size: 0, .. } = self.kind {
                    return bad("group_size must be at least 1".into());
                }
                Ok(())
            }
            ObjectiveKind::Quadratic { center } if center.iter().any(|c| !(0.0..=1.0).contains(c)) => {
                bad("center must lie in the unit box".into())
            }
            _ => Ok(()),
        }
    }

    fn is_synthetic(&self) -> bool {
        matches!(self.kind, ObjectiveKind::SyntheticGp { .. } | ObjectiveKind::SyntheticAdditive { .. })
    }

    fn generating_kernel(&self) -> Option<KernelParams> {
        match &self.kind {
            ObjectiveKind::SyntheticGp { dim, scale, bandwidth, .. }
            | ObjectiveKind::SyntheticAdditive { dim, scale, bandwidth, .. } => {
                let noise = self.noise_std.powi(2).max(1e-6 * scale);
                KernelParams::isotropic(*scale, *bandwidth, *dim, noise).ok()
            }
            _ => None,
        }
    }

    fn build(&self, seed: u64) -> Result<Objective> {
        let obj = match &self.kind {
            ObjectiveKind::Eggholder => Objective::eggholder(),
            ObjectiveKind::Shekel { dim } => Objective::shekel(*dim),
            ObjectiveKind::Michalewicz { dim } => Objective::michalewicz(*dim),
            ObjectiveKind::Quadratic { center } => Objective::quadratic(center.clone())?,
            ObjectiveKind::SyntheticGp { n_features, .. } => {
                let k = self.generating_kernel().expect("validated");
                sample_synthetic_gp_objective(&k, *n_features, seed)?
            }
            ObjectiveKind::SyntheticAdditive { group_size, n_features, .. } => {
                let k = self.generating_kernel().expect("validated");
                sample_synthetic_additive_objective(&k, *group_size, *n_features, seed)?
            }
            ObjectiveKind::NanRegion { dim, threshold } => {
                let t = *threshold;
                let gap = (0.5 - t).max(0.0);
                Objective::new("nan_region", crate::gp::Domain::unit(*dim), move |x: &[f64]| {
                    if x[0] > t {
                        f64::NAN
                    } else {
                        -x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>()
                    }
                })
                .with_known_max(KnownMax {
                    value: -gap * gap,
                    provenance: "closed form".into(),
                    oracle_budget: 0,
                })
            }
        };
        Ok(obj.with_name(self.label()).with_noise(self.noise_std))
    }

    /// Fit a kernel on uniformly random evaluations, starting from the
    /// sample variance as amplitude, bandwidths of a fifth of each side,
    /// and small noise.
    fn pretrained_kernel(&self, obj: &Objective, seed: u64) -> Result<KernelParams> {
        let mut rng = substream(seed, 0x9E7);
        let dom = obj.domain();
        let mut data = ObservationSet::default();
        for _ in 0..self.pretrain {
            let x = uniform_in(dom, &mut rng);
            let y = obj.eval(&x);
            if !y.is_finite() {
                return Err(Error::Numerical(format!("{} is not finite at {x:?}", obj.name())));
            }
            data.push(x, y);
        }
        let n = data.len() as f64;
        let mean = data.values.iter().sum::<f64>() / n;
        let var = (data.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).max(1e-12);
        let init = KernelParams::new(
            var,
            (0..dom.dim()).map(|i| 0.2 * dom.width(i)).collect(),
            (self.noise_std.powi(2)).max(1e-4 * var),
        )?;
        Ok(fit_hyperparameters(&data, &init, 200)?.params)
    }

    /// Build the objective for one repetition together with its model kernel.
    pub fn instantiate(&self, seed: u64, certify_probes: usize) -> Result<Instance> {
        let objective = self.build(seed)?;
        if certify_probes > 0 {
            objective.certify(certify_probes, seed)?;
        }
        let kernel = match (&self.kernel, self.generating_kernel()) {
            (Some(k), _) => k.clone(),
            (None, Some(k)) => k,
            (None, None) => self.pretrained_kernel(&objective, seed)?,
        };
        Ok(Instance { objective, kernel, seed })
    }
}

/// An objective ready to optimize.
#[derive(Debug, Clone)]
pub struct Instance {
    pub objective: Objective,
    pub kernel: KernelParams,
    pub seed: u64,
}

/// Additive-model groups as configured for a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BenchDecomposition {
    Fixed {
        groups: Vec<Vec<usize>>,
    },
    /// See [`DecompositionSpec::Learn`].
    Learn {
        n_candidates: usize,
        max_group_size: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_points: Option<usize>,
    },
    /// The objective's own groups; synthetic additive objectives only.
    Truth,
}

/// Loop settings shared by every method in an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSettings {
    pub iterations: usize,
    #[serde(default = "one")]
    pub initial_design: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refit_every: Option<usize>,
    #[serde(default = "default_refit_budget")]
    pub refit_budget: usize,
    #[serde(default = "default_features")]
    pub n_features: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default = "yes")]
    pub clamp: bool,
    #[serde(default = "default_probes")]
    pub probes_per_dim: usize,
    #[serde(default)]
    pub feature_search: FeatureSearch,
    /// Used by additive methods only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<BenchDecomposition>,
    #[serde(default = "yes")]
    pub track_inference: bool,
}

impl LoopSettings {
    pub fn new(iterations: usize) -> Self {
        Self {
            iterations,
            initial_design: 1,
            refit_every: None,
            refit_budget: default_refit_budget(),
            n_features: default_features(),
            grid_size: None,
            clamp: true,
            probes_per_dim: default_probes(),
            feature_search: FeatureSearch::default(),
            decomposition: None,
            track_inference: true,
        }
    }

    /// The run configuration for one method on one instance.
    pub fn config(&self, acquisition: &AcquisitionSpec, instance: &Instance) -> Result<BoConfig> {
        let decomposition = if acquisition.is_additive() {
            match &self.decomposition {
                None => None,
                Some(BenchDecomposition::Fixed { groups }) => Some(DecompositionSpec::Fixed { groups: groups.clone() }),
                Some(BenchDecomposition::Learn { n_candidates, max_group_size, sample_points }) => {
                    Some(DecompositionSpec::Learn {
                        n_candidates: *n_candidates,
                        max_group_size: *max_group_size,
                        sample_points: *sample_points,
                    })
                }
                Some(BenchDecomposition::Truth) => {
                    let p: &Partition = instance.objective.partition().ok_or_else(|| {
                        Error::Config(format!("{} has no true decomposition", instance.objective.name()))
                    })?;
                    Some(DecompositionSpec::Fixed { groups: p.groups().to_vec() })
                }
            }
        } else {
            None
        };
        Ok(BoConfig {
            acquisition: acquisition.clone(),
            iterations: self.iterations,
            kernel: instance.kernel.clone(),
            initial_design: self.initial_design,
            refit_every: if acquisition.is_additive() { None } else { self.refit_every },
            refit_budget: self.refit_budget,
            n_features: self.n_features,
            grid_size: self.grid_size,
            clamp: self.clamp,
            observation_noise: instance.objective.noise_std(),
            probes_per_dim: self.probes_per_dim,
            feature_search: self.feature_search,
            decomposition,
            track_inference: self.track_inference,
            seed: instance.seed,
        })
    }

    fn validate(&self, methods: &[AcquisitionSpec]) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("loop.iterations must be at least 1".into()));
        }
        let additive = methods.iter().any(AcquisitionSpec::is_additive);
        if let Some(BenchDecomposition::Learn { sample_points, .. }) = &self.decomposition {
            if sample_points.is_some_and(|n| n < 2) {
                return Err(Error::Config("loop.decomposition.sample_points must be at least 2".into()));
            }
            if additive && sample_points.is_none() && self.initial_design < 2 {
                return Err(Error::Config("a learned decomposition needs loop.initial_design of at least 2".into()));
            }
        }
        Ok(())
    }
}

/// A single optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub seed: u64,
    pub objective: ObjectiveSpec,
    pub acquisition: AcquisitionSpec,
    #[serde(rename = "loop")]
    pub settings: LoopSettings,
    #[serde(default = "default_certify")]
    pub certify_probes: usize,
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        self.acquisition.validate()?;
        self.objective.validate()?;
        self.settings.validate(std::slice::from_ref(&self.acquisition))?;
        check_method_dims(std::slice::from_ref(&self.acquisition), std::slice::from_ref(&self.objective))
    }

    /// The equivalent one-cell experiment.
    pub fn as_experiment(&self) -> ExperimentSpec {
        ExperimentSpec {
            seed: self.seed,
            repetitions: 1,
            methods: vec![self.acquisition.clone()],
            objectives: vec![self.objective.clone()],
            settings: self.settings.clone(),
            certify_probes: self.certify_probes,
        }
    }
}

/// A grid of methods × objectives × repetitions. Repetition `r` uses seed
/// `seed + r` for both the objective draw and every method's run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    pub methods: Vec<AcquisitionSpec>,
    pub objectives: Vec<ObjectiveSpec>,
    #[serde(rename = "loop")]
    pub settings: LoopSettings,
    /// Random probes used to certify every known maximum; 0 skips it.
    #[serde(default = "default_certify")]
    pub certify_probes: usize,
}

fn check_method_dims(methods: &[AcquisitionSpec], objectives: &[ObjectiveSpec]) -> Result<()> {
    for m in methods {
        if let AcquisitionSpec::MesMarginal { hyperparameters, .. } = m {
            for o in objectives {
                if let Some(h) = hyperparameters.iter().find(|h| h.dim() != o.dim()) {
                    return Err(Error::Config(format!(
                        "{}: hyperparameters with {} bandwidths cannot model {} ({}-d)",
                        m.label(),
                        h.dim(),
                        o.label(),
                        o.dim()
                    )));
                }
            }
        }
    }
    Ok(())
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.methods.is_empty() || self.objectives.is_empty() {
            return Err(Error::Config("methods and objectives must be non-empty".into()));
        }
        let mut labels = HashSet::new();
        for m in &self.methods {
            m.validate()?;
            if !labels.insert(m.label()) {
                return Err(Error::Config(format!("method {} listed twice", m.label())));
            }
        }
        let mut names = HashSet::new();
        for o in &self.objectives {
            o.validate()?;
            if !names.insert(o.label()) {
                return Err(Error::Config(format!("objective name {} used twice; set `name`", o.label())));
            }
        }
        self.settings.validate(&self.methods)?;
        check_method_dims(&self.methods, &self.objectives)
    }
}

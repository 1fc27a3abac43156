use std::time::Instant;

use log::{debug, warn};
use rand_distr::{Distribution, StandardNormal};

use crate::acquisition::{
    add_gp_ucb_alpha, add_mes_alpha, ei_alpha, est_alpha, finite_set_beta, mes_alpha, mes_alpha_marginal,
    optimize_acquisition, optimize_acquisition_per_component, pi_alpha, ucb_alpha, AcquisitionSpec, Optimum, Sampler,
};
use crate::error::{Error, Result};
use crate::gp::{
    fit_hyperparameters, learn_decomposition, AddGpPosterior, Domain, GpPosterior, KernelParams, ObservationSet,
    Partition, PointPrediction,
};
use crate::maxvalue::{
    build_feature_map, default_grid_size, sample_max_features, sample_max_features_blocks, FeatureMap,
    FeaturePosterior, GridStats, MaxValueSamples,
};
use crate::rng::{halton_in, substream, uniform_in, SeededRng};

use super::{BoConfig, BoTrace, DecompositionSpec, IterationRecord, Observation};

const RECOMMEND_PROBES_PER_DIM: usize = 500;
// the feature posterior needs strictly positive noise
const MIN_FEATURE_NOISE: f64 = 1e-10;

/// Result of a scheduled hyperparameter update.
#[derive(Debug, Clone, PartialEq)]
pub struct Adaptation {
    pub params: KernelParams,
    pub refitted: bool,
    pub warning: Option<String>,
}

/// Refit `current` on `data` when `t` is a positive multiple of
/// `refit_every`; otherwise hand it back unchanged. `None` never refits.
/// Fit failures keep `current` and surface as a warning.
pub fn model_adaptation_step(
    data: &ObservationSet,
    current: &KernelParams,
    refit_every: Option<usize>,
    t: usize,
    budget: usize,
) -> Adaptation {
    let unchanged = |warning| Adaptation { params: current.clone(), refitted: false, warning };
    let Some(every) = refit_every else {
        return unchanged(None);
    };
    if every == 0 || t == 0 || !t.is_multiple_of(every) || data.len() < 2 {
        return unchanged(None);
    }
    match fit_hyperparameters(data, current, budget) {
        Ok(fit) => Adaptation { params: fit.params, refitted: true, warning: fit.warning },
        Err(e) => unchanged(Some(format!("hyperparameter refit failed: {e}"))),
    }
}

fn std_floor(scale: f64) -> f64 {
    1e-9 * scale.sqrt()
}

enum Model {
    Full(GpPosterior),
    Additive(AddGpPosterior),
}

impl Model {
    fn mean(&self, x: &[f64]) -> f64 {
        match self {
            Model::Full(p) => p.predict_mean(x),
            Model::Additive(p) => p.full().predict_mean(x),
        }
    }
}

struct Selection {
    x: Vec<f64>,
    value: f64,
    y_star: Vec<MaxValueSamples>,
}

impl Selection {
    fn from_optimum(opt: Optimum, y_star: Vec<MaxValueSamples>) -> Self {
        Self { x: opt.x, value: opt.value, y_star }
    }
}

struct Streams {
    design: SeededRng,
    noise: SeededRng,
    sampling: SeededRng,
    acquisition: SeededRng,
    recommend: SeededRng,
    decomposition: SeededRng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        Self {
            design: substream(seed, 0),
            noise: substream(seed, 1),
            sampling: substream(seed, 2),
            acquisition: substream(seed, 3),
            recommend: substream(seed, 4),
            decomposition: substream(seed, 5),
        }
    }
}

struct Additive {
    partition: Partition,
    components: Vec<KernelParams>,
}

struct Engine<'a> {
    domain: &'a Domain,
    config: &'a BoConfig,
    rng: Streams,
    data: ObservationSet,
    kernel: KernelParams,
    additive: Option<Additive>,
}

/// Run max-value entropy search, or any non-additive baseline, on `objective`.
///
/// Setup problems (invalid config, dimension mismatch) are returned as
/// errors. Failures during the loop, including a non-finite objective
/// value, end the run early and are reported in [`BoTrace::abort`].
pub fn run_mes<F>(objective: F, domain: &Domain, config: &BoConfig) -> Result<BoTrace>
where
    F: Fn(&[f64]) -> f64,
{
    if config.acquisition.is_additive() {
        return Err(Error::Argument(format!(
            "{} needs an additive model; use run_add_mes",
            config.acquisition.label()
        )));
    }
    run(objective, domain, config)
}

/// Run an additive acquisition (add-MES or add-GP-UCB). Groups come from
/// `config.decomposition`; without one, all dimensions form one group.
pub fn run_add_mes<F>(objective: F, domain: &Domain, config: &BoConfig) -> Result<BoTrace>
where
    F: Fn(&[f64]) -> f64,
{
    if !config.acquisition.is_additive() {
        return Err(Error::Argument(format!(
            "{} is not an additive acquisition; use run_mes",
            config.acquisition.label()
        )));
    }
    run(objective, domain, config)
}

/// Dispatch on the acquisition kind.
pub fn run<F>(objective: F, domain: &Domain, config: &BoConfig) -> Result<BoTrace>
where
    F: Fn(&[f64]) -> f64,
{
    config.validate()?;
    domain.validate()?;
    if config.kernel.dim() != domain.dim() {
        return Err(Error::Dimension { expected: domain.dim(), got: config.kernel.dim() });
    }
    if let AcquisitionSpec::MesMarginal { hyperparameters, .. } = &config.acquisition {
        if let Some(h) = hyperparameters.iter().find(|h| h.dim() != domain.dim()) {
            return Err(Error::Dimension { expected: domain.dim(), got: h.dim() });
        }
    }
    let mut engine = Engine {
        domain,
        config,
        rng: Streams::new(config.seed),
        data: ObservationSet::default(),
        kernel: config.kernel.clone(),
        additive: None,
    };
    let mut trace = BoTrace {
        method: config.acquisition.label(),
        seed: config.seed,
        initial: Vec::new(),
        records: Vec::new(),
        final_kernel: config.kernel.clone(),
        partition: None,
        abort: None,
    };
    if let Err(e) = engine.drive(&objective, &mut trace) {
        warn!("{} (seed {}) aborted: {e}", trace.method, trace.seed);
        trace.abort = Some(e.to_string());
    }
    trace.final_kernel = engine.kernel.clone();
    trace.partition = engine.additive.as_ref().map(|a| a.partition.clone());
    Ok(trace)
}

impl Engine<'_> {
    fn observe<F: Fn(&[f64]) -> f64>(&mut self, objective: &F, x: &[f64], iteration: usize) -> Result<Observation> {
        let f = objective(x);
        if !f.is_finite() {
            return Err(Error::NonFiniteObjective { iteration });
        }
        let eps: f64 = StandardNormal.sample(&mut self.rng.noise);
        let y = f + self.config.observation_noise * eps;
        self.data.push(x.to_vec(), y);
        Ok(Observation { x: x.to_vec(), y, f })
    }

    fn drive<F: Fn(&[f64]) -> f64>(&mut self, objective: &F, trace: &mut BoTrace) -> Result<()> {
        for _ in 0..self.config.initial_design {
            let x = uniform_in(self.domain, &mut self.rng.design);
            let obs = self.observe(objective, &x, 0)?;
            trace.initial.push(obs);
        }
        if self.config.acquisition.is_additive() {
            self.additive = Some(self.decompose(objective)?);
        }

        for t in 1..=self.config.iterations {
            let started = Instant::now();
            let mut refit = None;
            let mut warning = None;
            if self.additive.is_none() {
                let a = model_adaptation_step(
                    &self.data,
                    &self.kernel,
                    self.config.refit_every,
                    t,
                    self.config.refit_budget,
                );
                if a.refitted {
                    debug!("t={t}: refit kernel to {:?}", a.params);
                    refit = Some(a.params.clone());
                }
                self.kernel = a.params;
                warning = a.warning;
            }
            let model = self.fit_model()?;
            if t > 1 && self.config.track_inference {
                let rec = self.recommend(&model);
                trace.records.last_mut().expect("previous record").recommendation = Some(rec);
            }
            let sel = self.select(&model, t)?;
            let acq_seconds = started.elapsed().as_secs_f64();
            drop(model);

            let obs = self.observe(objective, &sel.x, t)?;
            let best_y = self.data.max_value().expect("data is non-empty");
            trace.records.push(IterationRecord {
                t,
                x: obs.x,
                y: obs.y,
                f: obs.f,
                best_y,
                y_star: sel.y_star,
                acquisition_value: if sel.value.is_finite() { sel.value } else { 0.0 },
                acq_seconds,
                recommendation: None,
                refit,
                warning,
            });
        }
        if self.config.track_inference {
            let model = self.fit_model()?;
            let rec = self.recommend(&model);
            if let Some(last) = trace.records.last_mut() {
                last.recommendation = Some(rec);
            }
        }
        Ok(())
    }

    fn decompose<F: Fn(&[f64]) -> f64>(&mut self, objective: &F) -> Result<Additive> {
        let d = self.domain.dim();
        let partition = match &self.config.decomposition {
            None => Partition::single(d),
            Some(DecompositionSpec::Fixed { groups }) => Partition::new(groups.clone(), d)?,
            Some(DecompositionSpec::Learn { n_candidates, max_group_size, sample_points }) => {
                let sample = match sample_points {
                    Some(n) => Some(self.structure_sample(objective, *n)?),
                    None => None,
                };
                let dec = learn_decomposition(
                    sample.as_ref().unwrap_or(&self.data),
                    &self.kernel,
                    *n_candidates,
                    (*max_group_size).min(d),
                    &mut self.rng.decomposition,
                )?;
                debug!("learned decomposition {:?} from {} candidates", dec.partition, dec.distinct_scored);
                dec.partition
            }
        };
        let components = partition.groups().iter().map(|g| self.kernel.restrict(g)).collect();
        Ok(Additive { partition, components })
    }

    /// Noisy evaluations at `n` uniform points, drawn from the
    /// decomposition stream and kept out of the model's data.
    fn structure_sample<F: Fn(&[f64]) -> f64>(&mut self, objective: &F, n: usize) -> Result<ObservationSet> {
        let mut sample = ObservationSet::default();
        for _ in 0..n {
            let x = uniform_in(self.domain, &mut self.rng.decomposition);
            let f = objective(&x);
            if !f.is_finite() {
                return Err(Error::NonFiniteObjective { iteration: 0 });
            }
            let eps: f64 = StandardNormal.sample(&mut self.rng.decomposition);
            sample.push(x, f + self.config.observation_noise * eps);
        }
        Ok(sample)
    }

    fn fit_model(&self) -> Result<Model> {
        match &self.additive {
            None => Ok(Model::Full(GpPosterior::fit(self.data.clone(), self.kernel.clone())?)),
            Some(a) => Ok(Model::Additive(AddGpPosterior::fit(
                self.data.clone(),
                a.partition.clone(),
                a.components.clone(),
                self.kernel.noise_var,
            )?)),
        }
    }

    /// Posterior-mean maximizer, never worse than the best observed point.
    fn recommend(&mut self, model: &Model) -> Vec<f64> {
        let budget = RECOMMEND_PROBES_PER_DIM * self.domain.dim();
        let mut best = optimize_acquisition(|x| model.mean(x), self.domain, budget, &mut self.rng.recommend);
        for x in &self.data.points {
            let v = model.mean(x);
            if v > best.value {
                best = Optimum { x: x.clone(), value: v };
            }
        }
        best.x
    }

    fn grid_size(&self, d: usize) -> usize {
        self.config.grid_size.unwrap_or_else(|| default_grid_size(d))
    }

    fn budget(&self, d: usize) -> usize {
        self.config.probes_per_dim * d
    }

    fn incumbent(&self) -> f64 {
        self.data.max_value().unwrap_or(0.0)
    }

    fn select(&mut self, model: &Model, t: usize) -> Result<Selection> {
        match model {
            Model::Full(post) => self.select_full(post, t),
            Model::Additive(post) => self.select_additive(post, t),
        }
    }

    /// `max μ − min μ` over a fresh low-discrepancy set.
    fn mean_range<M: Fn(&[f64]) -> f64>(&mut self, mean: M, domain: &Domain, n: usize) -> (f64, f64) {
        let (lo, hi) = halton_in(domain, n, &mut self.rng.sampling)
            .iter()
            .map(|x| mean(x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        (lo, hi)
    }

    fn sample_full(&mut self, post: &GpPosterior, k: usize, sampler: Sampler) -> Result<MaxValueSamples> {
        let best = self.data.max_value().filter(|_| self.config.clamp);
        let n = self.grid_size(self.domain.dim());
        match sampler {
            Sampler::Gumbel => {
                let stats = GridStats::from_posterior(post, self.domain, n, &mut self.rng.sampling)?;
                let gumbel = stats.fit_gumbel(stats.default_tol())?;
                let mut ys = gumbel.sample(&mut self.rng.sampling, k);
                if let Some(b) = best {
                    ys.floor_at(stats.clamp_floor(b));
                }
                Ok(ys)
            }
            Sampler::Feature => {
                let floor = best.map(|b| {
                    let (lo, hi) = self.mean_range(|x| post.predict_mean(x), self.domain, n);
                    b + 1e-3 * (hi - lo)
                });
                let params = post.params();
                let map = build_feature_map(params, self.config.n_features, &mut self.rng.sampling, None)?;
                let fp = FeaturePosterior::fit(
                    std::slice::from_ref(&map),
                    &self.data,
                    params.noise_var.max(MIN_FEATURE_NOISE),
                )?;
                sample_max_features(
                    &fp,
                    &map,
                    self.domain,
                    &mut self.rng.sampling,
                    k,
                    self.config.feature_search,
                    floor,
                )
            }
        }
    }

    fn select_full(&mut self, post: &GpPosterior, t: usize) -> Result<Selection> {
        let d = self.domain.dim();
        let budget = self.budget(d);
        let floor = std_floor(post.params().scale);
        let predict = |x: &[f64]| post.predict(x).floored(floor);
        let spec = self.config.acquisition.clone();
        let sel = match spec {
            AcquisitionSpec::Mes { samples, sampler } => {
                let ys = self.sample_full(post, samples, sampler)?;
                let opt = optimize_acquisition(
                    |x| mes_alpha(&predict(x), &ys),
                    self.domain,
                    budget,
                    &mut self.rng.acquisition,
                );
                Selection::from_optimum(opt, vec![ys])
            }
            AcquisitionSpec::MesMarginal { samples, sampler, hyperparameters } => {
                let posts = hyperparameters
                    .iter()
                    .map(|h| GpPosterior::fit(self.data.clone(), h.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let ys = posts.iter().map(|p| self.sample_full(p, samples, sampler)).collect::<Result<Vec<_>>>()?;
                let floors: Vec<f64> = hyperparameters.iter().map(|h| std_floor(h.scale)).collect();
                let alpha = |x: &[f64]| {
                    let preds: Vec<PointPrediction> =
                        posts.iter().zip(&floors).map(|(p, &fl)| p.predict(x).floored(fl)).collect();
                    mes_alpha_marginal(&preds, &ys).expect("aligned by construction")
                };
                let opt = optimize_acquisition(alpha, self.domain, budget, &mut self.rng.acquisition);
                Selection::from_optimum(opt, ys)
            }
            AcquisitionSpec::Ucb { beta } => {
                let beta = beta.unwrap_or_else(|| finite_set_beta(budget, t));
                let opt = optimize_acquisition(
                    |x| ucb_alpha(&predict(x), beta),
                    self.domain,
                    budget,
                    &mut self.rng.acquisition,
                );
                Selection::from_optimum(opt, Vec::new())
            }
            AcquisitionSpec::Pi { margin } => {
                let theta = self.incumbent() + margin.unwrap_or_else(|| post.params().noise_var.sqrt());
                let opt = optimize_acquisition(
                    |x| pi_alpha(&predict(x), theta),
                    self.domain,
                    budget,
                    &mut self.rng.acquisition,
                );
                Selection::from_optimum(opt, Vec::new())
            }
            AcquisitionSpec::Ei => {
                let inc = self.incumbent();
                let opt = optimize_acquisition(
                    |x| ei_alpha(&predict(x), inc),
                    self.domain,
                    budget,
                    &mut self.rng.acquisition,
                );
                Selection::from_optimum(opt, Vec::new())
            }
            AcquisitionSpec::Est => {
                let stats = GridStats::from_posterior(post, self.domain, self.grid_size(d), &mut self.rng.sampling)?;
                let m = stats.fit_gumbel(stats.default_tol())?.mean();
                let opt =
                    optimize_acquisition(|x| est_alpha(&predict(x), m), self.domain, budget, &mut self.rng.acquisition);
                let ys = MaxValueSamples::new(vec![m], crate::maxvalue::SampleSource::Gumbel);
                Selection::from_optimum(opt, vec![ys])
            }
            AcquisitionSpec::Random => {
                Selection { x: uniform_in(self.domain, &mut self.rng.acquisition), value: 0.0, y_star: Vec::new() }
            }
            AcquisitionSpec::AddMes { .. } | AcquisitionSpec::AddGpUcb => {
                unreachable!("additive acquisitions run on an additive model")
            }
        };
        Ok(sel)
    }

    fn sample_components(&mut self, post: &AddGpPosterior, k: usize, sampler: Sampler) -> Result<Vec<MaxValueSamples>> {
        let groups = post.partition().groups().to_vec();
        match sampler {
            Sampler::Gumbel => groups
                .iter()
                .enumerate()
                .map(|(m, g)| {
                    let stats = GridStats::from_component(
                        post,
                        m,
                        self.domain,
                        self.grid_size(g.len()),
                        &mut self.rng.sampling,
                    )?;
                    let gumbel = stats.fit_gumbel(stats.default_tol())?;
                    let mut ys = gumbel.sample(&mut self.rng.sampling, k).for_component(m);
                    if self.config.clamp {
                        ys.floor_at(stats.clamp_floor(stats.max_mean()));
                    }
                    Ok(ys)
                })
                .collect(),
            Sampler::Feature => {
                let mut floors = Vec::with_capacity(groups.len());
                for (m, g) in groups.iter().enumerate() {
                    floors.push(if self.config.clamp {
                        let sub = self.domain.project(g);
                        let (lo, hi) =
                            self.mean_range(|s| post.predict_component_mean_sub(s, m), &sub, self.grid_size(g.len()));
                        Some(hi + 1e-3 * (hi - lo))
                    } else {
                        None
                    });
                }
                let maps = groups
                    .iter()
                    .zip(post.component_params())
                    .map(|(g, p)| {
                        FeatureMap::for_group(
                            p,
                            g.clone(),
                            self.domain.dim(),
                            self.config.n_features,
                            &mut self.rng.sampling,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                let fp = FeaturePosterior::fit(&maps, post.data(), post.noise_var().max(MIN_FEATURE_NOISE))?;
                let mut out = sample_max_features_blocks(
                    &fp,
                    &maps,
                    self.domain,
                    &mut self.rng.sampling,
                    k,
                    self.config.feature_search,
                    &floors,
                )?;
                if out.len() == 1 {
                    out[0].component = Some(0);
                }
                Ok(out)
            }
        }
    }

    fn select_additive(&mut self, post: &AddGpPosterior, t: usize) -> Result<Selection> {
        let partition = post.partition().clone();
        let floors: Vec<f64> = post.component_params().iter().map(|p| std_floor(p.scale)).collect();
        let spec = self.config.acquisition.clone();
        let (alphas, y_star): (Vec<Box<dyn Fn(&[f64]) -> f64 + '_>>, _) = match spec {
            AcquisitionSpec::AddMes { samples, sampler } => {
                let ys = self.sample_components(post, samples, sampler)?;
                let alphas = (0..partition.len())
                    .map(|m| {
                        let ys_m = ys[m].clone();
                        let fl = floors[m];
                        Box::new(move |s: &[f64]| {
                            add_mes_alpha(&post.predict_component_sub(s, m).floored(fl), &ys_m, m)
                                .expect("samples tagged with their component")
                        }) as Box<dyn Fn(&[f64]) -> f64>
                    })
                    .collect();
                (alphas, ys)
            }
            AcquisitionSpec::AddGpUcb => {
                let alphas = partition
                    .groups()
                    .iter()
                    .enumerate()
                    .map(|(m, g)| {
                        let size = g.len();
                        let fl = floors[m];
                        Box::new(move |s: &[f64]| {
                            add_gp_ucb_alpha(&post.predict_component_sub(s, m).floored(fl), size, t as f64)
                        }) as Box<dyn Fn(&[f64]) -> f64>
                    })
                    .collect();
                (alphas, Vec::new())
            }
            _ => unreachable!("only additive acquisitions run on an additive model"),
        };
        let opt = optimize_acquisition_per_component(
            &alphas,
            &partition,
            self.domain,
            self.config.probes_per_dim,
            &mut self.rng.acquisition,
        );
        Ok(Selection::from_optimum(opt, y_star))
    }
}

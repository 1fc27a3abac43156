use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::acquisition::{optimize_acquisition, refine_locally, Optimum};
use crate::error::{Error, Result};
use crate::gp::{random_partition, Domain, KernelParams, Partition};
use crate::maxvalue::{build_feature_map, maximize_feature_function, FeatureMap, FeatureSearch};
use crate::rng::{substream, uniform_in};

/// Smallest feature count accepted for synthetic objectives.
pub const MIN_SYNTHETIC_FEATURES: usize = 1000;

/// Standard eggholder function (a minimization benchmark) on `[−512, 512]²`.
pub fn eggholder(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1] + 47.0);
    -b * (a / 2.0 + b).abs().sqrt().sin() - a * (a - b).abs().sqrt().sin()
}

/// Location of the eggholder minimum.
pub const EGGHOLDER_ARGMIN: [f64; 2] = [512.0, 404.231_804_993_864_6];
/// `−eggholder` at its minimizer.
pub const EGGHOLDER_MAX: f64 = 959.640_662_720_850_7;

const SHEKEL_A: [[f64; 4]; 10] = [
    [4.0, 4.0, 4.0, 4.0],
    [1.0, 1.0, 1.0, 1.0],
    [8.0, 8.0, 8.0, 8.0],
    [6.0, 6.0, 6.0, 6.0],
    [3.0, 7.0, 3.0, 7.0],
    [2.0, 9.0, 2.0, 9.0],
    [5.0, 5.0, 3.0, 3.0],
    [8.0, 1.0, 8.0, 1.0],
    [6.0, 2.0, 6.0, 2.0],
    [7.0, 3.6, 7.0, 3.6],
];
const SHEKEL_C: [f64; 10] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5];

/// Centre of Shekel term `i` in `d` dimensions: the classical 4-d row,
/// repeated cyclically.
pub fn shekel_center(i: usize, d: usize) -> Vec<f64> {
    (0..d).map(|j| SHEKEL_A[i][j % 4]).collect()
}

/// Shekel function with ten terms, `−Σ 1/(‖x − a_i‖² + c_i)`, on `[0, 10]^d`.
/// Beyond four dimensions the coefficient rows are tiled.
pub fn shekel(x: &[f64]) -> f64 {
    -(0..10)
        .map(|i| {
            let r2: f64 = x.iter().enumerate().map(|(j, v)| (v - SHEKEL_A[i][j % 4]).powi(2)).sum();
            1.0 / (r2 + SHEKEL_C[i])
        })
        .sum::<f64>()
}

/// Michalewicz function with steepness 10 on `[0, π]^d`.
pub fn michalewicz(x: &[f64]) -> f64 {
    -x.iter().enumerate().map(|(i, &v)| michalewicz_term(i, v)).sum::<f64>()
}

fn michalewicz_term(i: usize, v: f64) -> f64 {
    v.sin() * ((i + 1) as f64 * v * v / std::f64::consts::PI).sin().powi(20)
}

/// Where a known maximum came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownMax {
    pub value: f64,
    pub provenance: String,
    /// Function evaluations the oracle spent, zero for closed forms.
    pub oracle_budget: usize,
}

/// A black-box function to maximize, with its box and (optionally) its
/// true maximum.
#[derive(Clone)]
pub struct Objective {
    name: String,
    domain: Domain,
    eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    known_max: Option<KnownMax>,
    noise_std: f64,
    partition: Option<Partition>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("known_max", &self.known_max)
            .field("noise_std", &self.noise_std)
            .finish_non_exhaustive()
    }
}

impl Objective {
    pub fn new<F>(name: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { name: name.into(), domain, eval: Arc::new(f), known_max: None, noise_std: 0.0, partition: None }
    }

    pub fn with_known_max(mut self, known: KnownMax) -> Self {
        self.known_max = Some(known);
        self
    }

    pub fn with_noise(mut self, noise_std: f64) -> Self {
        self.noise_std = noise_std;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn known_max(&self) -> Option<&KnownMax> {
        self.known_max.as_ref()
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// True additive structure, for objectives built from one.
    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// A plain closure view, as taken by the optimization loops.
    pub fn as_fn(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        move |x| self.eval(x)
    }

    /// Check the known maximum against `n` fresh uniform probes and return
    /// the best probe value.
    pub fn certify(&self, n: usize, seed: u64) -> Result<f64> {
        let known = self
            .known_max
            .as_ref()
            .ok_or_else(|| Error::UnsupportedMetric(format!("{} has no known maximum", self.name)))?;
        let mut rng = substream(seed, 0xCE27);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..n {
            let x = uniform_in(&self.domain, &mut rng);
            let v = self.eval(&x);
            if !v.is_finite() {
                return Err(Error::Numerical(format!("{} is not finite at {x:?}", self.name)));
            }
            best = best.max(v);
        }
        let slack = 1e-9 * (1.0 + known.value.abs());
        if best > known.value + slack {
            return Err(Error::Numerical(format!(
                "{}: probe value {best} exceeds known maximum {}",
                self.name, known.value
            )));
        }
        Ok(best)
    }

    /// Negated eggholder on `[−512, 512]²`.
    pub fn eggholder() -> Self {
        Self::new("eggholder", Domain::cube(2, -512.0, 512.0), |x| -eggholder(x)).with_known_max(KnownMax {
            value: EGGHOLDER_MAX,
            provenance: "bounded line search along the x=512 edge near the literature minimizer".into(),
            oracle_budget: 0,
        })
    }

    /// Negated ten-term Shekel on `[0, 10]^d`; the maximum is located by
    /// local refinement from every term's centre.
    pub fn shekel(d: usize) -> Self {
        let domain = Domain::cube(d, 0.0, 10.0);
        let f = |x: &[f64]| -shekel(x);
        let mut evals = 0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..10 {
            let start = shekel_center(i, d);
            let opt = refine_until_stable(&f, &domain, Optimum { value: f(&start), x: start }, 0.05, &mut evals);
            best = best.max(opt.value);
        }
        Self::new(format!("shekel{d}"), domain, f).with_known_max(KnownMax {
            value: best,
            provenance: "coordinate refinement from each Shekel term centre".into(),
            oracle_budget: evals,
        })
    }

    /// Negated Michalewicz on `[0, π]^d`. The function is a sum of 1-d
    /// terms, so the maximum is the sum of per-coordinate maxima.
    pub fn michalewicz(d: usize) -> Self {
        let dom1 = Domain::cube(1, 0.0, std::f64::consts::PI);
        let n = 100_000;
        let mut total = 0.0;
        for i in 0..d {
            let term = |x: &[f64]| michalewicz_term(i, x[0]);
            let start = (0..=n)
                .map(|k| std::f64::consts::PI * k as f64 / n as f64)
                .map(|v| Optimum { x: vec![v], value: term(&[v]) })
                .max_by(|a, b| a.value.total_cmp(&b.value))
                .expect("non-empty grid");
            let mut evals = 0;
            total += refine_until_stable(&term, &dom1, start, 2.0 / n as f64, &mut evals).value;
        }
        Self::new(format!("michalewicz{d}"), Domain::cube(d, 0.0, std::f64::consts::PI), |x| -michalewicz(x))
            .with_known_max(KnownMax {
                value: total,
                provenance: "per-coordinate dense grid plus golden-section refinement".into(),
                oracle_budget: d * (n + 1),
            })
    }

    /// `−‖x − c‖²` on the unit box; maximum 0 at `c`.
    pub fn quadratic(center: Vec<f64>) -> Result<Self> {
        let d = center.len();
        let domain = Domain::unit(d);
        if !domain.contains(&center) {
            return Err(Error::Argument(format!("centre {center:?} outside the unit box")));
        }
        Ok(Self::new(format!("quadratic{d}"), domain, move |x| {
            -x.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
        })
        .with_known_max(KnownMax { value: 0.0, provenance: "closed form".into(), oracle_budget: 0 }))
    }
}

fn refine_until_stable<F: Fn(&[f64]) -> f64>(
    f: &F,
    domain: &Domain,
    start: Optimum,
    radius: f64,
    evals: &mut usize,
) -> Optimum {
    let mut cur = start;
    for _ in 0..20 {
        let counted = |x: &[f64]| f(x);
        let next = refine_locally(&counted, domain, cur.clone(), radius);
        *evals += 4 * domain.dim() * 32;
        let done = next.value <= cur.value;
        cur = next;
        if done {
            break;
        }
    }
    cur
}

fn feature_oracle_search() -> FeatureSearch {
    FeatureSearch { restarts: 30, steps: 400, probes_per_dim: 10_000 }
}

/// A prior draw `f(x) = wᵀφ(x)` with `w ~ N(0, I)` over the unit box, its
/// maximum located by multi-start gradient ascent.
pub fn sample_synthetic_gp_objective(params: &KernelParams, n_features: usize, seed: u64) -> Result<Objective> {
    if n_features < MIN_SYNTHETIC_FEATURES {
        return Err(Error::Argument(format!(
            "synthetic objectives need at least {MIN_SYNTHETIC_FEATURES} features, got {n_features}"
        )));
    }
    params.validate()?;
    let d = params.dim();
    let domain = Domain::unit(d);
    let mut rng = substream(seed, 0x5EED);
    let map = build_feature_map(params, n_features, &mut rng, None)?;
    let w: Vec<f64> = (0..n_features).map(|_| rng.sample(StandardNormal)).collect();
    let search = feature_oracle_search();
    let (_, mut value) = maximize_feature_function(&map, &w, &domain, search, &mut rng);
    let map = Arc::new(map);
    let w = Arc::new(w);
    let f = {
        let (map, w) = (map.clone(), w.clone());
        move |x: &[f64]| map.value(&w, x)
    };
    // the probe stage only sees a low-discrepancy set; polish with a second
    // search from the optimizer's own probes
    let polished = optimize_acquisition(&f, &domain, 2000 * d, &mut rng);
    value = value.max(polished.value);
    Ok(Objective::new(format!("synthetic_gp{d}"), domain, f).with_known_max(KnownMax {
        value,
        provenance: "feature-function gradient ascent from the best of a low-discrepancy probe set".into(),
        oracle_budget: search.probes_per_dim * d + search.restarts * search.steps + 2000 * d,
    }))
}

/// A sum of independent prior draws, one per group of a random partition
/// of `0..d` into groups of `group_size`. The maximum is the sum of the
/// component maxima.
pub fn sample_synthetic_additive_objective(
    params: &KernelParams,
    group_size: usize,
    n_features: usize,
    seed: u64,
) -> Result<Objective> {
    if n_features < MIN_SYNTHETIC_FEATURES {
        return Err(Error::Argument(format!(
            "synthetic objectives need at least {MIN_SYNTHETIC_FEATURES} features, got {n_features}"
        )));
    }
    if group_size == 0 {
        return Err(Error::Argument("group_size must be at least 1".into()));
    }
    params.validate()?;
    let d = params.dim();
    let domain = Domain::unit(d);
    let mut rng = substream(seed, 0xADD);
    let partition = random_partition(d, group_size.min(d), &mut rng).canonical();
    let search = feature_oracle_search();
    let mut parts: Vec<(FeatureMap, Vec<f64>)> = Vec::new();
    let mut value = 0.0;
    for g in partition.groups() {
        let map = build_feature_map(params, n_features, &mut rng, Some(g))?;
        let w: Vec<f64> = (0..n_features).map(|_| rng.sample(StandardNormal)).collect();
        value += maximize_feature_function(&map, &w, &domain, search, &mut rng).1;
        parts.push((map, w));
    }
    let parts = Arc::new(parts);
    let mut obj = Objective::new(format!("synthetic_additive{d}"), domain, move |x: &[f64]| {
        parts.iter().map(|(m, w)| m.value(w, x)).sum()
    })
    .with_known_max(KnownMax {
        value,
        provenance: "sum of per-group feature-function maxima".into(),
        oracle_budget: partition.len() * (search.probes_per_dim * group_size + search.restarts * search.steps),
    });
    obj.partition = Some(partition);
    Ok(obj)
}

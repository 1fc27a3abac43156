use log::warn;

use crate::error::{Error, Result};

use super::{GpPosterior, KernelParams, ObservationSet};

const N_STARTS: usize = 8;
// parameters may move at most this far (in log space) from the initial guess
const LOG_RANGE: f64 = 9.2; // ln(1e4)
const MIN_NOISE_VAR: f64 = 1e-10;

/// Outcome of a hyperparameter fit.
#[derive(Debug, Clone)]
pub struct HyperFit {
    pub params: KernelParams,
    pub log_likelihood: f64,
    pub evaluations: usize,
    /// Set when every candidate failed numerically and `init` was returned.
    pub warning: Option<String>,
}

/// Derivative-free coordinate ascent with geometric step shrinkage.
///
/// `f` returns `None` where the objective cannot be evaluated. Returns the
/// best point, its value, and the number of evaluations spent. The start
/// point is assumed already evaluated with value `start_value`.
pub fn coordinate_ascent<F>(
    f: &mut F,
    start: &[f64],
    start_value: f64,
    initial_step: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize)
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let mut best = start.to_vec();
    let mut best_val = start_value;
    let mut step = initial_step;
    let mut used = 0;
    while step > 1e-4 * initial_step && used < budget {
        let mut improved = false;
        for j in 0..best.len() {
            for dir in [1.0, -1.0] {
                if used >= budget {
                    break;
                }
                let mut cand = best.clone();
                cand[j] += dir * step;
                used += 1;
                if let Some(v) = f(&cand) {
                    if v > best_val {
                        best = cand;
                        best_val = v;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, best_val, used)
}

struct Codec {
    init: KernelParams,
    fit_noise: bool,
}

impl Codec {
    fn encode(&self, p: &KernelParams) -> Vec<f64> {
        let mut v = vec![p.scale.ln()];
        v.extend(p.bandwidths.iter().map(|b| b.ln()));
        if self.fit_noise {
            v.push(p.noise_var.ln());
        }
        v
    }

    fn decode(&self, v: &[f64]) -> KernelParams {
        let reference = self.encode(&self.init);
        let clip = |i: usize| v[i].clamp(reference[i] - LOG_RANGE, reference[i] + LOG_RANGE).exp();
        let d = self.init.dim();
        KernelParams {
            scale: clip(0),
            bandwidths: (1..=d).map(clip).collect(),
            noise_var: if self.fit_noise { clip(d + 1).max(MIN_NOISE_VAR) } else { self.init.noise_var },
        }
    }
}

/// Maximize the log marginal likelihood over `(scale, bandwidths, noise_var)`
/// in log space, from `init` plus seven fixed perturbations of it.
///
/// Deterministic in `(data, init, budget)`. The result never scores below
/// `init`. A zero `init.noise_var` is held fixed.
pub fn fit_hyperparameters(data: &ObservationSet, init: &KernelParams, budget: usize) -> Result<HyperFit> {
    init.validate()?;
    if data.len() < 2 {
        return Err(Error::Argument("hyperparameter fitting needs at least two observations".into()));
    }
    let codec = Codec { init: init.clone(), fit_noise: init.noise_var > 0.0 };
    let mut evaluations = 0usize;
    let mut objective = |v: &[f64]| -> Option<f64> {
        evaluations += 1;
        let p = codec.decode(v);
        GpPosterior::fit(data.clone(), p).ok().map(|post| post.log_marginal_likelihood()).filter(|l| l.is_finite())
    };

    let base = codec.encode(init);
    let n = base.len();
    let starts: Vec<Vec<f64>> = (0..N_STARTS)
        .map(|k| {
            base.iter()
                .enumerate()
                .map(|(j, b)| {
                    if k == 0 {
                        *b
                    } else {
                        let c = ((k * (j + 1) * 7 + 3 * k) % 5) as f64 - 2.0;
                        b + c * std::f64::consts::LN_2
                    }
                })
                .collect()
        })
        .collect();

    let start_vals: Vec<Option<f64>> = starts.iter().map(|s| objective(s)).collect();
    let init_val = start_vals[0];
    let remaining = budget.saturating_sub(N_STARTS);
    let per_start = remaining / N_STARTS;

    let mut best: Option<(Vec<f64>, f64)> = None;
    for (s, v) in starts.iter().zip(&start_vals) {
        let Some(v) = *v else { continue };
        let (x, val, _) = coordinate_ascent(&mut objective, s, v, 1.0, per_start.max(2 * n));
        if best.as_ref().is_none_or(|(_, b)| val > *b) {
            best = Some((x, val));
        }
    }

    match (best, init_val) {
        (Some((x, val)), Some(iv)) if val >= iv => {
            Ok(HyperFit { params: codec.decode(&x), log_likelihood: val, evaluations, warning: None })
        }
        (Some((x, val)), None) => {
            Ok(HyperFit { params: codec.decode(&x), log_likelihood: val, evaluations, warning: None })
        }
        (_, Some(iv)) => Ok(HyperFit { params: init.clone(), log_likelihood: iv, evaluations, warning: None }),
        (None, None) => {
            let msg = "every hyperparameter candidate failed to factorize; keeping init".to_string();
            warn!("{msg}");
            Ok(HyperFit { params: init.clone(), log_likelihood: f64::NEG_INFINITY, evaluations, warning: Some(msg) })
        }
    }
}

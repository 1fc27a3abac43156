use crate::acquisition::optimize_acquisition;
use crate::bo::BoTrace;
use crate::error::{Error, Result};
use crate::gp::{GpPosterior, Kernel};
use crate::rng::SeededRng;

use super::Objective;

fn known_max(obj: &Objective) -> Result<f64> {
    obj.known_max()
        .map(|k| k.value)
        .ok_or_else(|| Error::UnsupportedMetric(format!("{} has no known maximum", obj.name())))
}

/// `r_t = f* − max(f over the initial design and x_1..x_t)`, one entry per
/// iteration. Uses the noiseless values stored in the trace.
pub fn simple_regret(trace: &BoTrace, obj: &Objective) -> Result<Vec<f64>> {
    let best = known_max(obj)?;
    let mut running = trace.initial.iter().map(|o| o.f).fold(f64::NEG_INFINITY, f64::max);
    Ok(trace
        .records
        .iter()
        .map(|r| {
            running = running.max(r.f);
            best - running
        })
        .collect())
}

/// `R_t = f* − f(x̃_t)` at each recorded posterior-mean maximizer; `None`
/// where the trace holds no recommendation.
pub fn inference_regret(trace: &BoTrace, obj: &Objective) -> Result<Vec<Option<f64>>> {
    let best = known_max(obj)?;
    Ok(trace.records.iter().map(|r| r.recommendation.as_ref().map(|x| best - obj.eval(x))).collect())
}

/// Inference regret of an arbitrary posterior: maximize its mean over the
/// objective's box with `budget` probes and score the maximizer.
pub fn posterior_inference_regret<K: Kernel>(
    post: &GpPosterior<K>,
    obj: &Objective,
    budget: usize,
    rng: &mut SeededRng,
) -> Result<f64> {
    let best = known_max(obj)?;
    let opt = optimize_acquisition(|x| post.predict_mean(x), obj.domain(), budget, rng);
    Ok(best - obj.eval(&opt.x))
}

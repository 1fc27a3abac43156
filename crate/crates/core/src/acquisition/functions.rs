use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::maxvalue::MaxValueSamples;
use crate::normal::{cdf, ln_cdf, ln_pdf, mills_ratio, pdf};

use super::PointPrediction;

// above this, g is evaluated in log space around ln ψ(u)
const TAIL_SWITCH: f64 = 5.0;

fn gamma(y_star: f64, pred: &PointPrediction) -> f64 {
    (y_star - pred.mean) / pred.std.max(f64::MIN_POSITIVE)
}

/// `ln g(u)`, finite on the whole real line.
pub fn ln_g(u: f64) -> f64 {
    if u <= TAIL_SWITCH {
        return g_direct(u).ln();
    }
    // g = ψ(u)·[u/(2Ψ(u)) + (−ln Ψ(u))/ψ(u)], and −ln Ψ = −ln(1 − Q) with
    // Q = ψ·m(u) the upper tail
    let m = mills_ratio(u);
    let q = pdf(u) * m;
    let tail = if q > 1e-300 { -(-q).ln_1p() / q } else { 1.0 };
    ln_pdf(u) + (u / (2.0 * cdf(u)) + m * tail).ln()
}

fn g_direct(u: f64) -> f64 {
    let lc = ln_cdf(u);
    0.5 * u * (ln_pdf(u) - lc).exp() - lc
}

/// `g(u) = uψ(u)/(2Ψ(u)) − ln Ψ(u)`: positive and strictly decreasing.
/// Underflows to zero only for `u` beyond roughly 38.
pub fn g(u: f64) -> f64 {
    if u <= TAIL_SWITCH {
        g_direct(u)
    } else {
        ln_g(u).exp()
    }
}

/// `(1/K) Σ_{y*} g((y* − μ)/σ)`.
pub fn mes_alpha(pred: &PointPrediction, ys: &MaxValueSamples) -> f64 {
    let k = ys.values.len() as f64;
    ys.values.iter().map(|&y| g(gamma(y, pred))).sum::<f64>() / k
}

/// `Σ_η Σ_{y*} g(γ^η)` over a set of hyperparameter settings, each with its
/// own prediction and max-value samples. No `1/K` factor.
pub fn mes_alpha_marginal(preds: &[PointPrediction], ys: &[MaxValueSamples]) -> Result<f64> {
    if preds.is_empty() || preds.len() != ys.len() {
        return Err(Error::Argument(format!("{} predictions for {} sample sets", preds.len(), ys.len())));
    }
    Ok(preds.iter().zip(ys).map(|(p, s)| s.values.iter().map(|&y| g(gamma(y, p))).sum::<f64>()).sum())
}

/// `μ + √β σ`.
pub fn ucb_alpha(pred: &PointPrediction, beta: f64) -> f64 {
    pred.mean + beta.max(0.0).sqrt() * pred.std
}

/// `Ψ((μ − θ)/σ)`.
pub fn pi_alpha(pred: &PointPrediction, theta: f64) -> f64 {
    cdf((pred.mean - theta) / pred.std.max(f64::MIN_POSITIVE))
}

/// Closed-form `E[max(Y − incumbent, 0)]` for `Y ~ N(μ, σ²)`.
pub fn ei_alpha(pred: &PointPrediction, incumbent: f64) -> f64 {
    let diff = pred.mean - incumbent;
    if pred.std <= 0.0 {
        return diff.max(0.0);
    }
    let z = diff / pred.std;
    (pred.std * (z * cdf(z) + pdf(z))).max(0.0)
}

/// `−(m − μ)/σ`; maximizing it minimizes `γ_m`.
pub fn est_alpha(pred: &PointPrediction, m: f64) -> f64 {
    -gamma(m, pred)
}

/// `Σ_{y*^(m)} g(γ^(m))` for component `m`, without a `1/K` factor.
pub fn add_mes_alpha(component_pred: &PointPrediction, ys_m: &MaxValueSamples, m: usize) -> Result<f64> {
    if let Some(c) = ys_m.component {
        if c != m {
            return Err(Error::Argument(format!("samples belong to component {c}, not {m}")));
        }
    }
    Ok(ys_m.values.iter().map(|&y| g(gamma(y, component_pred))).sum())
}

/// `β_t^(m) = |A_m| log(2t) / 5`.
pub fn add_gp_ucb_beta(group_size: usize, t: f64) -> f64 {
    (group_size as f64 * (2.0 * t).ln() / 5.0).max(0.0)
}

pub fn add_gp_ucb_alpha(component_pred: &PointPrediction, group_size: usize, t: f64) -> f64 {
    ucb_alpha(component_pred, add_gp_ucb_beta(group_size, t))
}

/// GP-UCB schedule for a finite candidate set of size `n` with failure
/// probability 0.1: `β_t = 2 log(n t² π² / 0.6)`.
pub fn finite_set_beta(n: usize, t: usize) -> f64 {
    let t = t.max(1) as f64;
    2.0 * ((n.max(1) as f64) * t * t * PI * PI / (6.0 * 0.1)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxvalue::SampleSource;

    fn pred(mean: f64, std: f64) -> PointPrediction {
        PointPrediction { mean, std }
    }

    #[test]
    fn g_at_zero_is_ln2() {
        assert!((g(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn g_tail_branches_agree() {
        for u in [4.9, 5.0, 5.1] {
            let direct = g_direct(u);
            let logspace = {
                let m = mills_ratio(u);
                let q = pdf(u) * m;
                ln_pdf(u) + (u / (2.0 * cdf(u)) + m * (-(-q).ln_1p() / q)).ln()
            };
            assert!((direct.ln() - logspace).abs() < 1e-9, "u={u}");
        }
    }

    #[test]
    fn g_positive_tail() {
        let v = g(8.0);
        assert!(v > 0.0 && v < 1e-12);
        assert!(g(-3.0) > g(0.0) && g(0.0) > g(3.0));
    }

    #[test]
    fn mes_single_sample_is_g() {
        let s = MaxValueSamples::new(vec![1.5], SampleSource::Gumbel);
        assert_eq!(mes_alpha(&pred(0.5, 2.0), &s), g(0.5));
        let at_mean = MaxValueSamples::new(vec![0.5], SampleSource::Gumbel);
        assert!((mes_alpha(&pred(0.5, 2.0), &at_mean) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn marginal_reduces_and_checks_alignment() {
        let s = MaxValueSamples::new(vec![1.0, 2.0, 3.0], SampleSource::Gumbel);
        let p = pred(0.2, 0.7);
        let one = mes_alpha_marginal(&[p], std::slice::from_ref(&s)).unwrap();
        assert!((one - 3.0 * mes_alpha(&p, &s)).abs() < 1e-12);
        let two = mes_alpha_marginal(&[p, p], &[s.clone(), s.clone()]).unwrap();
        assert!((two - 2.0 * one).abs() < 1e-12);
        assert!(mes_alpha_marginal(&[p], &[]).is_err());
    }

    #[test]
    fn baselines_arithmetic() {
        assert_eq!(ucb_alpha(&pred(1.0, 2.0), 0.0), 1.0);
        assert_eq!(ucb_alpha(&pred(1.0, 2.0), 4.0), 5.0);
        assert_eq!(pi_alpha(&pred(3.0, 1.0), 3.0), 0.5);
        assert!((pi_alpha(&pred(1.0, 1.0), 0.0) - 0.841_344_746_068_542_9).abs() < 1e-14);
        assert_eq!(est_alpha(&pred(5.0, 2.0), 5.0), 0.0);
        assert_eq!(est_alpha(&pred(1.0, 2.0), 5.0), -2.0);
        assert!((ei_alpha(&pred(0.0, 1.0), 0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(ei_alpha(&pred(2.0, 0.0), 1.5), 0.5);
        assert!((ei_alpha(&pred(2.0, 1e-12), 1.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn add_gp_ucb() {
        let p = pred(1.0, 2.0);
        let t = std::f64::consts::E / 2.0;
        assert!((add_gp_ucb_alpha(&p, 2, t) - (1.0 + 0.4f64.sqrt() * 2.0)).abs() < 1e-12);
        let mut prev = 0.0;
        for t in 1..100 {
            let b = add_gp_ucb_beta(3, t as f64);
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn add_mes_component_checks() {
        let s = MaxValueSamples::new(vec![0.5], SampleSource::Feature).for_component(1);
        assert!((add_mes_alpha(&pred(0.5, 1.0), &s, 1).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(add_mes_alpha(&pred(0.5, 1.0), &s, 0).is_err());
    }

    #[test]
    fn shift_invariance() {
        let s = MaxValueSamples::new(vec![1.0, 2.5], SampleSource::Gumbel);
        let shifted = MaxValueSamples::new(vec![11.0, 12.5], SampleSource::Gumbel);
        let a = mes_alpha(&pred(0.3, 0.8), &s);
        let b = mes_alpha(&pred(10.3, 0.8), &shifted);
        assert!((a - b).abs() < 1e-12);
        assert!((est_alpha(&pred(0.3, 0.8), 1.0) - est_alpha(&pred(10.3, 0.8), 11.0)).abs() < 1e-12);
    }
}

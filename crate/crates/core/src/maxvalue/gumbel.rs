use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

use super::{MaxValueSamples, SampleSource};

pub const LOWER_QUANTILE: f64 = 0.25;
pub const UPPER_QUANTILE: f64 = 0.75;
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Gumbel distribution `G(a, b) = exp(−exp(−(z − a)/b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelParams {
    pub a: f64,
    pub b: f64,
}

impl GumbelParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Argument(format!("invalid Gumbel parameters a={a}, b={b}")));
        }
        Ok(Self { a, b })
    }

    /// Solve `a − b ln(−ln r₁) = y₁`, `a − b ln(−ln r₂) = y₂` for the
    /// 0.25 and 0.75 quantiles.
    pub fn from_quantiles(y1: f64, y2: f64) -> Result<Self> {
        if !(y2 > y1) {
            return Err(Error::Numerical(format!(
                "degenerate max-CDF: upper quartile {y2} not above lower quartile {y1}"
            )));
        }
        let l1 = (-LOWER_QUANTILE.ln()).ln();
        let l2 = (-UPPER_QUANTILE.ln()).ln();
        let b = (y2 - y1) / (l1 - l2);
        let a = y1 + b * l1;
        Self::new(a, b)
    }

    pub fn cdf(&self, z: f64) -> f64 {
        (-(-(z - self.a) / self.b).exp()).exp()
    }

    pub fn quantile(&self, r: f64) -> f64 {
        self.a - self.b * (-r.ln()).ln()
    }

    pub fn mean(&self) -> f64 {
        self.a + EULER_GAMMA * self.b
    }

    /// `k` independent draws through the quantile function.
    pub fn sample(&self, rng: &mut SeededRng, k: usize) -> MaxValueSamples {
        let values = (0..k.max(1))
            .map(|_| {
                let r: f64 = rng.sample(Open01);
                self.quantile(r)
            })
            .collect();
        MaxValueSamples::new(values, SampleSource::Gumbel)
    }
}

use crate::error::{Error, Result};
use crate::gp::{AddGpPosterior, Domain, GpPosterior, Kernel};
use crate::normal::ln_cdf;
use crate::rng::{halton_in, SeededRng};

use super::gumbel::{GumbelParams, LOWER_QUANTILE, UPPER_QUANTILE};

const MAX_DOUBLINGS: usize = 60;
const MAX_BISECTIONS: usize = 300;

/// `min(10000, 500·d)`.
pub fn default_grid_size(d: usize) -> usize {
    (500 * d).min(10_000)
}

/// Posterior mean and standard deviation over a finite representative set.
#[derive(Debug, Clone)]
pub struct GridStats {
    grid: Vec<Vec<f64>>,
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl GridStats {
    /// Assemble from precomputed values; stds are floored at `std_floor`.
    pub fn new(grid: Vec<Vec<f64>>, means: Vec<f64>, stds: Vec<f64>, std_floor: f64) -> Result<Self> {
        if means.len() != grid.len() || stds.len() != grid.len() {
            return Err(Error::Argument("grid, means and stds must have equal length".into()));
        }
        if grid.is_empty() {
            return Err(Error::Argument("grid must be non-empty".into()));
        }
        if !(std_floor > 0.0) {
            return Err(Error::Argument("std_floor must be positive".into()));
        }
        let stds = stds.into_iter().map(|s| s.max(std_floor)).collect();
        Ok(Self { grid, means, stds })
    }

    /// Stats of a full-model posterior on `n` low-discrepancy points of `domain`.
    pub fn from_posterior<K: Kernel>(
        post: &GpPosterior<K>,
        domain: &Domain,
        n: usize,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument("grid needs at least two points".into()));
        }
        let grid = halton_in(domain, n, rng);
        let (means, stds) = grid
            .iter()
            .map(|x| {
                let p = post.try_predict(x)?;
                Ok((p.mean, p.std))
            })
            .collect::<Result<(Vec<_>, Vec<_>)>>()?;
        Self::new(grid, means, stds, 1e-9 * post.kernel().amplitude().sqrt())
    }

    /// Stats of component `m` on `n` points of the sub-box over its dimensions.
    /// Grid points hold only that group's coordinates.
    pub fn from_component(
        post: &AddGpPosterior,
        m: usize,
        domain: &Domain,
        n: usize,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument("grid needs at least two points".into()));
        }
        let group =
            post.partition().groups().get(m).ok_or_else(|| Error::Argument(format!("component {m} out of range")))?;
        let sub = domain.project(group);
        let grid = halton_in(&sub, n, rng);
        let (means, stds) = grid
            .iter()
            .map(|x| {
                let p = post.predict_component_sub(x, m);
                (p.mean, p.std)
            })
            .unzip();
        Self::new(grid, means, stds, 1e-9 * post.component_params()[m].scale.sqrt())
    }

    pub fn grid(&self) -> &[Vec<f64>] {
        &self.grid
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn max_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_std(&self) -> f64 {
        self.stds.iter().copied().fold(0.0, f64::max)
    }

    /// Default binary-search tolerance: `1e-6 · max σ`.
    pub fn default_tol(&self) -> f64 {
        1e-6 * self.max_std()
    }

    /// Floor for sampled maxima: `best_observed + 1e-3·(max μ − min μ)`.
    pub fn clamp_floor(&self, best_observed: f64) -> f64 {
        best_observed + 1e-3 * (self.max_mean() - self.min_mean())
    }

    /// `ln Π_x Ψ((z − μ(x))/σ(x))`, the log-CDF of the max under independence.
    pub fn log_cdf_max(&self, z: f64) -> f64 {
        self.means.iter().zip(&self.stds).map(|(m, s)| ln_cdf((z - m) / s)).sum()
    }

    /// Find `z` with `log_cdf_max(z) = ln r` by bisection.
    ///
    /// Stops once the log-CDF residual is within `tol` or the bracket can no
    /// longer be split in floating point.
    pub fn invert_cdf_max(&self, r: f64, tol: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Argument(format!("quantile must lie in (0,1), got {r}")));
        }
        if !(tol > 0.0) {
            return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
        }
        let target = r.ln();
        let centre = self.max_mean();
        let spread = 5.0 * self.max_std();
        let (mut lo, mut hi) = (centre - spread, centre + spread);
        let mut step = hi - lo;
        let mut doublings = 0;
        while self.log_cdf_max(lo) > target {
            lo -= step;
            step *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Err(Error::Numerical("max-CDF bracket did not straddle the target".into()));
            }
        }
        let mut step = hi - lo;
        while self.log_cdf_max(hi) < target {
            hi += step;
            step *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Err(Error::Numerical("max-CDF bracket did not straddle the target".into()));
            }
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let v = self.log_cdf_max(mid);
            if (v - target).abs() <= tol {
                return Ok(mid);
            }
            if v < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Gumbel approximation of the max-CDF by matching its 0.25 and 0.75
    /// quantiles.
    pub fn fit_gumbel(&self, tol: f64) -> Result<GumbelParams> {
        let y1 = self.invert_cdf_max(LOWER_QUANTILE, tol)?;
        let y2 = self.invert_cdf_max(UPPER_QUANTILE, tol)?;
        GumbelParams::from_quantiles(y1, y2)
    }
}

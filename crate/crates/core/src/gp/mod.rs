//! Gaussian-process modeling: squared-exponential ARD kernels, exact
//! posterior inference, additive GPs over disjoint dimension groups,
//! marginal-likelihood hyperparameter fitting and decomposition search.

mod additive;
mod decomposition;
mod hyper;
mod kernel;
mod posterior;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

pub use additive::{AddGpPosterior, AdditiveKernel};
pub use decomposition::{learn_decomposition, random_partition, Decomposition};
pub use hyper::{coordinate_ascent, fit_hyperparameters, HyperFit};
pub use kernel::{se_kernel, Kernel};
pub use posterior::{log_marginal_likelihood, GpPosterior};

/// Squared-exponential ARD kernel hyperparameters plus observation noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Kernel amplitude (prior variance), output units squared.
    pub scale: f64,
    /// Per-dimension length-scales.
    pub bandwidths: Vec<f64>,
    /// Observation noise variance.
    pub noise_var: f64,
}

impl KernelParams {
    pub fn new(scale: f64, bandwidths: Vec<f64>, noise_var: f64) -> Result<Self> {
        let p = Self { scale, bandwidths, noise_var };
        p.validate()?;
        Ok(p)
    }

    /// Same bandwidth in every one of `d` dimensions.
    pub fn isotropic(scale: f64, bandwidth: f64, d: usize, noise_var: f64) -> Result<Self> {
        Self::new(scale, vec![bandwidth; d], noise_var)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::Argument(format!("scale must be positive, got {}", self.scale)));
        }
        if self.bandwidths.is_empty() {
            return Err(Error::Argument("bandwidths must be non-empty".into()));
        }
        if let Some((i, b)) = self.bandwidths.iter().enumerate().find(|(_, b)| !(**b > 0.0) || !b.is_finite()) {
            return Err(Error::Argument(format!("bandwidths[{i}] must be positive, got {b}")));
        }
        if !(self.noise_var >= 0.0) || !self.noise_var.is_finite() {
            return Err(Error::Argument(format!("noise_var must be non-negative, got {}", self.noise_var)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.bandwidths.len()
    }

    /// Restrict to the listed input dimensions, keeping scale and noise.
    pub fn restrict(&self, dims: &[usize]) -> Self {
        Self {
            scale: self.scale,
            bandwidths: dims.iter().map(|&i| self.bandwidths[i]).collect(),
            noise_var: self.noise_var,
        }
    }
}

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let d = Self { lower, upper };
        d.validate()?;
        Ok(d)
    }

    pub fn unit(d: usize) -> Self {
        Self { lower: vec![0.0; d], upper: vec![1.0; d] }
    }

    pub fn cube(d: usize, lo: f64, hi: f64) -> Self {
        Self { lower: vec![lo; d], upper: vec![hi; d] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_empty() {
            return Err(Error::Argument("domain must have at least one dimension".into()));
        }
        check_dim(self.lower.len(), self.upper.len())?;
        for (i, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(l < u) || !l.is_finite() || !u.is_finite() {
                return Err(Error::Argument(format!("domain dimension {i}: lower {l} !< upper {u}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(i, t)| (self.lower[i] + t * self.width(i)).clamp(self.lower[i], self.upper[i]))
            .collect()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    /// The sub-box over the listed dimensions.
    pub fn project(&self, dims: &[usize]) -> Self {
        Self {
            lower: dims.iter().map(|&i| self.lower[i]).collect(),
            upper: dims.iter().map(|&i| self.upper[i]).collect(),
        }
    }
}

/// Observed inputs and outputs, `D_t`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl ObservationSet {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Argument(format!("{} points but {} values", points.len(), values.len())));
        }
        if let Some(first) = points.first() {
            for p in &points {
                check_dim(first.len(), p.len())?;
            }
        }
        Ok(Self { points, values })
    }

    pub fn push(&mut self, x: Vec<f64>, y: f64) {
        self.points.push(x);
        self.values.push(y);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }
}

/// Disjoint dimension groups covering `0..d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    groups: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(groups: Vec<Vec<usize>>, d: usize) -> Result<Self> {
        let mut seen = vec![false; d];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Argument("partition group is empty".into()));
            }
            for &i in g {
                if i >= d {
                    return Err(Error::Argument(format!("dimension {i} out of range for d={d}")));
                }
                if seen[i] {
                    return Err(Error::Argument(format!("dimension {i} appears in two groups")));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Argument(format!("dimension {missing} not covered")));
        }
        Ok(Self { groups })
    }

    /// One group holding every dimension.
    pub fn single(d: usize) -> Self {
        Self { groups: vec![(0..d).collect()] }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Canonical form: each group sorted, groups ordered by first element.
    pub fn canonical(&self) -> Self {
        let mut groups: Vec<Vec<usize>> = self
            .groups
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.sort_unstable();
                g
            })
            .collect();
        groups.sort();
        Self { groups }
    }

    pub fn same_as(&self, other: &Partition) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Posterior mean and standard deviation at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPrediction {
    pub mean: f64,
    pub std: f64,
}

impl PointPrediction {
    pub fn floored(self, std_floor: f64) -> Self {
        Self { mean: self.mean, std: self.std.max(std_floor) }
    }
}

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;

use super::{GpPosterior, Kernel, KernelParams, ObservationSet, Partition, PointPrediction};

/// Sum of SE-ARD kernels, each acting on one group of input dimensions.
#[derive(Debug, Clone)]
pub struct AdditiveKernel {
    partition: Partition,
    components: Vec<KernelParams>,
}

impl AdditiveKernel {
    pub fn new(partition: Partition, components: Vec<KernelParams>) -> Result<Self> {
        if components.len() != partition.len() {
            return Err(Error::Argument(format!(
                "{} component kernels for {} groups",
                components.len(),
                partition.len()
            )));
        }
        for (g, p) in partition.groups().iter().zip(&components) {
            p.validate()?;
            check_dim(g.len(), p.dim())?;
        }
        Ok(Self { partition, components })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn components(&self) -> &[KernelParams] {
        &self.components
    }

    /// Component `m` evaluated on full-dimensional inputs.
    #[inline]
    pub fn eval_component(&self, m: usize, a: &[f64], b: &[f64]) -> f64 {
        let p = &self.components[m];
        let mut s = 0.0;
        for (&i, l) in self.partition.groups()[m].iter().zip(&p.bandwidths) {
            let r = (a[i] - b[i]) / l;
            s += r * r;
        }
        p.scale * (-0.5 * s).exp()
    }

    /// Component `m` with `sub` given only on that group's coordinates.
    #[inline]
    fn eval_component_sub(&self, m: usize, sub: &[f64], b: &[f64]) -> f64 {
        let p = &self.components[m];
        let mut s = 0.0;
        for ((&i, l), v) in self.partition.groups()[m].iter().zip(&p.bandwidths).zip(sub) {
            let r = (v - b[i]) / l;
            s += r * r;
        }
        p.scale * (-0.5 * s).exp()
    }
}

impl Kernel for AdditiveKernel {
    fn dim(&self) -> usize {
        self.partition.dim()
    }

    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..self.components.len()).map(|m| self.eval_component(m, a, b)).sum()
    }

    fn amplitude(&self) -> f64 {
        self.components.iter().map(|p| p.scale).sum()
    }
}

/// Additive-GP posterior: one factorization of the summed kernel, from which
/// each component's posterior is read off.
#[derive(Debug, Clone)]
pub struct AddGpPosterior {
    inner: GpPosterior<AdditiveKernel>,
}

impl AddGpPosterior {
    pub fn fit(
        data: ObservationSet,
        partition: Partition,
        component_params: Vec<KernelParams>,
        noise_var: f64,
    ) -> Result<Self> {
        if !(noise_var >= 0.0) {
            return Err(Error::Argument(format!("noise_var must be non-negative, got {noise_var}")));
        }
        let kernel = AdditiveKernel::new(partition, component_params)?;
        Ok(Self { inner: GpPosterior::fit_with_kernel(kernel, noise_var, data)? })
    }

    pub fn partition(&self) -> &Partition {
        self.inner.kernel().partition()
    }

    pub fn component_params(&self) -> &[KernelParams] {
        self.inner.kernel().components()
    }

    pub fn noise_var(&self) -> f64 {
        self.inner.noise_var()
    }

    pub fn data(&self) -> &ObservationSet {
        self.inner.data()
    }

    pub fn n_components(&self) -> usize {
        self.partition().len()
    }

    /// The full (summed) model.
    pub fn full(&self) -> &GpPosterior<AdditiveKernel> {
        &self.inner
    }

    pub fn predict(&self, x: &[f64]) -> PointPrediction {
        self.inner.predict(x)
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.inner.log_marginal_likelihood()
    }

    /// Posterior of component `m` at the full-dimensional point `x`.
    pub fn predict_component(&self, x: &[f64], m: usize) -> Result<PointPrediction> {
        check_dim(self.inner.dim(), x.len())?;
        let sub = self.sub_point(x, m)?;
        Ok(self.predict_component_sub(&sub, m))
    }

    fn sub_point(&self, x: &[f64], m: usize) -> Result<Vec<f64>> {
        let groups = self.partition().groups();
        let g = groups
            .get(m)
            .ok_or_else(|| Error::Argument(format!("component {m} out of range ({} groups)", groups.len())))?;
        Ok(g.iter().map(|&i| x[i]).collect())
    }

    /// Posterior of component `m` with `sub` holding only the group's coordinates.
    ///
    /// Panics if `m` is out of range.
    pub fn predict_component_sub(&self, sub: &[f64], m: usize) -> PointPrediction {
        let kern = self.inner.kernel();
        let data = self.inner.data();
        let kx: Vec<f64> = data.points.iter().map(|p| kern.eval_component_sub(m, sub, p)).collect();
        let mean = dot(&kx, self.inner.alpha());
        let v = self.inner.factor().solve_lower(&kx);
        let var = kern.components()[m].scale - dot(&v, &v);
        PointPrediction { mean, std: var.max(0.0).sqrt() }
    }

    /// Posterior mean of component `m` only, O(t).
    pub fn predict_component_mean_sub(&self, sub: &[f64], m: usize) -> f64 {
        let kern = self.inner.kernel();
        self.inner
            .data()
            .points
            .iter()
            .zip(self.inner.alpha())
            .map(|(p, a)| kern.eval_component_sub(m, sub, p) * a)
            .sum()
    }
}

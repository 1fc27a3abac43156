use std::f64::consts::PI;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, Cholesky, Matrix};

use super::{Kernel, KernelParams, ObservationSet, PointPrediction};

/// Exact GP posterior under a zero-mean prior, with `K_t + σ²I` factorized
/// once at construction.
///
/// Immutable after construction; prediction only reads.
#[derive(Debug, Clone)]
pub struct GpPosterior<K: Kernel = KernelParams> {
    kernel: K,
    noise_var: f64,
    data: ObservationSet,
    chol: Cholesky,
    alpha: Vec<f64>,
}

impl GpPosterior<KernelParams> {
    /// Fit with an SE-ARD kernel; `params.noise_var` is the observation noise.
    pub fn fit(data: ObservationSet, params: KernelParams) -> Result<Self> {
        params.validate()?;
        let noise = params.noise_var;
        Self::fit_with_kernel(params, noise, data)
    }

    pub fn params(&self) -> &KernelParams {
        &self.kernel
    }
}

impl<K: Kernel> GpPosterior<K> {
    pub fn fit_with_kernel(kernel: K, noise_var: f64, data: ObservationSet) -> Result<Self> {
        if let Some(p) = data.points.first() {
            check_dim(kernel.dim(), p.len())?;
        }
        let t = data.len();
        let mut gram = Matrix::zeros(t, t);
        for i in 0..t {
            for j in 0..=i {
                let k = kernel.eval(&data.points[i], &data.points[j]);
                gram[(i, j)] = k;
                gram[(j, i)] = k;
            }
            gram[(i, i)] += noise_var;
        }
        let chol = Cholesky::factor_with_fallback(&gram, kernel.amplitude())?;
        let alpha = chol.solve(&data.values);
        Ok(Self { kernel, noise_var, data, chol, alpha })
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn data(&self) -> &ObservationSet {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// `(K_t + σ²I)⁻¹ y_t`.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub(crate) fn factor(&self) -> &Cholesky {
        &self.chol
    }

    fn cross_cov(&self, x: &[f64]) -> Vec<f64> {
        self.data.points.iter().map(|p| self.kernel.eval(x, p)).collect()
    }

    /// Posterior mean and standard deviation at `x`.
    ///
    /// Panics if `x` has the wrong dimension; see [`Self::try_predict`].
    pub fn predict(&self, x: &[f64]) -> PointPrediction {
        assert_eq!(x.len(), self.dim(), "prediction point has wrong dimension");
        let kx = self.cross_cov(x);
        let mean = dot(&kx, &self.alpha);
        let v = self.chol.solve_lower(&kx);
        let var = self.kernel.eval(x, x) - dot(&v, &v);
        PointPrediction { mean, std: var.max(0.0).sqrt() }
    }

    pub fn try_predict(&self, x: &[f64]) -> Result<PointPrediction> {
        check_dim(self.dim(), x.len())?;
        Ok(self.predict(x))
    }

    /// Posterior mean only, O(t).
    pub fn predict_mean(&self, x: &[f64]) -> f64 {
        self.data.points.iter().zip(&self.alpha).map(|(p, a)| self.kernel.eval(x, p) * a).sum()
    }

    /// `k_t(x, x')`.
    pub fn posterior_cov(&self, x: &[f64], x2: &[f64]) -> f64 {
        let v1 = self.chol.solve_lower(&self.cross_cov(x));
        let v2 = self.chol.solve_lower(&self.cross_cov(x2));
        self.kernel.eval(x, x2) - dot(&v1, &v2)
    }

    /// Log marginal likelihood of the stored data under this model.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let t = self.data.len() as f64;
        -0.5 * dot(&self.data.values, &self.alpha) - 0.5 * self.chol.log_det() - 0.5 * t * (2.0 * PI).ln()
    }
}

/// `−½ yᵀ(K+σ²I)⁻¹y − ½ log|K+σ²I| − (t/2) log 2π`.
pub fn log_marginal_likelihood(data: &ObservationSet, params: &KernelParams) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Argument("log marginal likelihood needs at least one observation".into()));
    }
    Ok(GpPosterior::fit(data.clone(), params.clone())?.log_marginal_likelihood())
}

use crate::error::{check_dim, Result};

use super::KernelParams;

/// A positive-definite covariance function over `R^d`.
pub trait Kernel: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, a: &[f64], b: &[f64]) -> f64;

    /// Typical prior variance, used to scale factorization jitter.
    fn amplitude(&self) -> f64;
}

/// `scale · exp(−½ Σ ((x_i − x2_i)/ℓ_i)²)`.
pub fn se_kernel(x: &[f64], x2: &[f64], params: &KernelParams) -> Result<f64> {
    check_dim(params.dim(), x.len())?;
    check_dim(params.dim(), x2.len())?;
    Ok(params.eval(x, x2))
}

impl Kernel for KernelParams {
    fn dim(&self) -> usize {
        self.bandwidths.len()
    }

    #[inline]
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for ((x, y), l) in a.iter().zip(b).zip(&self.bandwidths) {
            let r = (x - y) / l;
            s += r * r;
        }
        self.scale * (-0.5 * s).exp()
    }

    fn amplitude(&self) -> f64 {
        self.scale
    }
}

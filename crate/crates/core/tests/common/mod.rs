//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's numerics: linear systems are solved
//! by Gaussian elimination with partial pivoting, determinants come from the
//! same elimination, and the normal CDF is integrated with Simpson's rule.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

/// Diagonal jitter the model adds before factorizing, relative to the scale.
pub const MODEL_JITTER: f64 = 1e-10;

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
/// Returns the solution and `ln |det a|`.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> (Vec<f64>, f64) {
    let n = b.len();
    let mut log_det = 0.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        log_det += p.abs().ln();
        for r in col + 1..n {
            let factor = a[r][col] / p;
            if factor != 0.0 {
                for c in col..n {
                    a[r][c] -= factor * a[col][c];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    (x, log_det)
}

/// Squared-exponential kernel written out directly.
pub fn se(x: &[f64], y: &[f64], scale: f64, ls: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        let d = (x[i] - y[i]) / ls[i];
        s += d * d;
    }
    scale * (-0.5 * s).exp()
}

/// Mean, variance and log marginal likelihood of an exact GP by dense solves.
pub struct DenseGp {
    pub xs: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub gram: Vec<Vec<f64>>,
    pub scale: f64,
    pub ls: Vec<f64>,
    pub lml: f64,
}

impl DenseGp {
    pub fn new(xs: Vec<Vec<f64>>, ys: Vec<f64>, scale: f64, ls: Vec<f64>, noise: f64) -> Self {
        let n = xs.len();
        let mut gram = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = se(&xs[i], &xs[j], scale, &ls);
            }
            gram[i][i] += noise + MODEL_JITTER * scale;
        }
        let (alpha, log_det) = gauss_solve(gram.clone(), ys.clone());
        let fit: f64 = ys.iter().zip(&alpha).map(|(y, a)| y * a).sum();
        let lml = -0.5 * fit - 0.5 * log_det - 0.5 * n as f64 * (2.0 * PI).ln();
        Self { xs, alpha, gram, scale, ls, lml }
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        self.xs.iter().zip(&self.alpha).map(|(xi, a)| a * se(x, xi, self.scale, &self.ls)).sum()
    }

    pub fn var(&self, x: &[f64]) -> f64 {
        let k: Vec<f64> = self.xs.iter().map(|xi| se(x, xi, self.scale, &self.ls)).collect();
        let (v, _) = gauss_solve(self.gram.clone(), k.clone());
        self.scale - k.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()
    }
}

pub fn normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

/// `Ψ(u)` by composite Simpson integration of the density from 0.
pub fn normal_cdf(u: f64) -> f64 {
    let n = 20_000;
    let h = u.abs() / n as f64;
    let mut s = normal_pdf(0.0) + normal_pdf(u.abs());
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * normal_pdf(i as f64 * h);
    }
    let half = s * h / 3.0;
    if u >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// `g(u) = uψ(u)/(2Ψ(u)) − ln Ψ(u)` from the reference CDF.
pub fn g_oracle(u: f64) -> f64 {
    let c = normal_cdf(u);
    u * normal_pdf(u) / (2.0 * c) - c.ln()
}

/// Deterministic uniform stream for building test inputs.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407))
    }

    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64) / ((1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((self.next() * n as f64) as usize).min(n - 1)
    }
}

/// `|a − b| ≤ tol · max(|b|, floor)`.
pub fn rel_close(a: f64, b: f64, tol: f64, floor: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(floor)
}

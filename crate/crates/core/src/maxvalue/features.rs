use std::f64::consts::PI;
use std::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gp::{Domain, Kernel, KernelParams, ObservationSet, PointPrediction};
use crate::linalg::{dot, Cholesky, Matrix};
use crate::rng::{halton_in, SeededRng};

use super::{MaxValueSamples, SampleSource};

/// Random Fourier features for an SE kernel:
/// `φ_i(x) = √(scale·2/D) cos(ω_iᵀ x_A + c_i)` with `ω_i` drawn from the
/// kernel's Gaussian spectral density and `c_i ~ U[0, 2π)`.
///
/// `A` is the set of active input coordinates; inactive coordinates never
/// affect the features.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    omegas: Vec<Vec<f64>>,
    phases: Vec<f64>,
    scale: f64,
    dims: Vec<usize>,
    input_dim: usize,
}

/// Build a feature map for `params` over all of its dimensions, or only over
/// `dims` (bandwidths taken from those coordinates) when given.
pub fn build_feature_map(
    params: &KernelParams,
    n_features: usize,
    rng: &mut SeededRng,
    dims: Option<&[usize]>,
) -> Result<FeatureMap> {
    params.validate()?;
    let d = params.dim();
    match dims {
        None => FeatureMap::for_group(params, (0..d).collect(), d, n_features, rng),
        Some(dims) => {
            if let Some(&bad) = dims.iter().find(|&&i| i >= d) {
                return Err(Error::Argument(format!("active dimension {bad} out of range for d={d}")));
            }
            FeatureMap::for_group(&params.restrict(dims), dims.to_vec(), d, n_features, rng)
        }
    }
}

impl FeatureMap {
    /// Features for a kernel whose bandwidths are listed in `group` order.
    pub fn for_group(
        params: &KernelParams,
        group: Vec<usize>,
        input_dim: usize,
        n_features: usize,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::Argument("feature count must be at least 1".into()));
        }
        check_dim(group.len(), params.dim())?;
        let omegas = (0..n_features)
            .map(|_| params.bandwidths.iter().map(|l| rng.sample::<f64, _>(StandardNormal) / l).collect())
            .collect();
        let phases = (0..n_features).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        Ok(Self { omegas, phases, scale: params.scale, dims: group, input_dim })
    }

    pub fn n_features(&self) -> usize {
        self.phases.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn omegas(&self) -> &[Vec<f64>] {
        &self.omegas
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn amplitude(&self) -> f64 {
        (self.scale * 2.0 / self.n_features() as f64).sqrt()
    }

    fn active(&self, x: &[f64]) -> Vec<f64> {
        self.dims.iter().map(|&i| x[i]).collect()
    }

    /// `φ(x)` for a full input vector.
    pub fn features(&self, x: &[f64]) -> Vec<f64> {
        self.features_sub(&self.active(x))
    }

    /// `φ` at a point given only on the active coordinates.
    pub fn features_sub(&self, sub: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features()];
        self.write_features_sub(sub, &mut out);
        out
    }

    fn write_features_sub(&self, sub: &[f64], out: &mut [f64]) {
        let amp = self.amplitude();
        for ((o, w), c) in out.iter_mut().zip(&self.omegas).zip(&self.phases) {
            *o = amp * (dot(w, sub) + c).cos();
        }
    }

    /// `wᵀφ` and its gradient with respect to the active coordinates.
    fn value_and_gradient_sub(&self, weights: &[f64], sub: &[f64]) -> (f64, Vec<f64>) {
        let amp = self.amplitude();
        let mut value = 0.0;
        let mut grad = vec![0.0; sub.len()];
        for ((a, w), c) in weights.iter().zip(&self.omegas).zip(&self.phases) {
            let (s, co) = (dot(w, sub) + c).sin_cos();
            value += a * co;
            for (g, wi) in grad.iter_mut().zip(w) {
                *g -= a * s * wi;
            }
        }
        grad.iter_mut().for_each(|g| *g *= amp);
        (amp * value, grad)
    }

    /// `wᵀφ(x)` for a full input vector.
    pub fn value(&self, weights: &[f64], x: &[f64]) -> f64 {
        self.value_sub(weights, &self.active(x))
    }

    pub fn value_sub(&self, weights: &[f64], sub: &[f64]) -> f64 {
        let amp = self.amplitude();
        weights.iter().zip(&self.omegas).zip(&self.phases).map(|((a, w), c)| a * (dot(w, sub) + c).cos()).sum::<f64>()
            * amp
    }
}

/// The finite-feature kernel `φ(x)ᵀφ(x')`.
impl Kernel for FeatureMap {
    fn dim(&self) -> usize {
        self.input_dim
    }

    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        dot(&self.features(a), &self.features(b))
    }

    fn amplitude(&self) -> f64 {
        self.scale
    }
}

/// Gaussian posterior `N(ν, Σ)` over the weights of one or more stacked
/// feature maps, with `Σ = (ZZᵀσ⁻² + I)⁻¹` and `ν = σ⁻² Σ Z y`.
///
/// Only the factor of the precision `Σ⁻¹` is stored; weight draws use
/// `ν + L⁻ᵀε`, which has covariance `Σ`.
#[derive(Debug, Clone)]
pub struct FeaturePosterior {
    nu: Vec<f64>,
    precision: Cholesky,
    blocks: Vec<Range<usize>>,
    cov_scale: f64,
}

impl FeaturePosterior {
    pub fn fit(maps: &[FeatureMap], data: &ObservationSet, noise_var: f64) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Argument("at least one feature map is required".into()));
        }
        if !(noise_var > 0.0) {
            return Err(Error::Argument(format!("feature posterior needs noise_var > 0, got {noise_var}")));
        }
        let mut blocks = Vec::with_capacity(maps.len());
        let mut offset = 0;
        for m in maps {
            blocks.push(offset..offset + m.n_features());
            offset += m.n_features();
        }
        let total = offset;
        let inv_noise = 1.0 / noise_var;
        let mut precision = Matrix::identity(total);
        let mut zy = vec![0.0; total];
        let mut z = vec![0.0; total];
        for (x, y) in data.points.iter().zip(&data.values) {
            check_dim(maps[0].input_dim, x.len())?;
            for (m, r) in maps.iter().zip(&blocks) {
                let sub = m.active(x);
                m.write_features_sub(&sub, &mut z[r.clone()]);
            }
            for i in 0..total {
                let zi = z[i] * inv_noise;
                zy[i] += zi * y;
                let row = precision.row_mut(i);
                for j in 0..=i {
                    row[j] += zi * z[j];
                }
            }
        }
        for i in 0..total {
            for j in 0..i {
                precision[(j, i)] = precision[(i, j)];
            }
        }
        // Σ⁻¹ ⪰ I, so jitter is only a fallback
        let precision = Cholesky::factor(&precision).or_else(|_| Cholesky::factor_with_fallback(&precision, 1.0))?;
        let nu = precision.solve(&zy);
        Ok(Self { nu, precision, blocks, cov_scale: 1.0 })
    }

    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Weight indices belonging to stacked map `b`.
    pub fn block(&self, b: usize) -> Range<usize> {
        self.blocks[b].clone()
    }

    /// Explicit `Σ`.
    pub fn covariance(&self) -> Matrix {
        let mut s = self.precision.inverse();
        s.scale(self.cov_scale);
        s
    }

    /// Same mean with the covariance multiplied by `s ≥ 0`.
    pub fn with_covariance_scale(&self, s: f64) -> Self {
        assert!(s >= 0.0, "covariance scale must be non-negative");
        Self { cov_scale: self.cov_scale * s, ..self.clone() }
    }

    /// Draw a weight vector `ã ~ N(ν, Σ)`.
    pub fn sample_weights(&self, rng: &mut SeededRng) -> Vec<f64> {
        let eps: Vec<f64> = (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let w = self.precision.solve_upper(&eps);
        let k = self.cov_scale.sqrt();
        self.nu.iter().zip(w).map(|(n, e)| n + k * e).collect()
    }

    fn stacked_features(&self, maps: &[FeatureMap], x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.dim()];
        for (m, r) in maps.iter().zip(&self.blocks) {
            m.write_features_sub(&m.active(x), &mut z[r.clone()]);
        }
        z
    }

    /// Weight-space predictive: mean `νᵀφ(x)`, variance `φ(x)ᵀΣφ(x)`.
    pub fn predict(&self, maps: &[FeatureMap], x: &[f64]) -> PointPrediction {
        let z = self.stacked_features(maps, x);
        let v = self.precision.solve_lower(&z);
        PointPrediction { mean: dot(&self.nu, &z), std: (self.cov_scale * dot(&v, &v)).max(0.0).sqrt() }
    }
}

/// Settings for maximizing sampled functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSearch {
    /// Gradient-ascent starts per draw, taken from the best probes.
    pub restarts: usize,
    pub steps: usize,
    /// Probe points per active dimension used to seed the starts.
    pub probes_per_dim: usize,
}

impl Default for FeatureSearch {
    fn default() -> Self {
        Self { restarts: 10, steps: 200, probes_per_dim: 200 }
    }
}

/// Projected normalized-gradient ascent with step halving on failure.
fn ascend(map: &FeatureMap, w: &[f64], sub_domain: &Domain, start: &[f64], steps: usize) -> (Vec<f64>, f64) {
    let widths: Vec<f64> = (0..sub_domain.dim()).map(|i| sub_domain.width(i)).collect();
    let mut x = start.to_vec();
    let (mut fx, mut g) = map.value_and_gradient_sub(w, &x);
    let mut step = 0.05;
    for _ in 0..steps {
        // gradient in unit-box coordinates
        let gu: Vec<f64> = g.iter().zip(&widths).map(|(gi, wi)| gi * wi).collect();
        let norm = dot(&gu, &gu).sqrt();
        if norm == 0.0 || step < 1e-10 {
            break;
        }
        let mut cand: Vec<f64> =
            x.iter().zip(&gu).zip(&widths).map(|((xi, gi), wi)| xi + step * wi * gi / norm).collect();
        sub_domain.clamp(&mut cand);
        let (fc, gc) = map.value_and_gradient_sub(w, &cand);
        if fc > fx {
            x = cand;
            fx = fc;
            g = gc;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Maximize the fixed function `wᵀφ` over the sub-box of `domain` on the
/// map's active coordinates. Returns the maximizer (active coordinates
/// only) and the maximum.
pub fn maximize_feature_function(
    map: &FeatureMap,
    weights: &[f64],
    domain: &Domain,
    search: FeatureSearch,
    rng: &mut SeededRng,
) -> (Vec<f64>, f64) {
    let sub_domain = domain.project(map.dims());
    let n = (search.probes_per_dim * map.dims().len()).max(search.restarts.max(1));
    let mut scored: Vec<(f64, Vec<f64>)> =
        halton_in(&sub_domain, n, rng).into_iter().map(|p| (map.value_sub(weights, &p), p)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut best_v, mut best_x) = scored[0].clone();
    for (_, p) in scored.iter().take(search.restarts.max(1)) {
        let (x, v) = ascend(map, weights, &sub_domain, p, search.steps);
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    (best_x, best_v)
}

/// Maximize `K` posterior function draws over `domain` and return their
/// maxima, one sample set per stacked map.
///
/// Each draw samples the full stacked weight vector once; block `b`'s
/// slice defines a function of map `b`'s active coordinates, which is
/// maximized over the matching sub-box. `floors[b]`, when set, lower-bounds
/// every returned value of block `b`.
pub fn sample_max_features_blocks(
    fp: &FeaturePosterior,
    maps: &[FeatureMap],
    domain: &Domain,
    rng: &mut SeededRng,
    k: usize,
    search: FeatureSearch,
    floors: &[Option<f64>],
) -> Result<Vec<MaxValueSamples>> {
    if k == 0 || search.restarts == 0 {
        return Err(Error::Argument("need at least one draw and one restart".into()));
    }
    if maps.len() != fp.blocks.len() || floors.len() != maps.len() {
        return Err(Error::Argument("maps, posterior blocks and floors must align".into()));
    }
    struct Probe {
        sub_domain: Domain,
        points: Vec<Vec<f64>>,
        phi: Vec<Vec<f64>>,
    }
    let probes: Vec<Probe> = maps
        .iter()
        .map(|m| {
            let sub_domain = domain.project(m.dims());
            let n = (search.probes_per_dim * m.dims().len()).max(search.restarts);
            let points = halton_in(&sub_domain, n, rng);
            let phi = points.iter().map(|p| m.features_sub(p)).collect();
            Probe { sub_domain, points, phi }
        })
        .collect();

    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(k); maps.len()];
    for _ in 0..k {
        let a = fp.sample_weights(rng);
        for (b, (m, probe)) in maps.iter().zip(&probes).enumerate() {
            let w = &a[fp.block(b)];
            let mut scored: Vec<(f64, usize)> = probe.phi.iter().enumerate().map(|(i, phi)| (dot(w, phi), i)).collect();
            scored.sort_by(|x, y| y.0.total_cmp(&x.0));
            let mut best = scored[0].0;
            for &(_, i) in scored.iter().take(search.restarts) {
                let (_, v) = ascend(m, w, &probe.sub_domain, &probe.points[i], search.steps);
                best = best.max(v);
            }
            if let Some(f) = floors[b] {
                best = best.max(f);
            }
            out[b].push(best);
        }
    }
    let tag = maps.len() > 1;
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(b, values)| {
            let s = MaxValueSamples::new(values, SampleSource::Feature);
            if tag {
                s.for_component(b)
            } else {
                s
            }
        })
        .collect())
}

/// Single-map form of [`sample_max_features_blocks`].
pub fn sample_max_features(
    fp: &FeaturePosterior,
    map: &FeatureMap,
    domain: &Domain,
    rng: &mut SeededRng,
    k: usize,
    search: FeatureSearch,
    floor: Option<f64>,
) -> Result<MaxValueSamples> {
    let mut v = sample_max_features_blocks(fp, std::slice::from_ref(map), domain, rng, k, search, &[floor])?;
    Ok(v.remove(0))
}

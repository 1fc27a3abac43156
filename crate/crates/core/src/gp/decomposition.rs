use std::collections::HashMap;
use std::f64::consts::PI;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky, Matrix};
use crate::rng::SeededRng;

use super::{KernelParams, ObservationSet, Partition};

/// Result of an additive-structure search.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub partition: Partition,
    /// Per-group kernel parameters, bandwidths restricted to the group.
    pub params: Vec<KernelParams>,
    pub noise_var: f64,
    pub log_likelihood: f64,
    /// Distinct partitions actually scored.
    pub distinct_scored: usize,
}

/// Draw one random decomposition: shuffle the dimensions, then cut them
/// into consecutive groups of `max_group_size` (the last may be smaller).
pub fn random_partition(d: usize, max_group_size: usize, rng: &mut SeededRng) -> Partition {
    let mut dims: Vec<usize> = (0..d).collect();
    dims.shuffle(rng);
    let groups = dims.chunks(max_group_size).map(<[usize]>::to_vec).collect();
    Partition::new(groups, d).expect("chunked permutation is a partition")
}

/// Sample `n_candidates` random decompositions and keep the one whose
/// additive GP gives the data the highest marginal likelihood.
///
/// Every group kernel uses `base`'s scale and its bandwidths restricted to
/// the group; the shared noise is `base.noise_var`.
pub fn learn_decomposition(
    data: &ObservationSet,
    base: &KernelParams,
    n_candidates: usize,
    max_group_size: usize,
    rng: &mut SeededRng,
) -> Result<Decomposition> {
    if n_candidates == 0 {
        return Err(Error::Argument("n_candidates must be at least 1".into()));
    }
    if max_group_size == 0 {
        return Err(Error::Argument("max_group_size must be at least 1".into()));
    }
    if data.len() < 2 {
        return Err(Error::Argument("decomposition search needs at least two observations".into()));
    }
    base.validate()?;
    let d = base.dim();
    let mut scorer = Scorer::new(data, base);
    let mut scored: HashMap<Partition, f64> = HashMap::new();
    let mut best: Option<(Partition, f64)> = None;
    for _ in 0..n_candidates {
        let cand = random_partition(d, max_group_size, rng).canonical();
        if scored.contains_key(&cand) {
            continue;
        }
        let ll = scorer.score(&cand);
        scored.insert(cand.clone(), ll);
        // ties keep the earlier candidate
        if best.as_ref().is_none_or(|(_, b)| ll > *b) {
            best = Some((cand, ll));
        }
    }
    let (partition, log_likelihood) = best.expect("at least one candidate");
    if !log_likelihood.is_finite() {
        return Err(Error::Numerical("no candidate decomposition could be factorized".into()));
    }
    let params = component_params(base, &partition);
    Ok(Decomposition { partition, params, noise_var: base.noise_var, log_likelihood, distinct_scored: scored.len() })
}

pub(crate) fn component_params(base: &KernelParams, partition: &Partition) -> Vec<KernelParams> {
    partition.groups().iter().map(|g| base.restrict(g)).collect()
}

/// Scores partitions by marginal likelihood, caching each group's Gram
/// block (lower triangle, row-major) since candidates share most groups.
struct Scorer<'a> {
    data: &'a ObservationSet,
    base: &'a KernelParams,
    blocks: HashMap<Vec<usize>, Vec<f64>>,
}

impl<'a> Scorer<'a> {
    fn new(data: &'a ObservationSet, base: &'a KernelParams) -> Self {
        Self { data, base, blocks: HashMap::new() }
    }

    fn block(&mut self, group: &[usize]) -> &[f64] {
        let (data, base) = (self.data, self.base);
        self.blocks.entry(group.to_vec()).or_insert_with(|| {
            let t = data.len();
            let mut b = Vec::with_capacity(t * (t + 1) / 2);
            for i in 0..t {
                for j in 0..=i {
                    let (x, y) = (&data.points[i], &data.points[j]);
                    let mut s = 0.0;
                    for &k in group {
                        let r = (x[k] - y[k]) / base.bandwidths[k];
                        s += r * r;
                    }
                    b.push(base.scale * (-0.5 * s).exp());
                }
            }
            b
        })
    }

    /// Same value as fitting an [`AddGpPosterior`] with the group kernels
    /// restricted from `base`, without rebuilding shared blocks.
    fn score(&mut self, partition: &Partition) -> f64 {
        let t = self.data.len();
        let mut packed = vec![0.0; t * (t + 1) / 2];
        for g in partition.groups() {
            for (acc, v) in packed.iter_mut().zip(self.block(g)) {
                *acc += v;
            }
        }
        let gram = Matrix::from_fn(t, t, |i, j| {
            let (i, j) = if i >= j { (i, j) } else { (j, i) };
            packed[i * (i + 1) / 2 + j] + if i == j { self.base.noise_var } else { 0.0 }
        });
        let amplitude: f64 = partition.groups().iter().map(|_| self.base.scale).sum();
        let Ok(chol) = Cholesky::factor_with_fallback(&gram, amplitude) else {
            return f64::NEG_INFINITY;
        };
        let alpha = chol.solve(&self.data.values);
        -0.5 * dot(&self.data.values, &alpha) - 0.5 * chol.log_det() - 0.5 * t as f64 * (2.0 * PI).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand::Rng;

    #[test]
    fn one_dimension_has_one_partition() {
        let data = ObservationSet::new(vec![vec![0.1], vec![0.5]], vec![1.0, 2.0]).unwrap();
        let base = KernelParams::isotropic(1.0, 0.2, 1, 0.01).unwrap();
        let dec = learn_decomposition(&data, &base, 50, 2, &mut substream(0, 0)).unwrap();
        assert_eq!(dec.partition, Partition::single(1));
        assert_eq!(dec.distinct_scored, 1);
    }

    #[test]
    fn zero_candidates_rejected() {
        let data = ObservationSet::new(vec![vec![0.1], vec![0.5]], vec![1.0, 2.0]).unwrap();
        let base = KernelParams::isotropic(1.0, 0.2, 1, 0.01).unwrap();
        assert!(learn_decomposition(&data, &base, 0, 2, &mut substream(0, 0)).is_err());
    }

    #[test]
    fn random_partitions_respect_group_size() {
        let mut rng = substream(4, 4);
        for _ in 0..50 {
            let p = random_partition(7, 3, &mut rng);
            assert!(p.groups().iter().all(|g| g.len() <= 3));
            assert_eq!(p.dim(), 7);
        }
    }

    #[test]
    fn beats_trivial_partition_when_it_is_a_candidate() {
        let mut rng = substream(5, 0);
        let pts: Vec<Vec<f64>> = (0..30).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| (5.0 * p[0]).sin() * p[1] + p[2]).collect();
        let data = ObservationSet::new(pts, ys).unwrap();
        let base = KernelParams::isotropic(1.0, 0.3, 3, 0.01).unwrap();
        // max_group_size = d, so the all-in-one partition is always drawn
        let dec = learn_decomposition(&data, &base, 20, 3, &mut substream(1, 1)).unwrap();
        let trivial = Scorer::new(&data, &base).score(&Partition::single(3));
        assert!(dec.log_likelihood >= trivial);
    }

    #[test]
    fn cached_score_matches_additive_posterior() {
        let mut rng = substream(7, 0);
        let pts: Vec<Vec<f64>> = (0..25).map(|_| (0..5).map(|_| rng.random()).collect()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| (4.0 * p[0] * p[3]).sin() + p[1] - p[2] * p[4]).collect();
        let data = ObservationSet::new(pts, ys).unwrap();
        let base = KernelParams::new(0.7, vec![0.3, 0.5, 0.2, 0.4, 0.6], 0.01).unwrap();
        let mut scorer = Scorer::new(&data, &base);
        for _ in 0..10 {
            let p = random_partition(5, 2, &mut rng).canonical();
            let post =
                super::super::AddGpPosterior::fit(data.clone(), p.clone(), component_params(&base, &p), base.noise_var)
                    .unwrap();
            assert_eq!(scorer.score(&p), post.log_marginal_likelihood());
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = substream(6, 0);
        let pts: Vec<Vec<f64>> = (0..20).map(|_| (0..4).map(|_| rng.random()).collect()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p[0] * p[1] - p[2]).collect();
        let data = ObservationSet::new(pts, ys).unwrap();
        let base = KernelParams::isotropic(1.0, 0.3, 4, 0.01).unwrap();
        let a = learn_decomposition(&data, &base, 30, 2, &mut substream(9, 0)).unwrap();
        let b = learn_decomposition(&data, &base, 30, 2, &mut substream(9, 0)).unwrap();
        assert_eq!(a.partition, b.partition);
        assert_eq!(a.log_likelihood, b.log_likelihood);
    }
}

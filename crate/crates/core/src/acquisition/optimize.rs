use crate::gp::{Domain, Partition};
use crate::rng::{halton_in, SeededRng};

const REFINE_STARTS: usize = 5;
const SWEEPS: usize = 4;
const GOLDEN_ITERS: usize = 30;

/// A maximizer and the score it attains.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
}

fn better(a: f64, b: f64) -> bool {
    // NaN never wins
    a > b || (b.is_nan() && !a.is_nan())
}

/// Exhaustive argmax over a finite candidate set; ties keep the first.
pub fn optimize_over_candidates<F>(alpha: F, candidates: &[Vec<f64>]) -> Optimum
where
    F: Fn(&[f64]) -> f64,
{
    assert!(!candidates.is_empty(), "candidate set is empty");
    let mut best = Optimum { x: candidates[0].clone(), value: alpha(&candidates[0]) };
    for c in &candidates[1..] {
        let v = alpha(c);
        if better(v, best.value) {
            best = Optimum { x: c.clone(), value: v };
        }
    }
    best
}

/// Golden-section maximization of `f` on `[lo, hi]`.
fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coordinate-wise golden-section refinement of `start` within `domain`.
///
/// Each coordinate is searched within `radius0` box-widths of the current
/// point; the radius halves after every sweep. Never returns a worse score.
pub fn refine_locally<F: Fn(&[f64]) -> f64>(alpha: &F, domain: &Domain, start: Optimum, radius0: f64) -> Optimum {
    let d = domain.dim();
    let mut cur = start;
    let mut radius: Vec<f64> = (0..d).map(|i| radius0 * domain.width(i)).collect();
    for _ in 0..SWEEPS {
        for i in 0..d {
            let lo = (cur.x[i] - radius[i]).max(domain.lower[i]);
            let hi = (cur.x[i] + radius[i]).min(domain.upper[i]);
            if hi <= lo {
                continue;
            }
            let mut probe = cur.x.clone();
            let (xi, v) = golden_max(
                |t| {
                    probe[i] = t;
                    alpha(&probe)
                },
                lo,
                hi,
            );
            if better(v, cur.value) {
                cur.x[i] = xi;
                cur.value = v;
            }
        }
        radius.iter_mut().for_each(|r| *r *= 0.5);
    }
    cur
}

/// Maximize `alpha` over the box: score `budget` low-discrepancy probes,
/// then refine the best five by coordinate-wise golden-section search.
///
/// The returned score is never below the best probe.
pub fn optimize_acquisition<F>(alpha: F, domain: &Domain, budget: usize, rng: &mut SeededRng) -> Optimum
where
    F: Fn(&[f64]) -> f64,
{
    let budget = budget.max(1);
    let probes = halton_in(domain, budget, rng);
    let mut scored: Vec<Optimum> = probes
        .into_iter()
        .map(|x| {
            let value = alpha(&x);
            Optimum { x, value }
        })
        .collect();
    // stable sort: ties keep probe order
    scored.sort_by(|a, b| b.value.total_cmp(&a.value));
    scored.retain(|o| !o.value.is_nan());
    if scored.is_empty() {
        let x = domain.center();
        let value = alpha(&x);
        return Optimum { x, value };
    }
    let radius = 2.0 / (budget as f64).powf(1.0 / domain.dim() as f64);
    let mut best = scored[0].clone();
    for start in scored.into_iter().take(REFINE_STARTS) {
        let r = refine_locally(&alpha, domain, start, radius.min(1.0));
        if better(r.value, best.value) {
            best = r;
        }
    }
    best
}

/// Maximize one score per group over that group's sub-box and concatenate
/// the sub-vectors. `alphas[m]` receives only group `m`'s coordinates. The
/// returned value is the sum of the per-group maxima.
pub fn optimize_acquisition_per_component<F>(
    alphas: &[F],
    partition: &Partition,
    domain: &Domain,
    budget_per_dim: usize,
    rng: &mut SeededRng,
) -> Optimum
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(alphas.len(), partition.len(), "one score per group is required");
    let mut x = vec![0.0; domain.dim()];
    let mut value = 0.0;
    for (alpha, group) in alphas.iter().zip(partition.groups()) {
        let sub = domain.project(group);
        let opt = optimize_acquisition(alpha, &sub, budget_per_dim * group.len(), rng);
        for (&i, v) in group.iter().zip(&opt.x) {
            x[i] = *v;
        }
        value += opt.value;
    }
    Optimum { x, value }
}

//! Standard normal density, distribution and log-distribution functions that
//! stay accurate deep in both tails.

use std::f64::consts::{PI, SQRT_2};

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

pub fn pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

pub fn ln_pdf(u: f64) -> f64 {
    -0.5 * u * u - LN_SQRT_2PI
}

pub fn cdf(u: f64) -> f64 {
    0.5 * libm::erfc(-u / SQRT_2)
}

/// Mills ratio `Q(v)/pdf(v)` with `Q` the upper tail, for `v >= 0`.
pub fn mills_ratio(v: f64) -> f64 {
    debug_assert!(v >= 0.0);
    if v < 5.0 {
        return 0.5 * libm::erfc(v / SQRT_2) / pdf(v);
    }
    // continued fraction 1/(v + 1/(v + 2/(v + 3/(v + ...))))
    let mut t = v;
    for k in (1..=80).rev() {
        t = v + k as f64 / t;
    }
    1.0 / t
}

/// `ln Phi(u)`, finite for every finite `u`.
pub fn ln_cdf(u: f64) -> f64 {
    if u > 0.0 {
        (-0.5 * libm::erfc(u / SQRT_2)).ln_1p()
    } else if u > -5.0 {
        (0.5 * libm::erfc(-u / SQRT_2)).ln()
    } else {
        ln_pdf(u) + mills_ratio(-u).ln()
    }
}

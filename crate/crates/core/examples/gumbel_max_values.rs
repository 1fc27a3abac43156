// Approximate the distribution of the function maximum under a GP
// posterior with a Gumbel fit and draw samples from it.
//
// ```bash
// cargo run -p maxent-bo --example gumbel_max_values
// ```

use maxent_bo::gp::{Domain, GpPosterior, KernelParams, ObservationSet};
use maxent_bo::maxvalue::GridStats;
use maxent_bo::rng::substream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dom = Domain::unit(1);
    let xs = vec![vec![0.1], vec![0.4], vec![0.75]];
    let data = ObservationSet::new(xs, vec![0.2, 0.9, -0.3])?;
    let post = GpPosterior::fit(data, KernelParams::new(1.0, vec![0.15], 1e-4)?)?;

    let stats = GridStats::from_posterior(&post, &dom, 500, &mut substream(5, 0))?;
    let gumbel = stats.fit_gumbel(stats.default_tol())?;
    println!("Gumbel location {:.4}, scale {:.4}, mean {:.4}", gumbel.a, gumbel.b, gumbel.mean());
    println!("largest posterior mean on the grid {:.4}", stats.max_mean());
    for r in [0.1, 0.5, 0.9] {
        let exact = stats.invert_cdf_max(r, 1e-10)?;
        println!("quantile {r}: grid product {exact:.4}, Gumbel {:.4}", gumbel.quantile(r));
    }
    let draws = gumbel.sample(&mut substream(5, 1), 5);
    println!("five draws of y*: {:?}", draws.values);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

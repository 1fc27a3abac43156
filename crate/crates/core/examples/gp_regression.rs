// Fit a GP to noisy samples of a 1-d function and print the posterior.
//
// ```bash
// cargo run -p maxent-bo --example gp_regression
// ```

use maxent_bo::gp::{GpPosterior, KernelParams, ObservationSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 7.0]).collect();
    let ys = xs.iter().map(|x| (6.0 * x[0]).sin()).collect();
    let data = ObservationSet::new(xs, ys)?;
    let params = KernelParams::new(1.0, vec![0.2], 1e-4)?;
    let post = GpPosterior::fit(data, params)?;

    println!("log marginal likelihood {:.4}", post.log_marginal_likelihood());
    println!("{:>6} {:>9} {:>9} {:>9}", "x", "truth", "mean", "std");
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let p = post.predict(&[x]);
        println!("{x:>6.2} {:>9.4} {:>9.4} {:>9.4}", (6.0 * x).sin(), p.mean, p.std);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

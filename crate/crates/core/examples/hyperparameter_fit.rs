// Fit kernel amplitude, bandwidths and noise by maximizing the marginal
// likelihood from a deliberately poor starting point.
//
// ```bash
// cargo run -p maxent-bo --example hyperparameter_fit
// ```

use maxent_bo::gp::Domain;
use maxent_bo::gp::{fit_hyperparameters, log_marginal_likelihood, KernelParams, ObservationSet};
use maxent_bo::rng::{substream, uniform_in};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dom = Domain::unit(2);
    let mut rng = substream(3, 0);
    let mut data = ObservationSet::default();
    for _ in 0..40 {
        let x = uniform_in(&dom, &mut rng);
        // varies quickly along x0, slowly along x1
        let y = (9.0 * x[0]).sin() + 0.3 * x[1];
        data.push(x, y);
    }
    let init = KernelParams::new(0.1, vec![1.0, 1.0], 0.1)?;
    let fit = fit_hyperparameters(&data, &init, 300)?;
    println!("start:  {init:?}  lml {:.3}", log_marginal_likelihood(&data, &init)?);
    println!("fitted: {:?}  lml {:.3}", fit.params, fit.log_likelihood);
    println!("{} likelihood evaluations", fit.evaluations);
    if let Some(w) = fit.warning {
        println!("warning: {w}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

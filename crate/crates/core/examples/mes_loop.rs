// Maximize a 2-d test function with max-value entropy search, using both
// ways of sampling the maximum.
//
// ```bash
// cargo run -p maxent-bo --example mes_loop
// ```

use maxent_bo::acquisition::{AcquisitionSpec, Sampler};
use maxent_bo::bo::{run_mes, BoConfig};
use maxent_bo::gp::{Domain, KernelParams};

fn bumps(x: &[f64]) -> f64 {
    (-((x[0] - 0.7).powi(2) + (x[1] - 0.3).powi(2)) / 0.02).exp()
        + 0.6 * (-((x[0] - 0.2).powi(2) + (x[1] - 0.8).powi(2)) / 0.05).exp()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dom = Domain::unit(2);
    let kernel = KernelParams::isotropic(0.3, 0.15, 2, 1e-6)?;
    for sampler in [Sampler::Gumbel, Sampler::Feature] {
        let mut cfg = BoConfig::new(AcquisitionSpec::Mes { samples: 5, sampler }, 25, kernel.clone()).with_seed(11);
        cfg.initial_design = 2;
        cfg.probes_per_dim = 300;
        cfg.n_features = 300;
        let trace = run_mes(bumps, &dom, &cfg)?;
        let last = trace.records.last().expect("at least one query");
        println!(
            "{}: best value {:.4} after {} queries (true max 1.0); last query ({:.3}, {:.3})",
            trace.method,
            last.best_y,
            trace.records.len(),
            last.x[0],
            last.x[1]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

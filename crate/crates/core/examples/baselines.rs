// Run every non-additive acquisition function on the same problem and
// seed and compare the best observed values.
//
// ```bash
// cargo run -p maxent-bo --example baselines
// ```

use maxent_bo::acquisition::{AcquisitionSpec, Sampler};
use maxent_bo::bench::Objective;
use maxent_bo::bo::{run_mes, BoConfig};
use maxent_bo::gp::KernelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let obj = Objective::michalewicz(2);
    let known = obj.known_max().map_or(f64::NAN, |k| k.value);
    let kernel = KernelParams::isotropic(0.3, 0.4, 2, 1e-6)?;
    let methods = [
        AcquisitionSpec::Mes { samples: 10, sampler: Sampler::Gumbel },
        AcquisitionSpec::Est,
        AcquisitionSpec::Ucb { beta: None },
        AcquisitionSpec::Pi { margin: Some(0.01) },
        AcquisitionSpec::Ei,
        AcquisitionSpec::Random,
    ];
    println!("{:<16} {:>10} {:>10}", "method", "best f", "regret");
    for m in methods {
        let mut cfg = BoConfig::new(m, 20, kernel.clone()).with_seed(5);
        cfg.probes_per_dim = 300;
        cfg.track_inference = false;
        let trace = run_mes(obj.as_fn(), obj.domain(), &cfg)?;
        let best = trace.records.last().map_or(f64::NAN, |r| r.best_y);
        println!("{:<16} {best:>10.4} {:>10.4}", trace.method, known - best);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

// A small methods × objectives × repetitions grid written to CSV.
//
// ```bash
// cargo run -p maxent-bo --example bench_experiment
// ```

use maxent_bo::acquisition::{AcquisitionSpec, Sampler};
use maxent_bo::bench::{run_experiment, ExperimentSpec, LoopSettings, ObjectiveKind, ObjectiveSpec};
use maxent_bo::gp::KernelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut settings = LoopSettings::new(10);
    settings.probes_per_dim = 200;
    settings.n_features = 200;
    let mut quadratic = ObjectiveSpec::new(ObjectiveKind::Quadratic { center: vec![0.2, 0.9] });
    quadratic.kernel = Some(KernelParams::isotropic(0.3, 0.4, 2, 1e-6)?);
    let synthetic =
        ObjectiveSpec::new(ObjectiveKind::SyntheticGp { dim: 2, scale: 1.0, bandwidth: 0.2, n_features: 1000 });
    let spec = ExperimentSpec {
        seed: 1,
        repetitions: 2,
        methods: vec![
            AcquisitionSpec::Mes { samples: 1, sampler: Sampler::Feature },
            AcquisitionSpec::Ei,
            AcquisitionSpec::Random,
        ],
        objectives: vec![quadratic, synthetic],
        settings,
        certify_probes: 10_000,
    };
    spec.validate()?;
    let result = run_experiment(&spec, None)?;
    let dir = std::env::temp_dir().join("maxent-bo-bench-example");
    let traces = result.write(&dir)?;
    println!("{} traces, regret.csv and summary.csv in {}", traces.len(), dir.display());
    for s in result.summary() {
        println!("{:<14} {:<14} median final regret {:.4}", s.method, s.objective, s.r_median);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

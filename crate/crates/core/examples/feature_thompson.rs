// Approximate an SE kernel with random Fourier features, draw posterior
// functions in weight space and maximize them.
//
// ```bash
// cargo run -p maxent-bo --example feature_thompson
// ```

use maxent_bo::gp::{Domain, KernelParams, ObservationSet};
use maxent_bo::maxvalue::{
    build_feature_map, maximize_feature_function, sample_max_features, FeaturePosterior, FeatureSearch,
};
use maxent_bo::rng::substream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dom = Domain::unit(2);
    let params = KernelParams::isotropic(1.0, 0.2, 2, 1e-3)?;
    let map = build_feature_map(&params, 500, &mut substream(7, 0), None)?;
    let (a, b) = ([0.2, 0.3], [0.25, 0.4]);
    let approx: f64 = map.features(&a).iter().zip(map.features(&b)).map(|(p, q)| p * q).sum();
    println!("k(a, b) from 500 features: {approx:.4}");

    let xs = vec![vec![0.2, 0.2], vec![0.8, 0.5], vec![0.5, 0.9]];
    let data = ObservationSet::new(xs, vec![0.1, 1.2, -0.4])?;
    let fp = FeaturePosterior::fit(std::slice::from_ref(&map), &data, params.noise_var)?;
    let mut rng = substream(7, 1);
    for i in 0..3 {
        let w = fp.sample_weights(&mut rng);
        let (x, v) = maximize_feature_function(&map, &w, &dom, FeatureSearch::default(), &mut rng);
        println!("draw {i}: max {v:.4} at ({:.3}, {:.3})", x[0], x[1]);
    }
    let ys = sample_max_features(&fp, &map, &dom, &mut rng, 10, FeatureSearch::default(), Some(1.2 + 1e-3))?;
    println!("ten floored y* samples: {:?}", ys.values);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

// Validate and run the sample configs in `configs/` through the same entry
// point the `maxent-bo` binary uses.
//
// ```bash
// cargo run -p maxent-bo --example cli_configs
// ```

use maxent_bo::cli::{main_with_args, EXIT_OK};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let configs = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    let out = std::env::temp_dir().join("maxent-bo-cli-example");
    let out = out.to_str().ok_or("temp dir is not UTF-8")?;
    for file in ["run_quadratic.toml", "bench_small.toml"] {
        let path = format!("{configs}/{file}");
        let status = main_with_args(["maxent-bo", "validate", "-c", &path]);
        if status != EXIT_OK {
            return Err(format!("{file} failed validation").into());
        }
    }
    let run = format!("{configs}/run_quadratic.toml");
    let status = main_with_args(["maxent-bo", "run", "-c", &run, "-o", out, "--seed", "3"]);
    println!("run exited with {status}; outputs in {out}");
    let trace = format!("{out}/trace_mes-gumbel-10_quadratic2_3.jsonl");
    main_with_args(["maxent-bo", "trace-dump", &trace]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

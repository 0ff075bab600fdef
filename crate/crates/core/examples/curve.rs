//! Posterior MSE as the number of published tracks grows (few replicates).
use locpriv::experiments::{run_curve, ScenarioConfig};
use locpriv::Result;

pub fn run_example() -> Result<()> {
    let mut cfg = ScenarioConfig::new(4);
    cfg.n_replicates = 8;
    cfg.sample_sizes = vec![5, 10, 20, 50];
    cfg.calibration_draws = 20_000;
    cfg.histogram_draws = 5_000;
    let out = run_curve(&cfg)?;
    let dir = std::env::temp_dir().join("locpriv-example-curve");
    out.write(&dir)?;
    for r in &out.summary {
        println!("{} n={:<3} median {:.4}  [{:.4}, {:.4}]", r.strategy, r.n, r.median, r.q05, r.q95);
    }
    println!("csv and svg in {}", dir.display());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

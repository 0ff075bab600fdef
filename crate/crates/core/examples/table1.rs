//! Two-balls against calibrated random-radius on the six comparison settings (few replicates).
use locpriv::experiments::{run_table1, ScenarioConfig, TABLE1_PUBLISHED};
use locpriv::Result;

pub fn run_example() -> Result<()> {
    let mut cfg = ScenarioConfig::new(1);
    cfg.n_replicates = 8;
    cfg.calibration_draws = 20_000;
    let out = run_table1(&cfg)?;
    let dir = std::env::temp_dir().join("locpriv-example-table1");
    out.write(&dir)?;
    println!("setting  mean SP (paper)   TB median (paper)   RR median (paper)");
    for (m, (sp, tb, rr)) in out.summary.iter().zip(TABLE1_PUBLISHED) {
        println!(
            "{:>7}  {:>7.2} ({sp:>5.2})   {:>9.3} ({tb:.2})   {:>9.3} ({rr:.2})",
            m.setting, m.sp_mean, m.tb_median, m.rr_median
        );
    }
    println!("csv and svg in {}", dir.display());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

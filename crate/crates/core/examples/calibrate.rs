//! Match a random-radius strategy to a two-balls one by the first two SP moments.
use locpriv::distributions::mean_var;
use locpriv::rng::seeded;
use locpriv::strategies::{calibrate_random_radius, sample_sps, StrategySpec};
use locpriv::Result;

pub fn run_example() -> Result<()> {
    let tb = StrategySpec::two_balls(1.0, 3.0, 4.0, 4.0)?;
    let mut rng = seeded(2);
    let cal = calibrate_random_radius(&tb, 100_000, &mut rng)?;
    let g = cal.matched_gamma;
    println!(
        "two-balls SP: mean {:.4} (analytic {}), variance {:.4}",
        cal.sp_mean,
        tb.mean_sp(),
        cal.sp_var
    );
    println!("matched random-radius: r^2 ~ Gamma({:.3}, {:.3})", g.alpha, g.beta);

    let (m, v) = mean_var(&sample_sps(&cal.random_radius(), 100_000, &mut rng)?);
    println!("random-radius SP check: mean {m:.4}, variance {v:.4}");
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

//! Attack both strategies on 50 exits and compare the sampler with grid quadrature.
use locpriv::inference::{attack, posterior_oracle, AttackConfig};
use locpriv::rng::Stream;
use locpriv::strategies::{calibrate_random_radius, generate_observations, ObservationMode, StrategySpec};
use locpriv::{Point, Result};

pub fn run_example() -> Result<()> {
    let home = Point::ORIGIN;
    let s = Stream::new(42);
    let tb = StrategySpec::two_balls(1.0, 3.0, 4.0, 4.0)?;
    let rr = calibrate_random_radius(&tb, 20_000, &mut s.child(0).rng())?.random_radius();

    for (k, spec) in [tb, rr].iter().enumerate() {
        let obs = generate_observations(&home, spec, 50, ObservationMode::Exact, &mut s.path(&[1, k as u64]).rng())?;
        let rep = attack(&obs, &home, &AttackConfig::default(), &mut s.path(&[2, k as u64]).rng())?;
        let oracle = posterior_oracle(&obs, 400)?;
        let samples = rep.samples.as_ref().expect("sampled posterior");
        println!(
            "{}: mean ({:+.3}, {:+.3}) [grid ({:+.3}, {:+.3})], MSE {:.4} [grid {:.4}], rhat {:.3}, ess {:.0}, {:.0} ms",
            spec.tag(),
            rep.posterior_mean.x,
            rep.posterior_mean.y,
            oracle.mean().x,
            oracle.mean().y,
            rep.posterior_mse,
            oracle.mse_about(&home),
            samples.max_rhat(),
            samples.min_ess(),
            1e3 * rep.wall_time
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

//! A privacy disk of fixed radius centered at home gives the home away from three exits.
use locpriv::geometry::circumcenter;
use locpriv::inference::{attack, AttackConfig};
use locpriv::rng::seeded;
use locpriv::strategies::{generate_observations, ObservationMode, StrategySpec};
use locpriv::{Point, Result};

pub fn run_example() -> Result<()> {
    let home = Point::new(523.7, -88.2);
    let spec = StrategySpec::fixed_radius(200.0)?;
    let mut rng = seeded(9);
    let obs = generate_observations(&home, &spec, 3, ObservationMode::Exact, &mut rng)?;
    let z = obs.positions();
    let c = circumcenter(z[0], z[1], z[2])?;
    println!("circumcenter ({:.9}, {:.9}), radius {:.9}", c.center.x, c.center.y, c.radius);
    let rep = attack(&obs, &home, &AttackConfig::default(), &mut rng)?;
    println!(
        "attack error {:.3e} (posterior MSE {:.3e})",
        rep.posterior_mean.dist(&home),
        rep.posterior_mse
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

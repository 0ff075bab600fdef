//! Euler-simulated Brownian tracks against the exact exit sampler, and first-exit cutting.
use locpriv::harmonic::sample_exit;
use locpriv::rng::seeded;
use locpriv::trajectory::{cut_first_exit, default_exit_dt, simulate_brownian, simulate_until_exit};
use locpriv::{Disk, Point, Result};

pub fn run_example() -> Result<()> {
    let region = Disk::new(Point::new(0.3, 0.0), 1.0)?;
    let home = Point::ORIGIN;
    let dt = default_exit_dt(&region, 1.0);
    let mut rng = seeded(11);

    let n = 400;
    let (mut sim, mut exact) = (0.0, 0.0);
    for _ in 0..n {
        let (track, _) = simulate_until_exit(home, &region, 1.0, dt, 10_000_000, &mut rng)?;
        sim += track.end().x;
        exact += sample_exit(&home, &region, &mut rng)?.pos.x;
    }
    println!(
        "mean exit x over {n} exits: simulated {:.3}, exact {:.3}",
        sim / n as f64,
        exact / n as f64
    );

    let track = simulate_brownian(home, 1.0, 0.01, 2000, &mut rng)?;
    let cut = cut_first_exit(&track, &region);
    match &cut.published {
        Some(p) => println!(
            "published {} of {} samples from t = {:.2}, SP = {:.3}",
            p.len(),
            track.len(),
            cut.t1.unwrap_or(0.0),
            cut.sp
        ),
        None => println!("track never left the region"),
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

//! Exit law of Brownian motion from a disk: density, exact sampler and arc probabilities.
use locpriv::harmonic::{arc_probability, expected_sp_given_center, harmonic_log_density, sample_exit};
use locpriv::rng::seeded;
use locpriv::{Disk, Point, Result};

pub fn run_example() -> Result<()> {
    let region = Disk::new(Point::ORIGIN, 1.0)?;
    let theta = Point::new(0.5, 0.0);

    // Exits pile up on the side of the circle nearest to the start.
    for deg in [0.0f64, 90.0, 180.0] {
        let z = region.boundary_point(deg.to_radians());
        println!("density at {deg:>5} deg: {:.4}", harmonic_log_density(&z, &theta, &region)?.exp());
    }

    let mut rng = seeded(3);
    let n = 100_000;
    let mut in_arc = 0usize;
    let mut sp = 0.0;
    let mut mean = Point::ORIGIN;
    for _ in 0..n {
        let z = sample_exit(&theta, &region, &mut rng)?.pos;
        if z.angle().abs() < std::f64::consts::FRAC_PI_4 {
            in_arc += 1;
        }
        sp += z.dist2(&theta);
        mean = mean + z;
    }
    let nf = n as f64;
    let p = arc_probability(&theta, &region, -std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4)?;
    println!("P(|angle| < 45 deg): exact {p:.4}, sampled {:.4}", in_arc as f64 / nf);
    println!(
        "E|z - theta|^2: exact {:.4}, sampled {:.4}",
        expected_sp_given_center(&theta, &region)?,
        sp / nf
    );
    println!("E z: ({:.4}, {:.4}), start ({}, {})", mean.x / nf, mean.y / nf, theta.x, theta.y);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

//! Cut one user's recorded tracks with a two-balls region and report the squared perturbation.
use locpriv::rng::seeded;
use locpriv::strategies::{obfuscate_tracks, StrategySpec};
use locpriv::trajectory::{simulate_brownian, Trajectory};
use locpriv::{Point, Result};

pub fn run_example() -> Result<()> {
    let home = Point::new(10.0, -4.0);
    let mut rng = seeded(5);
    let tracks: Vec<Trajectory> = (0..4)
        .map(|_| simulate_brownian(home, 1.0, 0.05, 600, &mut rng))
        .collect::<Result<_>>()?;

    let dir = std::env::temp_dir().join("locpriv-example-obfuscate");
    std::fs::create_dir_all(&dir).map_err(|e| locpriv::Error::Config(e.to_string()))?;

    let spec = StrategySpec::two_balls(1.0, 3.0, 4.0, 4.0)?;
    for (i, cut) in obfuscate_tracks(&tracks, &home, &spec, &mut rng).iter().enumerate() {
        match &cut.published {
            Some(p) => {
                let path = dir.join(format!("track{i}.csv"));
                p.write_csv(&path)?;
                let back = Trajectory::read_csv(&path)?;
                assert_eq!(&back, p);
                println!(
                    "track {i}: kept t in [{:.2}, {:.2}], SP {:.3} -> {}",
                    cut.t1.unwrap(),
                    cut.t2.unwrap(),
                    cut.sp,
                    path.display()
                );
            }
            None => println!("track {i}: stayed inside the region, nothing published"),
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

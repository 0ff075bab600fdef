//! The home-identification attack and its privacy score.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mcmc::{mixed_sample, rwm_sample_nd, PosteriorSamples, SamplerConfig};
use super::quadrature::{grid_quadrature, oracle_quadrature, GridProposal, OracleSummary, Window};
use super::targets::{recover_center, CenterEstimate, RandomRadiusTarget, TwoBallsTarget};
use crate::error::{Error, Result};
use crate::geometry::{circumcenter, fit_circle_center, Point};
use crate::rng::Stream;
use crate::strategies::{ExitObservationSet, StrategySpec};

pub const DEFAULT_QUADRATURE_NODES: usize = 400;

/// Grid size of the random-radius global proposal.
const GLOBAL_GRID_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackConfig {
    pub sampler: SamplerConfig,
    /// Grid size for quadrature used inside the attack (mixture weights).
    pub quadrature_nodes: usize,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            sampler: SamplerConfig::default(),
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
        }
    }
}

/// `mse = bias2 + variance`, with the variance normalized by the number of draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseDecomposition {
    pub mse: f64,
    pub bias2: f64,
    pub variance: f64,
}

pub fn mse_of_draws<'a>(draws: impl IntoIterator<Item = &'a Point>, theta_true: &Point) -> (Point, MseDecomposition) {
    let draws: Vec<&Point> = draws.into_iter().collect();
    let n = draws.len() as f64;
    let mean = draws.iter().fold(Point::ORIGIN, |a, p| a + **p) * (1.0 / n);
    let variance = draws.iter().map(|p| p.dist2(&mean)).sum::<f64>() / n;
    let bias2 = mean.dist2(theta_true);
    (
        mean,
        MseDecomposition {
            mse: bias2 + variance,
            bias2,
            variance,
        },
    )
}

/// Monte Carlo posterior MSE about the true home.
pub fn posterior_mse(samples: &PosteriorSamples, theta_true: &Point) -> MseDecomposition {
    mse_of_draws(samples.draws(), theta_true).1
}

/// How the posterior was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackMethod {
    /// Metropolis on the home location.
    Mcmc,
    /// Two candidate centers, mixed by quadrature mass.
    CenterPair,
    /// Unknown center angle sampled jointly with the home.
    CenterAngle,
    /// Closed form (fixed radius).
    Exact,
}

#[derive(Debug, Clone)]
pub struct AttackReport {
    pub posterior_mean: Point,
    pub posterior_mse: f64,
    pub mse_decomposition: MseDecomposition,
    /// `None` for the closed-form fixed-radius attack.
    pub samples: Option<PosteriorSamples>,
    pub method: AttackMethod,
    /// Seconds.
    pub wall_time: f64,
}

impl AttackReport {
    fn from_samples(samples: PosteriorSamples, theta_true: &Point, method: AttackMethod, start: Instant) -> Self {
        let (mean, dec) = mse_of_draws(samples.draws(), theta_true);
        AttackReport {
            posterior_mean: mean,
            posterior_mse: dec.mse,
            mse_decomposition: dec,
            samples: Some(samples),
            method,
            wall_time: start.elapsed().as_secs_f64(),
        }
    }
}

fn max_pairwise_distance(ps: &[Point]) -> f64 {
    let mut m: f64 = 0.0;
    for (i, a) in ps.iter().enumerate() {
        for b in &ps[i + 1..] {
            m = m.max(a.dist(b));
        }
    }
    m
}

/// Search window for the random-radius posterior: +-6 x the largest exit spread
/// around the exit centroid.
pub fn rr_window(target: &RandomRadiusTarget) -> Window {
    let n = target.exits.len() as f64;
    let centroid = target.exits.iter().fold(Point::ORIGIN, |a, p| a + *p) * (1.0 / n);
    let scale = max_pairwise_distance(&target.exits).max(target.gamma.mean().sqrt());
    Window {
        center: centroid,
        half_width: 6.0 * scale,
    }
}

/// Bounding square of the two-balls support `|theta - c| < r`.
pub fn tb_window(target: &TwoBallsTarget) -> Window {
    Window {
        center: target.center,
        half_width: target.r,
    }
}

fn best_grid_node<F: Fn(&Point) -> f64>(f: &F, w: Window, k: usize) -> Point {
    let h = 2.0 * w.half_width / k as f64;
    let mut best = (f64::NEG_INFINITY, w.center);
    for i in 0..k {
        for j in 0..k {
            let p = Point::new(
                w.center.x - w.half_width + (i as f64 + 0.5) * h,
                w.center.y - w.half_width + (j as f64 + 0.5) * h,
            );
            let v = f(&p);
            if v.is_finite() && v > best.0 {
                best = (v, p);
            }
        }
    }
    best.1
}

/// Grid-quadrature reference posterior for random-radius, or two-balls with n >= 3.
pub fn posterior_oracle(obs: &ExitObservationSet, nodes: usize) -> Result<OracleSummary> {
    match obs.strategy {
        StrategySpec::RandomRadius { .. } => {
            let t = RandomRadiusTarget::new(obs)?;
            Ok(oracle_quadrature(&|p: &Point| t.log_density(p), rr_window(&t), nodes))
        }
        StrategySpec::TwoBalls { big_r, .. } => {
            let CenterEstimate::Unique(c) = recover_center(&obs.positions(), big_r)? else {
                return Err(Error::InvalidParameter("quadrature oracle needs at least 3 two-balls exits".into()));
            };
            let t = TwoBallsTarget::new(&obs.strategy, c, obs.positions())?;
            Ok(oracle_quadrature(&|p: &Point| t.log_density(p), tb_window(&t), nodes))
        }
        StrategySpec::FixedRadius { .. } => Err(Error::InvalidParameter("fixed-radius posterior is closed form".into())),
    }
}

fn attack_tb_unique<R: Rng + ?Sized>(target: &TwoBallsTarget, cfg: &AttackConfig, rng: &mut R) -> Result<PosteriorSamples> {
    let c = target.center;
    let init = best_grid_node(&|p: &Point| target.log_density(p), tb_window(target), 41);
    let w0 = target.to_stretched(&c, &init);
    let set = rwm_sample_nd(
        |v: &[f64; 2]| target.log_density_stretched(&c, &Point::new(v[0], v[1])),
        [w0.x, w0.y],
        target.r / 4.0,
        &cfg.sampler,
        rng,
    )?;
    let chains = set
        .chains
        .iter()
        .map(|ch| ch.iter().map(|v| target.from_stretched(&c, &Point::new(v[0], v[1]))).collect())
        .collect();
    Ok(PosteriorSamples::from_chains(chains, set.acceptance_rate))
}

/// Closed-form posterior under the fixed-radius strategy.
fn attack_fixed_radius(obs: &ExitObservationSet, r_star: f64, theta_true: &Point, start: Instant) -> Result<AttackReport> {
    let zs = obs.positions();
    // Posterior support points, equally weighted.
    let atoms: Vec<Point> = match zs.len() {
        0 => return Err(Error::InvalidParameter("no observations".into())),
        1 => {
            // theta uniform on the circle of radius r* around z: mean z, spread r*^2.
            let dec = MseDecomposition {
                mse: zs[0].dist2(theta_true) + r_star * r_star,
                bias2: zs[0].dist2(theta_true),
                variance: r_star * r_star,
            };
            return Ok(AttackReport {
                posterior_mean: zs[0],
                posterior_mse: dec.mse,
                mse_decomposition: dec,
                samples: None,
                method: AttackMethod::Exact,
                wall_time: start.elapsed().as_secs_f64(),
            });
        }
        2 => match recover_center(&zs, r_star)? {
            CenterEstimate::Pair(a, b) => vec![a, b],
            CenterEstimate::Unique(c) => vec![c],
            CenterEstimate::Arc { base, .. } => {
                return attack_fixed_radius(&obs.prefix(1), r_star, theta_true, start).map(|mut r| {
                    r.posterior_mean = base;
                    r
                })
            }
        },
        _ => {
            let mut c = match circumcenter(zs[0], zs[1], zs[2]) {
                Ok(d) => d.center,
                Err(_) => fit_circle_center(&zs, r_star)?.0,
            };
            if zs.len() > 3 {
                c = fit_circle_center(&zs, r_star)?.0;
            }
            vec![c]
        }
    };
    let (mean, dec) = mse_of_draws(&atoms, theta_true);
    Ok(AttackReport {
        posterior_mean: mean,
        posterior_mse: dec.mse,
        mse_decomposition: dec,
        samples: None,
        method: AttackMethod::Exact,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Bayesian home-identification attack under a flat prior.
///
/// * random-radius: Metropolis on the exact exit likelihood, started at the exit centroid;
/// * two-balls, n >= 3: the shared center is recovered from the exits, then Metropolis on
///   the home given that center;
/// * two-balls, n = 2: both candidate centers, mixed by their posterior mass;
/// * two-balls, n = 1: the center angle around the single exit is sampled jointly;
/// * fixed-radius: closed form (exact for n >= 3).
pub fn attack<R: Rng + ?Sized>(obs: &ExitObservationSet, theta_true: &Point, cfg: &AttackConfig, rng: &mut R) -> Result<AttackReport> {
    let start = Instant::now();
    if obs.is_empty() {
        return Err(Error::InvalidParameter("no observations".into()));
    }
    match obs.strategy {
        StrategySpec::FixedRadius { r_star } => attack_fixed_radius(obs, r_star, theta_true, start),
        StrategySpec::RandomRadius { .. } => {
            let t = RandomRadiusTarget::new(obs)?;
            let n = t.exits.len() as f64;
            let mut init = obs.centroid();
            if t.exits.len() == 1 {
                init = init + Point::new(t.gamma.mean().sqrt(), 0.0);
            }
            let scale = (t.gamma.mean() / n).sqrt();
            // Few exits on one side of the home leave a crescent or two modes; global
            // moves from a grid approximation let the chains cross between them.
            let global = GridProposal::new(&|p: &Point| t.log_density(p), rr_window(&t), GLOBAL_GRID_NODES);
            let samples = mixed_sample(|p: &Point| t.log_density(p), init, scale, &global, &cfg.sampler, rng)?;
            Ok(AttackReport::from_samples(samples, theta_true, AttackMethod::Mcmc, start))
        }
        StrategySpec::TwoBalls { big_r, beta, .. } => {
            let zs = obs.positions();
            match recover_center(&zs, big_r)? {
                CenterEstimate::Unique(c) => {
                    let t = TwoBallsTarget::new(&obs.strategy, c, zs)?;
                    let samples = attack_tb_unique(&t, cfg, rng)?;
                    Ok(AttackReport::from_samples(samples, theta_true, AttackMethod::Mcmc, start))
                }
                CenterEstimate::Pair(c1, c2) => {
                    let t1 = TwoBallsTarget::new(&obs.strategy, c1, zs.clone())?;
                    let t2 = TwoBallsTarget::new(&obs.strategy, c2, zs)?;
                    let m1 = grid_quadrature(&|p: &Point| t1.log_density(p), tb_window(&t1), cfg.quadrature_nodes).log_mass;
                    let m2 = grid_quadrature(&|p: &Point| t2.log_density(p), tb_window(&t2), cfg.quadrature_nodes).log_mass;
                    let w1 = 1.0 / (1.0 + (m2 - m1).exp());
                    let s1 = attack_tb_unique(&t1, cfg, rng)?;
                    let s2 = attack_tb_unique(&t2, cfg, rng)?;
                    let chains = s1
                        .chains
                        .iter()
                        .zip(&s2.chains)
                        .map(|(a, b)| {
                            a.iter()
                                .zip(b)
                                .map(|(p, q)| if rng.random::<f64>() < w1 { *p } else { *q })
                                .collect()
                        })
                        .collect();
                    let acc = w1 * s1.acceptance_rate + (1.0 - w1) * s2.acceptance_rate;
                    let samples = PosteriorSamples::from_chains(chains, acc);
                    Ok(AttackReport::from_samples(samples, theta_true, AttackMethod::CenterPair, start))
                }
                CenterEstimate::Arc { base, radius } => {
                    let t = TwoBallsTarget::new(&obs.strategy, base, zs)?;
                    // Stretched offset of theta from c, and psi locating c on the arc.
                    let center_at = |psi: f64| base + Point::polar(radius, psi);
                    let lt = |v: &[f64; 3]| t.log_density_stretched(&center_at(v[2]), &Point::new(v[0], v[1]));
                    // Start with theta at the prior-mean distance from c, on the side facing the exit.
                    let u0 = beta.mean();
                    let w0 = Point::polar(t.r * u0.sqrt().atanh(), (base - center_at(0.0)).angle());
                    let set = rwm_sample_nd(lt, [w0.x, w0.y, 0.0], t.r / 4.0, &cfg.sampler, rng)?;
                    let chains = set
                        .chains
                        .iter()
                        .map(|ch| {
                            ch.iter()
                                .map(|v| t.from_stretched(&center_at(v[2]), &Point::new(v[0], v[1])))
                                .collect()
                        })
                        .collect();
                    let samples = PosteriorSamples::from_chains(chains, set.acceptance_rate);
                    Ok(AttackReport::from_samples(samples, theta_true, AttackMethod::CenterAngle, start))
                }
            }
        }
    }
}

/// Attack with an RNG derived from a stream (convenience for replicated experiments).
pub fn attack_with_stream(obs: &ExitObservationSet, theta_true: &Point, cfg: &AttackConfig, stream: Stream) -> Result<AttackReport> {
    attack(obs, theta_true, cfg, &mut stream.rng())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disk;
    use crate::harmonic::ExitPoint;
    use crate::rng::seeded;
    use crate::strategies::{generate_observations, ObservationMode};

    #[test]
    fn mse_trivial_cases() {
        let th = Point::new(1.0, 2.0);
        let (_, d) = mse_of_draws(&[th, th, th], &th);
        assert_eq!((d.mse, d.bias2, d.variance), (0.0, 0.0, 0.0));
        let (_, d) = mse_of_draws(&[Point::new(2.0, 2.0)], &th);
        assert_eq!((d.mse, d.bias2, d.variance), (1.0, 1.0, 0.0));
    }

    #[test]
    fn mse_identity_matches_direct_mean() {
        let mut rng = seeded(21);
        let pts: Vec<Point> = (0..5000)
            .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>() * 3.0))
            .collect();
        let th = Point::new(0.2, -0.4);
        let (_, d) = mse_of_draws(&pts, &th);
        let direct = pts.iter().map(|p| p.dist2(&th)).sum::<f64>() / pts.len() as f64;
        assert!((d.mse - direct).abs() <= 1e-12 * direct);
    }

    fn fr_obs(theta: Point, r_star: f64, angles: &[f64]) -> ExitObservationSet {
        let region = Disk::new(theta, r_star).unwrap();
        let exits: Vec<ExitPoint> = angles
            .iter()
            .map(|&a| ExitPoint::new(region.boundary_point(a), region).unwrap())
            .collect();
        ExitObservationSet {
            strategy: StrategySpec::fixed_radius(r_star).unwrap(),
            sps: vec![r_star * r_star; exits.len()],
            exits,
        }
    }

    #[test]
    fn fixed_radius_three_exits_is_exact() {
        let th = Point::new(12.0, -3.0);
        let rep = attack(&fr_obs(th, 2.5, &[0.3, 2.0, 4.4]), &th, &AttackConfig::default(), &mut seeded(0)).unwrap();
        assert!(rep.posterior_mse <= 1e-12, "{}", rep.posterior_mse);
        assert_eq!(rep.method, AttackMethod::Exact);
    }

    #[test]
    fn fixed_radius_few_exits() {
        let th = Point::ORIGIN;
        let rep = attack(&fr_obs(th, 2.0, &[0.0]), &th, &AttackConfig::default(), &mut seeded(0)).unwrap();
        assert!((rep.posterior_mse - 8.0).abs() < 1e-12);
        let rep = attack(
            &fr_obs(th, 1.0, &[0.0, std::f64::consts::FRAC_PI_2]),
            &th,
            &AttackConfig::default(),
            &mut seeded(0),
        )
        .unwrap();
        // candidates are theta itself and (1, 1)
        assert!((rep.posterior_mse - 1.0).abs() < 1e-12, "{}", rep.posterior_mse);
    }

    #[test]
    fn two_balls_small_n_paths() {
        let spec = StrategySpec::two_balls(1.0, 3.0, 4.0, 4.0).unwrap();
        let th = Point::ORIGIN;
        let cfg = AttackConfig::default();
        for (n, method) in [
            (1, AttackMethod::CenterAngle),
            (2, AttackMethod::CenterPair),
            (3, AttackMethod::Mcmc),
        ] {
            let obs = generate_observations(&th, &spec, n, ObservationMode::Exact, &mut seeded(n as u64)).unwrap();
            let rep = attack(&obs, &th, &cfg, &mut seeded(100 + n as u64)).unwrap();
            assert_eq!(rep.method, method);
            assert!(rep.posterior_mse.is_finite() && rep.posterior_mse > 0.0);
            let d = rep.mse_decomposition;
            assert!((d.mse - d.bias2 - d.variance).abs() <= 1e-9 * d.mse);
        }
    }

    #[test]
    fn wrong_strategy_target_is_rejected() {
        let spec = StrategySpec::two_balls(1.0, 3.0, 4.0, 4.0).unwrap();
        let obs = generate_observations(&Point::ORIGIN, &spec, 5, ObservationMode::Exact, &mut seeded(1)).unwrap();
        assert!(RandomRadiusTarget::new(&obs).is_err());
    }
}

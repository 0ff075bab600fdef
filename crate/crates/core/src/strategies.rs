//! Privacy-region strategies: region sampling, observation generation for attacks,
//! track obfuscation and moment matching of random-radius to two-balls.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{mean_var, sample_angle, BetaParams, GammaParams};
use crate::error::{Error, Result};
use crate::geometry::{Disk, Point};
use crate::harmonic::{sample_exit, ExitPoint};
use crate::trajectory::{cut_privacy_region, default_exit_dt, simulate_until_exit, CutResult, Trajectory};

/// How privacy regions are drawn around the home location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSpec")]
pub enum StrategySpec {
    /// Ball of fixed radius centered at the home.
    FixedRadius { r_star: f64 },
    /// Ball centered at the home with squared radius ~ Gamma(alpha, beta).
    RandomRadius { gamma: GammaParams },
    /// One shared ball `B(c, big_r)` with `c` drawn inside `B(theta, r)`, `rho^2 ~ Beta`.
    TwoBalls {
        r: f64,
        #[serde(rename = "R")]
        big_r: f64,
        beta: BetaParams,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawSpec {
    FixedRadius {
        r_star: f64,
    },
    RandomRadius {
        gamma: GammaParams,
    },
    TwoBalls {
        r: f64,
        #[serde(rename = "R")]
        big_r: f64,
        beta: BetaParams,
    },
}

impl TryFrom<RawSpec> for StrategySpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw {
            RawSpec::FixedRadius { r_star } => StrategySpec::fixed_radius(r_star),
            RawSpec::RandomRadius { gamma } => Ok(StrategySpec::RandomRadius { gamma }),
            RawSpec::TwoBalls { r, big_r, beta } => StrategySpec::two_balls(r, big_r, beta.alpha, beta.beta),
        }
    }
}

impl StrategySpec {
    pub fn fixed_radius(r_star: f64) -> Result<Self> {
        if !(r_star > 0.0 && r_star.is_finite()) {
            return Err(Error::InvalidParameter(format!("r_star must be positive, got {r_star}")));
        }
        Ok(StrategySpec::FixedRadius { r_star })
    }

    pub fn random_radius(alpha: f64, beta: f64) -> Result<Self> {
        Ok(StrategySpec::RandomRadius {
            gamma: GammaParams::new(alpha, beta)?,
        })
    }

    pub fn two_balls(r: f64, big_r: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(r > 0.0 && big_r > r && big_r.is_finite()) {
            return Err(Error::InvalidParameter(format!("two-balls needs 0 < r < R, got r={r}, R={big_r}")));
        }
        Ok(StrategySpec::TwoBalls {
            r,
            big_r,
            beta: BetaParams::new(alpha, beta)?,
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            StrategySpec::FixedRadius { .. } => "FR",
            StrategySpec::RandomRadius { .. } => "RR",
            StrategySpec::TwoBalls { .. } => "TB",
        }
    }

    /// Analytic mean squared perturbation of one exit.
    pub fn mean_sp(&self) -> f64 {
        match *self {
            StrategySpec::FixedRadius { r_star } => r_star * r_star,
            StrategySpec::RandomRadius { gamma } => gamma.mean(),
            StrategySpec::TwoBalls { r, big_r, beta } => big_r * big_r - r * r * beta.mean(),
        }
    }
}

/// Draw a privacy region for a user living at `theta`.
pub fn sample_region<R: Rng + ?Sized>(theta: &Point, spec: &StrategySpec, rng: &mut R) -> Disk {
    match *spec {
        StrategySpec::FixedRadius { r_star } => Disk {
            center: *theta,
            radius: r_star,
        },
        StrategySpec::RandomRadius { gamma } => {
            // Resample the (probability-zero) event of an underflowed radius.
            let radius = loop {
                let r = gamma.sample(rng).sqrt();
                if r > 0.0 {
                    break r;
                }
            };
            Disk { center: *theta, radius }
        }
        StrategySpec::TwoBalls { r, big_r, beta } => {
            let rho = beta.sample(rng).sqrt();
            let tau = sample_angle(rng);
            let center = *theta + Point::polar(r * rho, tau);
            debug_assert!(center.dist(theta) < big_r);
            Disk { center, radius: big_r }
        }
    }
}

/// How exit points are produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ObservationMode {
    /// Direct draws from the harmonic measure.
    Exact,
    /// Euler paths; `dt = None` uses [`default_exit_dt`] per region.
    Simulated { sigma2: f64, dt: Option<f64> },
}

/// The attacker's data: exit points with their regions and the known strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitObservationSet {
    pub strategy: StrategySpec,
    pub exits: Vec<ExitPoint>,
    /// Squared distance of each exit from the true home (not visible to the attacker).
    pub sps: Vec<f64>,
}

impl ExitObservationSet {
    pub fn len(&self) -> usize {
        self.exits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exits.is_empty()
    }

    pub fn positions(&self) -> Vec<Point> {
        self.exits.iter().map(|e| e.pos).collect()
    }

    pub fn centroid(&self) -> Point {
        let n = self.exits.len() as f64;
        self.exits.iter().fold(Point::ORIGIN, |a, e| a + e.pos) * (1.0 / n)
    }

    /// Truncate to the first `n` exits (nested sample sizes from one draw).
    pub fn prefix(&self, n: usize) -> ExitObservationSet {
        ExitObservationSet {
            strategy: self.strategy,
            exits: self.exits[..n].to_vec(),
            sps: self.sps[..n].to_vec(),
        }
    }

    pub fn translate(&self, v: Point) -> ExitObservationSet {
        ExitObservationSet {
            strategy: self.strategy,
            exits: self.exits.iter().map(|e| e.translate(v)).collect(),
            sps: self.sps.clone(),
        }
    }
}

const MAX_EXIT_STEPS: usize = 100_000_000;

fn draw_exit<R: Rng + ?Sized>(theta: &Point, region: &Disk, mode: ObservationMode, rng: &mut R) -> Result<ExitPoint> {
    match mode {
        ObservationMode::Exact => sample_exit(theta, region, rng),
        ObservationMode::Simulated { sigma2, dt } => {
            let dt = dt.unwrap_or_else(|| default_exit_dt(region, sigma2));
            let (tr, _) = simulate_until_exit(*theta, region, sigma2, dt, MAX_EXIT_STEPS, rng)?;
            // The first outside sample, projected radially onto the circle.
            let v = tr.end() - region.center;
            let pos = region.center + v * (region.radius / v.norm());
            ExitPoint::new(pos, *region)
        }
    }
}

/// Generate `n` exit observations for a user at `theta`.
///
/// Two-balls draws one shared region; the other strategies draw one region per exit.
pub fn generate_observations<R: Rng + ?Sized>(
    theta: &Point,
    spec: &StrategySpec,
    n: usize,
    mode: ObservationMode,
    rng: &mut R,
) -> Result<ExitObservationSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one observation".into()));
    }
    let shared = match spec {
        StrategySpec::TwoBalls { .. } => Some(sample_region(theta, spec, rng)),
        _ => None,
    };
    let mut exits = Vec::with_capacity(n);
    for _ in 0..n {
        let region = match shared {
            Some(d) => d,
            None => sample_region(theta, spec, rng),
        };
        exits.push(draw_exit(theta, &region, mode, rng)?);
    }
    let sps = exits.iter().map(|e| e.pos.dist2(theta)).collect();
    Ok(ExitObservationSet {
        strategy: *spec,
        exits,
        sps,
    })
}

/// Marginal squared perturbations: each draw uses a fresh region and one exact exit.
pub fn sample_sps<R: Rng + ?Sized>(spec: &StrategySpec, n_draws: usize, rng: &mut R) -> Result<Vec<f64>> {
    let theta = Point::ORIGIN;
    (0..n_draws)
        .map(|_| {
            let region = sample_region(&theta, spec, rng);
            Ok(sample_exit(&theta, &region, rng)?.pos.norm2())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub matched_gamma: GammaParams,
    pub sp_mean: f64,
    pub sp_var: f64,
    pub n_draws: usize,
}

impl CalibrationResult {
    pub fn from_moments(sp_mean: f64, sp_var: f64, n_draws: usize) -> Result<Self> {
        Ok(CalibrationResult {
            matched_gamma: GammaParams::from_moments(sp_mean, sp_var)?,
            sp_mean,
            sp_var,
            n_draws,
        })
    }

    pub fn random_radius(&self) -> StrategySpec {
        StrategySpec::RandomRadius { gamma: self.matched_gamma }
    }
}

pub const DEFAULT_CALIBRATION_DRAWS: usize = 100_000;

/// Random-radius parameters whose Gamma SP law has the two-balls sample SP mean and variance.
pub fn calibrate_random_radius<R: Rng + ?Sized>(spec_tb: &StrategySpec, n_draws: usize, rng: &mut R) -> Result<CalibrationResult> {
    if !matches!(spec_tb, StrategySpec::TwoBalls { .. }) {
        return Err(Error::InvalidParameter("calibration source must be a two-balls strategy".into()));
    }
    if n_draws < 1000 {
        return Err(Error::InvalidParameter(format!("calibration needs n_draws >= 1000, got {n_draws}")));
    }
    let sps = sample_sps(spec_tb, n_draws, rng)?;
    let (m, v) = mean_var(&sps);
    CalibrationResult::from_moments(m, v, n_draws)
}

/// Apply a strategy to a recorded track: draw a region, cut first exit to last entrance.
pub fn obfuscate_track<R: Rng + ?Sized>(traj: &Trajectory, theta: &Point, spec: &StrategySpec, rng: &mut R) -> CutResult {
    let region = sample_region(theta, spec, rng);
    cut_privacy_region(traj, &region)
}

/// Obfuscate all tracks of one user. Two-balls uses a single region for every track;
/// the other strategies draw a region per track.
pub fn obfuscate_tracks<R: Rng + ?Sized>(tracks: &[Trajectory], theta: &Point, spec: &StrategySpec, rng: &mut R) -> Vec<CutResult> {
    let shared = match spec {
        StrategySpec::TwoBalls { .. } => Some(sample_region(theta, spec, rng)),
        _ => None,
    };
    tracks
        .iter()
        .map(|t| {
            let region = shared.unwrap_or_else(|| sample_region(theta, spec, rng));
            cut_privacy_region(t, &region)
        })
        .collect()
}

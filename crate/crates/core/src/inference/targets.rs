//! Log posteriors of the home location under a flat prior.

use std::f64::consts::PI;

use crate::distributions::{BetaParams, GammaParams};
use crate::error::{Error, Result};
use crate::geometry::{fit_circle_center, Disk, Point};
use crate::strategies::{ExitObservationSet, StrategySpec};

/// Floor on squared distances in the random-radius likelihood, so `theta = z_i`
/// stays finite when the Gamma shape is below one.
pub const SQ_DIST_FLOOR: f64 = 1e-12;

/// Relative rms residual above which exits are not on one circle.
pub const CENTER_FIT_TOL: f64 = 1e-6;

/// Random-radius posterior: `sum_i ln f_Gamma(|z_i - theta|^2) - n ln(pi)`.
///
/// The exit of a ball with Gamma-distributed squared radius centered at `theta` has
/// planar density `f_Gamma(|z - theta|^2) / pi`.
#[derive(Debug, Clone)]
pub struct RandomRadiusTarget {
    pub gamma: GammaParams,
    pub exits: Vec<Point>,
    log_norm: f64,
}

impl RandomRadiusTarget {
    pub fn new(obs: &ExitObservationSet) -> Result<Self> {
        let StrategySpec::RandomRadius { gamma } = obs.strategy else {
            return Err(Error::InvalidParameter("observations are not from a random-radius strategy".into()));
        };
        if obs.is_empty() {
            return Err(Error::InvalidParameter("no observations".into()));
        }
        Ok(Self::from_exits(gamma, obs.positions()))
    }

    pub fn from_exits(gamma: GammaParams, exits: Vec<Point>) -> Self {
        let n = exits.len() as f64;
        RandomRadiusTarget {
            gamma,
            exits,
            log_norm: n * (gamma.alpha * gamma.beta.ln() - statrs::function::gamma::ln_gamma(gamma.alpha) - PI.ln()),
        }
    }

    pub fn log_density(&self, theta: &Point) -> f64 {
        let g = &self.gamma;
        let body: f64 = self
            .exits
            .iter()
            .map(|z| {
                let s = z.dist2(theta).max(SQ_DIST_FLOOR);
                (g.alpha - 1.0) * s.ln() - g.beta * s
            })
            .sum();
        self.log_norm + body
    }
}

pub fn rr_log_posterior(theta: &Point, obs: &ExitObservationSet) -> Result<f64> {
    Ok(RandomRadiusTarget::new(obs)?.log_density(theta))
}

/// Two-balls posterior given the shared center `c`:
/// `ln f_Beta(|theta - c|^2 / r^2) - ln(pi r^2) + sum_i ln h(z_i; theta, B(c, R))`,
/// and `-inf` outside `|theta - c| < r`.
///
/// The data enter only through `c` and the exit positions.
#[derive(Debug, Clone)]
pub struct TwoBallsTarget {
    pub r: f64,
    pub big_r: f64,
    pub beta: BetaParams,
    pub center: Point,
    pub exits: Vec<Point>,
    /// `-ln B(alpha, beta) - ln(pi r^2)`.
    prior_log_norm: f64,
}

impl TwoBallsTarget {
    pub fn new(spec: &StrategySpec, center: Point, exits: Vec<Point>) -> Result<Self> {
        let StrategySpec::TwoBalls { r, big_r, beta } = *spec else {
            return Err(Error::InvalidParameter("observations are not from a two-balls strategy".into()));
        };
        Ok(TwoBallsTarget {
            r,
            big_r,
            beta,
            center,
            exits,
            prior_log_norm: -beta.ln_norm() - (PI * r * r).ln(),
        })
    }

    pub fn support(&self) -> Disk {
        Disk {
            center: self.center,
            radius: self.r,
        }
    }

    /// Log density of the region center given the home: `f_Beta(u) / (pi r^2)`, `u = |theta - c|^2 / r^2`.
    pub fn log_prior(&self, theta: &Point) -> f64 {
        let u = theta.dist2(&self.center) / (self.r * self.r);
        if !(u < 1.0) {
            return f64::NEG_INFINITY;
        }
        self.beta.ln_kernel(u) + self.prior_log_norm
    }

    pub fn log_density(&self, theta: &Point) -> f64 {
        self.log_density_with_center(theta, &self.center)
    }

    /// Same target with the center replaced; used when the center is itself sampled.
    pub fn log_density_with_center(&self, theta: &Point, center: &Point) -> f64 {
        let u = theta.dist2(center) / (self.r * self.r);
        if !(u < 1.0) {
            return f64::NEG_INFINITY;
        }
        let prior = self.beta.ln_kernel(u) + self.prior_log_norm;
        if prior == f64::NEG_INFINITY {
            return prior;
        }
        // sum_i ln h(z_i) with the z-independent numerator factored out.
        let n = self.exits.len() as f64;
        let r2 = self.big_r * self.big_r;
        let head = n * ((r2 - theta.dist2(center)) / (2.0 * PI * self.big_r)).ln();
        prior + head - self.exits.iter().map(|z| z.dist2(theta).ln()).sum::<f64>()
    }
}

/// `tanh(x) / x`, continuous at zero.
fn tanh_ratio(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 - x * x / 3.0
    } else {
        x.tanh() / x
    }
}

/// `ln cosh(x)` for `x >= 0` without overflow.
fn ln_cosh(x: f64) -> f64 {
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

impl TwoBallsTarget {
    /// Home location from the radial stretch `w` of the support `|theta - c| < r` onto the
    /// plane: `|theta - c| = r tanh(|w| / r)`, same direction.
    pub fn from_stretched(&self, center: &Point, w: &Point) -> Point {
        *center + *w * tanh_ratio(w.norm2().sqrt() / self.r)
    }

    /// Inverse of [`Self::from_stretched`] for a point inside the support.
    pub fn to_stretched(&self, center: &Point, theta: &Point) -> Point {
        let y = *theta - *center;
        let q = y.norm() / self.r;
        if q == 0.0 {
            return Point::ORIGIN;
        }
        y * (q.atanh() / q)
    }

    /// Log density in stretched coordinates, with `dA_theta = (tanh(x) / x) sech(x)^2 dA_w`
    /// at `x = |w| / r`.
    pub fn log_density_stretched(&self, center: &Point, w: &Point) -> f64 {
        let x = w.norm2().sqrt() / self.r;
        let log_jac = tanh_ratio(x).ln() - 2.0 * ln_cosh(x);
        self.log_density_with_center(&self.from_stretched(center, w), center) + log_jac
    }
}

pub fn tb_log_posterior(theta: &Point, center: &Point, obs: &ExitObservationSet) -> Result<f64> {
    Ok(TwoBallsTarget::new(&obs.strategy, *center, obs.positions())?.log_density(theta))
}

/// What the exits reveal about a shared circle of known radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterEstimate {
    Unique(Point),
    /// Two candidate centers (two exits).
    Pair(Point, Point),
    /// The center lies somewhere on the circle of radius `radius` around `base`.
    Arc {
        base: Point,
        radius: f64,
    },
}

pub fn recover_center(exits: &[Point], big_r: f64) -> Result<CenterEstimate> {
    match exits.len() {
        0 => Err(Error::InvalidParameter("no exits".into())),
        1 => Ok(CenterEstimate::Arc {
            base: exits[0],
            radius: big_r,
        }),
        2 => {
            let (z1, z2) = (exits[0], exits[1]);
            let d = z1.dist(&z2);
            if d > 2.0 * big_r {
                return Err(Error::NoIntersection {
                    distance: d,
                    radius: big_r,
                });
            }
            if d == 0.0 {
                return Ok(CenterEstimate::Arc { base: z1, radius: big_r });
            }
            let mid = (z1 + z2) * 0.5;
            let u = (z2 - z1) * (1.0 / d);
            let perp = Point::new(-u.y, u.x);
            let k = (big_r * big_r - d * d / 4.0).max(0.0).sqrt();
            Ok(CenterEstimate::Pair(mid + perp * k, mid - perp * k))
        }
        _ => {
            let (c, rms) = fit_circle_center(exits, big_r)?;
            if !(rms < CENTER_FIT_TOL * big_r) {
                return Err(Error::InconsistentExits { rms, radius: big_r });
            }
            Ok(CenterEstimate::Unique(c))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rr_single_observation_values() {
        let t = RandomRadiusTarget::from_exits(GammaParams::new(1.0, 1.0).unwrap(), vec![Point::new(2.0, 3.0)]);
        assert!((t.log_density(&Point::new(2.0, 3.0)) + PI.ln()).abs() < 1e-12);
        assert!((t.log_density(&Point::new(3.0, 3.0)) - (-1.0 - PI.ln())).abs() < 1e-12);
        assert!((t.log_density(&Point::new(3.0, 3.0)) + 2.1447).abs() < 1e-4);
    }

    #[test]
    fn rr_floor_keeps_small_shape_finite() {
        let t = RandomRadiusTarget::from_exits(GammaParams::new(0.5, 1.0).unwrap(), vec![Point::ORIGIN]);
        assert!(t.log_density(&Point::ORIGIN).is_finite());
    }

    #[test]
    fn tb_support_and_uniform_prior() {
        let spec = StrategySpec::two_balls(1.0, 3.0, 1.0, 1.0).unwrap();
        let t = TwoBallsTarget::new(&spec, Point::ORIGIN, vec![]).unwrap();
        for p in [Point::new(0.1, 0.2), Point::new(-0.7, 0.0), Point::new(0.0, 0.99)] {
            assert!((t.log_prior(&p) + PI.ln()).abs() < 1e-12);
        }
        assert_eq!(t.log_density(&Point::new(1.0, 0.0)), f64::NEG_INFINITY);
        assert_eq!(t.log_density(&Point::new(0.8, 0.8)), f64::NEG_INFINITY);
    }

    #[test]
    fn tb_density_is_prior_plus_exit_densities() {
        use crate::harmonic::harmonic_log_density;
        let spec = StrategySpec::two_balls(1.0, 3.0, 4.0, 2.0).unwrap();
        let c = Point::new(0.5, -0.2);
        let region = Disk::new(c, 3.0).unwrap();
        let exits: Vec<Point> = [0.2, 1.9, 4.0, 5.5].iter().map(|&a| region.boundary_point(a)).collect();
        let t = TwoBallsTarget::new(&spec, c, exits.clone()).unwrap();
        let th = Point::new(0.1, 0.3);
        let u = th.dist2(&c);
        let direct = BetaParams::new(4.0, 2.0).unwrap().ln_pdf(u) - PI.ln()
            + exits.iter().map(|z| harmonic_log_density(z, &th, &region).unwrap()).sum::<f64>();
        assert!((t.log_density(&th) - direct).abs() < 1e-12);
    }

    #[test]
    fn stretched_round_trip_and_jacobian() {
        let spec = StrategySpec::two_balls(1.5, 4.0, 3.0, 2.0).unwrap();
        let c = Point::new(2.0, -1.0);
        let t = TwoBallsTarget::new(&spec, c, vec![]).unwrap();
        let th = Point::new(2.4, -0.3);
        assert!(t.from_stretched(&c, &t.to_stretched(&c, &th)).dist(&th) < 1e-12);
        // With no exits the prior is a probability density in theta, so the transformed
        // density must integrate to one over the plane. Polar grid with log-spaced radius.
        let (m, k) = (4000, 64);
        let (lo, hi) = (-20.0f64, 12.0f64);
        let hl = (hi - lo) / m as f64;
        let ht = 2.0 * PI / k as f64;
        let mut total = 0.0;
        for i in 0..m {
            let s = (lo + (i as f64 + 0.5) * hl).exp();
            for j in 0..k {
                let w = Point::polar(s, j as f64 * ht);
                total += t.log_density_stretched(&c, &(w)).exp() * s * s * hl * ht;
            }
        }
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn recover_examples() {
        let d = Disk::new(Point::new(3.0, 4.0), 5.0).unwrap();
        let zs = [d.boundary_point(0.1), d.boundary_point(2.0), d.boundary_point(4.0)];
        match recover_center(&zs, 5.0).unwrap() {
            CenterEstimate::Unique(c) => assert!(c.dist(&d.center) < 1e-12),
            e => panic!("{e:?}"),
        }
        let pair = recover_center(&[Point::new(0.0, 0.0), Point::new(2.0, 0.0)], 2f64.sqrt()).unwrap();
        let CenterEstimate::Pair(a, b) = pair else { panic!() };
        assert!(a.dist(&Point::new(1.0, 1.0)) < 1e-12 && b.dist(&Point::new(1.0, -1.0)) < 1e-12);
        assert!(matches!(
            recover_center(&[Point::new(1.0, 1.0)], 3.0).unwrap(),
            CenterEstimate::Arc { radius, .. } if radius == 3.0
        ));
    }

    #[test]
    fn recover_errors() {
        assert!(matches!(
            recover_center(&[Point::ORIGIN, Point::new(7.0, 0.0)], 3.0),
            Err(Error::NoIntersection { .. })
        ));
        let d = Disk::new(Point::ORIGIN, 3.0).unwrap();
        let mut zs: Vec<Point> = (0..5).map(|k| d.boundary_point(k as f64)).collect();
        zs[2] = zs[2] * 1.01;
        assert!(matches!(recover_center(&zs, 3.0), Err(Error::InconsistentExits { .. })));
    }
}

//! Exit law of planar Brownian motion from a disk (harmonic measure).
//!
//! Densities are with respect to arc length on the boundary circle:
//! `h(z) = (R^2 - |theta - c|^2) / (2 pi R |z - theta|^2)`.

use std::f64::consts::PI;

use rand::Rng;

use crate::distributions::sample_angle;
use crate::error::{Error, Result};
use crate::geometry::{Disk, Point};

/// Relative tolerance for "on the boundary".
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Starting points farther than `(1 - INTERIOR_MARGIN) R` from the center are rejected.
pub const INTERIOR_MARGIN: f64 = 1e-6;

/// A point on the boundary of the disk it exited from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitPoint {
    pub pos: Point,
    pub region: Disk,
}

impl ExitPoint {
    pub fn new(pos: Point, region: Disk) -> Result<Self> {
        check_on_boundary(&pos, &region)?;
        Ok(ExitPoint { pos, region })
    }

    pub fn translate(&self, v: Point) -> ExitPoint {
        ExitPoint {
            pos: self.pos + v,
            region: self.region.translate(v),
        }
    }
}

pub(crate) fn check_interior(theta: &Point, region: &Disk) -> Result<()> {
    if !theta.is_finite() || !(theta.dist(&region.center) <= (1.0 - INTERIOR_MARGIN) * region.radius) {
        return Err(Error::ThetaOutsideRegion);
    }
    Ok(())
}

fn check_on_boundary(z: &Point, region: &Disk) -> Result<()> {
    let off = (z.dist(&region.center) - region.radius).abs() / region.radius;
    if !(off <= BOUNDARY_TOL) {
        return Err(Error::PointNotOnBoundary(off));
    }
    Ok(())
}

/// Log Poisson kernel without argument checks; the caller guarantees `theta` is
/// interior and `z` is on the boundary.
#[inline]
fn ln_poisson_kernel(z: &Point, theta: &Point, region: &Disk) -> f64 {
    let r2 = region.radius * region.radius;
    ((r2 - theta.dist2(&region.center)) / (2.0 * PI * region.radius * z.dist2(theta))).ln()
}

/// Log density (w.r.t. arc length) of exiting `region` at `z` when starting from `theta`.
pub fn harmonic_log_density(z: &Point, theta: &Point, region: &Disk) -> Result<f64> {
    check_interior(theta, region)?;
    check_on_boundary(z, region)?;
    Ok(ln_poisson_kernel(z, theta, region))
}

/// Exact draw from the harmonic measure via the disk automorphism sending 0 to
/// `a = (theta - c) / R`: a uniform boundary point `u` maps to `(u + a) / (1 + conj(a) u)`.
pub fn sample_exit<R: Rng + ?Sized>(theta: &Point, region: &Disk, rng: &mut R) -> Result<ExitPoint> {
    check_interior(theta, region)?;
    let a = (*theta - region.center) * (1.0 / region.radius);
    let u = Point::polar(1.0, sample_angle(rng));
    let num = u + a;
    // 1 + conj(a) * u
    let den = Point::new(1.0 + a.x * u.x + a.y * u.y, a.x * u.y - a.y * u.x);
    let w = Point::new(
        (num.x * den.x + num.y * den.y) / den.norm2(),
        (num.y * den.x - num.x * den.y) / den.norm2(),
    );
    let pos = region.center + w * (region.radius / w.norm());
    Ok(ExitPoint { pos, region: *region })
}

/// `E |z - theta|^2 = R^2 - |theta - c|^2` for `z` drawn from the exit law.
pub fn expected_sp_given_center(theta: &Point, region: &Disk) -> Result<f64> {
    check_interior(theta, region)?;
    Ok(region.radius * region.radius - theta.dist2(&region.center))
}

/// Probability mass the exit law assigns to the boundary arc `[phi0, phi1]`
/// (angles measured at the disk center, `phi0 <= phi1 <= phi0 + 2 pi`).
pub fn arc_probability(theta: &Point, region: &Disk, phi0: f64, phi1: f64) -> Result<f64> {
    check_interior(theta, region)?;
    Ok(angle_cdf_unchecked(theta, region, phi1) - angle_cdf_unchecked(theta, region, phi0))
}

/// Continuous antiderivative of the angular exit density, unbounded in `phi`.
fn angle_cdf_unchecked(theta: &Point, region: &Disk, phi: f64) -> f64 {
    let a = *theta - region.center;
    let rho = a.norm() / region.radius;
    let phi0 = a.angle();
    let d = phi - phi0;
    // Integral of (1 - rho^2) / (2 pi (1 - 2 rho cos t + rho^2)) dt.
    let k = ((1.0 + rho) / (1.0 - rho)).max(0.0);
    let half = d / 2.0;
    let turns = (half / PI).round();
    let base = (k * (half - turns * PI).tan()).atan() / PI;
    base + turns
}

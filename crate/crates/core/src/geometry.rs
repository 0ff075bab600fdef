//! Planar geometry: points, disks and circle recovery from boundary points.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative area threshold below which three points count as collinear.
pub const COLLINEAR_TOL: f64 = 1e-12;

/// A position in the plane, in meters (or any consistent length unit).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(radius * c, radius * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm2(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        (*self - *other).norm2()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(&self, other: &Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Angle of the vector in `(-pi, pi]`.
    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Closed disk `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite disk center {center:?}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Disk { center, radius })
    }

    /// Point membership. The boundary counts as inside.
    pub fn contains(&self, p: &Point) -> bool {
        self.center.dist2(p) <= self.radius * self.radius
    }

    pub fn translate(&self, v: Point) -> Disk {
        Disk {
            center: self.center + v,
            radius: self.radius,
        }
    }

    /// Point on the boundary at the given polar angle.
    pub fn boundary_point(&self, angle: f64) -> Point {
        self.center + Point::polar(self.radius, angle)
    }
}

/// Circle through three points.
pub fn circumcenter(p1: Point, p2: Point, p3: Point) -> Result<Disk> {
    let a = p2 - p1;
    let b = p3 - p1;
    let d = 2.0 * a.cross(&b);
    let scale = p1.dist2(&p2).max(p1.dist2(&p3)).max(p2.dist2(&p3));
    // |d| / 4 is the triangle area.
    if !(d.abs() / 4.0 > COLLINEAR_TOL * scale) {
        return Err(Error::CollinearPoints);
    }
    let a2 = a.norm2();
    let b2 = b.norm2();
    let ux = (b.y * a2 - a.y * b2) / d;
    let uy = (a.x * b2 - b.x * a2) / d;
    let offset = Point::new(ux, uy);
    Disk::new(p1 + offset, offset.norm())
}

/// Least-squares center of a circle of known radius through `points`.
///
/// Algebraic (Kåsa) initialization, then Gauss-Newton on
/// `sum_i (|z_i - c| - radius)^2`. Returns the center and the rms residual.
pub fn fit_circle_center(points: &[Point], radius_known: f64) -> Result<(Point, f64)> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "circle fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if !(radius_known > 0.0 && radius_known.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius_known}")));
    }
    let mut center = kasa_center(points)?;

    for _ in 0..50 {
        // J^T J and J^T r for residual r_i = |z_i - c| - R, dr_i/dc = -(z_i - c)/|z_i - c|
        let (mut jtj, mut jtr) = ([0.0f64; 3], [0.0f64; 2]);
        for p in points {
            let v = *p - center;
            let d = v.norm();
            if d == 0.0 {
                continue;
            }
            let (gx, gy) = (-v.x / d, -v.y / d);
            let r = d - radius_known;
            jtj[0] += gx * gx;
            jtj[1] += gx * gy;
            jtj[2] += gy * gy;
            jtr[0] += gx * r;
            jtr[1] += gy * r;
        }
        let det = jtj[0] * jtj[2] - jtj[1] * jtj[1];
        if det.abs() < f64::EPSILON * (jtj[0] + jtj[2]).powi(2) {
            break;
        }
        let dx = -(jtj[2] * jtr[0] - jtj[1] * jtr[1]) / det;
        let dy = -(jtj[0] * jtr[1] - jtj[1] * jtr[0]) / det;
        center = center + Point::new(dx, dy);
        if dx.hypot(dy) <= 1e-15 * radius_known {
            break;
        }
    }

    let ss: f64 = points.iter().map(|p| (p.dist(&center) - radius_known).powi(2)).sum();
    Ok((center, (ss / points.len() as f64).sqrt()))
}

/// Algebraic circle fit: solves `x^2 + y^2 + D x + E y + F = 0` in the least-squares sense
/// on centered coordinates.
fn kasa_center(points: &[Point]) -> Result<Point> {
    let n = points.len() as f64;
    let mean = points.iter().fold(Point::ORIGIN, |acc, p| acc + *p) * (1.0 / n);
    let (mut suu, mut suv, mut svv) = (0.0, 0.0, 0.0);
    let (mut suuu, mut svvv, mut suvv, mut svuu) = (0.0, 0.0, 0.0, 0.0);
    for p in points {
        let u = p.x - mean.x;
        let v = p.y - mean.y;
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    // Principal-axis aspect ratio of the point cloud.
    let tr = suu + svv;
    let det = suu * svv - suv * suv;
    let disc = ((suu - svv).powi(2) + 4.0 * suv * suv).sqrt();
    let lmax = 0.5 * (tr + disc);
    let lmin = if lmax > 0.0 { det / lmax } else { 0.0 };
    if !(lmax > 0.0) || !(lmin > COLLINEAR_TOL * COLLINEAR_TOL * lmax) {
        return Err(Error::DegenerateConfiguration);
    }
    let bu = 0.5 * (suuu + suvv);
    let bv = 0.5 * (svvv + svuu);
    let uc = (bu * svv - bv * suv) / det;
    let vc = (bv * suu - bu * suv) / det;
    Ok(Point::new(mean.x + uc, mean.y + vc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn circumcenter_examples() {
        let d = circumcenter(Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(-1.0, 0.0)).unwrap();
        assert!(close(d.center.x, 0.0, 1e-12) && close(d.center.y, 0.0, 1e-12));
        assert!(close(d.radius, 1.0, 1e-12));

        let d = circumcenter(Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 1.0)).unwrap();
        assert!(close(d.center.x, 1.0, 1e-12) && close(d.center.y, 0.0, 1e-12));
        assert!(close(d.radius, 1.0, 1e-12));
    }

    #[test]
    fn circumcenter_collinear() {
        let err = circumcenter(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0));
        assert!(matches!(err, Err(Error::CollinearPoints)));
        let err = circumcenter(Point::new(1.0, 1.0), Point::new(1.0, 1.0), Point::new(2.0, 0.0));
        assert!(matches!(err, Err(Error::CollinearPoints)));
    }

    #[test]
    fn fit_known_radius() {
        let pts = [Point::new(8.0, 4.0), Point::new(3.0, 9.0), Point::new(-2.0, 4.0)];
        let (c, rms) = fit_circle_center(&pts, 5.0).unwrap();
        assert!(close(c.x, 3.0, 1e-12) && close(c.y, 4.0, 1e-12), "{c:?}");
        assert!(rms < 1e-12);
    }

    #[test]
    fn fit_collinear_is_degenerate() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0),
            Point::new(5.0, 5.0),
        ];
        assert!(matches!(fit_circle_center(&pts, 3.0), Err(Error::DegenerateConfiguration)));
    }

    #[test]
    fn fit_needs_three_points() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        assert!(matches!(fit_circle_center(&pts, 3.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn fit_short_arc() {
        // Points on a 0.2 rad arc still pin down the center when the radius is known.
        let disk = Disk::new(Point::new(-7.0, 2.5), 4.0).unwrap();
        let pts: Vec<Point> = (0..6).map(|k| disk.boundary_point(1.0 + 0.04 * k as f64)).collect();
        let (c, rms) = fit_circle_center(&pts, 4.0).unwrap();
        assert!(c.dist(&disk.center) < 1e-9, "{c:?}");
        assert!(rms < 1e-12);
    }

    #[test]
    fn disk_rejects_bad_radius() {
        assert!(Disk::new(Point::ORIGIN, 0.0).is_err());
        assert!(Disk::new(Point::ORIGIN, f64::NAN).is_err());
        assert!(Disk::new(Point::new(f64::INFINITY, 0.0), 1.0).is_err());
    }
}

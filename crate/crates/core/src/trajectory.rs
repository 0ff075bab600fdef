//! Discrete planar tracks: Brownian simulation, privacy-region cuts, squared perturbation,
//! and the `t,x,y` CSV track format.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{Disk, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub pos: Point,
}

/// Time-ordered positions. Timestamps strictly increase and there is at least one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
}

impl Trajectory {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("trajectory needs at least one sample".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.t.is_finite() || !s.pos.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite sample at index {i}")));
            }
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(Error::InvalidParameter(format!(
                    "timestamps must strictly increase (index {i}: {} after {})",
                    s.t,
                    samples[i - 1].t
                )));
            }
        }
        Ok(Trajectory { samples })
    }

    /// Track sampled at unit time steps `0, 1, 2, ...`.
    pub fn from_points(points: &[Point]) -> Result<Self> {
        Trajectory::new(points.iter().enumerate().map(|(i, &pos)| Sample { t: i as f64, pos }).collect())
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> Point {
        self.samples[0].pos
    }

    pub fn end(&self) -> Point {
        self.samples[self.samples.len() - 1].pos
    }

    pub fn positions(&self) -> impl Iterator<Item = Point> + '_ {
        self.samples.iter().map(|s| s.pos)
    }

    pub fn translate(&self, v: Point) -> Trajectory {
        Trajectory {
            samples: self.samples.iter().map(|s| Sample { t: s.t, pos: s.pos + v }).collect(),
        }
    }

    fn slice(&self, from: usize, to_inclusive: usize) -> Trajectory {
        Trajectory {
            samples: self.samples[from..=to_inclusive].to_vec(),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("t,x,y\n");
        for s in &self.samples {
            // `{}` on f64 prints the shortest representation that parses back exactly.
            let _ = writeln!(out, "{},{},{}", s.t, s.pos.x, s.pos.y);
        }
        out
    }

    /// Parse the `t,x,y` format. `name` is used in error messages.
    pub fn parse_csv(text: &str, name: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            file: name.to_string(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "t,x,y" => {}
            Some((_, h)) => return Err(err(1, format!("expected header `t,x,y`, found `{h}`"))),
            None => return Err(err(1, "empty file".into())),
        }
        let mut samples = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(err(lineno, format!("expected 3 fields, found {}", fields.len())));
            }
            let mut vals = [0.0; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f.trim().parse::<f64>().map_err(|e| err(lineno, format!("bad number `{f}`: {e}")))?;
                if !v.is_finite() {
                    return Err(err(lineno, format!("non-finite value `{f}`")));
                }
            }
            if let Some(prev) = samples.last().map(|s: &Sample| s.t) {
                if !(vals[0] > prev) {
                    return Err(err(lineno, format!("timestamp {} does not increase", vals[0])));
                }
            }
            samples.push(Sample {
                t: vals[0],
                pos: Point::new(vals[1], vals[2]),
            });
        }
        Trajectory::new(samples).map_err(|e| err(1, e.to_string()))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Trajectory::parse_csv(&text, &path.display().to_string())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

/// Outcome of cutting a track with a privacy region.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    /// `None` when the track never leaves the region.
    pub published: Option<Trajectory>,
    /// Squared perturbation; `+inf` iff nothing is published.
    pub sp: f64,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

impl CutResult {
    fn unpublished() -> Self {
        CutResult {
            published: None,
            sp: f64::INFINITY,
            t1: None,
            t2: None,
        }
    }
}

fn outside(region: &Disk, p: &Point) -> bool {
    !region.contains(p)
}

/// Publish from the first sample outside `region` to the last sample outside it.
pub fn cut_privacy_region(traj: &Trajectory, region: &Disk) -> CutResult {
    let s = traj.samples();
    let Some(first) = s.iter().position(|x| outside(region, &x.pos)) else {
        return CutResult::unpublished();
    };
    let last = s.iter().rposition(|x| outside(region, &x.pos)).unwrap_or(first);
    let published = traj.slice(first, last);
    let sp = squared_perturbation(Some(&published), traj);
    CutResult {
        published: Some(published),
        sp,
        t1: Some(s[first].t),
        t2: Some(s[last].t),
    }
}

/// Publish everything from the first sample outside `region` onwards.
pub fn cut_first_exit(traj: &Trajectory, region: &Disk) -> CutResult {
    let s = traj.samples();
    let Some(first) = s.iter().position(|x| outside(region, &x.pos)) else {
        return CutResult::unpublished();
    };
    let last = s.len() - 1;
    let published = traj.slice(first, last);
    let sp = squared_perturbation(Some(&published), traj);
    CutResult {
        published: Some(published),
        sp,
        t1: Some(s[first].t),
        t2: Some(s[last].t),
    }
}

/// Squared endpoint displacement, or `+inf` when `published` is absent or is not a
/// contiguous restriction of `original`.
pub fn squared_perturbation(published: Option<&Trajectory>, original: &Trajectory) -> f64 {
    let Some(y) = published else {
        return f64::INFINITY;
    };
    let xs = original.samples();
    let ys = y.samples();
    let t0 = ys[0].t;
    let Ok(start) = xs.binary_search_by(|s| s.t.total_cmp(&t0)) else {
        return f64::INFINITY;
    };
    if start + ys.len() > xs.len() || xs[start..start + ys.len()] != *ys {
        return f64::INFINITY;
    }
    y.start().dist2(&original.start()) + y.end().dist2(&original.end())
}

fn gaussian_step<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Point {
    let dx: f64 = StandardNormal.sample(rng);
    let dy: f64 = StandardNormal.sample(rng);
    Point::new(sd * dx, sd * dy)
}

/// Euler path of planar Brownian motion with per-axis variance rate `sigma2`.
pub fn simulate_brownian<R: Rng + ?Sized>(start: Point, sigma2: f64, dt: f64, n_steps: usize, rng: &mut R) -> Result<Trajectory> {
    check_diffusion(sigma2, dt)?;
    let sd = (sigma2 * dt).sqrt();
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut pos = start;
    samples.push(Sample { t: 0.0, pos });
    for k in 1..=n_steps {
        pos = pos + gaussian_step(rng, sd);
        samples.push(Sample { t: k as f64 * dt, pos });
    }
    Trajectory::new(samples)
}

/// Time step bounding the boundary overshoot to about 1% of the region radius.
pub fn default_exit_dt(region: &Disk, sigma2: f64) -> f64 {
    1e-4 * region.radius * region.radius / sigma2
}

/// Simulate from `start` until the first sample outside `region`.
///
/// The returned track ends at that sample, whose index is returned alongside.
pub fn simulate_until_exit<R: Rng + ?Sized>(
    start: Point,
    region: &Disk,
    sigma2: f64,
    dt: f64,
    max_steps: usize,
    rng: &mut R,
) -> Result<(Trajectory, usize)> {
    check_diffusion(sigma2, dt)?;
    if !region.contains(&start) {
        return Err(Error::InvalidParameter("start point lies outside the region".into()));
    }
    let sd = (sigma2 * dt).sqrt();
    let mut samples = vec![Sample { t: 0.0, pos: start }];
    let mut pos = start;
    for k in 1..=max_steps {
        pos = pos + gaussian_step(rng, sd);
        samples.push(Sample { t: k as f64 * dt, pos });
        if outside(region, &pos) {
            return Ok((Trajectory { samples }, k));
        }
    }
    Err(Error::MaxStepsExceeded(max_steps))
}

fn check_diffusion(sigma2: f64, dt: f64) -> Result<()> {
    if !(sigma2 > 0.0 && sigma2.is_finite() && dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need sigma2 > 0 and dt > 0, got sigma2={sigma2}, dt={dt}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn line(xs: &[f64]) -> Trajectory {
        Trajectory::from_points(&xs.iter().map(|&x| Point::new(x, 0.0)).collect::<Vec<_>>()).unwrap()
    }

    fn unit() -> Disk {
        Disk::new(Point::ORIGIN, 1.0).unwrap()
    }

    #[test]
    fn privacy_cut_keeps_outside_span() {
        let tr = line(&[0.0, 0.5, 2.0, 3.0, 0.2]);
        let cut = cut_privacy_region(&tr, &unit());
        let p = cut.published.unwrap();
        assert_eq!(p.samples(), &tr.samples()[2..=3]);
        assert_eq!((cut.t1, cut.t2), (Some(2.0), Some(3.0)));
        // (2-0)^2 + (3-0.2)^2
        assert!((cut.sp - (4.0 + 2.8f64 * 2.8)).abs() < 1e-12);
    }

    #[test]
    fn never_leaving_is_unpublished() {
        let tr = line(&[0.0, 0.5, -0.9, 1.0]);
        for cut in [cut_privacy_region(&tr, &unit()), cut_first_exit(&tr, &unit())] {
            assert!(cut.published.is_none());
            assert_eq!(cut.sp, f64::INFINITY);
            assert_eq!((cut.t1, cut.t2), (None, None));
        }
    }

    #[test]
    fn starting_outside() {
        let tr = line(&[2.0, 0.5, 3.0, 0.0]);
        let cut = cut_privacy_region(&tr, &unit());
        assert_eq!(cut.published.unwrap().samples(), &tr.samples()[0..=2]);
        assert_eq!(cut.t1, Some(0.0));

        let tr = line(&[2.0, 0.5, 3.0]);
        let cut = cut_privacy_region(&tr, &unit());
        assert_eq!(cut.sp, 0.0);
    }

    #[test]
    fn first_exit_keeps_tail() {
        let tr = line(&[0.0, 0.5, 2.0, 3.0, 0.2]);
        let cut = cut_first_exit(&tr, &unit());
        assert_eq!(cut.published.unwrap().samples(), &tr.samples()[2..]);
        assert_eq!(cut.sp, 4.0);

        let tr = line(&[2.0, 0.5]);
        assert_eq!(cut_first_exit(&tr, &unit()).sp, 0.0);
    }

    #[test]
    fn sp_examples() {
        let orig = Trajectory::from_points(&[
            Point::new(0.0, 0.0),
            Point::new(3.0, 4.0),
            Point::new(6.0, 1.0),
            Point::new(10.0, 0.0),
        ])
        .unwrap();
        assert_eq!(squared_perturbation(Some(&orig), &orig), 0.0);
        let cut = orig.slice(1, 3);
        assert_eq!(squared_perturbation(Some(&cut), &orig), 25.0);

        let mut altered = cut.samples().to_vec();
        altered[1].pos.y += 1e-9;
        let altered = Trajectory::new(altered).unwrap();
        assert_eq!(squared_perturbation(Some(&altered), &orig), f64::INFINITY);

        let shifted = Trajectory::new(cut.samples().iter().map(|s| Sample { t: s.t + 0.5, pos: s.pos }).collect()).unwrap();
        assert_eq!(squared_perturbation(Some(&shifted), &orig), f64::INFINITY);
        assert_eq!(squared_perturbation(None, &orig), f64::INFINITY);
    }

    #[test]
    fn trajectory_validation() {
        assert!(Trajectory::new(vec![]).is_err());
        let s = |t: f64| Sample { t, pos: Point::ORIGIN };
        assert!(Trajectory::new(vec![s(0.0), s(0.0)]).is_err());
        assert!(Trajectory::new(vec![s(0.0), s(1.0)]).is_ok());
    }

    #[test]
    fn brownian_zero_steps() {
        let tr = simulate_brownian(Point::new(1.0, 2.0), 1.0, 0.1, 0, &mut seeded(0)).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.start(), Point::new(1.0, 2.0));
    }

    #[test]
    fn brownian_increment_variance() {
        let n = 10_000;
        let tr = simulate_brownian(Point::ORIGIN, 1.0, 0.01, n, &mut seeded(5)).unwrap();
        let inc: Vec<f64> = tr
            .samples()
            .windows(2)
            .flat_map(|w| [w[1].pos.x - w[0].pos.x, w[1].pos.y - w[0].pos.y])
            .collect();
        let v = inc.iter().map(|d| d * d).sum::<f64>() / inc.len() as f64;
        // s.e. of a Gaussian variance estimate: var * sqrt(2/m)
        let se = 0.01 * (2.0 / inc.len() as f64).sqrt();
        assert!((v - 0.01).abs() < 5.0 * se, "{v}");
    }

    #[test]
    fn brownian_zero_drift() {
        let mut rng = seeded(6);
        let m = 10_000;
        let mut sum = Point::ORIGIN;
        for _ in 0..m {
            sum = sum + simulate_brownian(Point::ORIGIN, 1.0, 0.1, 10, &mut rng).unwrap().end();
        }
        let mean = sum * (1.0 / m as f64);
        // per-axis variance at t=1 is 1
        let se = (1.0 / m as f64).sqrt();
        assert!(mean.x.abs() < 5.0 * se && mean.y.abs() < 5.0 * se, "{mean:?}");
    }

    #[test]
    fn exit_radius_overshoot_is_small() {
        let region = unit();
        let dt = default_exit_dt(&region, 1.0);
        let mut rng = seeded(7);
        let m = 500;
        let mut total = 0.0;
        for _ in 0..m {
            let (tr, k) = simulate_until_exit(Point::ORIGIN, &region, 1.0, dt, 1_000_000, &mut rng).unwrap();
            assert_eq!(k, tr.len() - 1);
            assert!(tr.samples()[..k].iter().all(|s| region.contains(&s.pos)));
            total += tr.end().norm();
        }
        let mean = total / m as f64;
        assert!(mean > 1.0 && mean < 1.0 + 3.0 * dt.sqrt(), "{mean}");
    }

    #[test]
    fn unreachable_boundary() {
        let region = Disk::new(Point::ORIGIN, 1e6).unwrap();
        let r = simulate_until_exit(Point::ORIGIN, &region, 1.0, 1e-4, 10, &mut seeded(0));
        assert!(matches!(r, Err(Error::MaxStepsExceeded(10))));
    }

    #[test]
    fn csv_parse_errors_carry_line() {
        let e = Trajectory::parse_csv("t,x,y\n0,0,0\n1,abc,0\n", "track.csv").unwrap_err();
        assert_eq!(e.to_string().split(':').take(2).collect::<Vec<_>>(), ["track.csv", "3"]);
        let e = Trajectory::parse_csv("t,x,y\n0,0,0\n0,1,0\n", "a").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(matches!(Trajectory::parse_csv("x,y\n", "a"), Err(Error::Parse { line: 1, .. })));
    }
}

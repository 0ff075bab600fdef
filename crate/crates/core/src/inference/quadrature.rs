//! Grid quadrature of planar log densities: the deterministic reference for the sampler.

use rand::Rng;
use rayon::prelude::*;

use crate::geometry::Point;

/// Square integration window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: Point,
    pub half_width: f64,
}

/// Normalized moments of a density integrated on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSummary {
    /// Log of the unnormalized mass over the window.
    pub log_mass: f64,
    pub mean: Point,
    /// Covariance entries (xx, xy, yy).
    pub cov: (f64, f64, f64),
    pub window: Window,
    pub nodes: usize,
}

impl QuadratureSummary {
    /// `E |theta - p|^2` under the normalized density.
    pub fn mse_about(&self, p: &Point) -> f64 {
        self.cov.0 + self.cov.2 + self.mean.dist2(p)
    }

    pub fn sd(&self) -> (f64, f64) {
        (self.cov.0.max(0.0).sqrt(), self.cov.2.max(0.0).sqrt())
    }
}

/// Log target at the cell midpoints of a `nodes x nodes` grid, row-major in `y`.
fn grid_values<F>(log_target: &F, window: Window, nodes: usize) -> Vec<f64>
where
    F: Fn(&Point) -> f64 + Sync,
{
    let h = 2.0 * window.half_width / nodes as f64;
    let x0 = window.center.x - window.half_width + 0.5 * h;
    let y0 = window.center.y - window.half_width + 0.5 * h;
    (0..nodes * nodes)
        .into_par_iter()
        .map(|k| log_target(&Point::new(x0 + (k % nodes) as f64 * h, y0 + (k / nodes) as f64 * h)))
        .collect()
}

/// Midpoint rule on a `nodes x nodes` grid over `window`.
pub fn grid_quadrature<F>(log_target: &F, window: Window, nodes: usize) -> QuadratureSummary
where
    F: Fn(&Point) -> f64 + Sync,
{
    let h = 2.0 * window.half_width / nodes as f64;
    let x0 = window.center.x - window.half_width + 0.5 * h;
    let y0 = window.center.y - window.half_width + 0.5 * h;
    let values = grid_values(log_target, window, nodes);
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut s0, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (k, lv) in values.iter().enumerate() {
        let w = (lv - peak).exp();
        if w == 0.0 {
            continue;
        }
        s0 += w;
        sx += w * (x0 + (k % nodes) as f64 * h);
        sy += w * (y0 + (k / nodes) as f64 * h);
    }
    let mean = Point::new(sx / s0, sy / s0);
    let (mut cxx, mut cxy, mut cyy) = (0.0, 0.0, 0.0);
    for (k, lv) in values.iter().enumerate() {
        let w = (lv - peak).exp();
        if w == 0.0 {
            continue;
        }
        let dx = x0 + (k % nodes) as f64 * h - mean.x;
        let dy = y0 + (k / nodes) as f64 * h - mean.y;
        cxx += w * dx * dx;
        cxy += w * dx * dy;
        cyy += w * dy * dy;
    }
    QuadratureSummary {
        log_mass: peak + s0.ln() + 2.0 * h.ln(),
        mean,
        cov: (cxx / s0, cxy / s0, cyy / s0),
        window,
        nodes,
    }
}

/// Reference posterior summary together with a coarser-grid estimate of its error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSummary {
    pub fine: QuadratureSummary,
    pub coarse: QuadratureSummary,
    /// Mass over the initial (search) window, for mixture weighting.
    pub log_mass: f64,
}

impl OracleSummary {
    pub fn mean(&self) -> Point {
        self.fine.mean
    }

    pub fn mse_about(&self, p: &Point) -> f64 {
        self.fine.mse_about(p)
    }

    /// Discretization error of the mean, bounded by the fine/coarse difference.
    pub fn mean_error(&self) -> f64 {
        self.fine.mean.dist(&self.coarse.mean)
    }

    pub fn mse_error(&self, p: &Point) -> f64 {
        (self.fine.mse_about(p) - self.coarse.mse_about(p)).abs()
    }
}

/// Window of +-8 posterior sd around the mass located by a search pass, never narrower
/// than a few search cells.
fn refined_window(search: &QuadratureSummary, initial: Window) -> Window {
    let (sx, sy) = search.sd();
    let cell = 2.0 * initial.half_width / search.nodes as f64;
    let half = (8.0 * sx.max(sy)).max(4.0 * cell);
    // A re-centered window as wide as the search window could cut off mass it covered.
    if half >= initial.half_width {
        initial
    } else {
        Window {
            center: search.mean,
            half_width: half,
        }
    }
}

/// Two-pass quadrature: a search pass over `initial`, then `nodes x nodes` over a
/// window of +-8 posterior sd around the located mass.
pub fn oracle_quadrature<F>(log_target: &F, initial: Window, nodes: usize) -> OracleSummary
where
    F: Fn(&Point) -> f64 + Sync,
{
    let search = grid_quadrature(log_target, initial, nodes);
    let refined = refined_window(&search, initial);
    OracleSummary {
        fine: grid_quadrature(log_target, refined, nodes),
        coarse: grid_quadrature(log_target, refined, nodes / 2),
        log_mass: search.log_mass,
    }
}

/// Piecewise-constant density on a grid: cell probabilities spread uniformly in each cell.
#[derive(Debug, Clone)]
struct GridTable {
    window: Window,
    nodes: usize,
    /// Cumulative cell probabilities; empty if the grid saw no mass.
    cum: Vec<f64>,
}

impl GridTable {
    fn new<F>(log_target: &F, window: Window, nodes: usize) -> Self
    where
        F: Fn(&Point) -> f64 + Sync,
    {
        let values = grid_values(log_target, window, nodes);
        let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut cum = Vec::new();
        if peak.is_finite() {
            let mut acc = 0.0;
            cum = values
                .iter()
                .map(|v| {
                    acc += (v - peak).exp();
                    acc
                })
                .collect();
            cum.iter_mut().for_each(|c| *c /= acc);
        }
        GridTable { window, nodes, cum }
    }

    fn cell_size(&self) -> f64 {
        2.0 * self.window.half_width / self.nodes as f64
    }

    fn corner(&self) -> Point {
        let w = self.window;
        Point::new(w.center.x - w.half_width, w.center.y - w.half_width)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let u: f64 = rng.random();
        let k = self.cum.partition_point(|c| *c < u).min(self.cum.len() - 1);
        let h = self.cell_size();
        self.corner()
            + Point::new(
                ((k % self.nodes) as f64 + rng.random::<f64>()) * h,
                ((k / self.nodes) as f64 + rng.random::<f64>()) * h,
            )
    }

    fn density(&self, p: &Point) -> f64 {
        let h = self.cell_size();
        let f = (*p - self.corner()) * (1.0 / h);
        let n = self.nodes as f64;
        if self.cum.is_empty() || !(f.x >= 0.0 && f.x < n && f.y >= 0.0 && f.y < n) {
            return 0.0;
        }
        let k = f.y as usize * self.nodes + f.x as usize;
        let mass = self.cum[k] - if k == 0 { 0.0 } else { self.cum[k - 1] };
        mass / (h * h)
    }
}

/// Mixture weights of the refined grid, the search grid and the uniform floor.
const PROPOSAL_WEIGHTS: [f64; 3] = [0.80, 0.15, 0.05];

/// Global independence proposal built from two-pass grid quadrature: the refined grid
/// carries most of the weight, the coarse search grid reaches minor modes outside the
/// refined window, and a uniform floor over the search window covers whatever both
/// grids underweight.
#[derive(Debug, Clone)]
pub struct GridProposal {
    refined: GridTable,
    search: GridTable,
    weights: [f64; 3],
}

impl GridProposal {
    pub fn new<F>(log_target: &F, initial: Window, nodes: usize) -> Self
    where
        F: Fn(&Point) -> f64 + Sync,
    {
        let search = GridTable::new(log_target, initial, nodes);
        let window = refined_window(&grid_quadrature(log_target, initial, nodes), initial);
        let refined = GridTable::new(log_target, window, nodes);
        let mut weights = PROPOSAL_WEIGHTS;
        for (k, t) in [&refined, &search].iter().enumerate() {
            if t.cum.is_empty() {
                weights[2] += weights[k];
                weights[k] = 0.0;
            }
        }
        GridProposal { refined, search, weights }
    }

    /// The search window; the proposal density is positive exactly on it.
    pub fn window(&self) -> Window {
        self.search.window
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let u: f64 = rng.random();
        if u < self.weights[0] {
            self.refined.sample(rng)
        } else if u < self.weights[0] + self.weights[1] {
            self.search.sample(rng)
        } else {
            let w = self.search.window;
            self.search.corner() + Point::new(2.0 * w.half_width * rng.random::<f64>(), 2.0 * w.half_width * rng.random::<f64>())
        }
    }

    /// Log proposal density; `-inf` outside the search window.
    pub fn log_density(&self, p: &Point) -> f64 {
        let w = self.search.window;
        let f = *p - self.search.corner();
        let side = 2.0 * w.half_width;
        if !(f.x >= 0.0 && f.x < side && f.y >= 0.0 && f.y < side) {
            return f64::NEG_INFINITY;
        }
        (self.weights[0] * self.refined.density(p) + self.weights[1] * self.search.density(p) + self.weights[2] / (side * side)).ln()
    }
}

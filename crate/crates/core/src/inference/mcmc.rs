//! Adaptive random-walk Metropolis with split-R-hat and effective sample size.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::GridProposal;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng::{Stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub n_chains: usize,
    pub n_burn: usize,
    pub n_keep: usize,
    pub target_accept: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            n_chains: 4,
            n_burn: 2000,
            n_keep: 5000,
            target_accept: 0.234,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_chains < 2 || self.n_keep < 4 || self.n_burn < 20 {
            return Err(Error::InvalidParameter(format!(
                "sampler needs >= 2 chains, >= 20 burn-in and >= 4 kept draws, got {self:?}"
            )));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target acceptance {} not in (0,1)",
                self.target_accept
            )));
        }
        Ok(())
    }
}

/// Draws from several chains on `R^D`.
#[derive(Debug, Clone)]
pub struct ChainSet<const D: usize> {
    pub chains: Vec<Vec<[f64; D]>>,
    pub acceptance_rate: f64,
}

impl<const D: usize> ChainSet<D> {
    /// Trace of coordinate `k` for every chain.
    pub fn coordinate(&self, k: usize) -> Vec<Vec<f64>> {
        self.chains.iter().map(|c| c.iter().map(|x| x[k]).collect()).collect()
    }
}

/// Posterior draws of the home location.
#[derive(Debug, Clone)]
pub struct PosteriorSamples {
    pub chains: Vec<Vec<Point>>,
    pub acceptance_rate: f64,
    pub r_hat: (f64, f64),
    pub ess: (f64, f64),
}

impl PosteriorSamples {
    /// Build from raw chains, computing diagnostics.
    pub fn from_chains(chains: Vec<Vec<Point>>, acceptance_rate: f64) -> Self {
        let xs: Vec<Vec<f64>> = chains.iter().map(|c| c.iter().map(|p| p.x).collect()).collect();
        let ys: Vec<Vec<f64>> = chains.iter().map(|c| c.iter().map(|p| p.y).collect()).collect();
        PosteriorSamples {
            r_hat: (split_rhat(&xs), split_rhat(&ys)),
            ess: (effective_sample_size(&xs), effective_sample_size(&ys)),
            chains,
            acceptance_rate,
        }
    }

    pub fn draws(&self) -> impl Iterator<Item = &Point> {
        self.chains.iter().flatten()
    }

    pub fn n_draws(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    pub fn max_rhat(&self) -> f64 {
        self.r_hat.0.max(self.r_hat.1)
    }

    pub fn min_ess(&self) -> f64 {
        self.ess.0.min(self.ess.1)
    }

    /// Per-chain traces of a scalar function of the draws.
    pub fn map_chains(&self, f: impl Fn(&Point) -> f64) -> Vec<Vec<f64>> {
        self.chains.iter().map(|c| c.iter().map(&f).collect()).collect()
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
fn cholesky<const D: usize>(a: &[[f64; D]; D]) -> Option<[[f64; D]; D]> {
    let mut l = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

fn empirical_cov<const D: usize>(xs: &[[f64; D]]) -> [[f64; D]; D] {
    let n = xs.len() as f64;
    let mut mean = [0.0; D];
    for x in xs {
        for k in 0..D {
            mean[k] += x[k] / n;
        }
    }
    let mut cov = [[0.0; D]; D];
    for x in xs {
        for i in 0..D {
            for j in 0..D {
                cov[i][j] += (x[i] - mean[i]) * (x[j] - mean[j]) / (n - 1.0);
            }
        }
    }
    cov
}

struct ChainState<const D: usize, R> {
    x: [f64; D],
    lp: f64,
    rng: R,
    log_step: f64,
    adapt_t: usize,
    history: Vec<[f64; D]>,
    kept: Vec<[f64; D]>,
    accepted: usize,
}

/// A proposal that ignores the current state, mixed into the random walk so chains can
/// move between separated modes.
pub trait IndependenceProposal<const D: usize>: Sync {
    fn draw(&self, rng: &mut StreamRng) -> [f64; D];
    fn log_density(&self, x: &[f64; D]) -> f64;
}

impl IndependenceProposal<2> for GridProposal {
    fn draw(&self, rng: &mut StreamRng) -> [f64; 2] {
        let p = self.sample(rng);
        [p.x, p.y]
    }

    fn log_density(&self, x: &[f64; 2]) -> f64 {
        GridProposal::log_density(self, &Point::new(x[0], x[1]))
    }
}

/// Probability that an iteration uses the independence proposal, when one is given.
pub const GLOBAL_MOVE_PROB: f64 = 0.3;

impl<const D: usize> ChainState<D, StreamRng> {
    fn step<F: Fn(&[f64; D]) -> f64>(
        &mut self,
        log_target: &F,
        chol: &[[f64; D]; D],
        global: Option<&dyn IndependenceProposal<D>>,
        burning: bool,
        target_accept: f64,
    ) {
        if let Some(g) = global {
            if self.rng.random::<f64>() < GLOBAL_MOVE_PROB {
                let prop = g.draw(&mut self.rng);
                let lp_prop = log_target(&prop);
                let log_ratio = lp_prop - self.lp + g.log_density(&self.x) - g.log_density(&prop);
                let accept = lp_prop.is_finite() && (log_ratio >= 0.0 || self.rng.random::<f64>().ln() < log_ratio);
                self.record(prop, lp_prop, accept, burning);
                return;
            }
        }
        let step = self.log_step.exp();
        let mut xi = [0.0; D];
        for v in xi.iter_mut() {
            *v = StandardNormal.sample(&mut self.rng);
        }
        let mut prop = self.x;
        for i in 0..D {
            let dz: f64 = (0..=i).map(|k| chol[i][k] * xi[k]).sum();
            prop[i] += step * dz;
        }
        let lp_prop = log_target(&prop);
        let log_ratio = lp_prop - self.lp;
        let accept = lp_prop.is_finite() && (log_ratio >= 0.0 || self.rng.random::<f64>().ln() < log_ratio);
        if burning {
            self.adapt_t += 1;
            let a = if log_ratio.is_nan() { 0.0 } else { log_ratio.min(0.0).exp() };
            self.log_step += (a - target_accept) / (self.adapt_t as f64).powf(0.6);
        }
        self.record(prop, lp_prop, accept, burning);
    }

    fn record(&mut self, prop: [f64; D], lp_prop: f64, accept: bool, burning: bool) {
        if accept {
            self.x = prop;
            self.lp = lp_prop;
        }
        if burning {
            self.history.push(self.x);
        } else {
            self.accepted += accept as usize;
            self.kept.push(self.x);
        }
    }
}

/// Burn-in iterations at which the proposal shape is re-estimated: doubling from 100
/// while within the first three quarters of burn-in.
fn shape_times(n_burn: usize) -> Vec<usize> {
    std::iter::successors(Some(100usize), |t| Some(t * 2))
        .take_while(|t| 4 * t <= 3 * n_burn)
        .collect()
}

/// Random-walk Metropolis on `R^D`.
///
/// Chain 0 starts at `init`; other chains start at `init` plus Gaussian jitter of size
/// `init_scale`. During burn-in each chain drives its proposal scale toward
/// `cfg.target_accept` (Robbins-Monro), and at doubling times within the first three
/// quarters the shared proposal shape is reset to the covariance of the second half of
/// the burn-in draws pooled over chains. Both are frozen afterwards.
pub fn rwm_sample_nd<const D: usize, F, R>(
    log_target: F,
    init: [f64; D],
    init_scale: f64,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<ChainSet<D>>
where
    F: Fn(&[f64; D]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    sample_chains(&log_target, init, init_scale, None, cfg, rng)
}

/// [`rwm_sample_nd`] with a share [`GLOBAL_MOVE_PROB`] of iterations proposing from
/// `global`. Chains other than the first start from draws of `global`.
pub fn mixed_sample_nd<const D: usize, F, R>(
    log_target: F,
    init: [f64; D],
    init_scale: f64,
    global: &dyn IndependenceProposal<D>,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<ChainSet<D>>
where
    F: Fn(&[f64; D]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    sample_chains(&log_target, init, init_scale, Some(global), cfg, rng)
}

fn sample_chains<const D: usize, F, R>(
    log_target: &F,
    init: [f64; D],
    init_scale: f64,
    global: Option<&dyn IndependenceProposal<D>>,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<ChainSet<D>>
where
    F: Fn(&[f64; D]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    cfg.validate()?;
    if !log_target(&init).is_finite() || !(init_scale > 0.0 && init_scale.is_finite()) {
        return Err(Error::NonFiniteInit);
    }
    let seeds: Vec<u64> = (0..cfg.n_chains).map(|_| rng.random()).collect();
    let mut states: Vec<ChainState<D, StreamRng>> = seeds
        .iter()
        .enumerate()
        .map(|(k, &seed)| {
            let mut crng = Stream::new(seed).rng();
            let mut start = init;
            if k > 0 {
                for _ in 0..100 {
                    let mut cand = init;
                    if let Some(g) = global {
                        cand = g.draw(&mut crng);
                    } else {
                        for v in cand.iter_mut() {
                            let z: f64 = StandardNormal.sample(&mut crng);
                            *v += init_scale * z;
                        }
                    }
                    if log_target(&cand).is_finite() {
                        start = cand;
                        break;
                    }
                }
            }
            ChainState {
                x: start,
                lp: log_target(&start),
                rng: crng,
                log_step: init_scale.ln(),
                adapt_t: 0,
                history: Vec::with_capacity(cfg.n_burn),
                kept: Vec::with_capacity(cfg.n_keep),
                accepted: 0,
            }
        })
        .collect();

    // Proposal: step * L * xi with L the Cholesky factor of the shape matrix.
    let mut chol = [[0.0; D]; D];
    for (i, row) in chol.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut stops = shape_times(cfg.n_burn);
    stops.push(cfg.n_burn);
    let mut it = 0;
    for stop in stops {
        let c = chol;
        states
            .par_iter_mut()
            .for_each(|st| (it..stop).for_each(|_| st.step(log_target, &c, global, true, cfg.target_accept)));
        it = stop;
        if it == cfg.n_burn {
            break;
        }
        let pooled: Vec<[f64; D]> = states.iter().flat_map(|st| st.history[it / 2..].iter().copied()).collect();
        let mut cov = empirical_cov(&pooled);
        // Regularize so that draws confined to a line can still leave it.
        let ridge = 1e-6 * (0..D).map(|k| cov[k][k]).sum::<f64>() / D as f64;
        for (k, row) in cov.iter_mut().enumerate() {
            row[k] += ridge;
        }
        if let Some(l) = cholesky(&cov) {
            chol = l;
            for st in states.iter_mut() {
                st.log_step = (2.38 / (D as f64).sqrt()).ln();
                st.adapt_t = 0;
            }
        }
    }
    states
        .par_iter_mut()
        .for_each(|st| (0..cfg.n_keep).for_each(|_| st.step(log_target, &chol, global, false, cfg.target_accept)));

    let total: usize = states.iter().map(|st| st.kept.len()).sum();
    let acceptance_rate = states.iter().map(|st| st.accepted).sum::<usize>() as f64 / total as f64;
    if !(acceptance_rate > 0.05 && acceptance_rate < 0.95) {
        return Err(Error::AdaptationFailed(acceptance_rate));
    }
    Ok(ChainSet {
        chains: states.into_iter().map(|st| st.kept).collect(),
        acceptance_rate,
    })
}

/// Random-walk Metropolis on the plane, returning draws with diagnostics.
pub fn rwm_sample<F, R>(log_target: F, init: Point, init_scale: f64, cfg: &SamplerConfig, rng: &mut R) -> Result<PosteriorSamples>
where
    F: Fn(&Point) -> f64 + Sync,
    R: Rng + ?Sized,
{
    let set = rwm_sample_nd(
        |v: &[f64; 2]| log_target(&Point::new(v[0], v[1])),
        [init.x, init.y],
        init_scale,
        cfg,
        rng,
    )?;
    Ok(planar_samples(set))
}

/// [`rwm_sample`] mixed with global moves from a grid approximation of the target.
pub fn mixed_sample<F, R>(
    log_target: F,
    init: Point,
    init_scale: f64,
    global: &GridProposal,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<PosteriorSamples>
where
    F: Fn(&Point) -> f64 + Sync,
    R: Rng + ?Sized,
{
    let set = mixed_sample_nd(
        |v: &[f64; 2]| log_target(&Point::new(v[0], v[1])),
        [init.x, init.y],
        init_scale,
        global,
        cfg,
        rng,
    )?;
    Ok(planar_samples(set))
}

fn planar_samples(set: ChainSet<2>) -> PosteriorSamples {
    let chains = set
        .chains
        .iter()
        .map(|c| c.iter().map(|v| Point::new(v[0], v[1])).collect())
        .collect();
    PosteriorSamples::from_chains(chains, set.acceptance_rate)
}

fn split_halves(chains: &[Vec<f64>]) -> Vec<&[f64]> {
    chains
        .iter()
        .flat_map(|c| {
            let h = c.len() / 2;
            [&c[..h], &c[c.len() - h..]]
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Between/within variance components over split chains: (W, var_plus, n per split chain).
fn variance_components(halves: &[&[f64]]) -> (f64, f64, usize) {
    let n = halves[0].len();
    let m = halves.len() as f64;
    let means: Vec<f64> = halves.iter().map(|h| mean(h)).collect();
    let grand = means.iter().sum::<f64>() / m;
    let b = n as f64 * means.iter().map(|x| (x - grand).powi(2)).sum::<f64>() / (m - 1.0);
    let w = halves
        .iter()
        .zip(&means)
        .map(|(h, mu)| h.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n as f64 - 1.0))
        .sum::<f64>()
        / m;
    let var_plus = (n as f64 - 1.0) / n as f64 * w + b / n as f64;
    (w, var_plus, n)
}

/// Potential scale reduction on split chains.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let halves = split_halves(chains);
    let (w, var_plus, _) = variance_components(&halves);
    if w == 0.0 {
        return if var_plus == 0.0 { 1.0 } else { f64::INFINITY };
    }
    (var_plus / w).sqrt()
}

/// Multi-chain effective sample size on split chains, using Geyer's initial
/// monotone positive sequence on the combined autocorrelation.
pub fn effective_sample_size(chains: &[Vec<f64>]) -> f64 {
    let halves = split_halves(chains);
    let m = halves.len();
    let (w, var_plus, n) = variance_components(&halves);
    let total = (m * n) as f64;
    if !(w > 0.0) {
        return total;
    }
    let means: Vec<f64> = halves.iter().map(|h| mean(h)).collect();
    // Mean over chains of the (1/n) autocovariance at lag t.
    let autocov = |t: usize| -> f64 {
        halves
            .iter()
            .zip(&means)
            .map(|(h, mu)| (0..n - t).map(|i| (h[i] - mu) * (h[i + t] - mu)).sum::<f64>() / n as f64)
            .sum::<f64>()
            / m as f64
    };
    let rho = |t: usize| 1.0 - (w - autocov(t)) / var_plus;

    let mut sum_pairs = 0.0;
    let mut prev_pair = f64::INFINITY;
    let mut t = 0;
    while t + 1 < n {
        let mut pair = if t == 0 { 1.0 + rho(1) } else { rho(t) + rho(t + 1) };
        if pair <= 0.0 {
            break;
        }
        if pair > prev_pair {
            pair = prev_pair;
        }
        prev_pair = pair;
        sum_pairs += pair;
        t += 2;
    }
    // tau = -1 + 2 * sum of pairs (rho_0 = 1 is counted in the first pair)
    let tau = (-1.0 + 2.0 * sum_pairs).max(1.0 / (total.log10().max(1.0)));
    total / tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn gaussian_target_moments() {
        let cfg = SamplerConfig::default();
        let s = rwm_sample(|p: &Point| -0.5 * p.norm2(), Point::new(1.0, -1.0), 1.0, &cfg, &mut seeded(11)).unwrap();
        assert_eq!(s.chains.len(), 4);
        assert!(s.chains.iter().all(|c| c.len() == cfg.n_keep));
        let n = s.n_draws() as f64;
        let mx = s.draws().map(|p| p.x).sum::<f64>() / n;
        let my = s.draws().map(|p| p.y).sum::<f64>() / n;
        assert!(mx.abs() < 5.0 / s.ess.0.sqrt(), "{mx} ess {}", s.ess.0);
        assert!(my.abs() < 5.0 / s.ess.1.sqrt(), "{my}");
        assert!(s.max_rhat() < 1.05, "{:?}", s.r_hat);
        assert!(s.acceptance_rate > 0.15 && s.acceptance_rate < 0.35);
    }

    #[test]
    fn gaussian_target_covariance() {
        let cfg = SamplerConfig {
            n_keep: 25_000,
            ..Default::default()
        };
        let s = rwm_sample(|p: &Point| -0.5 * p.norm2(), Point::ORIGIN, 1.0, &cfg, &mut seeded(12)).unwrap();
        let n = s.n_draws() as f64;
        let mx = s.draws().map(|p| p.x).sum::<f64>() / n;
        let my = s.draws().map(|p| p.y).sum::<f64>() / n;
        let vxx = s.draws().map(|p| (p.x - mx).powi(2)).sum::<f64>() / n;
        let vyy = s.draws().map(|p| (p.y - my).powi(2)).sum::<f64>() / n;
        let vxy = s.draws().map(|p| (p.x - mx) * (p.y - my)).sum::<f64>() / n;
        assert!(
            (vxx - 1.0).abs() < 0.05 && (vyy - 1.0).abs() < 0.05 && vxy.abs() < 0.05,
            "{vxx} {vyy} {vxy}"
        );
    }

    #[test]
    fn anisotropic_target_gets_shaped_proposal() {
        // sd 0.01 along x, 10 along y, correlated.
        let lt = |v: &[f64; 2]| {
            let (a, b) = (v[0] + v[1] * 1e-3, v[1]);
            -0.5 * (a * a / 1e-4 + b * b / 100.0)
        };
        let set = rwm_sample_nd(lt, [0.0, 0.0], 0.1, &SamplerConfig::default(), &mut seeded(13)).unwrap();
        let ys: Vec<Vec<f64>> = set.coordinate(1);
        let ess = effective_sample_size(&ys);
        assert!(ess > 400.0, "{ess} {}", set.acceptance_rate);
        assert!(split_rhat(&ys) < 1.05);
    }

    #[test]
    fn non_finite_init_is_rejected() {
        let r = rwm_sample(
            |_: &Point| f64::NEG_INFINITY,
            Point::ORIGIN,
            1.0,
            &SamplerConfig::default(),
            &mut seeded(0),
        );
        assert!(matches!(r, Err(Error::NonFiniteInit)));
    }

    #[test]
    fn rhat_flags_disjoint_chains() {
        let a: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 10.0).collect();
        assert!(split_rhat(&[a.clone(), b]) > 2.0);
        assert!(split_rhat(&[a.clone(), a]) < 1.01);
    }

    #[test]
    fn ess_of_iid_draws() {
        let mut rng = seeded(14);
        let chains: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let ess = effective_sample_size(&chains);
        assert!(ess > 3000.0 && ess < 5000.0, "{ess}");
    }

    #[test]
    fn ess_of_ar1() {
        // AR(1) with phi = 0.9 has integrated autocorrelation time (1 + phi)/(1 - phi) = 19.
        let mut rng = seeded(15);
        let phi: f64 = 0.9;
        let chains: Vec<Vec<f64>> = (0..4)
            .map(|_| {
                let mut x = 0.0;
                (0..50_000)
                    .map(|_| {
                        let e: f64 = StandardNormal.sample(&mut rng);
                        x = phi * x + (1.0 - phi * phi).sqrt() * e;
                        x
                    })
                    .collect()
            })
            .collect();
        let ess = effective_sample_size(&chains);
        let expect = 200_000.0 / 19.0;
        assert!((ess / expect - 1.0).abs() < 0.15, "{ess} vs {expect}");
    }
}

//! Gamma and Beta laws used by the strategies and the likelihoods.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Gamma law in the shape/rate parameterization: mean `alpha / beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct GammaParams {
    pub alpha: f64,
    pub beta: f64,
}

/// Beta law on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for GammaParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        GammaParams::new(r.alpha, r.beta)
    }
}

impl TryFrom<RawParams> for BetaParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        BetaParams::new(r.alpha, r.beta)
    }
}

impl GammaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_positive("gamma shape", alpha)?;
        check_positive("gamma rate", beta)?;
        Ok(GammaParams { alpha, beta })
    }

    /// Method of moments: the Gamma law with the given mean and variance.
    pub fn from_moments(mean: f64, var: f64) -> Result<Self> {
        if !(var > 0.0) || !var.is_finite() {
            return Err(Error::DegenerateVariance(var));
        }
        check_positive("mean", mean)?;
        GammaParams::new(mean * mean / var, mean / var)
    }

    pub fn mean(&self) -> f64 {
        self.alpha / self.beta
    }

    pub fn variance(&self) -> f64 {
        self.alpha / (self.beta * self.beta)
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        if x == 0.0 {
            return if self.alpha == 1.0 {
                self.beta.ln()
            } else if self.alpha < 1.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        self.alpha * self.beta.ln() - ln_gamma(self.alpha) + (self.alpha - 1.0) * x.ln() - self.beta * x
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // rand_distr uses the scale convention.
        rand_distr::Gamma::new(self.alpha, 1.0 / self.beta)
            .expect("validated parameters")
            .sample(rng)
    }
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_positive("beta alpha", alpha)?;
        check_positive("beta beta", beta)?;
        Ok(BetaParams { alpha, beta })
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.ln_kernel(x) - self.ln_norm()
    }

    /// `ln_pdf` without the normalizing constant.
    pub fn ln_kernel(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return f64::NEG_INFINITY;
        }
        let lx = if x == 0.0 { f64::NEG_INFINITY } else { x.ln() };
        let l1x = if x == 1.0 { f64::NEG_INFINITY } else { (-x).ln_1p() };
        let a = if self.alpha == 1.0 { 0.0 } else { (self.alpha - 1.0) * lx };
        let b = if self.beta == 1.0 { 0.0 } else { (self.beta - 1.0) * l1x };
        a + b
    }

    /// `ln B(alpha, beta)`.
    pub fn ln_norm(&self) -> f64 {
        ln_beta(self.alpha, self.beta)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rand_distr::Beta::new(self.alpha, self.beta)
            .expect("validated parameters")
            .sample(rng)
    }
}

pub fn sample_gamma<R: Rng + ?Sized>(params: &GammaParams, rng: &mut R) -> f64 {
    params.sample(rng)
}

pub fn sample_beta<R: Rng + ?Sized>(params: &BetaParams, rng: &mut R) -> f64 {
    params.sample(rng)
}

/// Uniform angle on `[0, 2 pi)`.
pub fn sample_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * 2.0 * PI
}

/// Sample mean and (1/(n-1)) variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    const N: usize = 1_000_000;

    fn draws(f: impl FnMut() -> f64) -> Vec<f64> {
        std::iter::repeat_with(f).take(N).collect()
    }

    #[test]
    fn gamma_4_4_mean() {
        let g = GammaParams::new(4.0, 4.0).unwrap();
        let mut rng = seeded(1);
        let (m, _) = mean_var(&draws(|| sample_gamma(&g, &mut rng)));
        assert!((m - 1.0).abs() < 0.01, "{m}");
    }

    #[test]
    fn gamma_4_2_variance() {
        let g = GammaParams::new(4.0, 2.0).unwrap();
        let mut rng = seeded(2);
        let (m, v) = mean_var(&draws(|| sample_gamma(&g, &mut rng)));
        assert!((m - 2.0).abs() < 5.0 * (1.0 / N as f64).sqrt());
        assert!((v - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn beta_1_1_is_uniform() {
        let b = BetaParams::new(1.0, 1.0).unwrap();
        let mut rng = seeded(3);
        let mut xs = draws(|| sample_beta(&b, &mut rng));
        let (m, v) = mean_var(&xs);
        assert!((m - 0.5).abs() < 0.01);
        assert!((v - 1.0 / 12.0).abs() < 5.0 * 0.089 / (N as f64).sqrt() * 1.0);
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, x)| ((i + 1) as f64 / N as f64 - x).abs().max((i as f64 / N as f64 - x).abs()))
            .fold(0.0, f64::max);
        // KS critical value at 0.01 is 1.628 / sqrt(n)
        assert!(d < 1.628 / (N as f64).sqrt(), "{d}");
    }

    #[test]
    fn beta_moments_within_five_se() {
        let b = BetaParams::new(4.0, 2.0).unwrap();
        let mut rng = seeded(4);
        let xs = draws(|| sample_beta(&b, &mut rng));
        let (m, v) = mean_var(&xs);
        let se = (b.variance() / N as f64).sqrt();
        assert!((m - b.mean()).abs() < 5.0 * se);
        // s.e. of the sample variance: sqrt((mu4 - var^2) / n), bounded by mu4 <= var (support in [0,1])
        assert!((v - b.variance()).abs() < 5.0 * (b.variance() / N as f64).sqrt());
    }

    #[test]
    fn from_moments_round_trip() {
        let g = GammaParams::from_moments(2.0, 1.0).unwrap();
        assert_eq!((g.alpha, g.beta), (4.0, 2.0));
        assert!((g.mean() - 2.0).abs() < 1e-15 && (g.variance() - 1.0).abs() < 1e-15);
        assert!(matches!(GammaParams::from_moments(2.0, 0.0), Err(Error::DegenerateVariance(_))));
    }

    #[test]
    fn ln_pdfs() {
        let g = GammaParams::new(1.0, 1.0).unwrap();
        assert_eq!(g.ln_pdf(0.0), 0.0);
        assert!((g.ln_pdf(1.0) + 1.0).abs() < 1e-14);
        let b = BetaParams::new(1.0, 1.0).unwrap();
        assert!(b.ln_pdf(0.3).abs() < 1e-14);
        let b = BetaParams::new(2.0, 3.0).unwrap();
        // 12 x (1-x)^2
        assert!((b.ln_pdf(0.25) - (12.0 * 0.25 * 0.5625f64).ln()).abs() < 1e-12);
        assert_eq!(b.ln_pdf(1.5), f64::NEG_INFINITY);
    }

    #[test]
    fn invalid_params() {
        assert!(GammaParams::new(0.0, 1.0).is_err());
        assert!(BetaParams::new(1.0, -2.0).is_err());
        assert!(serde_json::from_str::<GammaParams>(r#"{"alpha":-1,"beta":1}"#).is_err());
    }
}

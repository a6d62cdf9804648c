//! Estimators of the mean `p` and the indicator estimator of `a`.

use rand::Rng;
use rand_distr::StandardNormal;

use super::mle::mle;
use super::{Estimate, Method};
use crate::chain::{transition_counts, BinaryPath, ModelParams, RealPath};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Leading-order variance of the sample mean of `n + 1` consecutive states.
pub fn var_sample_mean(params: &ModelParams, n: u64) -> f64 {
    let (a, p) = (params.a(), params.p());
    p * (1.0 - p) / (n as f64 + 1.0) * variance_factor(a, p)
}

/// `(1 + a − 2p)/(1 − a)` below one half, `(2p − 1 + a)/(1 − a)` from one half on.
fn variance_factor(a: f64, p: f64) -> f64 {
    if p < 0.5 {
        (1.0 + a - 2.0 * p) / (1.0 - a)
    } else {
        (2.0 * p - 1.0 + a) / (1.0 - a)
    }
}

/// Sample mean `p̄` with a plug-in `â` from the MLE in the variance.
pub fn mean_estimate(path: &BinaryPath, alpha: f64) -> Result<Estimate> {
    let p = path.mean();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::DegenerateData(format!("p̄ = {p} is on the boundary")));
    }
    let a = mle(&transition_counts(path))?.params.a();
    let var = p * (1.0 - p) / (path.n() as f64 + 1.0) * variance_factor(a, p);
    Estimate::normal(Method::Mean, p, p, var.sqrt(), alpha)
}

/// Bandwidth and auxiliary Gaussian noise of the robust mean estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustConfig {
    pub bandwidth: f64,
    pub noise_seed: u64,
    pub noise: Vec<f64>,
}

impl RobustConfig {
    /// `h = (1/((n+1)√2))^{1/5}` and `n + 1` standard normal draws from `noise_seed`.
    pub fn new(n: usize, noise_seed: u64) -> Self {
        let m = n as f64 + 1.0;
        let bandwidth = (1.0 / (m * std::f64::consts::SQRT_2)).powf(0.2);
        let mut rng = stream_rng(noise_seed);
        let noise = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
        RobustConfig { bandwidth, noise_seed, noise }
    }
}

/// Kernel-weighted mean `p̃ = Σ X_t·exp(−(Y_t/h)²/2) / ((n+1)h)`.
///
/// Since `E exp(−(Y/h)²/2) = h/√(1+h²)`, the interval is centered at `p̃·√(1+h²)`. Its
/// half-width uses the sample second moment of the `X_t`.
pub fn robust_estimate(path: &BinaryPath, alpha: f64, noise_seed: u64) -> Result<Estimate> {
    let cfg = RobustConfig::new(path.n(), noise_seed);
    let h = cfg.bandwidth;
    let m = path.n() as f64 + 1.0;
    let mut weighted = 0.0;
    let mut second = 0.0;
    for (&x, &y) in path.states().iter().zip(&cfg.noise) {
        let x = x as f64;
        let u = y / h;
        weighted += x * (-0.5 * u * u).exp();
        second += x * x;
    }
    let point = weighted / (m * h);
    let center = point * (1.0 + h * h).sqrt();
    let var = (second / m) / (m * std::f64::consts::SQRT_2 * h);
    Estimate::normal(Method::Robust, point, center, var.sqrt(), alpha)
}

/// Fraction of steps on which the chain stays put, compared by exact bit equality.
pub fn indicator_point(path: &RealPath) -> f64 {
    let s = path.states();
    let stays = s.windows(2).filter(|w| w[0].to_bits() == w[1].to_bits()).count();
    stays as f64 / path.n() as f64
}

/// The indicator estimator of `a` for uniform-marginal chains.
pub fn indicator_estimate(path: &RealPath, alpha: f64) -> Result<Estimate> {
    let a = indicator_point(path);
    if a <= 0.0 || a >= 1.0 {
        return Err(Error::DegenerateData(format!("indicator estimate {a} is on the boundary")));
    }
    let se = (a * (1.0 - a) / path.n() as f64).sqrt();
    Estimate::normal(Method::Indicator, a, a, se, alpha)
}

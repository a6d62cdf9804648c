//! Likelihood, the MLE of `(a, p)` and interval estimators of `a` and `p`.

mod likelihood;
mod mean;
mod mle;
mod quartic;

use serde::Serialize;

pub use likelihood::{loglik, score};
pub use mean::{
    indicator_estimate, indicator_point, mean_estimate, robust_estimate, var_sample_mean,
    RobustConfig,
};
pub use mle::{
    asymptotic_cov, boundary_estimate, ci_half_width, mle, mle_ci, mle_half, CovMatrix, MleFit,
    Parameter,
};
pub use quartic::{profile_a, quartic_coefficients, real_roots, MleWorkspace};

use crate::error::{Error, Result};
use crate::special::z_two_sided;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mle,
    Mean,
    Robust,
    MleHalf,
    Indicator,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mle => "mle",
            Method::Mean => "mean",
            Method::Robust => "robust",
            Method::MleHalf => "mle-half",
            Method::Indicator => "indicator",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(Method::Mle),
            "mean" => Ok(Method::Mean),
            "robust" => Ok(Method::Robust),
            "mle-half" => Ok(Method::MleHalf),
            "indicator" => Ok(Method::Indicator),
            other => Err(Error::Parse(format!("unknown estimation method '{other}'"))),
        }
    }
}

/// A point estimate with a symmetric normal-theory interval around `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub method: Method,
    pub point: f64,
    /// Center of the interval; differs from `point` only for the robust estimator.
    pub center: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub alpha: f64,
}

impl Estimate {
    pub(crate) fn normal(method: Method, point: f64, center: f64, stderr: f64, alpha: f64) -> Result<Self> {
        let z = z_two_sided(alpha)?;
        Ok(Estimate {
            method,
            point,
            center,
            stderr,
            ci_low: center - z * stderr,
            ci_high: center + z * stderr,
            alpha,
        })
    }

    pub fn length(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

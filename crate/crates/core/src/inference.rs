//! Likelihood-ratio test of independence.

use serde::Serialize;

use crate::chain::{transition_counts, BinaryPath, ModelParams, Regime};
use crate::error::{Error, Result};
use crate::estimation::mle;
use crate::special::{chisq1_quantile, chisq1_sf};

/// Raw statistics below this are treated as a failed maximization, not as noise.
pub const NEGATIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    FailToReject,
}

impl Decision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Decision::Reject => "reject",
            Decision::FailToReject => "fail_to_reject",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrtResult {
    /// `−2 log Λ`, clamped at zero.
    pub statistic: f64,
    /// `Λ` itself, the ratio of restricted to unrestricted maximum likelihoods.
    pub lambda_raw: f64,
    /// Regime of the unrestricted fit.
    pub regime: Regime,
    pub df: u32,
    pub threshold: f64,
    pub p_value: f64,
    pub decision: Decision,
    pub clamped: bool,
}

/// True on the independence set: `a = p` below one half, `a = 1 − p` from one half on.
pub fn is_independence_point(params: &ModelParams) -> bool {
    let (a, p) = (params.a(), params.p());
    if p < 0.5 {
        a == p
    } else {
        a == 1.0 - p
    }
}

/// Wilks test of `H₀: the states are i.i.d. Bernoulli(p)` against the full model.
pub fn lrt(path: &BinaryPath, alpha: f64) -> Result<LrtResult> {
    let threshold = chisq1_quantile(alpha)?;
    let counts = transition_counts(path);
    let m = counts.n() + 1;
    let x = counts.ones();
    if x == 0 || x == m {
        return Err(Error::DegenerateData(format!(
            "{x} ones in {m} states: the null MLE is on the boundary"
        )));
    }
    let p0 = x as f64 / m as f64;
    let ll0 = x as f64 * p0.ln() + (m - x) as f64 * (1.0 - p0).ln();
    let fit = mle(&counts)?;
    let raw = -2.0 * (ll0 - fit.loglik);
    if raw < -NEGATIVE_TOLERANCE {
        return Err(Error::NegativeStatistic(raw));
    }
    let clamped = raw < 0.0;
    let statistic = raw.max(0.0);
    let decision = if statistic >= threshold { Decision::Reject } else { Decision::FailToReject };
    Ok(LrtResult {
        statistic,
        lambda_raw: (ll0 - fit.loglik).exp(),
        regime: fit.params.regime(),
        df: 1,
        threshold,
        p_value: chisq1_sf(statistic),
        decision,
        clamped,
    })
}

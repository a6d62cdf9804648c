use crate::chain::{ModelParams, Regime, TransitionCounts};
use crate::error::{Error, Result};

/// `count · ln(x)`, treating `0 · ln(anything)` as 0.
fn weighted_ln(count: u64, x: f64, what: &str) -> Result<f64> {
    if count == 0 {
        return Ok(0.0);
    }
    if !(x > 0.0) {
        return Err(Error::Eval(format!("log argument {what} = {x} is not positive")));
    }
    Ok(count as f64 * x.ln())
}

/// Log-likelihood under the `p ≤ 1/2` transition matrix, valid for `q ∈ (0, 1/2]`.
pub(crate) fn loglik_less(c: &TransitionCounts, a: f64, q: f64) -> Result<f64> {
    let x0 = c.x0() as f64;
    let mut l = x0 * q.ln() + (1.0 - x0) * (1.0 - q).ln();
    l += weighted_ln(c.n00(), (a * q + 1.0 - 2.0 * q) / (1.0 - q), "p00")?;
    l += weighted_ln(c.n01(), q * (1.0 - a) / (1.0 - q), "p01")?;
    l += weighted_ln(c.n10(), 1.0 - a, "p10")?;
    l += weighted_ln(c.n11(), a, "p11")?;
    Ok(l)
}

/// Log-likelihood under the `p ≥ 1/2` transition matrix.
fn loglik_geq(c: &TransitionCounts, a: f64, p: f64) -> Result<f64> {
    let x0 = c.x0() as f64;
    let mut l = x0 * p.ln() + (1.0 - x0) * (1.0 - p).ln();
    l += weighted_ln(c.n00(), a, "p00")?;
    l += weighted_ln(c.n01(), 1.0 - a, "p01")?;
    l += weighted_ln(c.n10(), (1.0 - p) * (1.0 - a) / p, "p10")?;
    l += weighted_ln(c.n11(), (a * (1.0 - p) + 2.0 * p - 1.0) / p, "p11")?;
    Ok(l)
}

/// Log-likelihood of a path with the given sufficient statistics, including the
/// initial-state term `x0·ln p + (1 − x0)·ln(1 − p)`.
pub fn loglik(counts: &TransitionCounts, params: &ModelParams) -> Result<f64> {
    let (a, p) = (params.a(), params.p());
    match params.regime() {
        Regime::LessHalf => loglik_less(counts, a, p),
        Regime::GeqHalf => loglik_geq(counts, a, p),
        Regime::Half => {
            let stay = counts.n00() + counts.n11();
            let switch = counts.n01() + counts.n10();
            Ok(0.5f64.ln() + weighted_ln(stay, a, "a")? + weighted_ln(switch, 1.0 - a, "1 - a")?)
        }
    }
}

/// Score of the `p ≤ 1/2` likelihood at `(a, q)`.
pub(crate) fn score_less(c: &TransitionCounts, a: f64, q: f64) -> Result<(f64, f64)> {
    let (x0, n00, n01, n10, n11) = (
        c.x0() as f64,
        c.n00() as f64,
        c.n01() as f64,
        c.n10() as f64,
        c.n11() as f64,
    );
    let d = a * q + 1.0 - 2.0 * q;
    if !(d > 0.0) || !(a > 0.0 && a < 1.0) || !(q > 0.0 && q < 1.0) {
        return Err(Error::Eval(format!("score undefined at a = {a}, p = {q}")));
    }
    let da = n00 * q / d - n01 / (1.0 - a) - n10 / (1.0 - a) + n11 / a;
    let dp = x0 / q - (1.0 - x0) / (1.0 - q) + n00 * (a - 2.0) / d + n00 / (1.0 - q) + n01 / q
        + n01 / (1.0 - q);
    Ok((da, dp))
}

/// Gradient `(∂ℒ/∂a, ∂ℒ/∂p)` of [`loglik`].
///
/// The `p > 1/2` branch is the relabeled `p < 1/2` branch, so its score is taken on the
/// flipped counts with the sign of the `p` component reversed. At `p = 1/2` the
/// left-hand derivative is returned.
pub fn score(counts: &TransitionCounts, params: &ModelParams) -> Result<(f64, f64)> {
    let (a, p) = (params.a(), params.p());
    match params.regime() {
        Regime::LessHalf | Regime::Half => score_less(counts, a, p),
        Regime::GeqHalf => {
            let (da, dq) = score_less(&counts.flipped(), a, 1.0 - p)?;
            Ok((da, -dq))
        }
    }
}

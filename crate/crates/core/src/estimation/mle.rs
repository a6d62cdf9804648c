//! Maximum likelihood for `(a, p)` over both regimes.

use serde::Serialize;

use super::likelihood::loglik_less;
use super::quartic::{admissible_roots, profile_a_with, quartic_coefficients};
use super::{Estimate, Method};
use crate::chain::{ModelParams, Regime, TransitionCounts};
use crate::error::{Error, Result};
use crate::special::z_two_sided;

const TIE_TOL: f64 = 1e-12;
const EDGE: f64 = 1e-6;
const FALLBACK_GRID: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    A,
    P,
}

impl Parameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parameter::A => "a",
            Parameter::P => "p",
        }
    }

    fn index(&self) -> usize {
        match self {
            Parameter::A => 0,
            Parameter::P => 1,
        }
    }
}

/// Asymptotic covariance of `√(n+1)(θ̂ − θ)`, ordered `(a, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovMatrix {
    entries: [[f64; 2]; 2],
}

impl CovMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    pub fn variance(&self, which: Parameter) -> f64 {
        let k = which.index();
        self.entries[k][k]
    }

    /// Smallest eigenvalue of the symmetric matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let [[x, y], [_, z]] = self.entries;
        let mid = 0.5 * (x + z);
        let rad = (0.25 * (x - z) * (x - z) + y * y).sqrt();
        mid - rad
    }
}

pub fn asymptotic_cov(params: &ModelParams) -> Result<CovMatrix> {
    let (a, p) = (params.a(), params.p());
    let entries = match params.regime() {
        Regime::LessHalf => [
            [a * (1.0 - a) / p, a * (1.0 - p)],
            [a * (1.0 - p), p * (1.0 - p) * (a + 1.0 - 2.0 * p) / (1.0 - a)],
        ],
        Regime::GeqHalf => [
            [a * (1.0 - a) / (1.0 - p), -a * p],
            [-a * p, p * (1.0 - p) * (2.0 * p - 1.0 + a) / (1.0 - a)],
        ],
        Regime::Half => {
            return Err(Error::Domain(
                "asymptotic covariance is not defined at p = 1/2".into(),
            ))
        }
    };
    Ok(CovMatrix { entries })
}

/// Closed-form interval half-width `z_{α/2}·√(Σ⁻¹_kk/(n+1))` at known parameters.
///
/// The diagonal of Σ⁻¹ is continuous at `p = 1/2`, so the common limit is used there.
pub fn ci_half_width(params: &ModelParams, n: u64, alpha: f64, which: Parameter) -> Result<f64> {
    let (a, p) = (params.a(), params.p());
    let var = match which {
        Parameter::A => a * (1.0 - a) / p.min(1.0 - p),
        Parameter::P => p * (1.0 - p) * (a + (1.0 - 2.0 * p).abs()) / (1.0 - a),
    };
    Ok(z_two_sided(alpha)? * (var / (n as f64 + 1.0)).sqrt())
}

/// The maximizer of the likelihood with its asymptotic covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleFit {
    pub params: ModelParams,
    /// Absent when `p̂ = 1/2`.
    pub cov: Option<CovMatrix>,
    pub loglik: f64,
    /// True when the winning branch had no admissible quartic root and its profile was
    /// searched numerically.
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    a: f64,
    /// `p` on the branch's own `p < 1/2` scale.
    q: f64,
    ll: f64,
    fallback: bool,
}

fn better(x: Option<Candidate>, y: Candidate) -> Option<Candidate> {
    match x {
        Some(c) if c.ll >= y.ll => Some(c),
        _ => Some(y),
    }
}

/// Best stationary point of the `p < 1/2` likelihood on these counts.
fn branch_best(counts: &TransitionCounts) -> Option<Candidate> {
    let ws = quartic_coefficients(counts);
    let mut best = None;
    for q in admissible_roots(counts, &ws) {
        let Ok(a) = profile_a_with(&ws, q) else { continue };
        if !(a > 0.0 && a < 1.0) {
            continue;
        }
        if let Ok(ll) = loglik_less(counts, a, q) {
            best = better(best, Candidate { a, q, ll, fallback: false });
        }
    }
    best
}

/// `argmax_a` of the `p < 1/2` likelihood at fixed `q`; the log-likelihood is concave in `a`.
fn best_a(counts: &TransitionCounts, q: f64) -> f64 {
    let (n00, sw, n11) = (
        counts.n00() as f64,
        (counts.n01() + counts.n10()) as f64,
        counts.n11() as f64,
    );
    let da = |a: f64| n00 * q / (a * q + 1.0 - 2.0 * q) - sw / (1.0 - a) + n11 / a;
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    if da(lo) <= 0.0 {
        return lo;
    }
    if da(hi) >= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if da(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn profile_ll(counts: &TransitionCounts, q: f64) -> f64 {
    loglik_less(counts, best_a(counts, q), q).unwrap_or(f64::NEG_INFINITY)
}

/// Grid plus golden-section search of the profile likelihood over `q ∈ (ε, 1/2 − ε)`.
fn branch_fallback(counts: &TransitionCounts) -> Option<Candidate> {
    let (lo, hi) = (EDGE, 0.5 - EDGE);
    let step = (hi - lo) / (FALLBACK_GRID - 1) as f64;
    let grid: Vec<f64> = (0..FALLBACK_GRID).map(|i| lo + step * i as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&q| profile_ll(counts, q)).collect();
    let k = (0..FALLBACK_GRID)
        .max_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal))?;
    if !vals[k].is_finite() {
        return None;
    }
    let (mut x0, mut x3) = (grid[k.saturating_sub(1)], grid[(k + 1).min(FALLBACK_GRID - 1)]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = x3 - r * (x3 - x0);
    let mut x2 = x0 + r * (x3 - x0);
    let (mut f1, mut f2) = (profile_ll(counts, x1), profile_ll(counts, x2));
    for _ in 0..200 {
        if x3 - x0 <= 1e-15 {
            break;
        }
        if f1 < f2 {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + r * (x3 - x0);
            f2 = profile_ll(counts, x2);
        } else {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - r * (x3 - x0);
            f1 = profile_ll(counts, x1);
        }
    }
    let q = 0.5 * (x0 + x3);
    let a = best_a(counts, q);
    let ll = loglik_less(counts, a, q).ok()?;
    Some(Candidate { a, q, ll, fallback: true })
}

/// Global maximizer of the likelihood over the union of the three regimes.
///
/// The `p > 1/2` branch is searched as the `p < 1/2` branch of the relabeled counts and
/// mapped back with `p ↦ 1 − p`, so relabeling the data maps `(â, p̂)` to `(â, 1 − p̂)`.
/// Returns `DegenerateData` when a row of the transition table is empty or the optimum
/// sits on the boundary of the parameter space; see [`boundary_estimate`].
pub fn mle(counts: &TransitionCounts) -> Result<MleFit> {
    if counts.has_empty_row() {
        return Err(Error::DegenerateData(
            "a row of the transition table is empty; the MLE is on the boundary".into(),
        ));
    }
    let flipped = counts.flipped();
    // a branch without an admissible quartic root is searched along its profile instead
    let search = |c: &TransitionCounts| branch_best(c).or_else(|| branch_fallback(c));
    let less = search(counts);
    let geq = search(&flipped);

    let n = counts.n() as f64;
    let stay = counts.n00() + counts.n11();
    let switch = counts.n01() + counts.n10();
    let a_half = stay as f64 / n;
    let half_ll = if a_half > 0.0 && a_half < 1.0 {
        Some(0.5f64.ln() + stay as f64 * a_half.ln() + switch as f64 * (1.0 - a_half).ln())
    } else {
        None
    };

    enum Pick {
        Less(Candidate),
        Geq(Candidate),
        Half,
    }
    let pick = match (less, geq) {
        (Some(l), Some(g)) if (l.ll - g.ll).abs() <= TIE_TOL && half_ll.is_some() => Pick::Half,
        (l, g) => {
            let mut pick = None;
            let mut best = f64::NEG_INFINITY;
            if let Some(l) = l {
                best = l.ll;
                pick = Some(Pick::Less(l));
            }
            if let Some(g) = g {
                if g.ll > best {
                    best = g.ll;
                    pick = Some(Pick::Geq(g));
                }
            }
            if let Some(h) = half_ll {
                if h > best + TIE_TOL {
                    pick = Some(Pick::Half);
                }
            }
            pick.ok_or_else(|| Error::Eval("no admissible likelihood maximizer found".into()))?
        }
    };

    let (a, p, ll, fallback) = match pick {
        Pick::Less(c) => (c.a, c.q, c.ll, c.fallback),
        Pick::Geq(c) => (c.a, 1.0 - c.q, c.ll, c.fallback),
        Pick::Half => (a_half, 0.5, half_ll.unwrap_or(f64::NAN), false),
    };
    if !(a > 1e-9 && a < 1.0 - 1e-9 && p > EDGE * 0.5 && p < 1.0 - EDGE * 0.5) {
        return Err(Error::DegenerateData(format!(
            "likelihood maximum on the boundary (a = {a}, p = {p})"
        )));
    }
    let params = ModelParams::new(a, p)?;
    let cov = asymptotic_cov(&params).ok();
    Ok(MleFit { params, cov, loglik: ll, fallback })
}

/// Boundary estimate `(â, p̄)` reported when [`mle`] returns `DegenerateData`.
///
/// `â = (n00 + n11)/n` and `p̄` is the fraction of ones; either may be 0 or 1.
pub fn boundary_estimate(counts: &TransitionCounts) -> (f64, f64) {
    let a = (counts.n00() + counts.n11()) as f64 / counts.n() as f64;
    let p = counts.ones() as f64 / (counts.n() + 1) as f64;
    (a, p)
}

/// Wald intervals for `a` and `p` from the MLE and its asymptotic covariance.
pub fn mle_ci(counts: &TransitionCounts, alpha: f64) -> Result<(Estimate, Estimate)> {
    let fit = mle(counts)?;
    let cov = fit.cov.ok_or_else(|| {
        Error::Domain("p̂ = 1/2: use mle_half for the interval of a".into())
    })?;
    let m = counts.n() as f64 + 1.0;
    let est = |which: Parameter, point: f64| {
        let se = (cov.variance(which) / m).sqrt();
        Estimate::normal(Method::Mle, point, point, se, alpha)
    };
    Ok((est(Parameter::A, fit.params.a())?, est(Parameter::P, fit.params.p())?))
}

/// The `p = 1/2` estimator `â = (n00 + n11)/n` with its normal interval.
pub fn mle_half(counts: &TransitionCounts, alpha: f64) -> Result<Estimate> {
    let (a, _) = boundary_estimate(counts);
    if a <= 0.0 || a >= 1.0 {
        return Err(Error::DegenerateData(format!("â = {a} is on the boundary")));
    }
    let se = (a * (1.0 - a) / (counts.n() as f64 + 1.0)).sqrt();
    Estimate::normal(Method::MleHalf, a, a, se, alpha)
}

/// Residual `max(|∂ℒ/∂a|, |∂ℒ/∂p|)` at a fitted point, on the branch it came from.
#[cfg(test)]
fn score_residual(counts: &TransitionCounts, params: &ModelParams) -> Result<f64> {
    let (da, dp) = match params.regime() {
        Regime::LessHalf => super::likelihood::score_less(counts, params.a(), params.p())?,
        _ => super::likelihood::score_less(&counts.flipped(), params.a(), 1.0 - params.p())?,
    };
    Ok(da.abs().max(dp.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{make_params, simulate_bernoulli_chain, transition_counts};

    fn counts(x0: u8, n00: u64, n01: u64, n10: u64, n11: u64) -> TransitionCounts {
        TransitionCounts::new(x0, n00, n01, n10, n11).unwrap()
    }

    #[test]
    fn recovers_simulated_parameters() {
        let truth = make_params(0.7, 0.3).unwrap();
        let path = simulate_bernoulli_chain(&truth, 4999, 11).unwrap();
        let c = transition_counts(&path);
        let fit = mle(&c).unwrap();
        // sd of p̂ is about √(0.21·1.0/0.3/5000) ≈ 0.0118
        assert!((fit.params.p() - 0.3).abs() < 3.0 * 0.0118, "{fit:?}");
        assert!((fit.params.a() - 0.7).abs() < 0.05);
        assert!(score_residual(&c, &fit.params).unwrap() < 1e-6);
        assert!(!fit.fallback);
    }

    #[test]
    fn profile_agrees_with_fit() {
        let truth = make_params(0.35, 0.2).unwrap();
        let c = transition_counts(&simulate_bernoulli_chain(&truth, 2000, 3).unwrap());
        let fit = mle(&c).unwrap();
        assert_eq!(fit.params.regime(), Regime::LessHalf);
        let a = super::super::profile_a(&c, fit.params.p()).unwrap();
        assert!((a - fit.params.a()).abs() < 1e-9);
    }

    #[test]
    fn upper_regime_and_flip_equivariance() {
        for (a, p, seed) in [(0.6, 0.8, 1u64), (0.2, 0.3, 2), (0.9, 0.55, 5)] {
            let truth = make_params(a, p).unwrap();
            let c = transition_counts(&simulate_bernoulli_chain(&truth, 3000, seed).unwrap());
            let fit = mle(&c).unwrap();
            let ff = mle(&c.flipped()).unwrap();
            assert_eq!(fit.params.a(), ff.params.a());
            assert!((ff.params.p() - (1.0 - fit.params.p())).abs() <= f64::EPSILON);
            assert_eq!(fit.loglik, ff.loglik);
            assert!(score_residual(&c, &fit.params).unwrap() < 1e-6);
        }
    }

    #[test]
    fn nearly_balanced_counts_sit_near_one_half() {
        // n00 = n11 and n01 = n10: only the initial state breaks the symmetry
        let c = counts(0, 300, 100, 100, 300);
        let fit = mle(&c).unwrap();
        let n = c.n() as f64;
        assert!((fit.params.p() - 0.5).abs() < 5.0 / n, "{fit:?}");
        assert!((fit.params.a() - 600.0 / 800.0).abs() < 5.0 / n);
    }

    #[test]
    fn empty_rows_are_degenerate() {
        for c in [counts(0, 3, 0, 0, 0), counts(1, 0, 0, 0, 4), counts(0, 0, 1, 0, 0)] {
            assert!(matches!(mle(&c), Err(Error::DegenerateData(_))));
        }
        assert_eq!(boundary_estimate(&counts(0, 3, 0, 0, 0)), (1.0, 0.0));
    }

    #[test]
    fn alternating_path_is_degenerate() {
        // no stays: â = 0
        let c = counts(1, 0, 2, 2, 0);
        assert!(matches!(mle(&c), Err(Error::DegenerateData(_))));
        assert!(matches!(mle_half(&c, 0.05), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn missing_zero_stays_use_the_profile_search() {
        // n00 = 0 makes the quartic vanish on the lower branch
        for c in [counts(0, 0, 4, 4, 12), counts(1, 0, 6, 7, 1), counts(1, 2, 6, 7, 0)] {
            let fit = match mle(&c) {
                Ok(f) => f,
                Err(Error::DegenerateData(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
            for i in 1..2000 {
                let p = i as f64 / 2000.0;
                for j in 1..1000 {
                    let a = j as f64 / 1000.0;
                    let ll = crate::estimation::loglik(&c, &make_params(a, p).unwrap()).unwrap();
                    if ll > best.0 {
                        best = (ll, a, p);
                    }
                }
            }
            assert!(fit.loglik >= best.0 - 1e-9, "{fit:?} vs {best:?}");
        }
    }

    #[test]
    fn covariance_by_hand() {
        let cov = asymptotic_cov(&make_params(0.5, 0.25).unwrap()).unwrap();
        let want = [[1.0, 0.375], [0.375, 0.375]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((cov.get(i, j) - want[i][j]).abs() < 1e-15);
            }
        }
        assert!(matches!(
            asymptotic_cov(&make_params(0.5, 0.5).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn covariance_symmetric_and_psd_on_grid() {
        for i in 1..10 {
            for j in 1..10 {
                if j == 5 {
                    continue;
                }
                let (a, p) = (i as f64 / 10.0, j as f64 / 10.0);
                let cov = asymptotic_cov(&make_params(a, p).unwrap()).unwrap();
                assert_eq!(cov.get(0, 1), cov.get(1, 0));
                assert!(cov.get(0, 0) > 0.0 && cov.get(1, 1) > 0.0);
                assert!(cov.min_eigenvalue() > -1e-10, "({a}, {p})");
                if j < 5 {
                    let up = asymptotic_cov(&make_params(a, 1.0 - p).unwrap()).unwrap();
                    assert!((cov.get(1, 1) - up.get(1, 1)).abs() < 1e-14);
                    assert!((cov.get(0, 0) - up.get(0, 0)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn half_width_is_symmetric_and_matches_covariance() {
        for i in 1..10 {
            for j in 1..5 {
                let (a, p) = (i as f64 / 10.0, j as f64 / 10.0);
                let lo = make_params(a, p).unwrap();
                let hi = make_params(a, 1.0 - p).unwrap();
                for which in [Parameter::A, Parameter::P] {
                    let l = ci_half_width(&lo, 999, 0.05, which).unwrap();
                    let h = ci_half_width(&hi, 999, 0.05, which).unwrap();
                    assert!((l - h).abs() <= 1e-14 * l);
                    let cov = asymptotic_cov(&lo).unwrap();
                    let want = 1.959_963_984_540_054 * (cov.variance(which) / 1000.0).sqrt();
                    assert!((l - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mle_half_examples() {
        let c = counts(0, 25, 25, 25, 25);
        let e = mle_half(&c, 0.05).unwrap();
        assert_eq!(e.point, 0.5);
        assert!((e.stderr - (0.25f64 / 101.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.method, Method::MleHalf);
    }

    #[test]
    fn intervals_contain_the_point() {
        let truth = make_params(0.7, 0.3).unwrap();
        let c = transition_counts(&simulate_bernoulli_chain(&truth, 4999, 8).unwrap());
        let (ea, ep) = mle_ci(&c, 0.05).unwrap();
        assert!(ea.covers(ea.point) && ep.covers(ep.point));
        // 2·1.96·√(Σ⁻¹/(n+1)) at the truth: 0.0465 and 0.0486
        assert!((ea.length() - 0.0465).abs() < 0.005, "{}", ea.length());
        assert!((ep.length() - 0.0486).abs() < 0.005, "{}", ep.length());
    }
}

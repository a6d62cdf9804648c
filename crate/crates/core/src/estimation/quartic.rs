//! The quartic profile equation for `p` on the `p < 1/2` branch.
//!
//! Solving the `p`-score for `a` gives `â(p) = (p(λ₁ − 2p) − λ₂) / (p(λ₃ − p))`;
//! substituting into the `a`-score and clearing denominators leaves a quartic in `p`.
//! The coefficients are integer polynomials in the counts and are evaluated exactly in
//! `i128` before conversion, since the leading terms cancel heavily at `n ≈ 10⁴`.

use nalgebra::Matrix4;
use serde::Serialize;

use super::likelihood::score_less;
use crate::chain::TransitionCounts;
use crate::error::{Error, Result};

/// The λ constants and the quartic coefficients `c[k]` of `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleWorkspace {
    pub lambda1: u64,
    pub lambda2: u64,
    pub lambda3: u64,
    pub lambda4: u64,
    pub lambda5: u64,
    /// `coeffs[k]` multiplies `p^k`.
    pub coeffs: [i128; 5],
}

impl MleWorkspace {
    pub fn coeffs_f64(&self) -> [f64; 5] {
        self.coeffs.map(|c| c as f64)
    }

    /// Horner evaluation.
    pub fn eval(&self, p: f64) -> f64 {
        self.coeffs_f64().iter().rev().fold(0.0, |acc, &c| acc * p + c)
    }

    fn eval_derivative(&self, p: f64) -> f64 {
        let c = self.coeffs_f64();
        ((4.0 * c[4] * p + 3.0 * c[3]) * p + 2.0 * c[2]) * p + c[1]
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

pub fn quartic_coefficients(counts: &TransitionCounts) -> MleWorkspace {
    let x0 = counts.x0() as u64;
    let (n00, n01, n11, n) = (counts.n00(), counts.n01(), counts.n11(), counts.n());
    let l1 = 2 * x0 + 1 + n00 + 2 * n01;
    let l2 = x0 + n01;
    let l3 = x0 + n00 + n01;
    let l4 = 2 * n - n00 + n11;
    let l5 = n - n00;

    let (n, n11) = (n as i128, n11 as i128);
    let (l1i, l2i, l3i, l4i, l5i) = (l1 as i128, l2 as i128, l3 as i128, l4 as i128, l5 as i128);

    let c4 = 4 * n - 2 * l4i + 2 * n11;
    let c3 = 2 * l3i * l4i - 4 * n * l1i + l1i * l4i + 2 * l5i - n11 - 4 * n11 * l3i;
    let c2 = n * l1i * l1i + 4 * n * l2i
        - l1i * l3i * l4i
        - l2i * l4i
        - 2 * l3i * l5i
        - l1i * l5i
        + 2 * n11 * l3i
        + 2 * n11 * l3i * l3i;
    let c1 = l1i * l3i * l5i - 2 * n * l1i * l2i + l2i * l3i * l4i + l2i * l5i - n11 * l3i * l3i;
    let c0 = n * l2i * l2i - l2i * l3i * l5i;

    MleWorkspace {
        lambda1: l1,
        lambda2: l2,
        lambda3: l3,
        lambda4: l4,
        lambda5: l5,
        coeffs: [c0, c1, c2, c3, c4],
    }
}

/// Profiled `â(p)` on the `p < 1/2` branch.
pub fn profile_a(counts: &TransitionCounts, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::Domain(format!("profile_a needs p in (0, 1/2), got {p}")));
    }
    let ws = quartic_coefficients(counts);
    profile_a_with(&ws, p)
}

pub(crate) fn profile_a_with(ws: &MleWorkspace, p: f64) -> Result<f64> {
    let den = p * (ws.lambda3 as f64 - p);
    if den == 0.0 {
        return Err(Error::Eval(format!("profile denominator vanishes at p = {p}")));
    }
    Ok((p * (ws.lambda1 as f64 - 2.0 * p) - ws.lambda2 as f64) / den)
}

/// Real roots of `c4 p⁴ + … + c0` from the eigenvalues of the companion matrix.
///
/// Keeps eigenvalues whose imaginary part is below `1e-9·max(1, |z|)`.
pub fn real_roots(coeffs: [f64; 5]) -> Vec<f64> {
    // strip vanishing leading coefficients
    let mut deg = 4;
    while deg > 0 && coeffs[deg] == 0.0 {
        deg -= 1;
    }
    match deg {
        0 => Vec::new(),
        1 => vec![-coeffs[0] / coeffs[1]],
        _ => {
            let lead = coeffs[deg];
            let mut m = Matrix4::<f64>::zeros();
            // companion matrix of the monic polynomial, padded with zero roots for deg < 4
            for k in 0..deg {
                m[(0, deg - 1 - k)] = -coeffs[k] / lead;
            }
            for i in 1..deg {
                m[(i, i - 1)] = 1.0;
            }
            let eig = m.complex_eigenvalues();
            let mut roots: Vec<f64> = eig
                .iter()
                .take(4)
                .filter(|z| z.im.abs() < 1e-9 * z.re.abs().max(1.0))
                .map(|z| z.re)
                .collect();
            if deg < 4 {
                // the padding contributes 4 − deg spurious zeros
                let mut drop = 4 - deg;
                roots.retain(|&r| {
                    if drop > 0 && r == 0.0 {
                        drop -= 1;
                        false
                    } else {
                        true
                    }
                });
            }
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            roots
        }
    }
}

/// `∂ℒ/∂a` along the profile curve `a = â(p)`; zero exactly at stationary points.
pub(crate) fn reduced_score(counts: &TransitionCounts, ws: &MleWorkspace, p: f64) -> Option<f64> {
    let a = profile_a_with(ws, p).ok()?;
    if !(a > 0.0 && a < 1.0) {
        return None;
    }
    score_less(counts, a, p).ok().map(|(da, _)| da)
}

/// Roots of the quartic inside `(0, 1/2)`, refined against the likelihood score.
pub(crate) fn admissible_roots(counts: &TransitionCounts, ws: &MleWorkspace) -> Vec<f64> {
    if ws.is_trivial() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for r in real_roots(ws.coeffs_f64()) {
        if !(r > -1e-6 && r < 0.5 + 1e-6) {
            continue;
        }
        let r = polish(counts, ws, r);
        if r > 0.0 && r < 0.5 {
            out.push(r);
        }
    }
    out.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    out
}

fn polish(counts: &TransitionCounts, ws: &MleWorkspace, mut r: f64) -> f64 {
    for _ in 0..30 {
        let d = ws.eval_derivative(r);
        if d == 0.0 {
            break;
        }
        let step = ws.eval(r) / d;
        if !step.is_finite() {
            break;
        }
        r -= step;
        if step.abs() <= 1e-17 * r.abs().max(1e-300) {
            break;
        }
    }
    // finish on the score itself when it brackets a sign change
    let delta = 1e-7 * r.abs().max(1e-9);
    let (lo, hi) = (r - delta, r + delta);
    if let (Some(glo), Some(ghi)) = (reduced_score(counts, ws, lo), reduced_score(counts, ws, hi)) {
        if glo.signum() != ghi.signum() {
            let (mut lo, mut hi, mut glo) = (lo, hi, glo);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                match reduced_score(counts, ws, mid) {
                    Some(g) if g == 0.0 => return mid,
                    Some(g) if g.signum() == glo.signum() => {
                        lo = mid;
                        glo = g;
                    }
                    Some(_) => hi = mid,
                    None => break,
                }
            }
            return 0.5 * (lo + hi);
        }
    }
    r
}

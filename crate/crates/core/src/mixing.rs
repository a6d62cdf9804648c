//! ψ- and φ-mixing coefficients.
//!
//! On the state space {0, 1} every event of `σ(X_0)` or `σ(X_n)` is one of
//! `∅, {0}, {1}, {0, 1}`, so both suprema reduce to a maximum over the four cells of
//! the joint law of `(X_0, X_n)`. The brute-force routines do exactly that; the
//! closed forms give the same numbers via the second eigenvalue.

use serde::Serialize;

use crate::chain::{n_step_matrix, stationary_distribution, BinaryPath, ModelParams, Regime};
use crate::error::{Error, Result};

/// Joint law `cells[i][j] = P(X_0 = i, X_n = j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointTable {
    pub cells: [[f64; 2]; 2],
    pub lag: u32,
}

impl JointTable {
    pub fn row_margins(&self) -> (f64, f64) {
        let c = self.cells;
        (c[0][0] + c[0][1], c[1][0] + c[1][1])
    }

    pub fn col_margins(&self) -> (f64, f64) {
        let c = self.cells;
        (c[0][0] + c[1][0], c[0][1] + c[1][1])
    }

    /// `max_{i,j} |P(i, j) / (P(i)·P(j)) − 1|` over cells with positive margins.
    pub fn psi(&self) -> f64 {
        let (r0, r1) = self.row_margins();
        let (c0, c1) = self.col_margins();
        let (rows, cols) = ([r0, r1], [c0, c1]);
        let mut best: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                if rows[i] > 0.0 && cols[j] > 0.0 {
                    best = best.max((self.cells[i][j] / (rows[i] * cols[j]) - 1.0).abs());
                }
            }
        }
        best
    }

    /// `max_{i,j} |P(i, j) / P(i) − P(j)|` over rows with positive mass.
    pub fn phi(&self) -> f64 {
        let (r0, r1) = self.row_margins();
        let (c0, c1) = self.col_margins();
        let (rows, cols) = ([r0, r1], [c0, c1]);
        let mut best: f64 = 0.0;
        for i in 0..2 {
            if rows[i] <= 0.0 {
                continue;
            }
            for j in 0..2 {
                best = best.max((self.cells[i][j] / rows[i] - cols[j]).abs());
            }
        }
        best
    }
}

/// Exact joint law of `(X_0, X_n)` from the closed-form n-step matrix.
pub fn joint_table(params: &ModelParams, n: u32) -> Result<JointTable> {
    if n == 0 {
        return Err(Error::Domain("lag must be at least 1".into()));
    }
    let an = n_step_matrix(params, n);
    let (pi0, pi1) = stationary_distribution(params);
    let pi = [pi0, pi1];
    let mut cells = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            cells[i][j] = pi[i] * an.get(i, j);
        }
    }
    Ok(JointTable { cells, lag: n })
}

/// Closed-form ψ(n).
pub fn psi_closed(params: &ModelParams, n: u32) -> f64 {
    let (a, p) = (params.a(), params.p());
    match params.regime() {
        Regime::LessHalf => (1.0 - p) / p * ((a - p) / (1.0 - p)).abs().powi(n as i32),
        Regime::Half | Regime::GeqHalf => p / (1.0 - p) * ((a + p - 1.0) / p).abs().powi(n as i32),
    }
}

/// Closed-form φ(n).
pub fn phi_closed(params: &ModelParams, n: u32) -> f64 {
    let (a, p) = (params.a(), params.p());
    match params.regime() {
        Regime::LessHalf => (1.0 - p) * ((a - p) / (1.0 - p)).abs().powi(n as i32),
        Regime::Half | Regime::GeqHalf => p * ((a + p - 1.0) / p).abs().powi(n as i32),
    }
}

/// ψ(n) by maximizing over the cells of the exact joint table.
pub fn psi_brute(params: &ModelParams, n: u32) -> Result<f64> {
    Ok(joint_table(params, n)?.psi())
}

/// φ(n) by maximizing over the cells of the exact joint table.
pub fn phi_brute(params: &ModelParams, n: u32) -> Result<f64> {
    Ok(joint_table(params, n)?.phi())
}

/// Frequency estimate of the joint law of `(X_t, X_{t+lag})` from one path.
///
/// Noisy; meant for illustration next to the exact coefficients.
pub fn empirical_joint_table(path: &BinaryPath, lag: u32) -> Result<JointTable> {
    let s = path.states();
    let lag_us = lag as usize;
    if lag == 0 || lag_us >= s.len() {
        return Err(Error::Domain(format!(
            "lag {lag} must be in 1..{} for this path",
            s.len()
        )));
    }
    let mut counts = [[0u64; 2]; 2];
    for t in 0..s.len() - lag_us {
        counts[s[t] as usize][s[t + lag_us] as usize] += 1;
    }
    let total = (s.len() - lag_us) as f64;
    let mut cells = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            cells[i][j] = counts[i][j] as f64 / total;
        }
    }
    Ok(JointTable { cells, lag })
}

/// Which coefficient a decay sequence holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixingKind {
    Psi,
    Phi,
}

/// Coefficient values for lags `1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingDecay {
    pub kind: MixingKind,
    pub values: Vec<f64>,
}

impl MixingDecay {
    pub fn closed(params: &ModelParams, kind: MixingKind, max_lag: u32) -> MixingDecay {
        let f = match kind {
            MixingKind::Psi => psi_closed,
            MixingKind::Phi => phi_closed,
        };
        MixingDecay {
            kind,
            values: (1..=max_lag).map(|n| f(params, n)).collect(),
        }
    }

    /// Ratios of consecutive nonzero values.
    pub fn ratios(&self) -> Vec<f64> {
        self.values
            .windows(2)
            .filter(|w| w[0] > 0.0 && w[1] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{make_params, simulate_bernoulli_chain, transition_matrix, TransitionMatrix};

    const GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

    fn params(a: f64, p: f64) -> ModelParams {
        make_params(a, p).unwrap()
    }

    #[test]
    fn independence_gives_product_table() {
        for &p in &[0.1, 0.3, 0.45] {
            let pr = params(p, p);
            for n in [1, 2, 9] {
                let t = joint_table(&pr, n).unwrap();
                let m = [1.0 - p, p];
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((t.cells[i][j] - m[i] * m[j]).abs() < 1e-15);
                    }
                }
                assert!(psi_closed(&pr, n) == 0.0 && phi_closed(&pr, n) == 0.0);
                assert!(psi_brute(&pr, n).unwrap() < 1e-14);
            }
        }
        assert_eq!(psi_closed(&params(0.5, 0.5), 3), 0.0);
    }

    #[test]
    fn joint_table_matches_matrix_square() {
        let pr = params(0.2, 0.1);
        let a = transition_matrix(&pr);
        let sq = a * a;
        let t = joint_table(&pr, 2).unwrap();
        let pi = [0.9, 0.1];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t.cells[i][j] - pi[i] * sq.get(i, j)).abs() < 1e-12);
            }
        }
        assert!(joint_table(&pr, 0).is_err());
    }

    #[test]
    fn margins_are_stationary() {
        for &a in &GRID {
            for &p in &GRID {
                let t = joint_table(&params(a, p), 4).unwrap();
                let (r0, r1) = t.row_margins();
                let (c0, c1) = t.col_margins();
                assert!((r0 - (1.0 - p)).abs() < 1e-12 && (r1 - p).abs() < 1e-12);
                assert!((c0 - (1.0 - p)).abs() < 1e-12 && (c1 - p).abs() < 1e-12);
                assert!((r0 + r1 - 1.0).abs() < 1e-12);
                assert!(t.cells.iter().flatten().all(|&x| x >= 0.0));
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let pr = params(0.2, 0.1);
        assert!((psi_closed(&pr, 1) - 1.0).abs() < 1e-15);
        assert!((phi_closed(&pr, 1) - 0.1).abs() < 1e-15);
        assert_eq!(psi_closed(&params(0.3, 0.3), 5), 0.0);
        // p = 1/2 gives |2a − 1|ⁿ
        assert!((psi_closed(&params(0.8, 0.5), 3) - 0.6f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn brute_equals_closed_on_grid() {
        for &a in &GRID {
            for &p in &GRID {
                let pr = params(a, p);
                for n in 1..=20 {
                    let (pc, pb) = (psi_closed(&pr, n), psi_brute(&pr, n).unwrap());
                    let (fc, fb) = (phi_closed(&pr, n), phi_brute(&pr, n).unwrap());
                    assert!((pc - pb).abs() < 1e-12, "psi ({a},{p},{n}): {pc} vs {pb}");
                    assert!((fc - fb).abs() < 1e-12, "phi ({a},{p},{n}): {fc} vs {fb}");
                }
            }
        }
    }

    #[test]
    fn phi_is_dominated_by_psi() {
        for &a in &GRID {
            for &p in &GRID {
                let pr = params(a, p);
                for n in 1..=10 {
                    assert!(phi_closed(&pr, n) <= psi_closed(&pr, n) * p.max(1.0 - p) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn geometric_decay() {
        for &a in &GRID {
            for &p in &GRID {
                let pr = params(a, p);
                let rate = pr.lambda2().abs();
                for kind in [MixingKind::Psi, MixingKind::Phi] {
                    let d = MixingDecay::closed(&pr, kind, 30);
                    assert!(d.values.iter().all(|&v| v >= 0.0));
                    for r in d.ratios() {
                        assert!((r - rate).abs() < 1e-12);
                    }
                }
                if rate <= 0.9 {
                    assert!(psi_closed(&pr, 200) < 1e-6);
                    assert!(phi_closed(&pr, 200) < 1e-6);
                }
            }
        }
    }

    #[test]
    fn brute_decays_monotonically() {
        let pr = params(0.2, 0.1);
        let vals: Vec<f64> = (1..=40).map(|n| psi_brute(&pr, n).unwrap()).collect();
        // cancellation noise of order 1e-15 once the signal is gone
        assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-14));
        assert!(*vals.last().unwrap() < 1e-13);
    }

    #[test]
    fn flip_symmetry_of_psi() {
        for &a in &GRID {
            for &p in &[0.1, 0.2, 0.3, 0.4] {
                for n in 1..=10 {
                    let l = psi_closed(&params(a, p), n);
                    let r = psi_closed(&params(a, 1.0 - p), n);
                    assert!((l - r).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn brute_table_from_repeated_products() {
        // joint table assembled from A·A·…·A instead of the closed form
        for &a in &GRID {
            for &p in &GRID {
                let pr = params(a, p);
                let a1 = transition_matrix(&pr);
                let mut an = TransitionMatrix::IDENTITY;
                for n in 1..=12u32 {
                    an = an * a1;
                    let pi = [1.0 - p, p];
                    let mut cells = [[0.0; 2]; 2];
                    for i in 0..2 {
                        for j in 0..2 {
                            cells[i][j] = pi[i] * an.get(i, j);
                        }
                    }
                    let t = JointTable { cells, lag: n };
                    assert!((t.psi() - psi_closed(&pr, n)).abs() < 1e-12);
                    assert!((t.phi() - phi_closed(&pr, n)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn empirical_table_is_rough_estimate() {
        let pr = params(0.8, 0.3);
        let path = simulate_bernoulli_chain(&pr, 50_000, 21).unwrap();
        let t = empirical_joint_table(&path, 1).unwrap();
        let exact = joint_table(&pr, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((t.cells[i][j] - exact.cells[i][j]).abs() < 0.02);
            }
        }
        assert!(empirical_joint_table(&path, 0).is_err());
    }
}

//! Brute-force likelihood maximization shared by the oracle and acceptance suites.

use frechet_chain::chain::{make_params, simulate_bernoulli_chain, transition_counts, TransitionCounts};
use frechet_chain::estimation::{loglik, mle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ll(c: &TransitionCounts, a: f64, p: f64) -> f64 {
    match make_params(a, p) {
        Ok(pr) => loglik(c, &pr).unwrap_or(f64::NEG_INFINITY),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Grid with step 1e-3, then a shrinking compass search around the best cell.
pub fn grid_maximize(c: &TransitionCounts) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.5, 0.5);
    for i in 1..1000 {
        let a = i as f64 * 1e-3;
        for j in 1..1000 {
            let p = j as f64 * 1e-3;
            let v = ll(c, a, p);
            if v > best.0 {
                best = (v, a, p);
            }
        }
    }
    let (mut v, mut a, mut p) = best;
    let mut step = 1e-3;
    while step > 1e-10 {
        let mut moved = false;
        for (da, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step), (step, step), (-step, -step), (step, -step), (-step, step)] {
            let w = ll(c, a + da, p + dp);
            if w > v {
                v = w;
                a += da;
                p += dp;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (a, p)
}

pub fn random_tables(count: usize, seed: u64) -> Vec<TransitionCounts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let a = rng.random_range(0.05..0.95);
        let p = if rng.random_bool(0.5) { rng.random_range(0.05..0.42) } else { rng.random_range(0.58..0.95) };
        let n = rng.random_range(300..3000);
        let path = simulate_bernoulli_chain(&make_params(a, p).unwrap(), n, rng.random()).unwrap();
        let c = transition_counts(&path);
        if mle(&c).is_ok() {
            out.push(c);
        }
    }
    out
}


//! Model parameters, transition matrices, simulation and sufficient statistics.

use std::ops::Mul;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Which closed-form branch of the model applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `p < 1/2`
    LessHalf,
    /// `p = 1/2`
    Half,
    /// `p > 1/2`
    GeqHalf,
}

impl Regime {
    pub fn of(p: f64) -> Regime {
        if p < 0.5 {
            Regime::LessHalf
        } else if p == 0.5 {
            Regime::Half
        } else {
            Regime::GeqHalf
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::LessHalf => "less_half",
            Regime::Half => "half",
            Regime::GeqHalf => "geq_half",
        }
    }
}

/// Copula weight `a` and Bernoulli parameter `p`, both strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    a: f64,
    p: f64,
    regime: Regime,
}

impl ModelParams {
    pub fn new(a: f64, p: f64) -> Result<Self> {
        make_params(a, p)
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The parameters of the relabeled chain (states 0 and 1 swapped).
    pub fn flipped(&self) -> ModelParams {
        let p = 1.0 - self.p;
        ModelParams {
            a: self.a,
            p,
            regime: Regime::of(p),
        }
    }

    /// Second eigenvalue of the transition matrix; the geometric rate of every
    /// dependence measure of the chain.
    pub fn lambda2(&self) -> f64 {
        let (a, p) = (self.a, self.p);
        match self.regime {
            Regime::LessHalf => (a - p) / (1.0 - p),
            Regime::Half | Regime::GeqHalf => (a + p - 1.0) / p,
        }
    }
}

fn open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

/// Validate `(a, p)` and derive the regime.
pub fn make_params(a: f64, p: f64) -> Result<ModelParams> {
    if !open_unit(a) {
        return Err(Error::Domain(format!("a = {a} must lie in (0, 1)")));
    }
    if !open_unit(p) {
        return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    Ok(ModelParams {
        a,
        p,
        regime: Regime::of(p),
    })
}

/// Row-stochastic 2×2 matrix; `entries[i][j] = P(X_{t+1} = j | X_t = i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionMatrix {
    entries: [[f64; 2]; 2],
}

impl TransitionMatrix {
    pub const IDENTITY: TransitionMatrix = TransitionMatrix {
        entries: [[1.0, 0.0], [0.0, 1.0]],
    };

    /// Build from raw entries, checking bounds and row sums (tolerance 1e-12).
    pub fn new(entries: [[f64; 2]; 2]) -> Result<Self> {
        for row in &entries {
            if row.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::Domain(format!("entries {row:?} outside [0, 1]")));
            }
            if (row[0] + row[1] - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("row {row:?} does not sum to 1")));
            }
        }
        Ok(TransitionMatrix { entries })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &TransitionMatrix) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        d
    }
}

impl Mul for TransitionMatrix {
    type Output = TransitionMatrix;

    fn mul(self, rhs: TransitionMatrix) -> TransitionMatrix {
        let (l, r) = (self.entries, rhs.entries);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = l[i][0] * r[0][j] + l[i][1] * r[1][j];
            }
        }
        TransitionMatrix { entries: out }
    }
}

impl Serialize for TransitionMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Flat {
            p00: f64,
            p01: f64,
            p10: f64,
            p11: f64,
        }
        let e = self.entries;
        Flat {
            p00: e[0][0],
            p01: e[0][1],
            p10: e[1][0],
            p11: e[1][1],
        }
        .serialize(s)
    }
}

/// One-step transition matrix of the chain.
pub fn transition_matrix(params: &ModelParams) -> TransitionMatrix {
    let (a, p) = (params.a, params.p);
    let entries = match params.regime {
        Regime::LessHalf => {
            let p00 = (a * p + 1.0 - 2.0 * p) / (1.0 - p);
            let p01 = p * (1.0 - a) / (1.0 - p);
            [[p00, p01], [1.0 - a, a]]
        }
        Regime::Half | Regime::GeqHalf => {
            let p10 = (1.0 - p) * (1.0 - a) / p;
            let p11 = (a * (1.0 - p) + 2.0 * p - 1.0) / p;
            [[a, 1.0 - a], [p10, p11]]
        }
    };
    TransitionMatrix { entries }
}

/// Closed-form `n`-step transition matrix `Aⁿ`.
pub fn n_step_matrix(params: &ModelParams, n: u32) -> TransitionMatrix {
    if n == 0 {
        return TransitionMatrix::IDENTITY;
    }
    let p = params.p;
    let l = params.lambda2().powi(n.min(i32::MAX as u32) as i32);
    TransitionMatrix {
        entries: [
            [1.0 - p + p * l, p - p * l],
            [1.0 - p - (1.0 - p) * l, p + (1.0 - p) * l],
        ],
    }
}

/// Stationary law `(P(X=0), P(X=1)) = (1 − p, p)`.
pub fn stationary_distribution(params: &ModelParams) -> (f64, f64) {
    (1.0 - params.p, params.p)
}

/// Where a path came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    Bernoulli { seed: u64, a: f64, p: f64 },
    Uniform { seed: u64, a: f64 },
    External,
}

/// Observed binary chain `x_0, …, x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPath {
    states: Vec<u8>,
    origin: Origin,
}

impl BinaryPath {
    pub fn new(states: Vec<u8>, origin: Origin) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::Domain(format!(
                "a path needs at least 2 states, got {}",
                states.len()
            )));
        }
        if let Some(bad) = states.iter().find(|&&x| x > 1) {
            return Err(Error::Domain(format!("state {bad} is not in {{0, 1}}")));
        }
        Ok(BinaryPath { states, origin })
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// Number of transitions `n` (the path holds `n + 1` states).
    pub fn n(&self) -> usize {
        self.states.len() - 1
    }

    pub fn ones(&self) -> usize {
        self.states.iter().filter(|&&x| x == 1).count()
    }

    /// Sample proportion of ones over all `n + 1` states.
    pub fn mean(&self) -> f64 {
        self.ones() as f64 / self.states.len() as f64
    }

    /// The 0↔1 relabeled path.
    pub fn flipped(&self) -> BinaryPath {
        BinaryPath {
            states: self.states.iter().map(|&x| 1 - x).collect(),
            origin: self.origin.clone(),
        }
    }
}

/// Observed chain with uniform(0, 1) marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPath {
    states: Vec<f64>,
    origin: Origin,
}

impl RealPath {
    pub fn new(states: Vec<f64>, origin: Origin) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::Domain(format!(
                "a path needs at least 2 states, got {}",
                states.len()
            )));
        }
        if let Some(bad) = states.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Domain(format!("value {bad} is not in [0, 1]")));
        }
        Ok(RealPath { states, origin })
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn n(&self) -> usize {
        self.states.len() - 1
    }
}

/// Simulate `n` steps of the stationary Bernoulli(p) chain; the path has `n + 1` states.
pub fn simulate_bernoulli_chain(params: &ModelParams, n: usize, seed: u64) -> Result<BinaryPath> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let matrix = transition_matrix(params);
    let up = [matrix.get(0, 1), matrix.get(1, 1)];
    let mut rng = stream_rng(seed);
    let mut states = Vec::with_capacity(n + 1);
    let mut x = u8::from(rng.random::<f64>() < params.p);
    states.push(x);
    for _ in 0..n {
        x = u8::from(rng.random::<f64>() < up[x as usize]);
        states.push(x);
    }
    Ok(BinaryPath {
        states,
        origin: Origin::Bernoulli {
            seed,
            a: params.a,
            p: params.p,
        },
    })
}

/// Simulate the uniform-marginal chain: stay put with probability `a`, otherwise
/// reflect `x ↦ 1 − x`.
pub fn simulate_uniform_chain(a: f64, n: usize, seed: u64) -> Result<RealPath> {
    if !open_unit(a) {
        return Err(Error::Domain(format!("a = {a} must lie in (0, 1)")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut rng = stream_rng(seed);
    let mut states = Vec::with_capacity(n + 1);
    let mut x: f64 = rng.random();
    states.push(x);
    for _ in 0..n {
        if rng.random::<f64>() >= a {
            x = 1.0 - x;
        }
        states.push(x);
    }
    Ok(RealPath {
        states,
        origin: Origin::Uniform { seed, a },
    })
}

/// Sufficient statistics of a binary path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TransitionCounts {
    x0: u8,
    n00: u64,
    n01: u64,
    n10: u64,
    n11: u64,
}

impl TransitionCounts {
    /// Build a count table, rejecting tables that no path starting at `x0` can produce.
    pub fn new(x0: u8, n00: u64, n01: u64, n10: u64, n11: u64) -> Result<Self> {
        if x0 > 1 {
            return Err(Error::Domain(format!("x0 = {x0} is not in {{0, 1}}")));
        }
        let n = n00 + n01 + n10 + n11;
        if n == 0 {
            return Err(Error::Domain("count table has no transitions".into()));
        }
        // Euler-trail conditions on the two-vertex multigraph.
        let net = n01 as i64 - n10 as i64;
        let ok_balance = match x0 {
            0 => net == 0 || net == 1,
            _ => net == 0 || net == -1,
        };
        let ok_connected = if n01 + n10 == 0 {
            if x0 == 0 {
                n11 == 0
            } else {
                n00 == 0
            }
        } else {
            true
        };
        if !ok_balance || !ok_connected {
            return Err(Error::Domain(format!(
                "counts (x0={x0}, n00={n00}, n01={n01}, n10={n10}, n11={n11}) are not realizable by a path"
            )));
        }
        Ok(TransitionCounts {
            x0,
            n00,
            n01,
            n10,
            n11,
        })
    }

    pub fn x0(&self) -> u8 {
        self.x0
    }
    pub fn n00(&self) -> u64 {
        self.n00
    }
    pub fn n01(&self) -> u64 {
        self.n01
    }
    pub fn n10(&self) -> u64 {
        self.n10
    }
    pub fn n11(&self) -> u64 {
        self.n11
    }

    /// Total number of transitions.
    pub fn n(&self) -> u64 {
        self.n00 + self.n01 + self.n10 + self.n11
    }

    /// Number of ones in the full path: `x0 + n01 + n11`.
    pub fn ones(&self) -> u64 {
        self.x0 as u64 + self.n01 + self.n11
    }

    /// Last state of the path.
    pub fn last(&self) -> u8 {
        (self.x0 as i64 + self.n01 as i64 - self.n10 as i64) as u8
    }

    /// Counts of the 0↔1 relabeled path.
    pub fn flipped(&self) -> TransitionCounts {
        TransitionCounts {
            x0: 1 - self.x0,
            n00: self.n11,
            n01: self.n10,
            n10: self.n01,
            n11: self.n00,
        }
    }

    /// True when some row of the transition table is empty.
    pub fn has_empty_row(&self) -> bool {
        self.n00 + self.n01 == 0 || self.n10 + self.n11 == 0
    }
}

/// Count the one-step transitions of a path.
pub fn transition_counts(path: &BinaryPath) -> TransitionCounts {
    let mut c = [[0u64; 2]; 2];
    for w in path.states.windows(2) {
        c[w[0] as usize][w[1] as usize] += 1;
    }
    TransitionCounts {
        x0: path.states[0],
        n00: c[0][0],
        n01: c[0][1],
        n10: c[1][0],
        n11: c[1][1],
    }
}

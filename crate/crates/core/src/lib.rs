//! Stationary two-state Markov chains generated by the Fréchet mixture copula
//! `C = a·M + (1 − a)·W` with Bernoulli(p) marginals.
//!
//! The crate covers the whole workflow around this model:
//!
//! - [`chain`]: parameters, one-step and n-step transition matrices, simulation of
//!   binary and uniform-marginal chains, transition counts.
//! - [`mixing`]: exact joint law of `(X_0, X_n)` and the ψ/φ mixing coefficients,
//!   in closed form and by brute force over the joint table.
//! - [`estimation`]: likelihood, score, the quartic profile equation, the full MLE
//!   of `(a, p)`, asymptotic covariance and three estimators of the mean.
//! - [`inference`]: the likelihood-ratio test of independence.
//! - [`montecarlo`]: reproducible replication studies (coverage, interval lengths,
//!   LRT grids, estimator comparison).
//!
//! ```
//! use frechet_chain::chain::{make_params, simulate_bernoulli_chain, transition_counts};
//! use frechet_chain::estimation::mle;
//!
//! let params = make_params(0.7, 0.3).unwrap();
//! let path = simulate_bernoulli_chain(&params, 4999, 42).unwrap();
//! let fit = mle(&transition_counts(&path)).unwrap();
//! assert!((fit.params.p() - 0.3).abs() < 0.05);
//! ```

pub mod chain;
pub mod error;
pub mod estimation;
pub mod inference;
pub mod io;
pub mod mixing;
pub mod montecarlo;
pub mod rng;
pub mod special;

pub use error::{Error, Result};

//! The MLE against brute-force maximization of the likelihood.

mod common;

use common::{grid_maximize, random_tables};
use frechet_chain::chain::TransitionCounts;
use frechet_chain::estimation::{mle, profile_a, quartic_coefficients, real_roots, score};
use frechet_chain::Error;

#[test]
fn matches_grid_search_and_zeroes_the_score() {
    for c in random_tables(50, 2024) {
        let fit = mle(&c).unwrap();
        let (ga, gp) = grid_maximize(&c);
        assert!((fit.params.a() - ga).abs() < 2e-3, "{c:?}: {fit:?} vs ({ga}, {gp})");
        assert!((fit.params.p() - gp).abs() < 2e-3, "{c:?}: {fit:?} vs ({ga}, {gp})");
        let (da, dp) = score(&c, &fit.params).unwrap();
        assert!(da.abs() < 1e-6 && dp.abs() < 1e-6, "{c:?}: score ({da}, {dp})");
    }
}

#[test]
fn quartic_roots_contain_the_fitted_p() {
    for c in random_tables(20, 7) {
        let fit = mle(&c).unwrap();
        // on the upper branch the quartic is solved for the relabeled counts
        let (table, p) = if fit.params.p() < 0.5 { (c, fit.params.p()) } else { (c.flipped(), 1.0 - fit.params.p()) };
        let ws = quartic_coefficients(&table);
        let roots = real_roots(ws.coeffs_f64());
        assert!(roots.iter().any(|r| (r - p).abs() < 1e-4), "{roots:?} vs {p}");
        let a = profile_a(&table, p).unwrap();
        assert!((a - fit.params.a()).abs() < 1e-9);
    }
}

#[test]
fn degenerate_paths_are_flagged() {
    let zeros = TransitionCounts::new(0, 50, 0, 0, 0).unwrap();
    assert!(matches!(mle(&zeros), Err(Error::DegenerateData(_))));
}

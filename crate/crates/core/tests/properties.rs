use proptest::prelude::*;
use scouting_core::analytic::{
    asymmetric_alphas, baseline_equilibrium, effective_precision, initiative_equilibrium,
    optimal_decoy_mix, withdraw_win_prob,
};

const TIGHT: f64 = 1e-12;

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

proptest! {
    #[test]
    fn odds_identities(p in 0.001f64..0.999, q in 0.001f64..0.999) {
        let eq = baseline_equilibrium(p, q).unwrap();
        prop_assert!((eq.pi1 + eq.pi2 - 1.0).abs() <= TIGHT);
        prop_assert!((eq.gamma - eq.config_probs.iter().sum::<f64>()).abs() <= TIGHT);
        prop_assert!((eq.rho1 * eq.pi2 - eq.pi1).abs() <= 1e-9 * eq.rho1.max(1.0));
        for v in [eq.gamma, eq.pi1, eq.pi2] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn engagement_is_symmetric(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        prop_assume!(p * (1.0 - q) + (1.0 - p) * q > 0.0);
        let a = baseline_equilibrium(p, q).unwrap().gamma;
        let b = baseline_equilibrium(q, p).unwrap().gamma;
        prop_assert!((a - b).abs() <= TIGHT);
    }

    #[test]
    fn better_scout_wins_more(p in 0.5f64..0.999, q in 0.5f64..0.999) {
        prop_assume!(p > q + 1e-9);
        prop_assert!(baseline_equilibrium(p, q).unwrap().pi1 > 0.5);
    }

    #[test]
    fn optimal_mix_is_best_read_degradation(r in 0.5f64..=1.0, delta in 0.001f64..=1.0) {
        let xi = optimal_decoy_mix(r, delta).unwrap();
        let eff = effective_precision(r, delta, xi);
        prop_assert!(eff >= 0.5 - TIGHT);
        let unclamped = (r - 0.5) / delta + 1.0 - r;
        if (0.0..=1.0).contains(&unclamped) {
            prop_assert!((eff - 0.5).abs() <= TIGHT);
        }
        // No mix on a fine grid leaves the opponent less informed.
        let best_gap = (eff - 0.5).abs();
        for k in 0..=1000 {
            let other = effective_precision(r, delta, k as f64 / 1000.0);
            prop_assert!((other - 0.5).abs() >= best_gap - TIGHT);
        }
    }
}

#[test]
fn pi1_monotone_in_both_precisions() {
    let pts: Vec<f64> = grid(0.025, 0.975, 21).collect();
    for &q in &pts {
        for w in pts.windows(2) {
            let lo = baseline_equilibrium(w[0], q).unwrap().pi1;
            let hi = baseline_equilibrium(w[1], q).unwrap().pi1;
            assert!(hi > lo, "p: {} -> {} at q={q}", w[0], w[1]);
        }
    }
    for &p in &pts {
        for w in pts.windows(2) {
            let lo = baseline_equilibrium(p, w[0]).unwrap().pi1;
            let hi = baseline_equilibrium(p, w[1]).unwrap().pi1;
            assert!(hi < lo, "q: {} -> {} at p={p}", w[0], w[1]);
        }
    }
}

#[test]
fn marginal_return_falls_with_opponent_precision() {
    let h = 1e-4;
    let slope = |q: f64| {
        (baseline_equilibrium(0.7 + h, q).unwrap().pi1 - baseline_equilibrium(0.7 - h, q).unwrap().pi1)
            / (2.0 * h)
    };
    assert!(slope(0.9) < slope(0.6));
}

#[test]
fn engagement_peaks_at_uninformative_signals() {
    let peak = baseline_equilibrium(0.5, 0.5).unwrap().gamma;
    assert!((peak - 0.25).abs() <= TIGHT);
    for p in grid(0.5, 1.0, 21) {
        for q in grid(0.5, 1.0, 21) {
            let Ok(eq) = baseline_equilibrium(p, q) else {
                assert!(p == 1.0 && q == 1.0);
                continue;
            };
            // Flat at 1/4 along both uninformative edges, strictly lower elsewhere.
            if p == 0.5 || q == 0.5 {
                assert!((eq.gamma - peak).abs() <= TIGHT);
            } else {
                assert!(eq.gamma < peak, "p={p} q={q} gamma={}", eq.gamma);
            }
        }
    }
    let eps = 1e-9;
    assert!(baseline_equilibrium(1.0 - eps, 1.0 - eps).unwrap().gamma < 1e-8);
}

#[test]
fn withdraw_beats_initiative_beats_baseline() {
    for p in grid(0.525, 0.975, 19) {
        for q in grid(0.525, 0.975, 19) {
            assert!(withdraw_win_prob(p, q).unwrap() > p);
        }
        let init = initiative_equilibrium(p, p).unwrap().pi1;
        let base = baseline_equilibrium(p, p).unwrap().pi1;
        assert!(withdraw_win_prob(p, p).unwrap() > init && init > base);
    }
}

#[test]
fn asymmetric_alphas_continuous_at_symmetry() {
    let (p, q) = (0.8, 0.65);
    let mut last = f64::INFINITY;
    for k in 1..=8 {
        let gap = 10f64.powi(-k);
        let (a1, a2) = asymmetric_alphas(p, p - gap, q).unwrap();
        let dist = (a1 - 0.5).abs().max((a2 - 0.5).abs());
        assert!(dist < last);
        last = dist;
    }
    assert!(last < 1e-7);
}

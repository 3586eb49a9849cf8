//! Distributional laws of the simulator.

use rand::Rng;
use scouting_core::analytic::{self, effective_precision};
use scouting_core::engine::{episode_rng, DEFAULT_MAX_ITERATIONS};
use scouting_core::game::{apply_decoy, draw_signal};
use scouting_core::stats::geometric_chi_square;
use scouting_core::{Action, GameParams, Player, Simulator, Variant};

fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn signal_frequency_matches_precision() {
    let n = 1_000_000u64;
    let mut rng = episode_rng(1, 0);
    let hits = (0..n)
        .filter(|_| draw_signal(Player::One, Action::A, 0.75, &mut rng).indicates == Action::A)
        .count() as f64;
    assert!((hits / n as f64 - 0.75).abs() <= 3.0 * binomial_sigma(0.75, n));
}

#[test]
fn decoy_composition_law() {
    let levels = [0.0, 0.25, 0.5, 0.75, 1.0];
    let n = 1_000_000u64;
    let mut stream = 0;
    for &r in &levels {
        for &delta in &levels {
            for &xi in &levels {
                let mut rng = episode_rng(2, stream);
                stream += 1;
                let mut hits = 0u64;
                for i in 0..n {
                    let plan = if i % 2 == 0 { Action::A } else { Action::B };
                    let raw = draw_signal(Player::One, plan, r, &mut rng);
                    let (fin, _) = apply_decoy(raw, plan, xi, delta, &mut rng);
                    hits += u64::from(fin.indicates == plan);
                }
                let want = effective_precision(r, delta, xi);
                let got = hits as f64 / n as f64;
                let tol = 4.0 * binomial_sigma(want, n);
                assert!((got - want).abs() <= tol.max(1e-12), "r={r} d={delta} xi={xi}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn decoy_frequency_example() {
    let n = 1_000_000u64;
    let mut rng = episode_rng(3, 0);
    let mut hits = 0u64;
    for _ in 0..n {
        let raw = draw_signal(Player::One, Action::A, 0.75, &mut rng);
        let (fin, _) = apply_decoy(raw, Action::A, 1.0, 0.5, &mut rng);
        hits += u64::from(fin.indicates == Action::A);
    }
    let got = hits as f64 / n as f64;
    assert!((got - 0.375).abs() <= 3.0 * binomial_sigma(0.375, n));
}

#[test]
fn executed_iteration_frequency() {
    let sim = Simulator::equilibrium(GameParams::new(0.75, 2.0 / 3.0)).unwrap();
    let n = 1_000_000u64;
    let mut rng = episode_rng(4, 0);
    let executed = (0..n).filter(|_| sim.run_iteration(&mut rng).executed).count() as f64;
    let gamma = 5.0 / 24.0;
    assert!((executed / n as f64 - gamma).abs() <= 3.0 * binomial_sigma(gamma, n));
}

#[test]
fn three_way_agreement_on_grid() {
    let grid = [0.55, 0.6, 0.75, 0.9];
    let n = 1_000_000u64;
    let mut seed = 10;
    for &p in &grid {
        for &q in &grid {
            for variant in Variant::ALL {
                let params = GameParams::new(p, q).with_variant(variant);
                let odds = analytic::variant_equilibrium(&params).unwrap();
                let est = Simulator::equilibrium(params)
                    .unwrap()
                    .estimate(n, seed, DEFAULT_MAX_ITERATIONS)
                    .unwrap();
                seed += 1;
                assert_eq!(est.n_censored, 0);
                assert!(
                    est.pi1.within_sigmas(odds.pi1, 4.0),
                    "{variant} p={p} q={q}: pi1 {:?} vs {}",
                    est.pi1,
                    odds.pi1
                );
                assert!(
                    est.gamma.within_sigmas(odds.gamma, 4.0),
                    "{variant} p={p} q={q}: gamma {:?} vs {}",
                    est.gamma,
                    odds.gamma
                );
            }
        }
    }
}

#[test]
fn iteration_counts_are_geometric() {
    let cases = [
        GameParams::new(0.5, 0.5),
        GameParams::new(0.75, 2.0 / 3.0),
        GameParams::new(0.9, 0.6).with_variant(Variant::Withdraw),
        GameParams::new(0.7, 0.8).with_variant(Variant::Initiative),
    ];
    for (i, params) in cases.into_iter().enumerate() {
        let gamma = analytic::variant_equilibrium(&params).unwrap().gamma;
        let sim = Simulator::equilibrium(params).unwrap();
        let counts: Vec<u64> = sim
            .simulate(200_000, 70 + i as u64, DEFAULT_MAX_ITERATIONS)
            .iter()
            .map(|e| e.iterations)
            .collect();
        let test = geometric_chi_square(&counts, gamma).unwrap();
        assert!(test.passes(0.001), "case {i}: {test:?}");
    }
}

#[test]
fn mean_iterations_is_inverse_gamma() {
    let sim = Simulator::equilibrium(GameParams::new(0.5, 0.5)).unwrap();
    let est = sim.estimate(100_000, 8, DEFAULT_MAX_ITERATIONS).unwrap();
    assert!(est.mean_iterations.within_sigmas(4.0, 3.0), "{:?}", est.mean_iterations);
}

#[test]
fn signals_independent_given_plans() {
    let params = GameParams::new(0.7, 0.6).with_decoys(0.3, 0.4, 0.8);
    let sim = Simulator::equilibrium(params).unwrap();
    let eff = analytic::effective_precisions(&params);
    let n = 1_000_000u64;
    let mut rng = episode_rng(21, 0);
    // [plan1][plan2][signal1 correct][signal2 correct]
    let mut counts = [[[[0u64; 2]; 2]; 2]; 2];
    for _ in 0..n {
        let s = sim.run_iteration(&mut rng);
        let c1 = s.final_signal1.indicates == s.plan2;
        let c2 = s.final_signal2.indicates == s.plan1;
        counts[(s.plan1 == Action::B) as usize][(s.plan2 == Action::B) as usize][c1 as usize][c2 as usize] += 1;
    }
    for plans in counts.iter().flat_map(|r| r.iter()) {
        let total: u64 = plans.iter().flatten().sum();
        let m1 = (plans[1][0] + plans[1][1]) as f64 / total as f64;
        let m2 = (plans[0][1] + plans[1][1]) as f64 / total as f64;
        assert!((m1 - eff.p_a).abs() <= 4.0 * binomial_sigma(eff.p_a, total));
        assert!((m2 - eff.q).abs() <= 4.0 * binomial_sigma(eff.q, total));
        for c1 in 0..2 {
            for c2 in 0..2 {
                let joint = plans[c1][c2] as f64 / total as f64;
                let f1 = if c1 == 1 { m1 } else { 1.0 - m1 };
                let f2 = if c2 == 1 { m2 } else { 1.0 - m2 };
                let prod = f1 * f2;
                assert!(
                    (joint - prod).abs() <= 4.0 * binomial_sigma(prod, total),
                    "joint {joint} vs product {prod}"
                );
            }
        }
    }
}

#[test]
fn executed_actions_are_balanced() {
    let n = 1_000_000u64;
    for (i, variant) in Variant::ALL.into_iter().enumerate() {
        let sim = Simulator::equilibrium(GameParams::new(0.75, 2.0 / 3.0).with_variant(variant)).unwrap();
        let est = sim.estimate(n, 30 + i as u64, DEFAULT_MAX_ITERATIONS).unwrap();
        assert!(est.executed_a1.within_sigmas(0.5, 4.0), "{variant}: {:?}", est.executed_a1);
        assert!(est.executed_a2.within_sigmas(0.5, 4.0), "{variant}: {:?}", est.executed_a2);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let sim = Simulator::equilibrium(
        GameParams::new(0.8, 0.65).with_variant(Variant::Initiative).with_decoys(0.3, 0.2, 0.6),
    )
    .unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sim.estimate(50_000, 99, DEFAULT_MAX_ITERATIONS).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(format!("{one:?}"), format!("{four:?}"));
}

#[test]
fn substream_draws_are_uniform() {
    // Crude sanity check on the stream derivation: first draws across
    // episodes are uniform.
    let n = 100_000u64;
    let below = (0..n)
        .filter(|&i| episode_rng(123, i).random::<f64>() < 0.3)
        .count() as f64;
    assert!((below / n as f64 - 0.3).abs() <= 4.0 * binomial_sigma(0.3, n));
}

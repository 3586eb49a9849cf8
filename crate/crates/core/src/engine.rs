//! Monte Carlo execution of the plan/scout/execute protocol.
//!
//! Episode `i` of a run with seed `s` draws from its own ChaCha8 substream:
//! the generator is keyed with `seed_from_u64(s)` and its stream counter is
//! set to `i`. Episodes are tallied in fixed blocks of [`BLOCK_SIZE`] and the
//! block tallies are folded in index order, so results do not depend on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, effective_precisions, naive_win_belief};
use crate::error::{Error, Result};
use crate::game::{
    apply_decoy, check_probability, draw_signal, execution_predicate, payoff, wants_execute,
    Action, BeliefMode, GameParams, IterationState, PayoffPair, Player, Variant,
};
use crate::stats::{mean_from_moments, proportion, Estimate, Z95};

pub const DEFAULT_MAX_ITERATIONS: u64 = 1_000_000;
pub const BLOCK_SIZE: u64 = 4096;

/// Generator for one episode of a seeded run.
pub fn episode_rng(seed: u64, episode: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode);
    rng
}

/// Planning and decoy mixes actually played.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyProfile {
    pub plan_mix1: f64,
    pub plan_mix2: f64,
    pub decoy_mix1: f64,
    pub decoy_mix2: f64,
}

impl PolicyProfile {
    /// Analytic equilibrium planning mixes and the decoy mixes in `params`.
    pub fn equilibrium(params: &GameParams) -> Result<Self> {
        let (plan_mix1, plan_mix2) = analytic::equilibrium_mixes(params)?;
        Ok(PolicyProfile {
            plan_mix1,
            plan_mix2,
            decoy_mix1: params.xi1,
            decoy_mix2: params.xi2,
        })
    }

    pub fn with_plan_mixes(mut self, alpha1: f64, alpha2: f64) -> Self {
        self.plan_mix1 = alpha1;
        self.plan_mix2 = alpha2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("plan_mix1", self.plan_mix1)?;
        check_probability("plan_mix2", self.plan_mix2)?;
        check_probability("decoy_mix1", self.decoy_mix1)?;
        check_probability("decoy_mix2", self.decoy_mix2)
    }

    fn plan_mix(&self, player: Player) -> f64 {
        match player {
            Player::One => self.plan_mix1,
            Player::Two => self.plan_mix2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOutcome {
    pub iterations: u64,
    pub executed_actions: Option<(Action, Action)>,
    pub payoffs: Option<PayoffPair>,
    pub censored: bool,
    pub subjective_win_prob1: Option<f64>,
    pub subjective_win_prob2: Option<f64>,
}

impl EpisodeOutcome {
    pub fn winner(&self) -> Option<Player> {
        self.payoffs.map(PayoffPair::winner)
    }
}

/// Validated game and profile with the players' subjective win beliefs
/// precomputed.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: GameParams,
    profile: PolicyProfile,
    beliefs: [Option<f64>; 2],
}

impl Simulator {
    pub fn new(params: GameParams, profile: PolicyProfile) -> Result<Self> {
        params.validate()?;
        profile.validate()?;
        let played = GameParams {
            xi1: profile.decoy_mix1,
            xi2: profile.decoy_mix2,
            ..params
        };
        // Rational players know the mixes and decoys in play.
        let odds = analytic::win_odds(
            params.variant,
            effective_precisions(&played),
            profile.plan_mix1,
            profile.plan_mix2,
        )
        .ok();
        let belief = |player: Player| match params.beliefs(player) {
            BeliefMode::Naive => Some(naive_win_belief(player, params.nominal_precision(player))),
            BeliefMode::Rational => odds.map(|o| match player {
                Player::One => o.pi1,
                Player::Two => o.pi2,
            }),
        };
        let beliefs = [belief(Player::One), belief(Player::Two)];
        Ok(Simulator {
            params,
            profile,
            beliefs,
        })
    }

    pub fn equilibrium(params: GameParams) -> Result<Self> {
        let profile = PolicyProfile::equilibrium(&params)?;
        Self::new(params, profile)
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn profile(&self) -> &PolicyProfile {
        &self.profile
    }

    /// Win probability each player believes in when plans are executed.
    /// `None` for a rational player in a game that never executes.
    pub fn subjective_beliefs(&self) -> [Option<f64>; 2] {
        self.beliefs
    }

    pub fn run_iteration<R: Rng + ?Sized>(&self, rng: &mut R) -> IterationState {
        let params = &self.params;
        let plan1 = Action::sample(self.profile.plan_mix(Player::One), rng);
        let plan2 = Action::sample(self.profile.plan_mix(Player::Two), rng);
        let raw_signal1 = draw_signal(Player::One, plan2, params.raw_precision(Player::One, plan2), rng);
        let raw_signal2 = draw_signal(Player::Two, plan1, params.raw_precision(Player::Two, plan1), rng);
        let (final_signal1, decoy_applied1, final_signal2, decoy_applied2) = if params.delta > 0.0 {
            let (s1, d1) = apply_decoy(raw_signal1, plan2, self.profile.decoy_mix2, params.delta, rng);
            let (s2, d2) = apply_decoy(raw_signal2, plan1, self.profile.decoy_mix1, params.delta, rng);
            (s1, d1, s2, d2)
        } else {
            (raw_signal1, false, raw_signal2, false)
        };
        let willing1 = wants_execute(Player::One, plan1, final_signal1);
        let willing2 = wants_execute(Player::Two, plan2, final_signal2);
        IterationState {
            plan1,
            plan2,
            raw_signal1,
            raw_signal2,
            decoy_applied1,
            decoy_applied2,
            final_signal1,
            final_signal2,
            willing1,
            willing2,
            executed: execution_predicate(params.variant, willing1, willing2),
        }
    }

    /// Revises until plans are executed or `max_iterations` rounds pass.
    pub fn run_episode<R: Rng + ?Sized>(&self, max_iterations: u64, rng: &mut R) -> EpisodeOutcome {
        let max_iterations = max_iterations.max(1);
        for it in 1..=max_iterations {
            let state = self.run_iteration(rng);
            if state.executed {
                return EpisodeOutcome {
                    iterations: it,
                    executed_actions: Some((state.plan1, state.plan2)),
                    payoffs: Some(payoff(state.plan1, state.plan2)),
                    censored: false,
                    subjective_win_prob1: self.beliefs[0],
                    subjective_win_prob2: self.beliefs[1],
                };
            }
        }
        EpisodeOutcome {
            iterations: max_iterations,
            executed_actions: None,
            payoffs: None,
            censored: true,
            subjective_win_prob1: None,
            subjective_win_prob2: None,
        }
    }

    /// Per-episode outcomes of a seeded run, in episode order.
    pub fn simulate(&self, n_episodes: u64, seed: u64, max_iterations: u64) -> Vec<EpisodeOutcome> {
        (0..n_episodes)
            .into_par_iter()
            .map(|i| self.run_episode(max_iterations, &mut episode_rng(seed, i)))
            .collect()
    }

    pub fn estimate(&self, n_episodes: u64, seed: u64, max_iterations: u64) -> Result<Estimates> {
        if n_episodes == 0 {
            return Err(Error::invalid("n_episodes", "must be at least 1"));
        }
        let n_blocks = n_episodes.div_ceil(BLOCK_SIZE);
        let blocks: Vec<Tally> = (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK_SIZE;
                let end = (start + BLOCK_SIZE).min(n_episodes);
                let mut tally = Tally::default();
                for i in start..end {
                    tally.add(&self.run_episode(max_iterations, &mut episode_rng(seed, i)));
                }
                tally
            })
            .collect();
        let total = blocks.into_iter().fold(Tally::default(), Tally::merge);
        Ok(total.finish(seed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    /// Mean subjective win probability at execution.
    pub belief: f64,
    /// Realized win frequency over executed episodes.
    pub realized: f64,
    pub realized_half_width: f64,
}

impl Calibration {
    /// Positive when the player overestimates his chances.
    pub fn gap(&self) -> f64 {
        self.belief - self.realized
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimates {
    pub n_episodes: u64,
    pub n_censored: u64,
    pub seed: u64,
    /// Player 1's win frequency over executed episodes.
    pub pi1: Estimate,
    /// Executions per iteration.
    pub gamma: Estimate,
    pub mean_iterations: Estimate,
    /// Fraction of executed episodes in which Player 1 played `A`.
    pub executed_a1: Estimate,
    /// Fraction of executed episodes in which Player 2 played `A`.
    pub executed_a2: Estimate,
    pub calibration1: Calibration,
    pub calibration2: Calibration,
}

impl Estimates {
    pub fn n_executed(&self) -> u64 {
        self.n_episodes - self.n_censored
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    episodes: u64,
    censored: u64,
    wins1: u64,
    a1: u64,
    a2: u64,
    iterations: u128,
    iterations_sq: u128,
    belief1: f64,
    belief2: f64,
}

impl Tally {
    fn add(&mut self, ep: &EpisodeOutcome) {
        self.episodes += 1;
        let it = u128::from(ep.iterations);
        self.iterations += it;
        self.iterations_sq += it * it;
        match ep.executed_actions {
            None => self.censored += 1,
            Some((x1, x2)) => {
                self.a1 += u64::from(x1 == Action::A);
                self.a2 += u64::from(x2 == Action::A);
                self.wins1 += u64::from(ep.winner() == Some(Player::One));
                self.belief1 += ep.subjective_win_prob1.unwrap_or(f64::NAN);
                self.belief2 += ep.subjective_win_prob2.unwrap_or(f64::NAN);
            }
        }
    }

    fn merge(self, other: Tally) -> Tally {
        Tally {
            episodes: self.episodes + other.episodes,
            censored: self.censored + other.censored,
            wins1: self.wins1 + other.wins1,
            a1: self.a1 + other.a1,
            a2: self.a2 + other.a2,
            iterations: self.iterations + other.iterations,
            iterations_sq: self.iterations_sq + other.iterations_sq,
            belief1: self.belief1 + other.belief1,
            belief2: self.belief2 + other.belief2,
        }
    }

    fn finish(self, seed: u64) -> Estimates {
        let executed = self.episodes - self.censored;
        let pi1 = proportion(self.wins1, executed);
        let gamma_value = if self.iterations == 0 {
            f64::NAN
        } else {
            executed as f64 / self.iterations as f64
        };
        // Asymptotic variance of the geometric MLE: gamma^2 (1 - gamma) / n.
        let gamma = Estimate {
            value: gamma_value,
            half_width: if executed == 0 {
                0.0
            } else {
                Z95 * (gamma_value * gamma_value * (1.0 - gamma_value) / executed as f64).sqrt()
            },
        };
        let ex = executed as f64;
        let pi2 = proportion(executed - self.wins1, executed);
        Estimates {
            n_episodes: self.episodes,
            n_censored: self.censored,
            seed,
            pi1,
            gamma,
            mean_iterations: mean_from_moments(self.episodes, self.iterations, self.iterations_sq),
            executed_a1: proportion(self.a1, executed),
            executed_a2: proportion(self.a2, executed),
            calibration1: Calibration {
                belief: self.belief1 / ex,
                realized: pi1.value,
                realized_half_width: pi1.half_width,
            },
            calibration2: Calibration {
                belief: self.belief2 / ex,
                realized: pi2.value,
                realized_half_width: pi2.half_width,
            },
        }
    }
}

pub fn run_iteration<R: Rng + ?Sized>(
    params: &GameParams,
    profile: &PolicyProfile,
    rng: &mut R,
) -> Result<IterationState> {
    Ok(Simulator::new(*params, *profile)?.run_iteration(rng))
}

pub fn run_episode<R: Rng + ?Sized>(
    params: &GameParams,
    profile: &PolicyProfile,
    max_iterations: u64,
    rng: &mut R,
) -> Result<EpisodeOutcome> {
    if max_iterations == 0 {
        return Err(Error::invalid("max_iterations", "must be at least 1"));
    }
    Ok(Simulator::new(*params, *profile)?.run_episode(max_iterations, rng))
}

/// Seeded estimates with the default iteration cap.
pub fn estimate(
    params: &GameParams,
    profile: &PolicyProfile,
    n_episodes: u64,
    seed: u64,
) -> Result<Estimates> {
    Simulator::new(*params, *profile)?.estimate(n_episodes, seed, DEFAULT_MAX_ITERATIONS)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub player1: Calibration,
    pub player2: Calibration,
}

pub fn calibration_report(
    params: &GameParams,
    profile: &PolicyProfile,
    n_episodes: u64,
    seed: u64,
) -> Result<CalibrationReport> {
    let est = estimate(params, profile, n_episodes, seed)?;
    Ok(CalibrationReport {
        player1: est.calibration1,
        player2: est.calibration2,
    })
}

/// Player 1 holds the initiative and Player 2 fields decoys with mix `xi2`.
pub fn decoy_victim_experiment(
    p: f64,
    q: f64,
    delta: f64,
    xi2: f64,
    victim_mode: BeliefMode,
    n_episodes: u64,
    seed: u64,
) -> Result<Estimates> {
    // Player 1's own decoy mix is irrelevant under initiative.
    let params = GameParams::new(p, q)
        .with_variant(Variant::Initiative)
        .with_decoys(delta, 0.0, xi2)
        .with_beliefs(victim_mode, BeliefMode::Rational);
    let profile = PolicyProfile::equilibrium(&params)?;
    estimate(&params, &profile, n_episodes, seed)
}

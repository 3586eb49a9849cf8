//! Numeric verification layer.
//!
//! Expected utilities come from exhaustive enumeration of all 16
//! plan/signal configurations using only the game primitives, so they are
//! independent of the closed forms in [`crate::analytic`].

use serde::Serialize;

use crate::analytic::{effective_precision, effective_precisions, Precisions};
use crate::error::{Error, Result};
use crate::game::{
    execution_predicate, payoff, wants_execute, Action, GameParams, PayoffPair, Player, Signal,
    Variant,
};

/// Slopes at or below this magnitude count as indifference.
pub const INDIFFERENCE_TOL: f64 = 1e-9;

/// One plan/signal combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Configuration {
    pub plan1: Action,
    pub plan2: Action,
    /// Action indicated by Player 1's signal.
    pub signal1: Action,
    /// Action indicated by Player 2's signal.
    pub signal2: Action,
    /// Probability of the signal pair given the plan pair.
    pub probability: f64,
    pub executed: bool,
    #[serde(skip)]
    pub payoff: PayoffPair,
}

/// Full configuration table of one parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedGame {
    pub variant: Variant,
    pub precisions: Precisions,
    pub configs: Vec<Configuration>,
}

impl EnumeratedGame {
    pub fn new(params: &GameParams) -> Self {
        Self::from_precisions(params.variant, effective_precisions(params))
    }

    pub fn from_precisions(variant: Variant, precisions: Precisions) -> Self {
        let mut configs = Vec::with_capacity(16);
        for plan1 in Action::ALL {
            for plan2 in Action::ALL {
                let r1 = precisions.get(Player::One, plan2);
                let r2 = precisions.get(Player::Two, plan1);
                for signal1 in Action::ALL {
                    for signal2 in Action::ALL {
                        let pr1 = if signal1 == plan2 { r1 } else { 1.0 - r1 };
                        let pr2 = if signal2 == plan1 { r2 } else { 1.0 - r2 };
                        let willing1 =
                            wants_execute(Player::One, plan1, Signal::new(Player::One, signal1));
                        let willing2 =
                            wants_execute(Player::Two, plan2, Signal::new(Player::Two, signal2));
                        configs.push(Configuration {
                            plan1,
                            plan2,
                            signal1,
                            signal2,
                            probability: pr1 * pr2,
                            executed: execution_predicate(variant, willing1, willing2),
                            payoff: payoff(plan1, plan2),
                        });
                    }
                }
            }
        }
        EnumeratedGame {
            variant,
            precisions,
            configs,
        }
    }

    /// Per-iteration expected payoffs `(E1, E2)` when players plan `A` with
    /// probabilities `alpha1`, `alpha2`.
    pub fn expected_utility(&self, alpha1: f64, alpha2: f64) -> (f64, f64) {
        let mut e1 = 0.0;
        for c in &self.configs {
            if !c.executed {
                continue;
            }
            let w = plan_weight(c.plan1, alpha1) * plan_weight(c.plan2, alpha2) * c.probability;
            e1 += w * f64::from(c.payoff.u1);
        }
        // Negation is exact, so E1 + E2 == 0 bit for bit.
        (e1, -e1)
    }

    /// Probability of execution at the given mixes.
    pub fn engagement_prob(&self, alpha1: f64, alpha2: f64) -> f64 {
        self.configs
            .iter()
            .filter(|c| c.executed)
            .map(|c| plan_weight(c.plan1, alpha1) * plan_weight(c.plan2, alpha2) * c.probability)
            .sum()
    }

    /// Derivative of `player`'s expected utility with respect to its own mix.
    /// Utility is affine in the own mix, so two evaluations give it exactly.
    pub fn slope(&self, player: Player, opponent_mix: f64) -> f64 {
        match player {
            Player::One => self.expected_utility(1.0, opponent_mix).0 - self.expected_utility(0.0, opponent_mix).0,
            Player::Two => self.expected_utility(opponent_mix, 1.0).1 - self.expected_utility(opponent_mix, 0.0).1,
        }
    }

    pub fn best_response(&self, player: Player, opponent_mix: f64) -> BestResponse {
        let s = self.slope(player, opponent_mix);
        if s.abs() <= INDIFFERENCE_TOL {
            BestResponse {
                mix: 0.5,
                indifferent: true,
            }
        } else {
            BestResponse {
                mix: if s > 0.0 { 1.0 } else { 0.0 },
                indifferent: false,
            }
        }
    }
}

fn plan_weight(plan: Action, alpha: f64) -> f64 {
    match plan {
        Action::A => alpha,
        Action::B => 1.0 - alpha,
    }
}

pub fn expected_utility(alpha1: f64, alpha2: f64, params: &GameParams) -> (f64, f64) {
    EnumeratedGame::new(params).expected_utility(alpha1, alpha2)
}

/// A pure best response, or the sentinel mix `1/2` flagged as indifferent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestResponse {
    pub mix: f64,
    pub indifferent: bool,
}

pub fn best_response(opponent_mix: f64, player: Player, params: &GameParams) -> BestResponse {
    EnumeratedGame::new(params).best_response(player, opponent_mix)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumSolution {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Slope of Player 1's utility in his own mix at the solution.
    pub residual1: f64,
    /// Slope of Player 2's utility in his own mix at the solution.
    pub residual2: f64,
    pub iterations_used: usize,
    /// Player 1's utility is flat in `alpha1` for every `alpha2`: any
    /// `alpha2` is consistent and `alpha2` holds the sentinel 1/2.
    pub flat1: bool,
    /// Same for Player 2; `alpha1` holds the sentinel.
    pub flat2: bool,
}

/// Finds the mixed equilibrium by bisecting each player's indifference
/// condition over the opponent's mix.
///
/// Player 1's indifference pins `alpha2` and Player 2's pins `alpha1`.
/// `tolerance` is the final bracket width.
pub fn solve_equilibrium(
    params: &GameParams,
    tolerance: f64,
    max_steps: usize,
) -> Result<EquilibriumSolution> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance", "must be positive"));
    }
    params.validate()?;
    let game = EnumeratedGame::new(params);
    let (alpha2, residual1, steps1, flat1) = indifference_point(&game, Player::One, tolerance, max_steps)?;
    let (alpha1, residual2, steps2, flat2) = indifference_point(&game, Player::Two, tolerance, max_steps)?;
    Ok(EquilibriumSolution {
        alpha1,
        alpha2,
        residual1,
        residual2,
        iterations_used: steps1.max(steps2),
        flat1,
        flat2,
    })
}

fn indifference_point(
    game: &EnumeratedGame,
    player: Player,
    tolerance: f64,
    max_steps: usize,
) -> Result<(f64, f64, usize, bool)> {
    let s0 = game.slope(player, 0.0);
    let s1 = game.slope(player, 1.0);
    if s0.abs() <= INDIFFERENCE_TOL && s1.abs() <= INDIFFERENCE_TOL {
        return Ok((0.5, game.slope(player, 0.5), 0, true));
    }
    if s0 == 0.0 {
        return Ok((0.0, 0.0, 0, false));
    }
    if s1 == 0.0 {
        return Ok((1.0, 0.0, 0, false));
    }
    if s0.signum() == s1.signum() {
        return Err(Error::NoIndifference {
            player: match player {
                Player::One => 1,
                Player::Two => 2,
            },
        });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let lo_sign = s0.signum();
    let mut steps = 0;
    while hi - lo > tolerance {
        if steps == max_steps {
            return Err(Error::NonConvergence { steps });
        }
        let mid = 0.5 * (lo + hi);
        let s = game.slope(player, mid);
        if s == 0.0 {
            lo = mid;
            hi = mid;
        } else if s.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let x = 0.5 * (lo + hi);
    Ok((x, game.slope(player, x), steps, false))
}

/// Grid search for the decoy mix that leaves the opponent's effective
/// precision closest to 1/2 from above, refined by bisection between the
/// bracketing grid points.
///
/// Ties (a flat objective, `delta == 0`) resolve to 1/2.
pub fn solve_decoy_mix(r: f64, delta: f64, grid_size: usize) -> Result<f64> {
    if grid_size < 3 {
        return Err(Error::invalid("grid_size", "needs at least 3 points"));
    }
    let eff = |xi: f64| effective_precision(r, delta, xi);
    let grid = |k: usize| k as f64 / (grid_size - 1) as f64;
    if (eff(0.0) - eff(1.0)).abs() <= f64::EPSILON {
        return Ok(0.5);
    }
    let mut best: Option<usize> = None;
    for k in 0..grid_size {
        let e = eff(grid(k));
        if e >= 0.5 && best.is_none_or(|b| e < eff(grid(b))) {
            best = Some(k);
        }
    }
    let Some(k) = best else {
        // Every mix leaves the read below 1/2; stay as close as possible.
        let k = (0..grid_size)
            .min_by(|&a, &b| {
                (eff(grid(a)) - 0.5)
                    .abs()
                    .total_cmp(&(eff(grid(b)) - 0.5).abs())
            })
            .unwrap_or(0);
        return Ok(grid(k));
    };
    if k + 1 == grid_size || eff(grid(k + 1)) >= 0.5 {
        return Ok(grid(k));
    }
    // eff is monotone in xi; the crossing of 1/2 lies in [grid(k), grid(k+1)).
    let (mut lo, mut hi) = (grid(k), grid(k + 1));
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if eff(mid) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

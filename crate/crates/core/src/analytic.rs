//! Closed-form equilibrium quantities.
//!
//! All values are exact low-degree rationals in the precisions and mixes,
//! evaluated in plain `f64`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{check_probability, Action, GameParams, Player, Variant};

/// Pitched-battle equilibrium at the symmetric mixes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineEquilibrium {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Per-iteration probability that plans are executed.
    pub gamma: f64,
    pub pi1: f64,
    pub pi2: f64,
    /// `pi1 / pi2`; infinite when Player 2 never wins.
    pub rho1: f64,
    /// Executed configurations `(A,A)`, `(B,B)`, `(A,B)`, `(B,A)`.
    pub config_probs: [f64; 4],
}

/// Probabilities of the four executed pitched-battle configurations, in the
/// order `(A1,A2)`, `(B1,B2)`, `(A1,B2)`, `(B1,A2)`.
pub fn config_probs(p: f64, q: f64, alpha1: f64, alpha2: f64) -> Result<[f64; 4]> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    check_probability("alpha1", alpha1)?;
    check_probability("alpha2", alpha2)?;
    let win = p * (1.0 - q);
    let lose = (1.0 - p) * q;
    Ok([
        win * alpha1 * alpha2,
        win * (1.0 - alpha1) * (1.0 - alpha2),
        lose * alpha1 * (1.0 - alpha2),
        lose * (1.0 - alpha1) * alpha2,
    ])
}

pub fn baseline_equilibrium(p: f64, q: f64) -> Result<BaselineEquilibrium> {
    let config_probs = config_probs(p, q, 0.5, 0.5)?;
    let win = p * (1.0 - q);
    let lose = (1.0 - p) * q;
    if win + lose == 0.0 {
        return Err(Error::Degenerate(format!(
            "no configuration is ever executed at p = {p}, q = {q}"
        )));
    }
    let pi1 = win / (lose + win);
    let rho1 = if lose > 0.0 { win / lose } else { f64::INFINITY };
    Ok(BaselineEquilibrium {
        alpha1: 0.5,
        alpha2: 0.5,
        gamma: 0.5 * (win + lose),
        pi1,
        pi2: 1.0 - pi1,
        rho1,
        config_probs,
    })
}

/// Probability that `t` consecutive iterations pass without execution.
pub fn no_engagement_prob(gamma: f64, t: u32) -> f64 {
    match i32::try_from(t) {
        Ok(t) => (1.0 - gamma).powi(t),
        Err(_) => (1.0 - gamma).powf(f64::from(t)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitiativeEquilibrium {
    pub alpha1: f64,
    pub alpha2: f64,
    pub gamma: f64,
    pub pi1: f64,
}

/// Player 1 forces play whenever his signal indicates a win, so he wins
/// exactly when the signal is right.
pub fn initiative_equilibrium(p: f64, q: f64) -> Result<InitiativeEquilibrium> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    Ok(InitiativeEquilibrium {
        alpha1: 0.5,
        alpha2: 0.5,
        gamma: 0.5,
        pi1: p,
    })
}

/// Player 1's winning odds when he engages only where Player 2 expects to lose.
pub fn withdraw_win_prob(p: f64, q: f64) -> Result<f64> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    let both_right = p * q;
    let both_wrong = (1.0 - p) * (1.0 - q);
    if both_right + both_wrong == 0.0 {
        return Err(Error::Degenerate(format!(
            "withdraw variant never engages at p = {p}, q = {q}"
        )));
    }
    Ok(both_right / (both_wrong + both_right))
}

/// Per-(observer, observed-action) signal precisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Precisions {
    /// Player 1 reading a planned `A` of Player 2.
    pub p_a: f64,
    /// Player 1 reading a planned `B` of Player 2.
    pub p_b: f64,
    /// Player 2 reading either plan of Player 1.
    pub q: f64,
}

impl Precisions {
    pub fn symmetric(p: f64, q: f64) -> Self {
        Precisions { p_a: p, p_b: p, q }
    }

    pub fn get(&self, observer: Player, planned: Action) -> f64 {
        match (observer, planned) {
            (Player::One, Action::A) => self.p_a,
            (Player::One, Action::B) => self.p_b,
            (Player::Two, _) => self.q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WinOdds {
    pub gamma: f64,
    pub pi1: f64,
    pub pi2: f64,
}

/// Engagement probability and winning odds of any variant at arbitrary
/// mixes, written out configuration by configuration.
pub fn win_odds(variant: Variant, prec: Precisions, alpha1: f64, alpha2: f64) -> Result<WinOdds> {
    for (name, v) in [
        ("p", prec.p_a),
        ("p_tilde_b", prec.p_b),
        ("q", prec.q),
        ("alpha1", alpha1),
        ("alpha2", alpha2),
    ] {
        check_probability(name, v)?;
    }
    let Precisions { p_a, p_b, q } = prec;
    let aa = alpha1 * alpha2;
    let bb = (1.0 - alpha1) * (1.0 - alpha2);
    let ab = alpha1 * (1.0 - alpha2);
    let ba = (1.0 - alpha1) * alpha2;
    let (win, lose) = match variant {
        Variant::PitchedBattle => (
            p_a * (1.0 - q) * aa + p_b * (1.0 - q) * bb,
            (1.0 - p_b) * q * ab + (1.0 - p_a) * q * ba,
        ),
        Variant::Initiative => (
            p_a * aa + p_b * bb,
            (1.0 - p_b) * ab + (1.0 - p_a) * ba,
        ),
        Variant::Withdraw => (
            p_a * q * aa + p_b * q * bb,
            (1.0 - p_b) * (1.0 - q) * ab + (1.0 - p_a) * (1.0 - q) * ba,
        ),
    };
    let gamma = win + lose;
    if gamma == 0.0 {
        return Err(Error::Degenerate(format!(
            "{variant}: no configuration is ever executed"
        )));
    }
    let pi1 = win / gamma;
    Ok(WinOdds {
        gamma,
        pi1,
        pi2: 1.0 - pi1,
    })
}

/// Post-decoy probability that a signal matches the true plan.
pub fn effective_precision(r: f64, delta: f64, xi: f64) -> f64 {
    delta * (1.0 - xi) + (1.0 - delta) * r
}

/// Decoy mix minimizing the opponent's read of one's plans, clamped to [0, 1].
pub fn optimal_decoy_mix(r: f64, delta: f64) -> Result<f64> {
    check_probability("r", r)?;
    check_probability("delta", delta)?;
    if delta == 0.0 {
        return Err(Error::Domain {
            name: "delta",
            value: delta,
        });
    }
    Ok(((r - 0.5) / delta + 1.0 - r).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoyParams {
    pub p_tilde: f64,
    pub q_tilde: f64,
    pub xi1_star: f64,
    pub xi2_star: f64,
}

/// Optimal decoy mixes for both players and the precisions they induce.
pub fn decoy_params(p: f64, q: f64, delta: f64) -> Result<DecoyParams> {
    let xi2_star = optimal_decoy_mix(p, delta)?;
    let xi1_star = optimal_decoy_mix(q, delta)?;
    Ok(DecoyParams {
        p_tilde: effective_precision(p, delta, xi2_star),
        q_tilde: effective_precision(q, delta, xi1_star),
        xi1_star,
        xi2_star,
    })
}

/// Precisions after substituting the decoys configured in `params`.
pub fn effective_precisions(params: &GameParams) -> Precisions {
    let d = params.delta;
    Precisions {
        p_a: effective_precision(params.raw_precision(Player::One, Action::A), d, params.xi2),
        p_b: effective_precision(params.raw_precision(Player::One, Action::B), d, params.xi2),
        q: effective_precision(params.q, d, params.xi1),
    }
}

/// Pitched-battle mixes when Player 1 reads a planned `B2` with the lower
/// precision `p_tilde_b`.
///
/// Each mix makes the opponent indifferent: `alpha1` zeroes the slope of
/// Player 2's expected utility, `alpha2` that of Player 1.
pub fn asymmetric_alphas(p: f64, p_tilde_b: f64, q: f64) -> Result<(f64, f64)> {
    check_probability("p", p)?;
    check_probability("p_tilde_b", p_tilde_b)?;
    check_probability("q", q)?;
    if p_tilde_b > p {
        return Err(Error::invalid(
            "p_tilde_b",
            format!("must not exceed p ({p_tilde_b} > {p})"),
        ));
    }
    let pt = p_tilde_b;
    let denom = pt * (1.0 - q) + (1.0 - p) * q + (1.0 - pt) * q + p * (1.0 - q);
    if denom == 0.0 {
        return Err(Error::Degenerate("indifference conditions are flat".into()));
    }
    let alpha1 = (pt * (1.0 - q) + (1.0 - p) * q) / denom;
    let alpha2 = ((1.0 - pt) * q + pt * (1.0 - q)) / denom;
    Ok((alpha1, alpha2))
}

/// Equilibrium planning mixes for the configured game.
pub fn equilibrium_mixes(params: &GameParams) -> Result<(f64, f64)> {
    match params.p_tilde_b {
        Some(pb) => asymmetric_alphas(params.p, pb, params.q),
        None => Ok((0.5, 0.5)),
    }
}

/// Engagement probability and odds of the configured variant at its
/// equilibrium mixes, decoys included.
pub fn variant_equilibrium(params: &GameParams) -> Result<WinOdds> {
    params.validate()?;
    let (a1, a2) = equilibrium_mixes(params)?;
    win_odds(params.variant, effective_precisions(params), a1, a2)
}

/// Win probability believed by a player who ignores the opponent's screening.
pub fn naive_win_belief(_player: Player, own_precision: f64) -> f64 {
    own_precision
}

/// Inputs outside the `p, q > 1/2` regime the closed forms are usually read in.
#[derive(Debug, Clone, PartialEq)]
pub enum TheoryWarning {
    UninformativeOrInverted { name: &'static str, value: f64 },
}

impl std::fmt::Display for TheoryWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TheoryWarning::UninformativeOrInverted { name, value } => {
                write!(f, "{name} = {value} is not above 1/2; signals carry no or inverted information")
            }
        }
    }
}

pub fn theory_warnings(params: &GameParams) -> Vec<TheoryWarning> {
    let eff = effective_precisions(params);
    let mut out = Vec::new();
    let mut check = |name, value: f64| {
        if value <= 0.5 {
            out.push(TheoryWarning::UninformativeOrInverted { name, value });
        }
    };
    check("p", params.p);
    check("q", params.q);
    if let Some(pb) = params.p_tilde_b {
        check("p_tilde_b", pb);
    }
    if params.delta > 0.0 {
        check("p_tilde", eff.p_a);
        check("q_tilde", eff.q);
    }
    out
}

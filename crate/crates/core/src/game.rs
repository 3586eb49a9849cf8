//! Game primitives: actions, scouting signals, decoys, and the per-player
//! execute/revise rules.
//!
//! Every stochastic event consumes exactly one uniform draw from the caller's
//! random source. Within one iteration the draws are taken in this order:
//!
//! 1. plan of Player 1
//! 2. plan of Player 2
//! 3. Player 1's signal about plan 2
//! 4. Player 2's signal about plan 1
//! 5. decoy gate on signal 1, then decoy lie on signal 1 (fielded by Player 2)
//! 6. decoy gate on signal 2, then decoy lie on signal 2 (fielded by Player 1)
//!
//! Steps 5 and 6 are skipped entirely when decoys are disabled (`delta == 0`).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the two actions available to each player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    A,
    B,
}

impl Action {
    pub const ALL: [Action; 2] = [Action::A, Action::B];

    pub fn other(self) -> Action {
        match self {
            Action::A => Action::B,
            Action::B => Action::A,
        }
    }

    /// Draws `A` with probability `prob_a`.
    pub fn sample<R: Rng + ?Sized>(prob_a: f64, rng: &mut R) -> Action {
        if rng.random::<f64>() < prob_a {
            Action::A
        } else {
            Action::B
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::A => f.write_str("A"),
            Action::B => f.write_str("B"),
        }
    }
}

/// Player 1 wins on matching actions, Player 2 on mismatching ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// A scouting report held by `receiver`, indicating the opponent's planned
/// action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signal {
    pub receiver: Player,
    pub indicates: Action,
}

impl Signal {
    pub fn new(receiver: Player, indicates: Action) -> Self {
        Signal {
            receiver,
            indicates,
        }
    }

    fn flipped(self) -> Self {
        Signal {
            indicates: self.indicates.other(),
            ..self
        }
    }
}

/// Zero-sum payoff pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PayoffPair {
    pub u1: i8,
    pub u2: i8,
}

impl PayoffPair {
    pub fn winner(self) -> Player {
        if self.u1 > 0 {
            Player::One
        } else {
            Player::Two
        }
    }

    pub fn of(self, player: Player) -> i8 {
        match player {
            Player::One => self.u1,
            Player::Two => self.u2,
        }
    }
}

/// Matching-pennies payoffs: Player 1 gets +1 on a match, -1 otherwise.
pub fn payoff(a1: Action, a2: Action) -> PayoffPair {
    let u1 = if a1 == a2 { 1 } else { -1 };
    PayoffPair { u1, u2: -u1 }
}

/// Rule deciding when planned actions are carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Both players must be willing.
    PitchedBattle,
    /// Player 1 forces execution whenever willing.
    Initiative,
    /// Player 1 engages only when willing and Player 2 is not.
    Withdraw,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::PitchedBattle, Variant::Initiative, Variant::Withdraw];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PitchedBattle => "pitched-battle",
            Variant::Initiative => "initiative",
            Variant::Withdraw => "withdraw",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "pitched-battle" | "pitchedbattle" | "baseline" => Ok(Variant::PitchedBattle),
            "initiative" => Ok(Variant::Initiative),
            "withdraw" => Ok(Variant::Withdraw),
            _ => Err(Error::invalid("variant", format!("unknown variant `{s}`"))),
        }
    }
}

/// How a player forms a subjective win probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeliefMode {
    /// Accounts for the opponent's screening (and decoys).
    #[default]
    Rational,
    /// Believes the win probability equals the nominal precision of the own signal.
    Naive,
}

impl FromStr for BeliefMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rational" => Ok(BeliefMode::Rational),
            "naive" | "myopic" => Ok(BeliefMode::Naive),
            _ => Err(Error::invalid("beliefs", format!("unknown belief mode `{s}`"))),
        }
    }
}

/// Scalar model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Precision of Player 1's signal about Player 2's plan.
    pub p: f64,
    /// Precision of Player 2's signal about Player 1's plan.
    pub q: f64,
    /// Precision with which Player 1 reads a planned `B` of Player 2, when
    /// that action is harder to observe. `None` means `p`.
    pub p_tilde_b: Option<f64>,
    /// Probability that a decoy replaces the informative signal.
    pub delta: f64,
    /// Probability that Player 1's decoy misstates his plan.
    pub xi1: f64,
    /// Probability that Player 2's decoy misstates his plan.
    pub xi2: f64,
    pub variant: Variant,
    pub beliefs1: BeliefMode,
    pub beliefs2: BeliefMode,
}

impl GameParams {
    pub fn new(p: f64, q: f64) -> Self {
        GameParams {
            p,
            q,
            p_tilde_b: None,
            delta: 0.0,
            xi1: 0.0,
            xi2: 0.0,
            variant: Variant::PitchedBattle,
            beliefs1: BeliefMode::Rational,
            beliefs2: BeliefMode::Rational,
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_decoys(mut self, delta: f64, xi1: f64, xi2: f64) -> Self {
        self.delta = delta;
        self.xi1 = xi1;
        self.xi2 = xi2;
        self
    }

    pub fn with_hidden_b(mut self, p_tilde_b: f64) -> Self {
        self.p_tilde_b = Some(p_tilde_b);
        self
    }

    pub fn with_beliefs(mut self, beliefs1: BeliefMode, beliefs2: BeliefMode) -> Self {
        self.beliefs1 = beliefs1;
        self.beliefs2 = beliefs2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("q", self.q)?;
        check_probability("delta", self.delta)?;
        check_probability("xi1", self.xi1)?;
        check_probability("xi2", self.xi2)?;
        if let Some(pb) = self.p_tilde_b {
            check_probability("p_tilde_b", pb)?;
            if pb > self.p {
                return Err(Error::invalid(
                    "p_tilde_b",
                    format!("must not exceed p ({pb} > {})", self.p),
                ));
            }
            if self.variant != Variant::PitchedBattle {
                return Err(Error::invalid(
                    "p_tilde_b",
                    "only supported with the pitched-battle variant",
                ));
            }
            if self.delta != 0.0 {
                return Err(Error::invalid("p_tilde_b", "cannot be combined with decoys"));
            }
        }
        Ok(())
    }

    /// Raw (pre-decoy) probability that `observer` reads the opponent's
    /// `planned` action correctly.
    pub fn raw_precision(&self, observer: Player, planned: Action) -> f64 {
        match (observer, planned) {
            (Player::One, Action::B) => self.p_tilde_b.unwrap_or(self.p),
            (Player::One, Action::A) => self.p,
            (Player::Two, _) => self.q,
        }
    }

    /// Decoy mix fielded by `player`.
    pub fn decoy_mix(&self, player: Player) -> f64 {
        match player {
            Player::One => self.xi1,
            Player::Two => self.xi2,
        }
    }

    pub fn beliefs(&self, player: Player) -> BeliefMode {
        match player {
            Player::One => self.beliefs1,
            Player::Two => self.beliefs2,
        }
    }

    /// Nominal precision of `player`'s own signal, ignoring decoys.
    pub fn nominal_precision(&self, player: Player) -> f64 {
        match player {
            Player::One => self.p,
            Player::Two => self.q,
        }
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { name, value })
    }
}

/// Draws `receiver`'s signal about `true_plan`; correct with probability
/// `precision`.
pub fn draw_signal<R: Rng + ?Sized>(
    receiver: Player,
    true_plan: Action,
    precision: f64,
    rng: &mut R,
) -> Signal {
    let correct = rng.random::<f64>() < precision;
    let indicates = if correct { true_plan } else { true_plan.other() };
    Signal::new(receiver, indicates)
}

/// Possibly replaces `raw` with a decoy fielded by the owner of `planned`.
///
/// The gate fires with probability `delta`; a fired decoy misstates `planned`
/// with probability `xi`. Always consumes two draws (gate, then lie).
pub fn apply_decoy<R: Rng + ?Sized>(
    raw: Signal,
    planned: Action,
    xi: f64,
    delta: f64,
    rng: &mut R,
) -> (Signal, bool) {
    let gate = rng.random::<f64>() < delta;
    let lie = rng.random::<f64>() < xi;
    if !gate {
        return (raw, false);
    }
    let truthful = Signal::new(raw.receiver, planned);
    let decoy = if lie { truthful.flipped() } else { truthful };
    (decoy, true)
}

/// Whether `player` sees a winning position given its own plan and signal.
pub fn wants_execute(player: Player, own_plan: Action, signal: Signal) -> bool {
    match player {
        Player::One => signal.indicates == own_plan,
        Player::Two => signal.indicates != own_plan,
    }
}

/// Whether plans are executed given both players' willingness.
pub fn execution_predicate(variant: Variant, willing1: bool, willing2: bool) -> bool {
    match variant {
        Variant::PitchedBattle => willing1 && willing2,
        Variant::Initiative => willing1,
        Variant::Withdraw => willing1 && !willing2,
    }
}

/// Everything that happened in one planning/scouting/execution round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationState {
    pub plan1: Action,
    pub plan2: Action,
    pub raw_signal1: Signal,
    pub raw_signal2: Signal,
    pub decoy_applied1: bool,
    pub decoy_applied2: bool,
    pub final_signal1: Signal,
    pub final_signal2: Signal,
    pub willing1: bool,
    pub willing2: bool,
    pub executed: bool,
}

impl IterationState {
    pub fn payoffs(&self) -> Option<PayoffPair> {
        self.executed.then(|| payoff(self.plan1, self.plan2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn payoff_table() {
        assert_eq!(payoff(Action::A, Action::A), PayoffPair { u1: 1, u2: -1 });
        assert_eq!(payoff(Action::A, Action::B), PayoffPair { u1: -1, u2: 1 });
        assert_eq!(payoff(Action::B, Action::A), PayoffPair { u1: -1, u2: 1 });
        assert_eq!(payoff(Action::B, Action::B), PayoffPair { u1: 1, u2: -1 });
        for a1 in Action::ALL {
            for a2 in Action::ALL {
                let u = payoff(a1, a2);
                assert_eq!(u.u1 + u.u2, 0);
            }
        }
    }

    #[test]
    fn extreme_precisions_are_deterministic() {
        let mut rng = rng();
        for _ in 0..1000 {
            assert_eq!(draw_signal(Player::One, Action::A, 1.0, &mut rng).indicates, Action::A);
            assert_eq!(draw_signal(Player::One, Action::B, 0.0, &mut rng).indicates, Action::A);
        }
    }

    #[test]
    fn signal_consumes_one_draw() {
        let mut a = rng();
        let mut b = rng();
        draw_signal(Player::Two, Action::B, 0.3, &mut a);
        let _: f64 = b.random();
        assert_eq!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn certain_lie_inverts() {
        let mut rng = rng();
        for raw in Action::ALL {
            let (sig, applied) =
                apply_decoy(Signal::new(Player::One, raw), Action::A, 1.0, 1.0, &mut rng);
            assert!(applied);
            assert_eq!(sig.indicates, Action::B);
        }
    }

    #[test]
    fn disabled_decoy_keeps_raw() {
        let mut rng = rng();
        for _ in 0..1000 {
            let raw = draw_signal(Player::One, Action::B, 0.6, &mut rng);
            let (sig, applied) = apply_decoy(raw, Action::B, 0.7, 0.0, &mut rng);
            assert!(!applied);
            assert_eq!(sig, raw);
        }
    }

    #[test]
    fn willingness_examples() {
        let hat = |a| Signal::new(Player::One, a);
        let hat2 = |a| Signal::new(Player::Two, a);
        assert!(wants_execute(Player::One, Action::A, hat(Action::A)));
        assert!(!wants_execute(Player::One, Action::A, hat(Action::B)));
        assert!(wants_execute(Player::Two, Action::A, hat2(Action::B)));
        assert!(!wants_execute(Player::Two, Action::B, hat2(Action::B)));
    }

    #[test]
    fn willingness_relabeling_symmetry() {
        for player in Player::BOTH {
            for plan in Action::ALL {
                for sig in Action::ALL {
                    let s = Signal::new(player, sig);
                    assert_eq!(
                        wants_execute(player, plan, s),
                        wants_execute(player, plan.other(), s.flipped())
                    );
                }
            }
            if player == Player::One {
                for x in Action::ALL {
                    assert!(wants_execute(player, x, Signal::new(player, x)));
                }
            }
        }
    }

    #[test]
    fn execution_predicates() {
        assert!(execution_predicate(Variant::PitchedBattle, true, true));
        assert!(!execution_predicate(Variant::PitchedBattle, true, false));
        assert!(execution_predicate(Variant::Initiative, true, false));
        assert!(!execution_predicate(Variant::Initiative, false, true));
        assert!(!execution_predicate(Variant::Withdraw, true, true));
        assert!(execution_predicate(Variant::Withdraw, true, false));
        for w1 in [false, true] {
            for w2 in [false, true] {
                let init = execution_predicate(Variant::Initiative, w1, w2);
                if execution_predicate(Variant::PitchedBattle, w1, w2) {
                    assert!(init);
                }
                if execution_predicate(Variant::Withdraw, w1, w2) {
                    assert!(init);
                }
            }
        }
    }

    #[test]
    fn validation() {
        assert!(GameParams::new(0.75, 0.66).validate().is_ok());
        assert!(GameParams::new(0.3, 0.2).validate().is_ok());
        assert!(matches!(
            GameParams::new(1.2, 0.5).validate(),
            Err(Error::Domain { name: "p", .. })
        ));
        assert!(GameParams::new(0.7, 0.6).with_hidden_b(0.8).validate().is_err());
        assert!(GameParams::new(0.7, 0.6).with_hidden_b(0.6).validate().is_ok());
        assert!(GameParams::new(0.7, 0.6)
            .with_hidden_b(0.6)
            .with_variant(Variant::Initiative)
            .validate()
            .is_err());
        assert!(GameParams::new(0.7, 0.6)
            .with_hidden_b(0.6)
            .with_decoys(0.5, 0.5, 0.5)
            .validate()
            .is_err());
    }

    #[test]
    fn precision_table_overrides_only_b2() {
        let g = GameParams::new(0.75, 0.6).with_hidden_b(0.625);
        assert_eq!(g.raw_precision(Player::One, Action::A), 0.75);
        assert_eq!(g.raw_precision(Player::One, Action::B), 0.625);
        assert_eq!(g.raw_precision(Player::Two, Action::A), 0.6);
        assert_eq!(g.raw_precision(Player::Two, Action::B), 0.6);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("initiative".parse::<Variant>().unwrap(), Variant::Initiative);
        assert_eq!("pitched_battle".parse::<Variant>().unwrap(), Variant::PitchedBattle);
        assert!("huns".parse::<Variant>().is_err());
    }
}

//! Subcommand bodies. Each returns a [`Table`]; writing is the caller's job.

use scouting_core::analytic::{
    self, baseline_equilibrium, effective_precisions, equilibrium_mixes, initiative_equilibrium,
    naive_win_belief, no_engagement_prob, optimal_decoy_mix, win_odds, withdraw_win_prob,
};
use scouting_core::engine::{decoy_victim_experiment, DEFAULT_MAX_ITERATIONS};
use scouting_core::solver::{solve_decoy_mix, solve_equilibrium};
use scouting_core::{BeliefMode, Estimate, GameParams, Player, Simulator, Variant};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const STANDARD_COLUMNS: [&str; 6] = ["quantity", "analytic", "mc", "half_width", "n", "seed"];
pub const SOLVE_COLUMNS: [&str; 4] = ["quantity", "solver", "analytic", "difference"];
pub const REPORT_COLUMNS: [&str; 6] = ["quantity", "reference", "analytic", "mc", "half_width", "status"];
pub const SWEEP_COLUMNS: [&str; 17] = [
    "variant", "p", "q", "delta", "xi1", "xi2", "p_tilde", "q_tilde", "alpha1", "alpha2", "gamma",
    "pi1", "pi2", "mc_pi1", "mc_half_width", "n", "seed",
];

pub const SOLVER_TOLERANCE: f64 = 1e-10;
pub const SOLVER_MAX_STEPS: usize = 200;
pub const DECOY_GRID: usize = 1001;
pub const REPORT_EPISODES: u64 = 1_000_000;
/// Agreement band, in standard errors, for the reproduction table.
pub const REPORT_SIGMAS: f64 = 4.0;

/// Equilibrium quantities from the closed forms of the configured variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub alpha1: f64,
    pub alpha2: f64,
    pub gamma: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub rho1: f64,
}

/// Decoys enter through the effective precisions; asymmetric observation
/// goes through the configuration-level odds.
pub fn closed_form(params: &GameParams) -> Result<Summary, CliError> {
    let (alpha1, alpha2) = equilibrium_mixes(params)?;
    let eff = effective_precisions(params);
    let ratio = |pi1: f64| if pi1 < 1.0 { pi1 / (1.0 - pi1) } else { f64::INFINITY };
    let (gamma, pi1, rho1) = if params.p_tilde_b.is_some() {
        let o = win_odds(params.variant, eff, alpha1, alpha2)?;
        (o.gamma, o.pi1, ratio(o.pi1))
    } else {
        let (p, q) = (eff.p_a, eff.q);
        match params.variant {
            Variant::PitchedBattle => {
                let b = baseline_equilibrium(p, q)?;
                (b.gamma, b.pi1, b.rho1)
            }
            Variant::Initiative => {
                let i = initiative_equilibrium(p, q)?;
                (i.gamma, i.pi1, ratio(i.pi1))
            }
            Variant::Withdraw => {
                let pi1 = withdraw_win_prob(p, q)?;
                (0.5 * (p * q + (1.0 - p) * (1.0 - q)), pi1, ratio(pi1))
            }
        }
    };
    Ok(Summary {
        alpha1,
        alpha2,
        gamma,
        pi1,
        pi2: 1.0 - pi1,
        rho1,
    })
}

fn analytic_row(table: &mut Table, name: &str, value: f64) {
    table.push(vec![name.into(), Cell::Num(value), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
}

pub fn analytic(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.params()?;
    let s = closed_form(&params)?;
    let mut t = Table::new(&STANDARD_COLUMNS);
    analytic_row(&mut t, "alpha1", s.alpha1);
    analytic_row(&mut t, "alpha2", s.alpha2);
    analytic_row(&mut t, "gamma", s.gamma);
    analytic_row(&mut t, "pi1", s.pi1);
    analytic_row(&mut t, "pi2", s.pi2);
    analytic_row(&mut t, "rho1", s.rho1);
    if params.variant == Variant::PitchedBattle && params.p_tilde_b.is_none() {
        let eff = effective_precisions(&params);
        let probs = analytic::config_probs(eff.p_a, eff.q, s.alpha1, s.alpha2)?;
        for (name, v) in ["exec_a1_a2", "exec_b1_b2", "exec_a1_b2", "exec_b1_a2"].into_iter().zip(probs) {
            analytic_row(&mut t, name, v);
        }
    }
    for h in cfg.horizons() {
        analytic_row(&mut t, &format!("no_engagement_t{h}"), no_engagement_prob(s.gamma, h));
    }
    if let Some(pb) = params.p_tilde_b {
        analytic_row(&mut t, "p_tilde_b", pb);
        analytic_row(&mut t, "alpha2_lt_alpha1", f64::from(u8::from(s.alpha2 < s.alpha1)));
    }
    if params.delta > 0.0 {
        let eff = effective_precisions(&params);
        analytic_row(&mut t, "xi1", params.xi1);
        analytic_row(&mut t, "xi2", params.xi2);
        analytic_row(&mut t, "p_tilde", eff.p_a);
        analytic_row(&mut t, "q_tilde", eff.q);
    }
    analytic_row(&mut t, "naive_belief1", naive_win_belief(Player::One, params.p));
    analytic_row(&mut t, "naive_belief2", naive_win_belief(Player::Two, params.q));
    Ok(t)
}

pub fn simulate(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.params()?;
    let seed = cfg.seed()?;
    let n = cfg.episodes()?;
    let max_iterations = cfg.max_iterations()?;
    let sim = Simulator::equilibrium(params)?;
    let est = sim.estimate(n, seed, max_iterations)?;
    let s = closed_form(&params).ok();
    let beliefs = sim.subjective_beliefs();

    let mut t = Table::new(&STANDARD_COLUMNS);
    let mut row = |name: &str, analytic: Option<f64>, mc: Option<Estimate>| {
        t.push(vec![
            name.into(),
            Cell::opt(analytic),
            Cell::opt(mc.map(|e| e.value)),
            Cell::opt(mc.map(|e| e.half_width)),
            Cell::Int(n),
            Cell::Int(seed),
        ]);
    };
    let pi2 = Estimate {
        value: 1.0 - est.pi1.value,
        half_width: est.pi1.half_width,
    };
    row("pi1", s.map(|s| s.pi1), Some(est.pi1));
    row("pi2", s.map(|s| s.pi2), Some(pi2));
    row("gamma", s.map(|s| s.gamma), Some(est.gamma));
    row("mean_iterations", s.map(|s| 1.0 / s.gamma), Some(est.mean_iterations));
    row("executed_a1", None, Some(est.executed_a1));
    row("executed_a2", None, Some(est.executed_a2));
    row(
        "censored",
        None,
        Some(Estimate {
            value: est.n_censored as f64,
            half_width: f64::NAN,
        }),
    );
    for (k, (cal, odds)) in [
        (est.calibration1, s.map(|s| s.pi1)),
        (est.calibration2, s.map(|s| s.pi2)),
    ]
    .into_iter()
    .enumerate()
    {
        let i = k + 1;
        let belief = beliefs[k];
        let hw = cal.realized_half_width;
        row(&format!("belief{i}"), belief, Some(Estimate { value: cal.belief, half_width: 0.0 }));
        row(&format!("realized{i}"), odds, Some(Estimate { value: cal.realized, half_width: hw }));
        row(
            &format!("belief_gap{i}"),
            belief.zip(odds).map(|(b, o)| b - o),
            Some(Estimate { value: cal.gap(), half_width: hw }),
        );
    }
    Ok(t)
}

pub fn solve(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.params()?;
    let sol = solve_equilibrium(&params, SOLVER_TOLERANCE, SOLVER_MAX_STEPS)?;
    let (a1, a2) = equilibrium_mixes(&params)?;
    let mut t = Table::new(&SOLVE_COLUMNS);
    let mut compare = |name: &str, solver: f64, analytic: f64| {
        t.push(vec![name.into(), Cell::Num(solver), Cell::Num(analytic), Cell::Num(solver - analytic)]);
    };
    compare("alpha1", sol.alpha1, a1);
    compare("alpha2", sol.alpha2, a2);
    compare("residual1", sol.residual1, 0.0);
    compare("residual2", sol.residual2, 0.0);
    if params.p_tilde_b.is_some() {
        let flag = |b: bool| f64::from(u8::from(b));
        compare("alpha2_lt_alpha1", flag(sol.alpha2 < sol.alpha1), flag(a2 < a1));
    }
    if params.delta > 0.0 {
        let d = params.delta;
        compare("xi1", solve_decoy_mix(params.q, d, DECOY_GRID)?, optimal_decoy_mix(params.q, d)?);
        compare("xi2", solve_decoy_mix(params.p, d, DECOY_GRID)?, optimal_decoy_mix(params.p, d)?);
    }
    let flag = |b: bool| Cell::Int(u64::from(b));
    t.push(vec!["steps".into(), Cell::Int(sol.iterations_used as u64), Cell::Empty, Cell::Empty]);
    t.push(vec!["flat1".into(), flag(sol.flat1), Cell::Empty, Cell::Empty]);
    t.push(vec!["flat2".into(), flag(sol.flat2), Cell::Empty, Cell::Empty]);
    Ok(t)
}

fn axis(name: &'static str, list: &Option<Vec<f64>>, scalar: Option<f64>) -> Result<Vec<f64>, CliError> {
    match (list, scalar) {
        (Some(v), _) if v.len() < 2 => Err(CliError::field(name, "a sweep range needs at least 2 points")),
        (Some(v), _) => Ok(v.clone()),
        (None, Some(x)) => Ok(vec![x]),
        (None, None) => Err(CliError::field(name, "missing (pass a single value or a range)")),
    }
}

pub fn sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let diagonal = cfg.diagonal.unwrap_or(false);
    let ps = axis("p_values", &cfg.p_values, cfg.p)?;
    let qs = if diagonal {
        if cfg.q_values.is_some() {
            return Err(CliError::field("q_values", "cannot be combined with diagonal"));
        }
        Vec::new()
    } else {
        axis("q_values", &cfg.q_values, cfg.q)?
    };
    let deltas = axis("delta_values", &cfg.delta_values, Some(cfg.delta.unwrap_or(0.0)))?;
    let variants = match &cfg.variants {
        Some(v) if v.len() < 2 => return Err(CliError::field("variants", "a sweep range needs at least 2 points")),
        Some(v) => v.clone(),
        None => vec![cfg.variant()],
    };
    let has_range = cfg.p_values.is_some()
        || cfg.q_values.is_some()
        || cfg.delta_values.is_some()
        || cfg.variants.is_some();
    if !has_range {
        return Err(CliError::field("p_values", "a sweep needs at least one range"));
    }
    let mc = match cfg.episodes {
        Some(_) => Some((cfg.episodes()?, cfg.seed()?, cfg.max_iterations()?)),
        None => None,
    };

    let mut points = Vec::new();
    for &variant in &variants {
        for &delta in &deltas {
            for &p in &ps {
                if diagonal {
                    points.push((variant, p, p, delta));
                } else {
                    for &q in &qs {
                        points.push((variant, p, q, delta));
                    }
                }
            }
        }
    }

    let mut t = Table::new(&SWEEP_COLUMNS);
    for (variant, p, q, delta) in points {
        let params = cfg.params_at(variant, p, q, delta)?;
        let s = closed_form(&params).ok();
        let eff = effective_precisions(&params);
        let est = match mc {
            Some((n, seed, max)) => Some(Simulator::equilibrium(params)?.estimate(n, seed, max)?),
            None => None,
        };
        t.push(vec![
            variant.name().into(),
            Cell::Num(p),
            Cell::Num(q),
            Cell::Num(delta),
            Cell::Num(params.xi1),
            Cell::Num(params.xi2),
            Cell::Num(eff.p_a),
            Cell::Num(eff.q),
            Cell::opt(s.map(|s| s.alpha1)),
            Cell::opt(s.map(|s| s.alpha2)),
            Cell::opt(s.map(|s| s.gamma)),
            Cell::opt(s.map(|s| s.pi1)),
            Cell::opt(s.map(|s| s.pi2)),
            Cell::opt(est.map(|e| e.pi1.value)),
            Cell::opt(est.map(|e| e.pi1.half_width)),
            mc.map_or(Cell::Empty, |m| Cell::Int(m.0)),
            mc.map_or(Cell::Empty, |m| Cell::Int(m.1)),
        ]);
    }
    Ok(t)
}

/// What a stated value asserts about the analytic quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Equals(f64),
    Below(f64),
    Above(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub quantity: String,
    pub reference: &'static str,
    pub target: Target,
    pub analytic: f64,
    pub mc: Option<Estimate>,
}

impl Claim {
    pub fn passes(&self) -> bool {
        let analytic_ok = match self.target {
            Target::Equals(v) => (self.analytic - v).abs() <= 1e-12,
            Target::Below(v) => self.analytic < v,
            Target::Above(v) => self.analytic > v,
        };
        let mc_ok = self.mc.is_none_or(|e| {
            let band = REPORT_SIGMAS * e.sigma();
            let agrees = (e.value - self.analytic).abs() <= band;
            let bound = match self.target {
                Target::Equals(_) => true,
                Target::Below(v) => e.value + band < v,
                Target::Above(v) => e.value - band > v,
            };
            agrees && bound
        });
        analytic_ok && mc_ok
    }
}

fn claim(quantity: &str, reference: &'static str, target: Target, analytic: f64, mc: Option<Estimate>) -> Claim {
    Claim {
        quantity: quantity.to_string(),
        reference,
        target,
        analytic,
        mc,
    }
}

/// Every stated quantity with its closed form, a simulation at
/// [`REPORT_EPISODES`] episodes, and a pass/fail verdict.
pub fn stated_claims(seed: u64) -> Result<Vec<Claim>, CliError> {
    use Target::*;
    let n = REPORT_EPISODES;
    let run = |params: GameParams| -> Result<scouting_core::Estimates, CliError> {
        Ok(Simulator::equilibrium(params)?.estimate(n, seed, DEFAULT_MAX_ITERATIONS)?)
    };
    let (p, q) = (0.75, 2.0 / 3.0);
    let mut claims = Vec::new();

    let base = baseline_equilibrium(p, q)?;
    let est = run(GameParams::new(p, q).with_beliefs(BeliefMode::Naive, BeliefMode::Naive))?;
    let pi1 = est.pi1;
    let pi2 = Estimate { value: 1.0 - pi1.value, half_width: pi1.half_width };
    let rho = Estimate {
        value: pi1.value / (1.0 - pi1.value),
        half_width: pi1.half_width / (1.0 - pi1.value).powi(2),
    };
    claims.push(claim("baseline pi1 (p=3/4, q=2/3)", "3/5", Equals(0.6), base.pi1, Some(pi1)));
    claims.push(claim("baseline pi2 (p=3/4, q=2/3)", "2/5", Equals(0.4), base.pi2, Some(pi2)));
    claims.push(claim("baseline rho1 (p=3/4, q=2/3)", "9/6", Equals(1.5), base.rho1, Some(rho)));
    claims.push(claim("precision ratio p/q", "9/8", Equals(9.0 / 8.0), p / q, None));
    claims.push(claim("baseline gamma (p=3/4, q=2/3)", "5/24", Equals(5.0 / 24.0), base.gamma, Some(est.gamma)));
    let gap1 = Estimate { value: est.calibration1.gap(), half_width: pi1.half_width };
    let gap2 = Estimate { value: est.calibration2.gap(), half_width: pi1.half_width };
    claims.push(claim("naive overestimate player 1 (p=3/4, q=2/3)", "> 0", Above(0.0), p - base.pi1, Some(gap1)));
    claims.push(claim("naive overestimate player 2 (p=3/4, q=2/3)", "> 0", Above(0.0), q - base.pi2, Some(gap2)));

    let flat = baseline_equilibrium(0.5, 0.5)?;
    let est = run(GameParams::new(0.5, 0.5))?;
    claims.push(claim("baseline gamma (p=q=1/2)", "1/4", Equals(0.25), flat.gamma, Some(est.gamma)));
    claims.push(claim("baseline mean iterations (p=q=1/2)", "4", Equals(4.0), 1.0 / flat.gamma, Some(est.mean_iterations)));
    let perfect: f64 = analytic::config_probs(1.0, 1.0, 0.5, 0.5)?.iter().sum();
    claims.push(claim("baseline gamma (p=q=1)", "0", Equals(0.0), perfect, None));

    let third = 2.0 / 3.0;
    let init = initiative_equilibrium(third, third)?;
    let est = run(GameParams::new(third, third).with_variant(Variant::Initiative))?;
    claims.push(claim("initiative pi1 (p=q=2/3)", "2/3", Equals(third), init.pi1, Some(est.pi1)));
    claims.push(claim("initiative gamma (p=q=2/3)", "1/2", Equals(0.5), init.gamma, Some(est.gamma)));
    claims.push(claim("initiative mean iterations (p=q=2/3)", "2", Equals(2.0), 1.0 / init.gamma, Some(est.mean_iterations)));
    let base_sym = baseline_equilibrium(third, third)?;
    claims.push(claim("baseline pi1 (p=q=2/3)", "1/2", Equals(0.5), base_sym.pi1, None));

    let wd = withdraw_win_prob(third, third)?;
    let est = run(GameParams::new(third, third).with_variant(Variant::Withdraw))?;
    claims.push(claim("withdraw pi1 (p=q=2/3)", "4/5", Equals(0.8), wd, Some(est.pi1)));

    let xi = optimal_decoy_mix(p, 1.0)?;
    claims.push(claim("optimal decoy mix (p=3/4, delta=1)", "1/2", Equals(0.5), xi, None));
    let read = analytic::effective_precision(p, 1.0, xi);
    let est = decoy_victim_experiment(p, q, 1.0, xi, BeliefMode::Rational, n, seed)?;
    claims.push(claim("initiative pi1 vs optimal decoys (p=3/4, delta=1)", "1/2", Equals(0.5), read, Some(est.pi1)));

    let read = analytic::effective_precision(p, 0.5, 1.0);
    let est = decoy_victim_experiment(p, q, 0.5, 1.0, BeliefMode::Naive, n, seed)?;
    claims.push(claim("naive victim pi1 (p=3/4, delta=1/2, xi=1)", "< 1/2", Below(0.5), read, Some(est.pi1)));

    Ok(claims)
}

pub fn report_paper(cfg: &RunConfig) -> Result<Table, CliError> {
    let seed = cfg.seed()?;
    let mut t = Table::new(&REPORT_COLUMNS);
    for c in stated_claims(seed)? {
        let status = if c.passes() { "PASS" } else { "FAIL" };
        t.push(vec![
            Cell::Text(c.quantity.clone()),
            c.reference.into(),
            Cell::Num(c.analytic),
            Cell::opt(c.mc.map(|e| e.value)),
            Cell::opt(c.mc.map(|e| e.half_width)),
            status.into(),
        ]);
    }
    Ok(t)
}

//! Shared fixtures for the criterion benchmarks.

use scouting_core::{GameParams, Variant};

/// Parameterizations used across benches: the worked example under each
/// execution rule, plus a decoyed initiative game.
pub fn fixtures() -> Vec<(&'static str, GameParams)> {
    let base = GameParams::new(0.75, 2.0 / 3.0);
    vec![
        ("pitched-battle", base),
        ("initiative", base.with_variant(Variant::Initiative)),
        ("withdraw", base.with_variant(Variant::Withdraw)),
        (
            "initiative-decoys",
            base.with_variant(Variant::Initiative).with_decoys(0.5, 0.5, 1.0),
        ),
    ]
}

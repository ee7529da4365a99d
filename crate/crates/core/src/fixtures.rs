//! Bundled example inputs.

use std::collections::BTreeMap;

use crate::ispl::VarRef;

/// The Goldseeker game: two agents on a 4x3 grid with two obstacles.
pub const GOLDSEEKER_MODEL: &str = include_str!("../fixtures/goldseeker.ispl");

/// Two states, `p` and `!p`; Ag1 controls which one comes next.
pub const TWO_STATE_MODEL: &str = include_str!("../fixtures/two_state.ispl");

pub const GOLDSEEKER_BA_CONFIG: &str = include_str!("../fixtures/goldseeker_ba.cfg");
pub const GOLDSEEKER_RA_CONFIG: &str = include_str!("../fixtures/goldseeker_ra.cfg");

/// Scripted actions for the four-perception replay from the default starts.
pub const REPLAY_SCRIPT: &str = include_str!("../fixtures/replay.trace");

/// Both `mined` flags start false.
pub fn goldseeker_initials() -> BTreeMap<VarRef, i64> {
    ["BA", "RA"]
        .into_iter()
        .map(|a| {
            (
                VarRef {
                    owner: a.to_string(),
                    name: "mined".to_string(),
                },
                0,
            )
        })
        .collect()
}

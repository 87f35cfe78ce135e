//! Data files compiled into the crate.

pub use crate::explain::{BUNDLED_KB as CONCEPTNET_MINI_KB, BUNDLED_RULES as EXPLAIN_RULES};

pub const STATE7: &str = include_str!("../data/scenarios/state7.scn");
pub const STATE8: &str = include_str!("../data/scenarios/state8.scn");

const SCENARIOS: [(&str, &str); 2] = [("state7", STATE7), ("state8", STATE8)];

/// Source text of a bundled scenario.
pub fn scenario(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".scn").unwrap_or(name);
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn scenario_names() -> impl Iterator<Item = &'static str> {
    SCENARIOS.iter().map(|(n, _)| *n)
}

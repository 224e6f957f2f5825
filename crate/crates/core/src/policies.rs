//! Information-flow policies over the propositions `hi` (high input), `li`
//! (low input), `lo` (low output) and `lam` (dummy high input).

use crate::formula::{nonimplication, parse, Formula};

pub const GNI: &str = include_str!("../policies/gni.hltl");
pub const NI: &str = include_str!("../policies/ni.hltl");
pub const OD: &str = include_str!("../policies/od.hltl");
pub const GOD: &str = include_str!("../policies/god.hltl");
pub const WOD: &str = include_str!("../policies/wod.hltl");

pub const EXAMPLE: &str = include_str!("../formulas/example1.hltl");

/// Policy names paired with their source text.
pub const ALL: [(&str, &str); 5] = [
    ("gni", GNI),
    ("ni", NI),
    ("od", OD),
    ("god", GOD),
    ("wod", WOD),
];

/// The non-implications that hold between the policies, as `(f, g)` name
/// pairs: some trace set satisfies `f` but not `g`.
pub const NON_IMPLICATIONS: [(&str, &str); 7] = [
    ("od", "gni"),
    ("god", "gni"),
    ("wod", "gni"),
    ("od", "ni"),
    ("god", "ni"),
    ("wod", "ni"),
    ("gni", "ni"),
];

pub fn policy(name: &str) -> Option<Formula> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse(text).expect("bundled policy parses"))
}

/// `f ∧ ¬g` for each entry of [`NON_IMPLICATIONS`], named `f_not_g`.
pub fn nonimplication_suite() -> Vec<(String, Formula)> {
    NON_IMPLICATIONS
        .iter()
        .map(|(f, g)| {
            let (pf, pg) = (policy(f).unwrap(), policy(g).unwrap());
            (format!("{f}_not_{g}"), nonimplication(&pf, &pg))
        })
        .collect()
}

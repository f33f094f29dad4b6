//! Small hand-built instances that exhibit the behaviours the library is
//! about: HR trade-offs across jobs, over-and-above VR seats, and the
//! inter se merit failures of migration-based allocation.

use crate::model::{validate_instance, Instance, InstanceSpec};

/// Two jobs, each with a single open position HR-protected for a different
/// trait; two individuals who each prefer the job protected for the other's trait.
pub const HR_TRADEOFF_PAIR: &str = include_str!("../fixtures/hr_tradeoff_pair.json");
/// The pair above plus a third, lower-merit holder of the second trait.
pub const HR_INEFFICIENCY_TRIO: &str = include_str!("../fixtures/hr_inefficiency_trio.json");
/// Three jobs with one open position each and one extra category-`c` position at `x`.
pub const UPSC_MIGRATION: &str = include_str!("../fixtures/upsc_migration.json");
/// Two colleges; the MRC at `y` displaces the lowest-merit `c` holder at `x`.
pub const MEDICAL_MRC_DISPLACEMENT: &str =
    include_str!("../fixtures/medical_mrc_displacement.json");
/// One `c` position at `x`, one open position at `y`; both candidates are in `c`.
pub const UPPSC_INTER_SE: &str = include_str!("../fixtures/uppsc_inter_se.json");
/// One job, one open and one `c` position, two `c` applicants.
pub const OVER_AND_ABOVE: &str = include_str!("../fixtures/over_and_above.json");

/// Every bundled scenario as `(name, json)`.
pub const ALL: &[(&str, &str)] = &[
    ("hr-tradeoff-pair", HR_TRADEOFF_PAIR),
    ("hr-inefficiency-trio", HR_INEFFICIENCY_TRIO),
    ("upsc-migration", UPSC_MIGRATION),
    ("medical-mrc-displacement", MEDICAL_MRC_DISPLACEMENT),
    ("uppsc-inter-se", UPPSC_INTER_SE),
    ("over-and-above", OVER_AND_ABOVE),
];

fn load(json: &str) -> Instance {
    let spec = InstanceSpec::from_json(json).expect("bundled scenario parses");
    validate_instance(&spec).expect("bundled scenario is valid")
}

pub fn hr_tradeoff_pair() -> Instance {
    load(HR_TRADEOFF_PAIR)
}

pub fn hr_inefficiency_trio() -> Instance {
    load(HR_INEFFICIENCY_TRIO)
}

pub fn upsc_migration() -> Instance {
    load(UPSC_MIGRATION)
}

pub fn medical_mrc_displacement() -> Instance {
    load(MEDICAL_MRC_DISPLACEMENT)
}

pub fn uppsc_inter_se() -> Instance {
    load(UPPSC_INTER_SE)
}

pub fn over_and_above() -> Instance {
    load(OVER_AND_ABOVE)
}

pub fn by_name(name: &str) -> Option<Instance> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, j)| load(j))
}

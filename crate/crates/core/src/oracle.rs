//! Brute-force ground truth for small instances.
//!
//! Assignments are enumerated exhaustively, filtered through the axiom
//! checkers, and compared against the 2SMH-DA outcome. Stability is
//! evaluated clause by clause against the 2SMH choice profile.

use thiserror::Error;

use crate::axioms::{pareto_compare, satisfies_all, Pareto};
use crate::choice::{aggregate_choose, two_smh_choose};
use crate::mechanisms::run_2smh_da;
use crate::model::{Assignment, IndividualId, Instance, JobId, Seat};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large to enumerate: {individuals} individuals (max {max_individuals}), {seats} positions (max {max_seats})")]
    InstanceTooLarge {
        individuals: usize,
        max_individuals: usize,
        seats: u32,
        max_seats: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_individuals: usize,
    pub max_seats: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_individuals: 6,
            max_seats: 8,
        }
    }
}

impl Bounds {
    pub fn check(&self, inst: &Instance) -> Result<(), OracleError> {
        let seats = inst.total_capacity();
        if inst.individuals.len() > self.max_individuals || seats > self.max_seats {
            return Err(OracleError::InstanceTooLarge {
                individuals: inst.individuals.len(),
                max_individuals: self.max_individuals,
                seats,
                max_seats: self.max_seats,
            });
        }
        Ok(())
    }
}

/// Depth-first enumeration of assignments. Each individual's options are
/// `∅` followed by her eligible positions in job-then-vertical order.
pub struct Assignments {
    options: Vec<Vec<Option<Seat>>>,
    /// Remaining capacity per `(job, vertical index)`.
    room: Vec<Vec<u32>>,
    stack: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl Assignments {
    fn new(inst: &Instance, acceptable_only: bool) -> Self {
        let options = inst
            .individual_ids()
            .map(|i| {
                let mut opts = vec![None];
                for j in inst.job_ids() {
                    if acceptable_only && !inst.individual(i).finds_acceptable(j) {
                        continue;
                    }
                    for v in inst.verticals() {
                        if inst.eligible(i, v) && inst.job(j).reserve(v) > 0 {
                            opts.push(Some(Seat::new(j, v)));
                        }
                    }
                }
                opts
            })
            .collect();
        let room = inst
            .job_ids()
            .map(|j| inst.verticals().map(|v| inst.job(j).reserve(v)).collect())
            .collect();
        Assignments {
            options,
            room,
            stack: Vec::new(),
            fresh: true,
            done: false,
        }
    }

    fn seat(&self, level: usize, k: usize) -> Option<Seat> {
        self.options[level][k]
    }

    /// Moves the top level to its next feasible option, popping exhausted
    /// levels. Returns false once the whole tree is exhausted.
    fn bump(&mut self) -> bool {
        while let Some(&cur) = self.stack.last() {
            let level = self.stack.len() - 1;
            if cur != usize::MAX {
                if let Some(s) = self.seat(level, cur) {
                    self.room[s.job.0][s.vertical.index()] += 1;
                }
            }
            let start = if cur == usize::MAX { 0 } else { cur + 1 };
            let next = (start..self.options[level].len()).find(|&k| match self.seat(level, k) {
                None => true,
                Some(s) => self.room[s.job.0][s.vertical.index()] > 0,
            });
            match next {
                Some(k) => {
                    if let Some(s) = self.seat(level, k) {
                        self.room[s.job.0][s.vertical.index()] -= 1;
                    }
                    *self.stack.last_mut().unwrap() = k;
                    return true;
                }
                None => {
                    self.stack.pop();
                }
            }
        }
        false
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
        } else if !self.bump() {
            self.done = true;
            return None;
        }
        while self.stack.len() < self.options.len() {
            self.stack.push(usize::MAX);
            if !self.bump() {
                self.done = true;
                return None;
            }
        }
        Some(Assignment::from_seats(
            self.stack
                .iter()
                .enumerate()
                .map(|(level, &k)| self.seat(level, k))
                .collect(),
        ))
    }
}

/// Every assignment that respects eligibility and capacity, each once.
pub fn enumerate_assignments(inst: &Instance, bounds: Bounds) -> Result<Assignments, OracleError> {
    bounds.check(inst)?;
    Ok(Assignments::new(inst, false))
}

/// Exactly the assignments passing all five axioms.
///
/// Only individually rational assignments are enumerated; the rest fail
/// the first axiom anyway.
pub fn axiom_satisfying_set(
    inst: &Instance,
    bounds: Bounds,
) -> Result<Vec<Assignment>, OracleError> {
    bounds.check(inst)?;
    Ok(Assignments::new(inst, true)
        .filter(|a| satisfies_all(inst, a))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceVerdict {
    pub outcome: Assignment,
    pub satisfying: Vec<Assignment>,
    /// Axiom-satisfying assignments the 2SMH-DA outcome fails to weakly dominate.
    pub counterexamples: Vec<Assignment>,
}

impl DominanceVerdict {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn outcome_satisfies_axioms(&self) -> bool {
        self.satisfying.contains(&self.outcome)
    }
}

/// Checks that the 2SMH-DA outcome weakly Pareto dominates every
/// axiom-satisfying assignment.
pub fn verify_dominance(inst: &Instance, bounds: Bounds) -> Result<DominanceVerdict, OracleError> {
    let satisfying = axiom_satisfying_set(inst, bounds)?;
    let outcome = run_2smh_da(inst).assignment;
    let counterexamples = satisfying
        .iter()
        .filter(|a| {
            !matches!(
                pareto_compare(inst, &outcome, a),
                Pareto::ADominates | Pareto::Equal
            )
        })
        .cloned()
        .collect();
    Ok(DominanceVerdict {
        outcome,
        satisfying,
        counterexamples,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityWitness {
    IrBreach {
        individual: IndividualId,
    },
    /// The 2SMH rule applied to the job's holders does not reproduce the
    /// assignment's per-vertical split.
    JobIrrational {
        job: JobId,
    },
    BlockingPair {
        individual: IndividualId,
        job: JobId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StabilityReport {
    pub witnesses: Vec<StabilityWitness>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Evaluates individual rationality, job rationality and the no-blocking
/// condition against the 2SMH choice profile.
pub fn check_stability(inst: &Instance, a: &Assignment) -> StabilityReport {
    let mut witnesses = Vec::new();
    for (i, seat) in a.iter() {
        if let Some(s) = seat {
            if !inst.individual(i).finds_acceptable(s.job) {
                witnesses.push(StabilityWitness::IrBreach { individual: i });
            }
        }
    }
    let holders: Vec<Vec<IndividualId>> = inst.job_ids().map(|j| a.job_holders(j)).collect();
    for j in inst.job_ids() {
        let chosen = two_smh_choose(inst, j, &holders[j.0]);
        let rational = inst.verticals().all(|v| {
            let mut want = chosen.part(v).to_vec();
            want.sort();
            want == a.holders(j, v)
        });
        if !rational {
            witnesses.push(StabilityWitness::JobIrrational { job: j });
        }
    }
    for i in inst.individual_ids() {
        for &j in &inst.individual(i).preferences {
            if Some(j) == a.job_of(i) {
                break;
            }
            let mut pool = holders[j.0].clone();
            pool.push(i);
            if aggregate_choose(inst, j, &pool).contains(&i) {
                witnesses.push(StabilityWitness::BlockingPair {
                    individual: i,
                    job: j,
                });
            }
        }
    }
    StabilityReport { witnesses }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BridgeVerdict {
    pub checked: usize,
    /// Axiom-satisfying assignments that are not stable.
    pub failures: Vec<(Assignment, StabilityReport)>,
}

impl BridgeVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Confirms every axiom-satisfying assignment is stable with respect to the
/// 2SMH choice profile.
pub fn equivalence_axioms_stability(
    inst: &Instance,
    bounds: Bounds,
) -> Result<BridgeVerdict, OracleError> {
    let satisfying = axiom_satisfying_set(inst, bounds)?;
    let checked = satisfying.len();
    let failures = satisfying
        .into_iter()
        .filter_map(|a| {
            let r = check_stability(inst, &a);
            (!r.is_stable()).then_some((a, r))
        })
        .collect();
    Ok(BridgeVerdict { checked, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, InstanceSpec, Vertical};
    use crate::scenarios;

    /// Independent count: recursion over individuals with capacity bookkeeping.
    fn count(inst: &Instance) -> usize {
        fn go(inst: &Instance, i: usize, room: &mut Vec<Vec<u32>>) -> usize {
            if i == inst.individuals.len() {
                return 1;
            }
            let mut total = go(inst, i + 1, room);
            for j in 0..inst.jobs.len() {
                for vi in 0..inst.vertical_count() {
                    let v = Vertical::from_index(vi);
                    if room[j][vi] > 0 && inst.eligible(IndividualId(i), v) {
                        room[j][vi] -= 1;
                        total += go(inst, i + 1, room);
                        room[j][vi] += 1;
                    }
                }
            }
            total
        }
        let mut room = inst
            .job_ids()
            .map(|j| inst.verticals().map(|v| inst.job(j).reserve(v)).collect())
            .collect();
        go(inst, 0, &mut room)
    }

    fn seat(inst: &Instance, j: &str) -> Option<Seat> {
        Some(Seat::new(inst.job_index(j).unwrap(), Vertical::Open))
    }

    fn assign(inst: &Instance, pairs: &[(&str, &str)]) -> Assignment {
        let mut a = Assignment::unassigned(inst.individuals.len());
        for (i, j) in pairs {
            a.set(inst.individual_index(i).unwrap(), seat(inst, j));
        }
        a
    }

    #[test]
    fn single_seat_has_two_assignments() {
        let mut inst = scenarios::over_and_above();
        inst.individuals.truncate(1);
        inst.individuals[0].category = None;
        assert_eq!(
            enumerate_assignments(&inst, Bounds::default())
                .unwrap()
                .count(),
            2
        );
    }

    #[test]
    fn pair_has_seven_assignments() {
        let inst = scenarios::hr_tradeoff_pair();
        let all: Vec<_> = enumerate_assignments(&inst, Bounds::default())
            .unwrap()
            .collect();
        assert_eq!(all.len(), 7);
        assert_eq!(count(&inst), 7);
        for (k, a) in all.iter().enumerate() {
            assert!(a.validate(&inst).is_ok());
            assert!(!all[k + 1..].contains(a));
        }
    }

    #[test]
    fn counts_agree_with_recursion() {
        for inst in [
            scenarios::upsc_migration(),
            scenarios::medical_mrc_displacement(),
            scenarios::over_and_above(),
            scenarios::hr_inefficiency_trio(),
        ] {
            let n = enumerate_assignments(&inst, Bounds::default())
                .unwrap()
                .count();
            assert_eq!(n, count(&inst));
        }
    }

    #[test]
    fn general_never_on_reserved_position() {
        let inst = scenarios::upsc_migration();
        let c = inst.vertical_by_name("c").unwrap();
        for a in enumerate_assignments(&inst, Bounds::default()).unwrap() {
            for (i, s) in a.iter() {
                if inst.individual(i).category.is_none() {
                    assert!(s.is_none_or(|s| s.vertical != c));
                }
            }
        }
    }

    #[test]
    fn bounds_enforced() {
        let inst = scenarios::upsc_migration();
        let tight = Bounds {
            max_individuals: 4,
            max_seats: 8,
        };
        assert!(matches!(
            enumerate_assignments(&inst, tight),
            Err(OracleError::InstanceTooLarge { individuals: 5, .. })
        ));
    }

    #[test]
    fn pair_satisfying_set_is_alpha_and_beta() {
        let inst = scenarios::hr_tradeoff_pair();
        let set = axiom_satisfying_set(&inst, Bounds::default()).unwrap();
        let alpha = assign(&inst, &[("a", "y"), ("b", "x")]);
        let beta = assign(&inst, &[("a", "x"), ("b", "y")]);
        assert_eq!(set.len(), 2);
        assert!(set.contains(&alpha) && set.contains(&beta));
        let v = verify_dominance(&inst, Bounds::default()).unwrap();
        assert!(v.passed());
        assert_eq!(v.outcome, alpha);
    }

    #[test]
    fn trio_satisfying_set_is_alpha_only() {
        let inst = scenarios::hr_inefficiency_trio();
        let set = axiom_satisfying_set(&inst, Bounds::default()).unwrap();
        let alpha = assign(&inst, &[("a", "x"), ("b", "y")]);
        assert_eq!(set, vec![alpha.clone()]);
        let v = verify_dominance(&inst, Bounds::default()).unwrap();
        assert!(v.passed() && v.outcome_satisfies_axioms());
        assert_eq!(v.outcome, alpha);
    }

    #[test]
    fn empty_instance() {
        let inst = validate_instance(&InstanceSpec {
            jobs: vec![],
            categories: vec![],
            traits: vec![],
            individuals: vec![],
        })
        .unwrap();
        let set = axiom_satisfying_set(&inst, Bounds::default()).unwrap();
        assert_eq!(set, vec![Assignment::unassigned(0)]);
    }

    #[test]
    fn stability_clauses() {
        let inst = scenarios::hr_inefficiency_trio();
        let alpha = assign(&inst, &[("a", "x"), ("b", "y")]);
        let beta = assign(&inst, &[("a", "y"), ("b", "x")]);
        assert!(check_stability(&inst, &alpha).is_stable());
        let r = check_stability(&inst, &beta);
        assert!(r.witnesses.contains(&StabilityWitness::BlockingPair {
            individual: inst.individual_index("c").unwrap(),
            job: inst.job_index("y").unwrap(),
        }));
        let empty = Assignment::unassigned(3);
        assert!(check_stability(&inst, &empty)
            .witnesses
            .iter()
            .any(|w| matches!(w, StabilityWitness::BlockingPair { .. })));
    }

    #[test]
    fn job_rationality_catches_wrong_split() {
        let inst = scenarios::over_and_above();
        let c = inst.vertical_by_name("c").unwrap();
        let mut a = Assignment::unassigned(2);
        a.set(IndividualId(0), Some(Seat::new(JobId(0), c)));
        a.set(IndividualId(1), Some(Seat::new(JobId(0), Vertical::Open)));
        assert_eq!(
            check_stability(&inst, &a).witnesses,
            vec![StabilityWitness::JobIrrational { job: JobId(0) }]
        );
    }

    #[test]
    fn bridge_on_scenarios() {
        for (name, _) in scenarios::ALL {
            let inst = scenarios::by_name(name).unwrap();
            let v = equivalence_axioms_stability(&inst, Bounds::default()).unwrap();
            assert!(v.passed(), "{name}");
            assert!(v.checked >= 1, "{name}");
            let da = run_2smh_da(&inst).assignment;
            assert!(check_stability(&inst, &da).is_stable(), "{name}");
        }
    }
}

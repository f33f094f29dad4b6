//! Executable checkers for the five allocation axioms, Pareto comparison,
//! exhaustive strategy-proofness testing, and the legacy diagnostics
//! (inter se merit and cutoff scores).
//!
//! Every checker reports all witnesses it finds, sorted by the string ids
//! they mention, so a report reads like a list of grievances.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::hr::HrMatcher;
use crate::mechanisms::{common_merit_order, MechanismError, MechanismKind};
use crate::model::{Assignment, CategoryId, IndividualId, Instance, JobId, Vertical};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    IndividualRationality,
    NonWastefulness,
    MaxHrAccommodation,
    NoJustifiedEnvy,
    VrCompliance,
    /// Legacy diagnostic; not one of the five axioms.
    InterSeMerit,
}

impl Axiom {
    pub const FIVE: [Axiom; 5] = [
        Axiom::IndividualRationality,
        Axiom::NonWastefulness,
        Axiom::MaxHrAccommodation,
        Axiom::NoJustifiedEnvy,
        Axiom::VrCompliance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::IndividualRationality => "individual_rationality",
            Axiom::NonWastefulness => "non_wastefulness",
            Axiom::MaxHrAccommodation => "max_hr_accommodation",
            Axiom::NoJustifiedEnvy => "no_justified_envy",
            Axiom::VrCompliance => "vr_compliance",
            Axiom::InterSeMerit => "inter_se_merit",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().replace('-', "_");
        [
            Axiom::IndividualRationality,
            Axiom::NonWastefulness,
            Axiom::MaxHrAccommodation,
            Axiom::NoJustifiedEnvy,
            Axiom::VrCompliance,
            Axiom::InterSeMerit,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| format!("unknown axiom `{s}`"))
    }
}

/// Evidence that an axiom fails.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Holds a position at a job she finds unacceptable.
    IrBreach { individual: IndividualId },
    /// `individual` wants `job`, is eligible for `vertical`, and a position there is idle.
    IdleSeat {
        job: JobId,
        vertical: Vertical,
        individual: IndividualId,
    },
    /// Admitting `individual` at `(job, vertical)` would honor one more HR position.
    HrDishonored {
        job: JobId,
        vertical: Vertical,
        individual: IndividualId,
    },
    /// `envious` wants `holder`'s position, has higher merit, and the swap loses no HR coverage.
    EnvyPair {
        holder: IndividualId,
        envious: IndividualId,
        job: JobId,
        vertical: Vertical,
    },
    /// `individual` holds a VR position but deserved an open one; `condition`
    /// is 1 (idle open position), 2 (`counterpart` holds an open position
    /// on lower merit without HR justification) or 3 (HR gain in open).
    VrComplianceBreach {
        individual: IndividualId,
        job: JobId,
        category: CategoryId,
        condition: u8,
        counterpart: Option<IndividualId>,
    },
    /// Same category, `higher` outranks `lower`, and `higher` prefers `lower`'s job.
    InterSeMerit {
        higher: IndividualId,
        lower: IndividualId,
        job: JobId,
    },
}

impl Witness {
    /// Ids named by the witness, used for stable ordering.
    pub fn sort_key(&self, inst: &Instance) -> Vec<String> {
        let i = |x: &IndividualId| inst.individual_name(*x).to_string();
        let j = |x: &JobId| inst.job_name(*x).to_string();
        let v = |x: &Vertical| inst.vertical_name(*x).to_string();
        match self {
            Witness::IrBreach { individual } => vec![i(individual)],
            Witness::IdleSeat {
                job,
                vertical,
                individual,
            }
            | Witness::HrDishonored {
                job,
                vertical,
                individual,
            } => vec![j(job), v(vertical), i(individual)],
            Witness::EnvyPair {
                holder,
                envious,
                job,
                vertical,
            } => vec![j(job), v(vertical), i(holder), i(envious)],
            Witness::VrComplianceBreach {
                individual,
                job,
                category,
                condition,
                counterpart,
            } => vec![
                j(job),
                inst.categories[category.0].clone(),
                i(individual),
                condition.to_string(),
                counterpart.as_ref().map(i).unwrap_or_default(),
            ],
            Witness::InterSeMerit { higher, lower, job } => vec![i(higher), i(lower), j(job)],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub witnesses: Vec<Witness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

struct Sink {
    witnesses: Vec<Witness>,
    first_only: bool,
}

impl Sink {
    fn new(first_only: bool) -> Self {
        Sink {
            witnesses: Vec::new(),
            first_only,
        }
    }

    /// Records a witness; returns false when the caller should stop.
    fn push(&mut self, w: Witness) -> bool {
        self.witnesses.push(w);
        !self.first_only
    }

    fn finish(mut self, inst: &Instance, axiom: Axiom) -> AxiomReport {
        self.witnesses.sort_by_cached_key(|w| w.sort_key(inst));
        AxiomReport {
            axiom,
            witnesses: self.witnesses,
        }
    }
}

/// Per `(job, vertical)` holders and honored count.
struct Occupancy<'a> {
    inst: &'a Instance,
    holders: Vec<Vec<Vec<IndividualId>>>,
}

impl<'a> Occupancy<'a> {
    fn new(inst: &'a Instance, a: &Assignment) -> Self {
        let mut holders = vec![vec![Vec::new(); inst.vertical_count()]; inst.jobs.len()];
        for (i, seat) in a.iter() {
            if let Some(s) = seat {
                holders[s.job.0][s.vertical.index()].push(i);
            }
        }
        Occupancy { inst, holders }
    }

    fn at(&self, j: JobId, v: Vertical) -> &[IndividualId] {
        &self.holders[j.0][v.index()]
    }

    fn matcher(&self, j: JobId, v: Vertical, set: &[IndividualId]) -> HrMatcher<'a> {
        let mut m = HrMatcher::new(self.inst, j, v);
        for &i in set {
            m.insert(i);
        }
        m
    }

    fn has_hr(&self, j: JobId, v: Vertical) -> bool {
        self.inst.job(j).hr_reserves(v).iter().any(|&r| r > 0)
    }

    /// `n(holders \ {out} ∪ {inn})`.
    fn swapped_count(&self, j: JobId, v: Vertical, out: IndividualId, inn: IndividualId) -> usize {
        let set: Vec<IndividualId> = self
            .at(j, v)
            .iter()
            .copied()
            .filter(|&h| h != out)
            .chain(std::iter::once(inn))
            .collect();
        self.matcher(j, v, &set).size()
    }
}

fn wants(inst: &Instance, a: &Assignment, i: IndividualId, j: JobId) -> bool {
    inst.individual(i).prefers(Some(j), a.job_of(i))
}

fn individual_rationality(inst: &Instance, a: &Assignment, sink: &mut Sink) {
    for (i, seat) in a.iter() {
        if let Some(s) = seat {
            if !inst.individual(i).finds_acceptable(s.job)
                && !sink.push(Witness::IrBreach { individual: i })
            {
                return;
            }
        }
    }
}

fn non_wastefulness(inst: &Instance, occ: &Occupancy, a: &Assignment, sink: &mut Sink) {
    for j in inst.job_ids() {
        for v in inst.verticals() {
            if occ.at(j, v).len() >= inst.job(j).reserve(v) as usize {
                continue;
            }
            for i in inst.individual_ids() {
                if inst.eligible(i, v)
                    && wants(inst, a, i, j)
                    && !sink.push(Witness::IdleSeat {
                        job: j,
                        vertical: v,
                        individual: i,
                    })
                {
                    return;
                }
            }
        }
    }
}

fn max_hr_accommodation(inst: &Instance, occ: &Occupancy, a: &Assignment, sink: &mut Sink) {
    for j in inst.job_ids() {
        for v in inst.verticals() {
            if !occ.has_hr(j, v) {
                continue;
            }
            let m = occ.matcher(j, v, occ.at(j, v));
            for i in inst.individual_ids() {
                if inst.eligible(i, v)
                    && wants(inst, a, i, j)
                    && m.would_increase(i)
                    && !sink.push(Witness::HrDishonored {
                        job: j,
                        vertical: v,
                        individual: i,
                    })
                {
                    return;
                }
            }
        }
    }
}

fn no_justified_envy(inst: &Instance, occ: &Occupancy, a: &Assignment, sink: &mut Sink) {
    for j in inst.job_ids() {
        for v in inst.verticals() {
            let holders = occ.at(j, v);
            if holders.is_empty() {
                continue;
            }
            let hr = occ.has_hr(j, v);
            let base = if hr {
                occ.matcher(j, v, holders).size()
            } else {
                0
            };
            for &h in holders {
                for e in inst.individual_ids() {
                    if !inst.eligible(e, v) || !wants(inst, a, e, j) {
                        continue;
                    }
                    if inst.merit(h, j) > inst.merit(e, j) {
                        continue;
                    }
                    if hr && base > occ.swapped_count(j, v, h, e) {
                        continue;
                    }
                    if !sink.push(Witness::EnvyPair {
                        holder: h,
                        envious: e,
                        job: j,
                        vertical: v,
                    }) {
                        return;
                    }
                }
            }
        }
    }
}

fn vr_compliance(inst: &Instance, occ: &Occupancy, sink: &mut Sink) {
    let open = Vertical::Open;
    for j in inst.job_ids() {
        let open_holders = occ.at(j, open);
        let open_full = open_holders.len() == inst.job(j).reserve(open) as usize;
        let hr = occ.has_hr(j, open);
        let m = occ.matcher(j, open, open_holders);
        let base = m.size();
        for c in 0..inst.categories.len() {
            let category = CategoryId(c);
            for &i in occ.at(j, Vertical::Reserved(category)) {
                let breach = |condition, counterpart| Witness::VrComplianceBreach {
                    individual: i,
                    job: j,
                    category,
                    condition,
                    counterpart,
                };
                if !open_full && !sink.push(breach(1, None)) {
                    return;
                }
                for &o in open_holders {
                    if inst.merit(o, j) > inst.merit(i, j) {
                        continue;
                    }
                    if hr && base > occ.swapped_count(j, open, o, i) {
                        continue;
                    }
                    if !sink.push(breach(2, Some(o))) {
                        return;
                    }
                }
                if hr && m.would_increase(i) && !sink.push(breach(3, None)) {
                    return;
                }
            }
        }
    }
}

fn run_check(
    inst: &Instance,
    a: &Assignment,
    axiom: Axiom,
    occ: &Occupancy,
    first_only: bool,
) -> AxiomReport {
    let mut sink = Sink::new(first_only);
    match axiom {
        Axiom::IndividualRationality => individual_rationality(inst, a, &mut sink),
        Axiom::NonWastefulness => non_wastefulness(inst, occ, a, &mut sink),
        Axiom::MaxHrAccommodation => max_hr_accommodation(inst, occ, a, &mut sink),
        Axiom::NoJustifiedEnvy => no_justified_envy(inst, occ, a, &mut sink),
        Axiom::VrCompliance => vr_compliance(inst, occ, &mut sink),
        Axiom::InterSeMerit => unreachable!("inter se merit has its own entry point"),
    }
    sink.finish(inst, axiom)
}

fn check(inst: &Instance, a: &Assignment, axiom: Axiom) -> AxiomReport {
    run_check(inst, a, axiom, &Occupancy::new(inst, a), false)
}

pub fn check_individual_rationality(inst: &Instance, a: &Assignment) -> AxiomReport {
    check(inst, a, Axiom::IndividualRationality)
}

pub fn check_non_wastefulness(inst: &Instance, a: &Assignment) -> AxiomReport {
    check(inst, a, Axiom::NonWastefulness)
}

pub fn check_max_hr_accommodation(inst: &Instance, a: &Assignment) -> AxiomReport {
    check(inst, a, Axiom::MaxHrAccommodation)
}

pub fn check_no_justified_envy(inst: &Instance, a: &Assignment) -> AxiomReport {
    check(inst, a, Axiom::NoJustifiedEnvy)
}

pub fn check_vr_compliance(inst: &Instance, a: &Assignment) -> AxiomReport {
    check(inst, a, Axiom::VrCompliance)
}

/// Reports for the requested axioms; [`Axiom::InterSeMerit`] requires a
/// common merit ranking.
pub fn check_axioms(
    inst: &Instance,
    a: &Assignment,
    axioms: &[Axiom],
) -> Result<Vec<AxiomReport>, MechanismError> {
    let occ = Occupancy::new(inst, a);
    axioms
        .iter()
        .map(|&ax| match ax {
            Axiom::InterSeMerit => check_inter_se_merit(inst, a),
            _ => Ok(run_check(inst, a, ax, &occ, false)),
        })
        .collect()
}

/// All five axiom reports.
pub fn check_all(inst: &Instance, a: &Assignment) -> Vec<AxiomReport> {
    let occ = Occupancy::new(inst, a);
    Axiom::FIVE
        .iter()
        .map(|&ax| run_check(inst, a, ax, &occ, false))
        .collect()
}

/// Whether all five axioms hold; stops at the first witness.
pub fn satisfies_all(inst: &Instance, a: &Assignment) -> bool {
    let occ = Occupancy::new(inst, a);
    Axiom::FIVE
        .iter()
        .all(|&ax| run_check(inst, a, ax, &occ, true).passed())
}

// ---------------------------------------------------------------------------
// Pareto comparison
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pareto {
    ADominates,
    BDominates,
    Equal,
    Incomparable,
}

impl fmt::Display for Pareto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pareto::ADominates => "a-dominates",
            Pareto::BDominates => "b-dominates",
            Pareto::Equal => "equal",
            Pareto::Incomparable => "incomparable",
        })
    }
}

/// Pareto comparison under job-level (category-indifferent) preferences.
pub fn pareto_compare(inst: &Instance, a: &Assignment, b: &Assignment) -> Pareto {
    let (mut a_better, mut b_better) = (false, false);
    for i in inst.individual_ids() {
        match inst.individual(i).compare_jobs(a.job_of(i), b.job_of(i)) {
            std::cmp::Ordering::Greater => a_better = true,
            std::cmp::Ordering::Less => b_better = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    match (a_better, b_better) {
        (false, false) => Pareto::Equal,
        (true, false) => Pareto::ADominates,
        (false, true) => Pareto::BDominates,
        (true, true) => Pareto::Incomparable,
    }
}

// ---------------------------------------------------------------------------
// Strategy-proofness
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SpError {
    #[error("{jobs} jobs exceed the report-space bound of {max}")]
    ReportSpaceTooLarge { jobs: usize, max: usize },
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

pub const DEFAULT_MAX_SP_JOBS: usize = 4;

/// A profitable unilateral misreport.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub individual: IndividualId,
    pub report: Vec<JobId>,
    pub truthful: Option<JobId>,
    pub misreported: Option<JobId>,
}

/// Every strict ordering of every subset of `n` jobs, shortest first.
pub fn report_space(n: usize) -> Vec<Vec<JobId>> {
    fn extend(n: usize, prefix: &mut Vec<JobId>, used: &mut [bool], out: &mut Vec<Vec<JobId>>) {
        out.push(prefix.clone());
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                prefix.push(JobId(j));
                extend(n, prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out.sort_by_key(Vec::len);
    out
}

/// Replays `mechanism` under every unilateral misreport and returns each one
/// that leaves the misreporting individual strictly better off under her true
/// preferences.
pub fn check_strategy_proofness(
    inst: &Instance,
    mechanism: MechanismKind,
    max_jobs: usize,
) -> Result<Vec<Deviation>, SpError> {
    check_strategy_proofness_with(inst, max_jobs, |i| mechanism.allocate(i))
}

pub fn check_strategy_proofness_with<E>(
    inst: &Instance,
    max_jobs: usize,
    mechanism: impl Fn(&Instance) -> Result<Assignment, E>,
) -> Result<Vec<Deviation>, SpError>
where
    SpError: From<E>,
{
    if inst.jobs.len() > max_jobs {
        return Err(SpError::ReportSpaceTooLarge {
            jobs: inst.jobs.len(),
            max: max_jobs,
        });
    }
    let truthful = mechanism(inst)?;
    let reports = report_space(inst.jobs.len());
    let mut found = Vec::new();
    for i in inst.individual_ids() {
        let person = inst.individual(i);
        let honest = truthful.job_of(i);
        for report in &reports {
            if *report == person.preferences {
                continue;
            }
            let out = mechanism(&inst.with_preferences(i, report.clone()))?;
            let got = out.job_of(i);
            if person.prefers(got, honest) {
                found.push(Deviation {
                    individual: i,
                    report: report.clone(),
                    truthful: honest,
                    misreported: got,
                });
            }
        }
    }
    Ok(found)
}

impl From<std::convert::Infallible> for SpError {
    fn from(e: std::convert::Infallible) -> Self {
        match e {}
    }
}

// ---------------------------------------------------------------------------
// Legacy diagnostics
// ---------------------------------------------------------------------------

/// Flags same-category pairs where the higher-merit individual prefers the
/// lower-merit one's job to her own.
pub fn check_inter_se_merit(
    inst: &Instance,
    a: &Assignment,
) -> Result<AxiomReport, MechanismError> {
    let order = common_merit_order(inst)?;
    let mut sink = Sink::new(false);
    for (k, &hi) in order.iter().enumerate() {
        for &lo in &order[k + 1..] {
            if inst.individual(hi).category != inst.individual(lo).category {
                continue;
            }
            if let Some(j) = a.job_of(lo) {
                if wants(inst, a, hi, j) {
                    sink.push(Witness::InterSeMerit {
                        higher: hi,
                        lower: lo,
                        job: j,
                    });
                }
            }
        }
    }
    Ok(sink.finish(inst, Axiom::InterSeMerit))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cutoff {
    pub job: JobId,
    pub vertical: Vertical,
    /// Lowest merit among holders, `None` when nobody holds a position.
    pub score: Option<f64>,
    pub holders: usize,
}

/// Minimum merit among the holders of every `(job, vertical)`.
pub fn cutoff_scores(inst: &Instance, a: &Assignment) -> Vec<Cutoff> {
    let occ = Occupancy::new(inst, a);
    let mut out = Vec::new();
    for j in inst.job_ids() {
        for v in inst.verticals() {
            let holders = occ.at(j, v);
            let score = holders
                .iter()
                .map(|&i| inst.merit(i, j))
                .min_by(f64::total_cmp);
            out.push(Cutoff {
                job: j,
                vertical: v,
                score,
                holders: holders.len(),
            });
        }
    }
    out
}

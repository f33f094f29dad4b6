//! Multi-job allocation mechanisms.
//!
//! [`run_2smh_da`] is individual-proposing deferred acceptance in which every
//! job chooses with the 2SMH rule. The remaining mechanisms reconstruct the
//! migration-based procedures used by Indian institutions (open positions by
//! serial dictatorship first, then VR positions, then adjustments for
//! meritorious reserved candidates). They exist to be audited against the
//! axioms and require one merit ranking shared by every job. They ignore HR
//! reserves and say so in [`MechanismRun::warnings`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choice::{BoostConfig, ChoiceError, ChoiceResult, ChoiceRule, TwoStepMh};
use crate::model::{Assignment, CategoryId, IndividualId, Instance, JobId, Seat, Vertical};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MechanismError {
    #[error("jobs rank individuals differently (`{job}` disagrees with `{reference}`); this mechanism needs one common merit ranking")]
    NoCommonMeritRanking { job: String, reference: String },
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error("the merit boost is only available for 2smh-da")]
    BoostUnsupported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismKind {
    #[serde(rename = "2smh-da")]
    TwoSmhDa,
    #[serde(rename = "uppsc-1990")]
    Uppsc1990,
    UpscMrc,
    #[serde(rename = "tripurari")]
    TripurariSharan,
    #[serde(rename = "sd")]
    SerialDictatorship,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 5] = [
        MechanismKind::TwoSmhDa,
        MechanismKind::Uppsc1990,
        MechanismKind::UpscMrc,
        MechanismKind::TripurariSharan,
        MechanismKind::SerialDictatorship,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::TwoSmhDa => "2smh-da",
            MechanismKind::Uppsc1990 => "uppsc-1990",
            MechanismKind::UpscMrc => "upsc-mrc",
            MechanismKind::TripurariSharan => "tripurari",
            MechanismKind::SerialDictatorship => "sd",
        }
    }

    pub fn run(self, instance: &Instance) -> Result<MechanismRun, MechanismError> {
        match self {
            MechanismKind::TwoSmhDa => Ok(run_2smh_da(instance)),
            MechanismKind::Uppsc1990 => run_uppsc_1990(instance),
            MechanismKind::UpscMrc => run_upsc_mrc(instance),
            MechanismKind::TripurariSharan => run_tripurari_sharan(instance),
            MechanismKind::SerialDictatorship => {
                let all: Vec<Vertical> = instance.verticals().collect();
                let mut run = legacy_run(instance, self);
                run.assignment = run_serial_dictatorship(instance, &all)?;
                Ok(run)
            }
        }
    }

    /// Final assignment only.
    pub fn allocate(self, instance: &Instance) -> Result<Assignment, MechanismError> {
        self.run(instance).map(|r| r.assignment)
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MechanismKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MechanismKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mechanism `{s}`"))
    }
}

/// One round of deferred acceptance.
#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub index: usize,
    pub proposals: Vec<(IndividualId, JobId)>,
    /// Tentative choice at each job that received proposals this round.
    pub tentative: Vec<(JobId, ChoiceResult)>,
    pub rejections: Vec<(IndividualId, JobId)>,
}

/// A named step of a legacy mechanism and the placements it made.
#[derive(Clone, Debug, PartialEq)]
pub struct Phase {
    pub name: String,
    pub placements: Vec<(IndividualId, Seat)>,
}

/// A waitlist for the general category (`None`) or a VR category.
#[derive(Clone, Debug, PartialEq)]
pub struct Waitlist {
    pub group: Option<CategoryId>,
    /// Intended length.
    pub size: usize,
    pub members: Vec<IndividualId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vacancy {
    pub seat: Seat,
    pub vacated_by: IndividualId,
    pub filled_by: Option<IndividualId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Migration {
    pub mrc: IndividualId,
    pub from: Seat,
    pub to: Seat,
    pub displaced: IndividualId,
    /// Where the displaced candidate ends up.
    pub displaced_to: Option<Seat>,
}

/// Intermediate artifacts of the legacy mechanisms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseArtifacts {
    pub phases: Vec<Phase>,
    pub mrcs: Vec<IndividualId>,
    pub waitlists: Vec<Waitlist>,
    pub vacancies: Vec<Vacancy>,
    pub migrations: Vec<Migration>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MechanismRun {
    pub mechanism: MechanismKind,
    pub assignment: Assignment,
    /// Deferred acceptance rounds; empty for the legacy mechanisms.
    pub rounds: Vec<Round>,
    pub artifacts: PhaseArtifacts,
    pub warnings: Vec<String>,
}

// ---------------------------------------------------------------------------
// Deferred acceptance
// ---------------------------------------------------------------------------

/// Individual-proposing deferred acceptance with simultaneous proposals per round.
pub fn run_deferred_acceptance(
    instance: &Instance,
    rule: &dyn ChoiceRule,
) -> Result<MechanismRun, ChoiceError> {
    let n = instance.individuals.len();
    let mut next = vec![0usize; n];
    let mut held: Vec<Vec<IndividualId>> = vec![Vec::new(); instance.jobs.len()];
    let mut choice: Vec<Option<ChoiceResult>> = vec![None; instance.jobs.len()];
    let mut rounds = Vec::new();
    let mut proposers: Vec<IndividualId> = instance.individual_ids().collect();

    loop {
        let mut proposals = Vec::new();
        let mut incoming: Vec<Vec<IndividualId>> = vec![Vec::new(); instance.jobs.len()];
        for &i in &proposers {
            let prefs = &instance.individual(i).preferences;
            if let Some(&j) = prefs.get(next[i.0]) {
                next[i.0] += 1;
                proposals.push((i, j));
                incoming[j.0].push(i);
            }
        }
        if proposals.is_empty() {
            break;
        }
        let mut tentative = Vec::new();
        let mut rejections = Vec::new();
        for j in instance.job_ids() {
            if incoming[j.0].is_empty() {
                continue;
            }
            let mut applicants = held[j.0].clone();
            applicants.extend(&incoming[j.0]);
            applicants.sort();
            let result = rule.choose(instance, j, &applicants)?;
            let chosen = result.aggregate();
            for &i in &applicants {
                if chosen.binary_search(&i).is_err() {
                    rejections.push((i, j));
                }
            }
            held[j.0] = chosen;
            choice[j.0] = Some(result.clone());
            tentative.push((j, result));
        }
        proposers = rejections.iter().map(|&(i, _)| i).collect();
        proposers.sort();
        let done = rejections.is_empty();
        rounds.push(Round {
            index: rounds.len() + 1,
            proposals,
            tentative,
            rejections,
        });
        if done {
            break;
        }
    }

    let mut assignment = Assignment::unassigned(n);
    for (j, result) in choice.iter().enumerate() {
        let Some(result) = result else { continue };
        for (vix, part) in result.parts.iter().enumerate() {
            for &i in part {
                assignment.set(i, Some(Seat::new(JobId(j), Vertical::from_index(vix))));
            }
        }
    }
    Ok(MechanismRun {
        mechanism: MechanismKind::TwoSmhDa,
        assignment,
        rounds,
        artifacts: PhaseArtifacts::default(),
        warnings: Vec::new(),
    })
}

/// 2SMH-DA.
pub fn run_2smh_da(instance: &Instance) -> MechanismRun {
    run_deferred_acceptance(instance, &TwoStepMh).expect("2SMH choice is infallible")
}

/// Deferred acceptance with the soft-reserve boost variant of 2SMH at every job.
pub fn run_2smh_boost_da(
    instance: &Instance,
    cfg: &BoostConfig,
) -> Result<MechanismRun, MechanismError> {
    let mut run = run_deferred_acceptance(instance, cfg)?;
    run.warnings.push(format!(
        "category `{}` treated as a soft reserve with a {} point boost",
        instance.categories[cfg.boosted.0], cfg.boost
    ));
    Ok(run)
}

// ---------------------------------------------------------------------------
// Serial dictatorship and the legacy mechanisms
// ---------------------------------------------------------------------------

/// Individuals in descending merit, provided every job agrees on the order.
pub fn common_merit_order(instance: &Instance) -> Result<Vec<IndividualId>, MechanismError> {
    let mut order: Vec<IndividualId> = instance.individual_ids().collect();
    let Some(first) = instance.job_ids().next() else {
        return Ok(order);
    };
    order.sort_by(|&a, &b| {
        instance
            .merit(b, first)
            .total_cmp(&instance.merit(a, first))
    });
    for j in instance.job_ids().skip(1) {
        if order
            .windows(2)
            .any(|w| instance.merit(w[0], j) <= instance.merit(w[1], j))
        {
            return Err(MechanismError::NoCommonMeritRanking {
                job: instance.job_name(j).to_string(),
                reference: instance.job_name(first).to_string(),
            });
        }
    }
    Ok(order)
}

type SeatCounts = Vec<Vec<u32>>;

fn full_counts(instance: &Instance) -> SeatCounts {
    instance
        .jobs
        .iter()
        .map(|job| instance.verticals().map(|v| job.reserve(v)).collect())
        .collect()
}

/// Each candidate in `order` takes her most preferred job that still has a
/// position in one of `verticals` she is eligible for.
fn serial_dictatorship(
    instance: &Instance,
    order: &[IndividualId],
    remaining: &mut SeatCounts,
    verticals: &[Vertical],
) -> Vec<(IndividualId, Seat)> {
    let mut placed = Vec::new();
    for &i in order {
        'pick: for &j in &instance.individual(i).preferences {
            for &v in verticals {
                if instance.eligible(i, v) && remaining[j.0][v.index()] > 0 {
                    remaining[j.0][v.index()] -= 1;
                    placed.push((i, Seat::new(j, v)));
                    break 'pick;
                }
            }
        }
    }
    placed
}

/// Serial dictatorship in common merit order over the positions of `positions`.
pub fn run_serial_dictatorship(
    instance: &Instance,
    positions: &[Vertical],
) -> Result<Assignment, MechanismError> {
    let order = common_merit_order(instance)?;
    let mut remaining = full_counts(instance);
    let mut a = Assignment::unassigned(instance.individuals.len());
    for (i, seat) in serial_dictatorship(instance, &order, &mut remaining, positions) {
        a.set(i, Some(seat));
    }
    Ok(a)
}

fn legacy_run(instance: &Instance, mechanism: MechanismKind) -> MechanismRun {
    let mut warnings = Vec::new();
    if instance.has_hr_reserves() {
        warnings.push(format!("{mechanism} ignores HR reserves"));
    }
    MechanismRun {
        mechanism,
        assignment: Assignment::unassigned(instance.individuals.len()),
        rounds: Vec::new(),
        artifacts: PhaseArtifacts::default(),
        warnings,
    }
}

fn record(
    a: &mut Assignment,
    phase: &mut Vec<Phase>,
    name: String,
    placed: Vec<(IndividualId, Seat)>,
) {
    for &(i, s) in &placed {
        a.set(i, Some(s));
    }
    phase.push(Phase {
        name,
        placements: placed,
    });
}

/// Open positions by serial dictatorship, then each VR category among its
/// members left unassigned. Every placement is final.
pub fn run_uppsc_1990(instance: &Instance) -> Result<MechanismRun, MechanismError> {
    let order = common_merit_order(instance)?;
    let mut run = legacy_run(instance, MechanismKind::Uppsc1990);
    let mut remaining = full_counts(instance);
    let mut a = Assignment::unassigned(instance.individuals.len());

    let open = serial_dictatorship(instance, &order, &mut remaining, &[Vertical::Open]);
    record(&mut a, &mut run.artifacts.phases, "open".into(), open);
    for c in 0..instance.categories.len() {
        let v = Vertical::Reserved(CategoryId(c));
        let cands: Vec<IndividualId> = order
            .iter()
            .copied()
            .filter(|&i| instance.eligible(i, v) && a.get(i).is_none())
            .collect();
        let placed = serial_dictatorship(instance, &cands, &mut remaining, &[v]);
        record(
            &mut a,
            &mut run.artifacts.phases,
            format!("category {}", instance.categories[c]),
            placed,
        );
    }
    run.assignment = a;
    Ok(run)
}

/// The five-step UPSC procedure: tentative open allocation, tentative VR
/// allocation including MRCs, waitlists, MRC finalization, and reallocation
/// of vacated positions to the waitlists.
pub fn run_upsc_mrc(instance: &Instance) -> Result<MechanismRun, MechanismError> {
    let order = common_merit_order(instance)?;
    let mut run = legacy_run(instance, MechanismKind::UpscMrc);
    let n = instance.individuals.len();
    let mut remaining = full_counts(instance);
    let mut a = Assignment::unassigned(n);

    // Step 1: tentative open allocation; VR members placed here become MRCs.
    let open = serial_dictatorship(instance, &order, &mut remaining, &[Vertical::Open]);
    let mut open_seat: Vec<Option<Seat>> = vec![None; n];
    for &(i, s) in &open {
        open_seat[i.0] = Some(s);
    }
    let is_member = |i: IndividualId| instance.individual(i).category.is_some();
    let mrcs: Vec<IndividualId> = order
        .iter()
        .copied()
        .filter(|&i| open_seat[i.0].is_some() && is_member(i))
        .collect();
    for &(i, s) in &open {
        if !is_member(i) {
            a.set(i, Some(s));
        }
    }
    run.artifacts.phases.push(Phase {
        name: "step 1: open".into(),
        placements: open,
    });

    // Step 2: tentative VR allocation over members without a final position.
    let mut vr_seat: Vec<Option<Seat>> = vec![None; n];
    for c in 0..instance.categories.len() {
        let v = Vertical::Reserved(CategoryId(c));
        let cands: Vec<IndividualId> = order
            .iter()
            .copied()
            .filter(|&i| instance.eligible(i, v))
            .collect();
        let placed = serial_dictatorship(instance, &cands, &mut remaining, &[v]);
        for &(i, s) in &placed {
            vr_seat[i.0] = Some(s);
            if !mrcs.contains(&i) {
                a.set(i, Some(s));
            }
        }
        run.artifacts.phases.push(Phase {
            name: format!("step 2: category {}", instance.categories[c]),
            placements: placed,
        });
    }

    // Step 3: waitlists among candidates with no tentative or final position.
    let untouched = |i: IndividualId| open_seat[i.0].is_none() && vr_seat[i.0].is_none();
    let mut waitlists = Vec::new();
    let general_size = mrcs.len();
    let general: Vec<IndividualId> = order
        .iter()
        .copied()
        .filter(|&i| !is_member(i) && untouched(i))
        .take(general_size)
        .collect();
    waitlists.push(Waitlist {
        group: None,
        size: general_size,
        members: general,
    });
    for c in 0..instance.categories.len() {
        let cat = Some(CategoryId(c));
        let size = mrcs
            .iter()
            .filter(|&&i| instance.individual(i).category == cat)
            .count();
        let members: Vec<IndividualId> = order
            .iter()
            .copied()
            .filter(|&i| instance.individual(i).category == cat && untouched(i))
            .take(size)
            .collect();
        waitlists.push(Waitlist {
            group: cat,
            size,
            members,
        });
    }
    for w in &waitlists {
        if w.members.len() < w.size {
            run.artifacts.notes.push(format!(
                "{} waitlist short: {} of {} candidates available",
                instance.category_name(w.group),
                w.members.len(),
                w.size
            ));
        }
    }

    // Step 4: each MRC keeps the better of her two tentative positions; open on a same-job tie.
    let mut vacated_open = Vec::new();
    let mut vacated_vr: Vec<Vec<(IndividualId, Seat)>> =
        vec![Vec::new(); instance.categories.len()];
    let mut step4 = Vec::new();
    for &m in &mrcs {
        let os = open_seat[m.0].expect("MRC holds an open position");
        let keep_vr = match vr_seat[m.0] {
            Some(vs) => instance.individual(m).prefers(Some(vs.job), Some(os.job)),
            None => false,
        };
        if keep_vr {
            let vs = vr_seat[m.0].unwrap();
            a.set(m, Some(vs));
            step4.push((m, vs));
            vacated_open.push((m, os));
        } else {
            a.set(m, Some(os));
            step4.push((m, os));
            if let Some(vs) = vr_seat[m.0] {
                let Vertical::Reserved(c) = vs.vertical else {
                    unreachable!()
                };
                vacated_vr[c.0].push((m, vs));
            }
        }
    }
    run.artifacts.phases.push(Phase {
        name: "step 4: finalize MRCs".into(),
        placements: step4,
    });

    // Step 5: vacated positions go to the matching waitlist by serial dictatorship.
    let fill = |vacated: Vec<(IndividualId, Seat)>,
                list: &[IndividualId],
                a: &mut Assignment,
                run: &mut MechanismRun| {
        let mut pool: Vec<Vec<u32>> = vec![vec![0; instance.vertical_count()]; instance.jobs.len()];
        for (_, s) in &vacated {
            pool[s.job.0][s.vertical.index()] += 1;
        }
        let verticals: Vec<Vertical> = instance.verticals().collect();
        let mut placed = Vec::new();
        for &i in list {
            'pick: for &j in &instance.individual(i).preferences {
                for &v in &verticals {
                    if pool[j.0][v.index()] > 0 {
                        pool[j.0][v.index()] -= 1;
                        placed.push((i, Seat::new(j, v)));
                        break 'pick;
                    }
                }
            }
        }
        let mut claimed = vec![false; placed.len()];
        for (by, seat) in vacated {
            let filler = placed
                .iter()
                .enumerate()
                .find(|(k, (_, s))| !claimed[*k] && *s == seat)
                .map(|(k, (i, _))| {
                    claimed[k] = true;
                    *i
                });
            run.artifacts.vacancies.push(Vacancy {
                seat,
                vacated_by: by,
                filled_by: filler,
            });
        }
        for &(i, s) in &placed {
            a.set(i, Some(s));
        }
        placed
    };
    let general_list = waitlists[0].members.clone();
    let placed = fill(vacated_open, &general_list, &mut a, &mut run);
    run.artifacts.phases.push(Phase {
        name: "step 5: vacated open positions".into(),
        placements: placed,
    });
    for c in 0..instance.categories.len() {
        let list = waitlists[c + 1].members.clone();
        let vacated = std::mem::take(&mut vacated_vr[c]);
        let placed = fill(vacated, &list, &mut a, &mut run);
        run.artifacts.phases.push(Phase {
            name: format!(
                "step 5: vacated category {} positions",
                instance.categories[c]
            ),
            placements: placed,
        });
    }

    run.artifacts.mrcs = mrcs;
    run.artifacts.waitlists = waitlists;
    run.assignment = a;
    Ok(run)
}

/// Tentative open and VR allocations, then each MRC (highest merit first)
/// may take a VR position of her category at a strictly preferred job from
/// its lowest-merit lower-ranked holder, who receives the MRC's open position.
pub fn run_tripurari_sharan(instance: &Instance) -> Result<MechanismRun, MechanismError> {
    let order = common_merit_order(instance)?;
    let mut run = legacy_run(instance, MechanismKind::TripurariSharan);
    let position: Vec<usize> = {
        let mut p = vec![0; order.len()];
        for (k, i) in order.iter().enumerate() {
            p[i.0] = k;
        }
        p
    };
    let mut remaining = full_counts(instance);
    let mut a = Assignment::unassigned(instance.individuals.len());

    let open = serial_dictatorship(instance, &order, &mut remaining, &[Vertical::Open]);
    record(
        &mut a,
        &mut run.artifacts.phases,
        "tentative open".into(),
        open,
    );
    for c in 0..instance.categories.len() {
        let v = Vertical::Reserved(CategoryId(c));
        let cands: Vec<IndividualId> = order
            .iter()
            .copied()
            .filter(|&i| instance.eligible(i, v) && a.get(i).is_none())
            .collect();
        let placed = serial_dictatorship(instance, &cands, &mut remaining, &[v]);
        record(
            &mut a,
            &mut run.artifacts.phases,
            format!("tentative category {}", instance.categories[c]),
            placed,
        );
    }

    let mrcs: Vec<IndividualId> = order
        .iter()
        .copied()
        .filter(|&i| {
            instance.individual(i).category.is_some()
                && a.get(i).map(|s| s.vertical) == Some(Vertical::Open)
        })
        .collect();
    if mrcs.len() > 1 {
        run.artifacts
            .notes
            .push("several MRCs: processed in descending merit, at most one migration each".into());
    }

    for &m in &mrcs {
        let from = a.get(m).expect("MRC holds an open position");
        let c = instance.individual(m).category.expect("MRC is a VR member");
        let v = Vertical::Reserved(c);
        let better: Vec<JobId> = instance
            .individual(m)
            .preferences
            .iter()
            .copied()
            .take_while(|&j| j != from.job)
            .collect();
        for j in better {
            let displaced = a
                .holders(j, v)
                .into_iter()
                .filter(|&h| position[h.0] > position[m.0])
                .max_by_key(|&h| position[h.0]);
            let Some(d) = displaced else { continue };
            let to = Seat::new(j, v);
            a.set(m, Some(to));
            let displaced_to = if instance.individual(d).finds_acceptable(from.job) {
                Some(from)
            } else {
                run.artifacts.notes.push(format!(
                    "`{}` does not accept `{}`; the vacated open position stays empty",
                    instance.individual_name(d),
                    instance.job_name(from.job)
                ));
                None
            };
            a.set(d, displaced_to);
            run.artifacts.vacancies.push(Vacancy {
                seat: from,
                vacated_by: m,
                filled_by: displaced_to.map(|_| d),
            });
            run.artifacts.migrations.push(Migration {
                mrc: m,
                from,
                to,
                displaced: d,
                displaced_to,
            });
            break;
        }
    }
    run.artifacts.mrcs = mrcs;
    run.assignment = a;
    Ok(run)
}

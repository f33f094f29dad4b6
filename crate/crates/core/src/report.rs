//! JSON and CSV documents exchanged with the outside world. Every document
//! carries `"version": "v1"` (CSV: a `schema` column) and refers to jobs,
//! individuals, categories and traits by their string ids.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::axioms::{AxiomReport, Cutoff, Deviation, Pareto, Witness};
use crate::choice::ChoiceResult;
use crate::hr::trait_matching_unchecked;
use crate::mechanisms::{MechanismRun, PhaseArtifacts, Round};
use crate::model::{Assignment, AssignmentError, Instance, JobId, Seat, Vertical};
use crate::oracle::{BridgeVerdict, DominanceVerdict, StabilityReport, StabilityWitness};

pub const VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("assignment document: {0}")]
    Shape(String),
    #[error(transparent)]
    Invalid(#[from] AssignmentError),
}

fn seat_json(inst: &Instance, s: Option<Seat>) -> Value {
    match s {
        None => Value::Null,
        Some(s) => json!({
            "job": inst.job_name(s.job),
            "category": inst.vertical_name(s.vertical),
        }),
    }
}

fn seat_text(inst: &Instance, s: Option<Seat>) -> String {
    match s {
        None => "unassigned".into(),
        Some(s) => format!(
            "({},{})",
            inst.job_name(s.job),
            inst.vertical_name(s.vertical)
        ),
    }
}

fn job_text(inst: &Instance, j: Option<JobId>) -> Value {
    j.map_or(Value::Null, |j| inst.job_name(j).into())
}

/// `{"individual": {"job", "category"} | null}` in instance order.
pub fn assignment_map(inst: &Instance, a: &Assignment) -> Value {
    let mut m = Map::new();
    for (i, s) in a.iter() {
        m.insert(inst.individual_name(i).to_string(), seat_json(inst, s));
    }
    Value::Object(m)
}

/// Honored trait matching per `(job, vertical)` that has HR positions.
pub fn hr_witness(inst: &Instance, a: &Assignment) -> Value {
    let mut jobs = Map::new();
    for j in inst.job_ids() {
        let mut per_v = Map::new();
        for v in inst.verticals() {
            if inst.job(j).hr_reserves(v).iter().all(|&r| r == 0) {
                continue;
            }
            let m = trait_matching_unchecked(inst, j, v, &a.holders(j, v));
            let pairs: Vec<Value> = m
                .pairs
                .iter()
                .map(|(i, t)| json!({"individual": inst.individual_name(*i), "trait": inst.traits[t.0]}))
                .collect();
            per_v.insert(inst.vertical_name(v).to_string(), Value::Array(pairs));
        }
        if !per_v.is_empty() {
            jobs.insert(inst.job_name(j).to_string(), Value::Object(per_v));
        }
    }
    Value::Object(jobs)
}

pub fn assignment_document(inst: &Instance, a: &Assignment) -> Value {
    json!({
        "version": VERSION,
        "assignment": assignment_map(inst, a),
        "hr_witness": hr_witness(inst, a),
    })
}

/// Reads the `assignment` object of an assignment or mechanism-run document.
/// Individuals missing from the map are unassigned.
pub fn parse_assignment(inst: &Instance, text: &str) -> Result<Assignment, ReportError> {
    let doc: Value = serde_json::from_str(text)?;
    let shape = |m: String| ReportError::Shape(m);
    let map = doc
        .get("assignment")
        .and_then(Value::as_object)
        .ok_or_else(|| shape("missing `assignment` object".into()))?;
    let mut a = Assignment::unassigned(inst.individuals.len());
    for (name, seat) in map {
        let i = inst
            .individual_index(name)
            .ok_or_else(|| shape(format!("unknown individual `{name}`")))?;
        if seat.is_null() {
            continue;
        }
        let field = |k: &str| {
            seat.get(k)
                .and_then(Value::as_str)
                .ok_or_else(|| shape(format!("`{name}`: missing `{k}`")))
        };
        let job = field("job")?;
        let cat = field("category")?;
        let j = inst
            .job_index(job)
            .ok_or_else(|| shape(format!("unknown job `{job}`")))?;
        let v = inst
            .vertical_by_name(cat)
            .ok_or_else(|| shape(format!("unknown category `{cat}`")))?;
        a.set(i, Some(Seat::new(j, v)));
    }
    a.validate(inst)?;
    Ok(a)
}

fn choice_json(inst: &Instance, c: &ChoiceResult) -> Value {
    let mut m = Map::new();
    for v in inst.verticals() {
        let names: Vec<&str> = c.part(v).iter().map(|&i| inst.individual_name(i)).collect();
        if !names.is_empty() {
            m.insert(inst.vertical_name(v).to_string(), json!(names));
        }
    }
    Value::Object(m)
}

fn round_json(inst: &Instance, r: &Round) -> Value {
    let pairs = |ps: &[(crate::model::IndividualId, JobId)]| -> Vec<Value> {
        ps.iter()
            .map(|(i, j)| json!({"individual": inst.individual_name(*i), "job": inst.job_name(*j)}))
            .collect()
    };
    let tentative: Map<String, Value> = r
        .tentative
        .iter()
        .map(|(j, c)| (inst.job_name(*j).to_string(), choice_json(inst, c)))
        .collect();
    json!({
        "round": r.index,
        "proposals": pairs(&r.proposals),
        "tentative": tentative,
        "rejections": pairs(&r.rejections),
    })
}

fn artifacts_json(inst: &Instance, p: &PhaseArtifacts) -> Value {
    let name = |i| inst.individual_name(i);
    json!({
        "phases": p.phases.iter().map(|ph| json!({
            "name": ph.name,
            "placements": ph.placements.iter().map(|(i, s)| json!({
                "individual": name(*i),
                "seat": seat_json(inst, Some(*s)),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "mrcs": p.mrcs.iter().map(|&i| name(i)).collect::<Vec<_>>(),
        "waitlists": p.waitlists.iter().map(|w| json!({
            "group": inst.category_name(w.group),
            "size": w.size,
            "members": w.members.iter().map(|&i| name(i)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "vacancies": p.vacancies.iter().map(|v| json!({
            "seat": seat_json(inst, Some(v.seat)),
            "vacated_by": name(v.vacated_by),
            "filled_by": v.filled_by.map(name),
        })).collect::<Vec<_>>(),
        "migrations": p.migrations.iter().map(|m| json!({
            "mrc": name(m.mrc),
            "from": seat_json(inst, Some(m.from)),
            "to": seat_json(inst, Some(m.to)),
            "displaced": name(m.displaced),
            "displaced_to": seat_json(inst, m.displaced_to),
        })).collect::<Vec<_>>(),
        "notes": p.notes,
    })
}

/// The mechanism-run document; `trace` adds the deferred acceptance rounds.
pub fn run_document(inst: &Instance, run: &MechanismRun, trace: bool) -> Value {
    let mut doc = json!({
        "version": VERSION,
        "mechanism": run.mechanism.name(),
        "assignment": assignment_map(inst, &run.assignment),
        "hr_witness": hr_witness(inst, &run.assignment),
        "phase_artifacts": artifacts_json(inst, &run.artifacts),
        "warnings": run.warnings,
    });
    if trace {
        doc["trace"] = run.rounds.iter().map(|r| round_json(inst, r)).collect();
    }
    doc
}

fn witness_json(inst: &Instance, w: &Witness) -> Value {
    let i = |x| inst.individual_name(x);
    let j = |x| inst.job_name(x);
    let v = |x: Vertical| inst.vertical_name(x);
    match *w {
        Witness::IrBreach { individual } => {
            json!({"kind": "ir_breach", "individual": i(individual)})
        }
        Witness::IdleSeat {
            job,
            vertical,
            individual,
        } => {
            json!({"kind": "idle_seat", "job": j(job), "vertical": v(vertical), "individual": i(individual)})
        }
        Witness::HrDishonored {
            job,
            vertical,
            individual,
        } => {
            json!({"kind": "hr_dishonored", "job": j(job), "vertical": v(vertical), "individual": i(individual)})
        }
        Witness::EnvyPair {
            holder,
            envious,
            job,
            vertical,
        } => json!({
            "kind": "envy_pair",
            "holder": i(holder),
            "envious": i(envious),
            "job": j(job),
            "vertical": v(vertical),
        }),
        Witness::VrComplianceBreach {
            individual,
            job,
            category,
            condition,
            counterpart,
        } => json!({
            "kind": "vr_compliance_breach",
            "individual": i(individual),
            "job": j(job),
            "category": inst.categories[category.0],
            "condition": condition,
            "counterpart": counterpart.map(i),
        }),
        Witness::InterSeMerit { higher, lower, job } => json!({
            "kind": "inter_se_merit",
            "higher": i(higher),
            "lower": i(lower),
            "job": j(job),
        }),
    }
}

pub fn axiom_document(inst: &Instance, reports: &[AxiomReport]) -> Value {
    json!({
        "version": VERSION,
        "pass": reports.iter().all(AxiomReport::passed),
        "axioms": reports.iter().map(|r| json!({
            "axiom": r.axiom.name(),
            "pass": r.passed(),
            "witnesses": r.witnesses.iter().map(|w| witness_json(inst, w)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// Pareto verdict plus every individual whose job differs.
pub fn compare_document(inst: &Instance, a: &Assignment, b: &Assignment, verdict: Pareto) -> Value {
    let diff: Vec<Value> = inst
        .individual_ids()
        .filter(|&i| a.get(i) != b.get(i))
        .map(|i| {
            let cmp = crate::model::compare_assignments_for_individual(inst, i, a, b);
            json!({
                "individual": inst.individual_name(i),
                "a": seat_json(inst, a.get(i)),
                "b": seat_json(inst, b.get(i)),
                "preference": cmp.to_string(),
            })
        })
        .collect();
    json!({"version": VERSION, "verdict": verdict.to_string(), "diff": diff})
}

pub fn deviations_document(inst: &Instance, mechanism: &str, devs: &[Deviation]) -> Value {
    json!({
        "version": VERSION,
        "mechanism": mechanism,
        "manipulable": !devs.is_empty(),
        "deviations": devs.iter().map(|d| json!({
            "individual": inst.individual_name(d.individual),
            "report": d.report.iter().map(|&j| inst.job_name(j)).collect::<Vec<_>>(),
            "truthful": job_text(inst, d.truthful),
            "misreported": job_text(inst, d.misreported),
        })).collect::<Vec<_>>(),
    })
}

fn stability_json(inst: &Instance, r: &StabilityReport) -> Value {
    json!({
        "stable": r.is_stable(),
        "witnesses": r.witnesses.iter().map(|w| match *w {
            StabilityWitness::IrBreach { individual } =>
                json!({"kind": "ir_breach", "individual": inst.individual_name(individual)}),
            StabilityWitness::JobIrrational { job } =>
                json!({"kind": "job_irrational", "job": inst.job_name(job)}),
            StabilityWitness::BlockingPair { individual, job } => json!({
                "kind": "blocking_pair",
                "individual": inst.individual_name(individual),
                "job": inst.job_name(job),
            }),
        }).collect::<Vec<_>>(),
    })
}

pub fn oracle_document(inst: &Instance, dom: &DominanceVerdict, bridge: &BridgeVerdict) -> Value {
    let list = |xs: &[Assignment]| {
        xs.iter()
            .map(|a| assignment_map(inst, a))
            .collect::<Vec<_>>()
    };
    json!({
        "version": VERSION,
        "pass": dom.passed() && bridge.passed() && dom.outcome_satisfies_axioms(),
        "axiom_satisfying": list(&dom.satisfying),
        "outcome": assignment_map(inst, &dom.outcome),
        "outcome_satisfies_axioms": dom.outcome_satisfies_axioms(),
        "dominance": {
            "pass": dom.passed(),
            "counterexamples": list(&dom.counterexamples),
        },
        "stability": {
            "pass": bridge.passed(),
            "checked": bridge.checked,
            "failures": bridge.failures.iter().map(|(a, r)| json!({
                "assignment": assignment_map(inst, a),
                "report": stability_json(inst, r),
            })).collect::<Vec<_>>(),
        },
    })
}

/// `schema,job,vertical,cutoff,holders` with an empty cutoff for empty positions.
pub fn cutoffs_csv(inst: &Instance, rows: &[Cutoff]) -> String {
    let mut out = String::from("schema,job,vertical,cutoff,holders\n");
    for r in rows {
        out.push_str(&format!(
            "{VERSION},{},{},{},{}\n",
            inst.job_name(r.job),
            inst.vertical_name(r.vertical),
            r.score.map(|s| s.to_string()).unwrap_or_default(),
            r.holders
        ));
    }
    out
}

/// One-line human rendering, used by the demo and in test diagnostics.
pub fn assignment_summary(inst: &Instance, a: &Assignment) -> String {
    a.iter()
        .map(|(i, s)| format!("{}:{}", inst.individual_name(i), seat_text(inst, s)))
        .collect::<Vec<_>>()
        .join(" ")
}

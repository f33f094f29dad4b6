//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns JSON strings. Errors come back as a
//! rejected value carrying the same error document the CLI prints.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use reserve_match::axioms::{check_all, check_inter_se_merit, cutoff_scores};
use reserve_match::generator::{generate_spec, GenProfile};
use reserve_match::mechanisms::MechanismKind;
use reserve_match::model::InstanceSpec;
use reserve_match::oracle::{equivalence_axioms_stability, verify_dominance, Bounds};
use reserve_match::{report, scenarios, validate_instance, Instance};

fn failure(kind: &str, message: impl ToString) -> Value {
    json!({"version": report::VERSION, "error": {"kind": kind, "message": message.to_string()}})
}

fn parse_instance(text: &str) -> Result<Instance, Value> {
    let spec = InstanceSpec::from_json(text).map_err(|e| failure("parse", e))?;
    validate_instance(&spec).map_err(|errs| {
        let mut f = failure("validation", format!("{} validation errors", errs.len()));
        f["error"]["details"] = serde_json::to_value(&errs).unwrap_or(Value::Null);
        f
    })
}

/// Bundled scenarios as `[{"name", "instance"}]`.
pub fn scenario_list() -> Value {
    scenarios::ALL
        .iter()
        .map(|(name, text)| {
            let inst: Value = serde_json::from_str(text).expect("bundled scenario parses");
            json!({"name": name, "instance": inst})
        })
        .collect()
}

/// Runs a mechanism and audits its outcome in one go.
pub fn allocate_json(instance: &str, mechanism: &str) -> Result<Value, Value> {
    let inst = parse_instance(instance)?;
    let kind: MechanismKind = mechanism.parse().map_err(|e| failure("usage", e))?;
    let run = kind.run(&inst).map_err(|e| failure("mechanism", e))?;
    let mut audit = check_all(&inst, &run.assignment);
    if let Ok(r) = check_inter_se_merit(&inst, &run.assignment) {
        audit.push(r);
    }
    Ok(json!({
        "run": report::run_document(&inst, &run, true),
        "summary": report::assignment_summary(&inst, &run.assignment),
        "audit": report::axiom_document(&inst, &audit),
        "cutoffs": report::cutoffs_csv(&inst, &cutoff_scores(&inst, &run.assignment)),
    }))
}

/// Every mechanism side by side.
pub fn compare_mechanisms_json(instance: &str) -> Result<Value, Value> {
    let inst = parse_instance(instance)?;
    let rows: Vec<Value> = MechanismKind::ALL
        .iter()
        .map(|m| match m.run(&inst) {
            Ok(run) => {
                let audit = check_all(&inst, &run.assignment);
                let failing: Vec<&str> = audit
                    .iter()
                    .filter(|r| !r.passed())
                    .map(|r| r.axiom.name())
                    .collect();
                json!({
                    "mechanism": m.name(),
                    "summary": report::assignment_summary(&inst, &run.assignment),
                    "failing_axioms": failing,
                })
            }
            Err(e) => json!({"mechanism": m.name(), "error": e.to_string()}),
        })
        .collect();
    Ok(Value::Array(rows))
}

/// Brute-force oracle verdict.
pub fn oracle_json(instance: &str) -> Result<Value, Value> {
    let inst = parse_instance(instance)?;
    let b = Bounds::default();
    let dom = verify_dominance(&inst, b).map_err(|e| failure("instance_too_large", e))?;
    let bridge =
        equivalence_axioms_stability(&inst, b).map_err(|e| failure("instance_too_large", e))?;
    Ok(report::oracle_document(&inst, &dom, &bridge))
}

/// A random instance; `profile` may be empty for the default profile.
pub fn generate_json(seed: u64, profile: &str) -> Result<Value, Value> {
    let p: GenProfile = if profile.trim().is_empty() {
        GenProfile::default()
    } else {
        serde_json::from_str(profile).map_err(|e| failure("parse", e))?
    };
    let spec = generate_spec(seed, &p).map_err(|e| failure("infeasible_profile", e))?;
    Ok(serde_json::to_value(spec).expect("instance spec serializes"))
}

fn to_js(r: Result<Value, Value>) -> Result<String, JsValue> {
    r.map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn scenarios() -> String {
    scenario_list().to_string()
}

#[wasm_bindgen]
pub fn allocate(instance: &str, mechanism: &str) -> Result<String, JsValue> {
    to_js(allocate_json(instance, mechanism))
}

#[wasm_bindgen]
pub fn compare_mechanisms(instance: &str) -> Result<String, JsValue> {
    to_js(compare_mechanisms_json(instance))
}

#[wasm_bindgen]
pub fn oracle(instance: &str) -> Result<String, JsValue> {
    to_js(oracle_json(instance))
}

#[wasm_bindgen]
pub fn generate(seed: u32, profile: &str) -> Result<String, JsValue> {
    to_js(generate_json(seed as u64, profile))
}

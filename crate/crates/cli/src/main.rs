//! `reserve-match` command-line front end.
//!
//! Exit codes: 0 success or check passed, 1 check failed, 2 usage or
//! validation error. Errors are reported as JSON on stderr.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use reserve_match::axioms::{
    check_axioms, check_strategy_proofness, cutoff_scores, pareto_compare, Axiom,
    DEFAULT_MAX_SP_JOBS,
};
use reserve_match::choice::{BoostConfig, DEFAULT_BOOST};
use reserve_match::generator::{generate_spec, GenProfile};
use reserve_match::mechanisms::{run_2smh_boost_da, MechanismError, MechanismKind};
use reserve_match::model::{validate_instance_with, InstanceSpec, TieBreak};
use reserve_match::oracle::{equivalence_axioms_stability, verify_dominance, Bounds};
use reserve_match::report;
use reserve_match::{Assignment, Instance};

const SEED_ENV: &str = "RESERVE_MATCH_SEED";

#[derive(Parser)]
#[command(
    name = "reserve-match",
    version,
    about = "Joint vertical/horizontal reservation allocation"
)]
struct Cli {
    /// How tied merit scores are handled.
    #[arg(long, global = true, value_enum, default_value_t = TieMode::Reject)]
    tie_break: TieMode,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieMode {
    Reject,
    Id,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism and write the mechanism-run document.
    Allocate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "2smh-da")]
        mechanism: MechanismKind,
        /// Turn this VR category into a soft reserve with a merit boost (2smh-da only).
        #[arg(long)]
        boost_category: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BOOST, requires = "boost_category")]
        boost: f64,
        /// Processing order of the VR categories, comma separated.
        #[arg(long, value_delimiter = ',', requires = "boost_category")]
        sequence: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the deferred acceptance round log.
        #[arg(long)]
        trace: bool,
    },
    /// Check an assignment against the axioms.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        /// Comma-separated axioms; defaults to the five axioms.
        #[arg(long, value_delimiter = ',')]
        axioms: Option<Vec<Axiom>>,
    },
    /// Pareto-compare two assignments.
    Compare {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Enumerate axiom-satisfying assignments and verify dominance and stability.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = Bounds::default().max_individuals)]
        max_individuals: usize,
        #[arg(long, default_value_t = Bounds::default().max_seats)]
        max_seats: u32,
    },
    /// Search every unilateral misreport for a profitable deviation.
    SpTest {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "2smh-da")]
        mechanism: MechanismKind,
        #[arg(long, default_value_t = DEFAULT_MAX_SP_JOBS)]
        max_jobs: usize,
    },
    /// Generate a random instance.
    Gen(GenArgs),
    /// Cutoff scores per job and vertical category, as CSV.
    Cutoffs {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Overridden by the RESERVE_MATCH_SEED environment variable.
    #[arg(long)]
    seed: Option<u64>,
    /// GenProfile JSON; flags below override its fields.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    individuals: Option<usize>,
    #[arg(long)]
    categories: Option<usize>,
    /// Category population share, `NAME=SHARE`; repeatable.
    #[arg(long = "category-share", value_parser = parse_share)]
    category_share: Vec<(String, f64)>,
    #[arg(long)]
    traits: Option<usize>,
    #[arg(long)]
    capacity_min: Option<u32>,
    #[arg(long)]
    capacity_max: Option<u32>,
    #[arg(long)]
    reserve_density: Option<f64>,
    #[arg(long)]
    hr_density: Option<f64>,
    #[arg(long)]
    trait_density: Option<f64>,
    #[arg(long)]
    acceptance: Option<f64>,
    #[arg(long)]
    empty_pref_prob: Option<f64>,
    #[arg(long)]
    common_merit: bool,
}

fn parse_share(s: &str) -> Result<(String, f64), String> {
    let (name, share) = s.split_once('=').ok_or("expected NAME=SHARE")?;
    let share = share.parse::<f64>().map_err(|e| e.to_string())?;
    Ok((name.to_string(), share))
}

struct Failure {
    kind: &'static str,
    message: String,
    details: Value,
}

impl Failure {
    fn new(kind: &'static str, message: impl ToString) -> Self {
        Failure {
            kind,
            message: message.to_string(),
            details: Value::Null,
        }
    }
}

impl From<MechanismError> for Failure {
    fn from(e: MechanismError) -> Self {
        Failure::new("mechanism", e)
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new("io", format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, doc: &Value) -> Result<(), Failure> {
    emit(
        out,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(doc).expect("JSON values serialize")
        ),
    )
}

fn load_instance(path: &Path, tie: TieMode) -> Result<Instance, Failure> {
    let spec = InstanceSpec::from_json(&read(path)?).map_err(|e| Failure::new("parse", e))?;
    let tie = match tie {
        TieMode::Reject => TieBreak::Reject,
        TieMode::Id => TieBreak::ById,
    };
    validate_instance_with(&spec, tie).map_err(|errs| Failure {
        kind: "validation",
        message: format!("{} validation errors", errs.len()),
        details: serde_json::to_value(&errs).expect("validation errors serialize"),
    })
}

fn load_assignment(inst: &Instance, path: &Path) -> Result<Assignment, Failure> {
    report::parse_assignment(inst, &read(path)?).map_err(|e| Failure::new("assignment", e))
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Outcome {
    let tie = cli.tie_break;
    match cli.command {
        Command::Allocate {
            instance,
            mechanism,
            boost_category,
            boost,
            sequence,
            out,
            trace,
        } => {
            let inst = load_instance(&instance, tie)?;
            let mut run = match &boost_category {
                None => mechanism.run(&inst)?,
                Some(_) if mechanism != MechanismKind::TwoSmhDa => {
                    return Err(MechanismError::BoostUnsupported.into())
                }
                Some(cat) => {
                    let seq: Vec<&str> = match &sequence {
                        Some(s) => s.iter().map(String::as_str).collect(),
                        None => inst.categories.iter().map(String::as_str).collect(),
                    };
                    let cfg = BoostConfig::from_names(&inst, cat, boost, &seq)
                        .map_err(|e| Failure::new("boost", e))?;
                    run_2smh_boost_da(&inst, &cfg)?
                }
            };
            if inst.tie_broken {
                run.warnings
                    .push("tied merit scores were broken by individual id".into());
            }
            let mut doc = report::run_document(&inst, &run, trace);
            if let Some(cat) = boost_category {
                doc["boost"] = json!({
                    "category": cat,
                    "boost": boost,
                    "sequence": sequence.unwrap_or_else(|| inst.categories.clone()),
                });
            }
            emit_json(out.as_deref(), &doc)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit {
            instance,
            assignment,
            axioms,
        } => {
            let inst = load_instance(&instance, tie)?;
            let a = load_assignment(&inst, &assignment)?;
            let axioms = axioms.unwrap_or_else(|| Axiom::FIVE.to_vec());
            let reports = check_axioms(&inst, &a, &axioms)?;
            let doc = report::axiom_document(&inst, &reports);
            emit_json(None, &doc)?;
            Ok(verdict(reports.iter().all(|r| r.passed())))
        }
        Command::Compare { instance, a, b } => {
            let inst = load_instance(&instance, tie)?;
            let (a, b) = (load_assignment(&inst, &a)?, load_assignment(&inst, &b)?);
            let doc = report::compare_document(&inst, &a, &b, pareto_compare(&inst, &a, &b));
            emit_json(None, &doc)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            instance,
            max_individuals,
            max_seats,
        } => {
            let inst = load_instance(&instance, tie)?;
            let bounds = Bounds {
                max_individuals,
                max_seats,
            };
            let too_large =
                |e: reserve_match::oracle::OracleError| Failure::new("instance_too_large", e);
            let dom = verify_dominance(&inst, bounds).map_err(too_large)?;
            let bridge = equivalence_axioms_stability(&inst, bounds).map_err(too_large)?;
            let doc = report::oracle_document(&inst, &dom, &bridge);
            emit_json(None, &doc)?;
            Ok(verdict(doc["pass"] == true))
        }
        Command::SpTest {
            instance,
            mechanism,
            max_jobs,
        } => {
            let inst = load_instance(&instance, tie)?;
            let devs =
                check_strategy_proofness(&inst, mechanism, max_jobs).map_err(|e| match e {
                    reserve_match::axioms::SpError::Mechanism(m) => m.into(),
                    other => Failure::new("report_space_too_large", other),
                })?;
            emit_json(
                None,
                &report::deviations_document(&inst, mechanism.name(), &devs),
            )?;
            Ok(verdict(devs.is_empty()))
        }
        Command::Gen(args) => {
            let seed = match std::env::var(SEED_ENV) {
                Ok(s) => s
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| Failure::new("usage", format!("{SEED_ENV}: {e}")))?,
                Err(_) => args.seed.ok_or_else(|| {
                    Failure::new("usage", format!("--seed or {SEED_ENV} is required"))
                })?,
            };
            let profile = gen_profile(&args)?;
            let spec =
                generate_spec(seed, &profile).map_err(|e| Failure::new("infeasible_profile", e))?;
            emit(args.out.as_deref(), &format!("{}\n", spec.to_json_pretty()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Cutoffs {
            instance,
            assignment,
            out,
        } => {
            let inst = load_instance(&instance, tie)?;
            let a = load_assignment(&inst, &assignment)?;
            emit(
                out.as_deref(),
                &report::cutoffs_csv(&inst, &cutoff_scores(&inst, &a)),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn gen_profile(args: &GenArgs) -> Result<GenProfile, Failure> {
    let mut p = match &args.profile {
        Some(path) => serde_json::from_str(&read(path)?).map_err(|e| Failure::new("parse", e))?,
        None => GenProfile::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = args.$field {
                p.$field = v;
            }
        )*};
    }
    set!(
        jobs,
        individuals,
        categories,
        traits,
        capacity_min,
        capacity_max,
        reserve_density,
        hr_density,
        trait_density,
        acceptance,
        empty_pref_prob
    );
    if !args.category_share.is_empty() {
        p.category_shares = args
            .category_share
            .iter()
            .cloned()
            .collect::<BTreeMap<_, _>>();
    }
    if args.common_merit {
        p.common_merit = true;
    }
    Ok(p)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            let doc = json!({
                "version": report::VERSION,
                "error": {"kind": f.kind, "message": f.message, "details": f.details},
            });
            eprintln!("{doc}");
            ExitCode::from(2)
        }
    }
}

//! Domain types: jobs, vertical categories, traits, individuals, and assignments.
//!
//! Instances arrive as an [`InstanceSpec`] (string identifiers, the on-disk
//! JSON shape) and are validated into an [`Instance`] that works with dense
//! indices. Every other module operates on the validated form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reserved token for the open vertical category.
pub const OPEN: &str = "o";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JobId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndividualId(pub usize);

/// Index of a VR-protected category in [`Instance::categories`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CategoryId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraitId(pub usize);

/// A vertical category: the open category or one of the VR-protected ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertical {
    Open,
    Reserved(CategoryId),
}

impl Vertical {
    /// Dense index: 0 for open, `c + 1` for reserved category `c`.
    pub fn index(self) -> usize {
        match self {
            Vertical::Open => 0,
            Vertical::Reserved(CategoryId(c)) => c + 1,
        }
    }

    pub fn from_index(ix: usize) -> Self {
        if ix == 0 {
            Vertical::Open
        } else {
            Vertical::Reserved(CategoryId(ix - 1))
        }
    }
}

/// A (job, vertical category) pair an individual can be assigned to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seat {
    pub job: JobId,
    pub vertical: Vertical,
}

impl Seat {
    pub fn new(job: JobId, vertical: Vertical) -> Self {
        Seat { job, vertical }
    }
}

// ---------------------------------------------------------------------------
// Raw (serialized) form
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub id: String,
    pub capacity: u32,
    #[serde(default)]
    pub vr_reserves: BTreeMap<String, u32>,
    #[serde(default)]
    pub hr_reserves: BTreeMap<String, BTreeMap<String, u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndividualSpec {
    pub id: String,
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default)]
    pub traits: Vec<String>,
    #[serde(default)]
    pub merit: BTreeMap<String, f64>,
    #[serde(default)]
    pub preferences: Vec<String>,
}

/// The instance file as written on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub jobs: Vec<JobSpec>,
    #[serde(default)]
    pub categories: Vec<String>,
    #[serde(default)]
    pub traits: Vec<String>,
    #[serde(default)]
    pub individuals: Vec<IndividualSpec>,
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Pretty JSON with a `"version": "v1"` field; readers ignore it.
    pub fn to_json_pretty(&self) -> String {
        let mut doc = serde_json::to_value(self).expect("instance spec serializes");
        doc["version"] = "v1".into();
        serde_json::to_string_pretty(&doc).expect("instance spec serializes")
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationError {
    #[error("duplicate {list} id `{id}`")]
    DuplicateId { list: &'static str, id: String },
    #[error("{owner} references unknown {what} `{id}`")]
    UnknownReference {
        owner: String,
        what: &'static str,
        id: String,
    },
    #[error("job `{job}`: VR reserves total {reserved} exceed capacity {capacity}")]
    ReserveExceedsCapacity {
        job: String,
        reserved: u32,
        capacity: u32,
    },
    #[error(
        "job `{job}`: HR reserves in `{vertical}` total {hr} exceed its {available} positions"
    )]
    HrExceedsVr {
        job: String,
        vertical: String,
        hr: u32,
        available: u32,
    },
    #[error("job `{job}`: individuals `{first}` and `{second}` share merit score {score}")]
    TiedMeritScores {
        job: String,
        first: String,
        second: String,
        score: f64,
    },
    #[error("individual `{individual}` has no merit score for job `{job}`")]
    MeritMissing { individual: String, job: String },
    #[error("individual `{individual}` lists job `{job}` twice")]
    DuplicatePreference { individual: String, job: String },
    #[error("`{OPEN}` is reserved for the open category and cannot name a VR category")]
    ReservedCategoryName,
    #[error("individual `{individual}` has non-finite merit for job `{job}`")]
    NonFiniteMerit { individual: String, job: String },
}

/// How tied merit scores are treated during validation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Ties are a validation error.
    #[default]
    Reject,
    /// Ties are broken by lexicographic individual id (smaller id ranks higher);
    /// the scores of later ids are nudged down to the next representable value.
    ById,
}

// ---------------------------------------------------------------------------
// Validated form
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct Job {
    pub id: String,
    pub capacity: u32,
    /// Positions per vertical category, indexed by [`Vertical::index`].
    reserves: Vec<u32>,
    /// HR-protected positions per vertical category and trait.
    hr: Vec<Vec<u32>>,
}

impl Job {
    /// Number of positions in vertical category `v` (`r^v_j`).
    pub fn reserve(&self, v: Vertical) -> u32 {
        self.reserves[v.index()]
    }

    /// Number of `v`-category positions protected for trait `t`.
    pub fn hr_reserve(&self, v: Vertical, t: TraitId) -> u32 {
        self.hr[v.index()][t.0]
    }

    pub fn hr_reserves(&self, v: Vertical) -> &[u32] {
        &self.hr[v.index()]
    }

    pub fn has_hr(&self) -> bool {
        self.hr.iter().flatten().any(|&r| r > 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub id: String,
    pub category: Option<CategoryId>,
    /// Sorted trait indices.
    pub traits: Vec<TraitId>,
    /// Merit score per job, indexed by job.
    pub merit: Vec<f64>,
    /// Acceptable jobs, most preferred first.
    pub preferences: Vec<JobId>,
}

impl Individual {
    pub fn has_trait(&self, t: TraitId) -> bool {
        self.traits.binary_search(&t).is_ok()
    }

    /// Position of `job` in the preference list, `None` if unacceptable.
    pub fn rank_of(&self, job: JobId) -> Option<usize> {
        self.preferences.iter().position(|&j| j == job)
    }

    pub fn finds_acceptable(&self, job: JobId) -> bool {
        self.preferences.contains(&job)
    }

    /// True when `a` is strictly preferred to `b` (`None` is remaining unassigned).
    pub fn prefers(&self, a: Option<JobId>, b: Option<JobId>) -> bool {
        self.compare_jobs(a, b) == Ordering::Greater
    }

    /// Orders outcomes by this individual's preferences; `Greater` means `a` is better.
    pub fn compare_jobs(&self, a: Option<JobId>, b: Option<JobId>) -> Ordering {
        // Acceptable jobs rank above unassigned, which ranks above unacceptable jobs.
        let score = |o: Option<JobId>| -> i64 {
            match o {
                None => 0,
                Some(j) => match self.rank_of(j) {
                    Some(r) => (self.preferences.len() - r) as i64,
                    None => -1,
                },
            }
        };
        score(a).cmp(&score(b))
    }
}

/// A validated problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub categories: Vec<String>,
    pub traits: Vec<String>,
    pub individuals: Vec<Individual>,
    /// Set when validation broke merit ties by id.
    pub tie_broken: bool,
}

impl Instance {
    pub fn job(&self, j: JobId) -> &Job {
        &self.jobs[j.0]
    }

    pub fn individual(&self, i: IndividualId) -> &Individual {
        &self.individuals[i.0]
    }

    pub fn job_ids(&self) -> impl Iterator<Item = JobId> + '_ {
        (0..self.jobs.len()).map(JobId)
    }

    pub fn individual_ids(&self) -> impl Iterator<Item = IndividualId> + '_ {
        (0..self.individuals.len()).map(IndividualId)
    }

    /// The open category followed by every VR category in master order.
    pub fn verticals(&self) -> impl Iterator<Item = Vertical> + '_ {
        (0..=self.categories.len()).map(Vertical::from_index)
    }

    pub fn vertical_count(&self) -> usize {
        self.categories.len() + 1
    }

    pub fn merit(&self, i: IndividualId, j: JobId) -> f64 {
        self.individuals[i.0].merit[j.0]
    }

    /// Whether `i` may hold a `v` position (hard reserves).
    pub fn eligible(&self, i: IndividualId, v: Vertical) -> bool {
        match v {
            Vertical::Open => true,
            Vertical::Reserved(c) => self.individuals[i.0].category == Some(c),
        }
    }

    pub fn job_index(&self, id: &str) -> Option<JobId> {
        self.jobs.iter().position(|j| j.id == id).map(JobId)
    }

    pub fn individual_index(&self, id: &str) -> Option<IndividualId> {
        self.individuals
            .iter()
            .position(|i| i.id == id)
            .map(IndividualId)
    }

    pub fn category_index(&self, id: &str) -> Option<CategoryId> {
        self.categories.iter().position(|c| c == id).map(CategoryId)
    }

    /// Parses `"o"` or a VR category id.
    pub fn vertical_by_name(&self, name: &str) -> Option<Vertical> {
        if name == OPEN {
            Some(Vertical::Open)
        } else {
            self.category_index(name).map(Vertical::Reserved)
        }
    }

    pub fn vertical_name(&self, v: Vertical) -> &str {
        match v {
            Vertical::Open => OPEN,
            Vertical::Reserved(c) => &self.categories[c.0],
        }
    }

    pub fn category_name(&self, c: Option<CategoryId>) -> &str {
        match c {
            Some(c) => &self.categories[c.0],
            None => "general",
        }
    }

    pub fn job_name(&self, j: JobId) -> &str {
        &self.jobs[j.0].id
    }

    pub fn individual_name(&self, i: IndividualId) -> &str {
        &self.individuals[i.0].id
    }

    pub fn has_hr_reserves(&self) -> bool {
        self.jobs.iter().any(Job::has_hr)
    }

    /// Total positions across jobs.
    pub fn total_capacity(&self) -> u32 {
        self.jobs.iter().map(|j| j.capacity).sum()
    }

    /// A copy where individual `i` reports `prefs` instead of her own list.
    pub fn with_preferences(&self, i: IndividualId, prefs: Vec<JobId>) -> Instance {
        let mut out = self.clone();
        out.individuals[i.0].preferences = prefs;
        out
    }

    /// Back to the on-disk shape. Zero reserves are omitted.
    pub fn to_spec(&self) -> InstanceSpec {
        let jobs = self
            .jobs
            .iter()
            .map(|job| {
                let vr_reserves = self
                    .categories
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| job.reserves[c + 1] > 0)
                    .map(|(c, name)| (name.clone(), job.reserves[c + 1]))
                    .collect();
                let mut hr_reserves = BTreeMap::new();
                for v in self.verticals() {
                    let per_trait: BTreeMap<String, u32> = self
                        .traits
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| job.hr[v.index()][*t] > 0)
                        .map(|(t, name)| (name.clone(), job.hr[v.index()][t]))
                        .collect();
                    if !per_trait.is_empty() {
                        hr_reserves.insert(self.vertical_name(v).to_string(), per_trait);
                    }
                }
                JobSpec {
                    id: job.id.clone(),
                    capacity: job.capacity,
                    vr_reserves,
                    hr_reserves,
                }
            })
            .collect();
        let individuals = self
            .individuals
            .iter()
            .map(|ind| IndividualSpec {
                id: ind.id.clone(),
                category: ind.category.map(|c| self.categories[c.0].clone()),
                traits: ind
                    .traits
                    .iter()
                    .map(|t| self.traits[t.0].clone())
                    .collect(),
                merit: self
                    .jobs
                    .iter()
                    .zip(&ind.merit)
                    .map(|(j, &m)| (j.id.clone(), m))
                    .collect(),
                preferences: ind
                    .preferences
                    .iter()
                    .map(|j| self.jobs[j.0].id.clone())
                    .collect(),
            })
            .collect();
        InstanceSpec {
            jobs,
            categories: self.categories.clone(),
            traits: self.traits.clone(),
            individuals,
        }
    }
}

fn duplicates<'a>(
    list: &'static str,
    ids: impl Iterator<Item = &'a String>,
    errors: &mut Vec<ValidationError>,
) -> HashMap<&'a str, usize> {
    let mut index = HashMap::new();
    let mut reported = HashSet::new();
    for (k, id) in ids.enumerate() {
        if index.contains_key(id.as_str()) {
            if reported.insert(id.as_str()) {
                errors.push(ValidationError::DuplicateId {
                    list,
                    id: id.clone(),
                });
            }
        } else {
            index.insert(id.as_str(), k);
        }
    }
    index
}

/// Checks every instance invariant and returns the indexed form, or the full
/// list of violations.
pub fn validate_instance(raw: &InstanceSpec) -> Result<Instance, Vec<ValidationError>> {
    validate_instance_with(raw, TieBreak::Reject)
}

pub fn validate_instance_with(
    raw: &InstanceSpec,
    tie_break: TieBreak,
) -> Result<Instance, Vec<ValidationError>> {
    let mut errors = Vec::new();

    if raw.categories.iter().any(|c| c == OPEN) {
        errors.push(ValidationError::ReservedCategoryName);
    }
    let job_ix = duplicates("job", raw.jobs.iter().map(|j| &j.id), &mut errors);
    let cat_ix = duplicates("category", raw.categories.iter(), &mut errors);
    let trait_ix = duplicates("trait", raw.traits.iter(), &mut errors);
    duplicates(
        "individual",
        raw.individuals.iter().map(|i| &i.id),
        &mut errors,
    );

    let n_cat = raw.categories.len();
    let n_trait = raw.traits.len();

    let mut jobs = Vec::with_capacity(raw.jobs.len());
    for spec in &raw.jobs {
        let owner = format!("job `{}`", spec.id);
        let mut reserves = vec![0u32; n_cat + 1];
        for (name, &count) in &spec.vr_reserves {
            match cat_ix.get(name.as_str()) {
                Some(&c) => reserves[c + 1] = count,
                None => errors.push(ValidationError::UnknownReference {
                    owner: owner.clone(),
                    what: "category",
                    id: name.clone(),
                }),
            }
        }
        let reserved: u32 = reserves[1..].iter().sum();
        if reserved > spec.capacity {
            errors.push(ValidationError::ReserveExceedsCapacity {
                job: spec.id.clone(),
                reserved,
                capacity: spec.capacity,
            });
        }
        reserves[0] = spec.capacity.saturating_sub(reserved);

        let mut hr = vec![vec![0u32; n_trait]; n_cat + 1];
        for (vname, per_trait) in &spec.hr_reserves {
            let v = if vname == OPEN {
                Some(0)
            } else {
                cat_ix.get(vname.as_str()).map(|&c| c + 1)
            };
            let Some(v) = v else {
                errors.push(ValidationError::UnknownReference {
                    owner: owner.clone(),
                    what: "vertical category",
                    id: vname.clone(),
                });
                continue;
            };
            for (tname, &count) in per_trait {
                match trait_ix.get(tname.as_str()) {
                    Some(&t) => hr[v][t] = count,
                    None => errors.push(ValidationError::UnknownReference {
                        owner: owner.clone(),
                        what: "trait",
                        id: tname.clone(),
                    }),
                }
            }
            let total: u32 = hr[v].iter().sum();
            if total > reserves[v] {
                errors.push(ValidationError::HrExceedsVr {
                    job: spec.id.clone(),
                    vertical: vname.clone(),
                    hr: total,
                    available: reserves[v],
                });
            }
        }
        jobs.push(Job {
            id: spec.id.clone(),
            capacity: spec.capacity,
            reserves,
            hr,
        });
    }

    let mut individuals = Vec::with_capacity(raw.individuals.len());
    for spec in &raw.individuals {
        let owner = format!("individual `{}`", spec.id);
        let category = match &spec.category {
            None => None,
            Some(name) => match cat_ix.get(name.as_str()) {
                Some(&c) => Some(CategoryId(c)),
                None => {
                    errors.push(ValidationError::UnknownReference {
                        owner: owner.clone(),
                        what: "category",
                        id: name.clone(),
                    });
                    None
                }
            },
        };
        let mut traits = Vec::new();
        for name in &spec.traits {
            match trait_ix.get(name.as_str()) {
                Some(&t) => traits.push(TraitId(t)),
                None => errors.push(ValidationError::UnknownReference {
                    owner: owner.clone(),
                    what: "trait",
                    id: name.clone(),
                }),
            }
        }
        traits.sort();
        traits.dedup();

        let mut merit = vec![f64::NAN; raw.jobs.len()];
        for (jname, &score) in &spec.merit {
            match job_ix.get(jname.as_str()) {
                Some(&j) => {
                    if !score.is_finite() {
                        errors.push(ValidationError::NonFiniteMerit {
                            individual: spec.id.clone(),
                            job: jname.clone(),
                        });
                    }
                    merit[j] = score;
                }
                None => errors.push(ValidationError::UnknownReference {
                    owner: owner.clone(),
                    what: "job",
                    id: jname.clone(),
                }),
            }
        }
        for (k, job) in raw.jobs.iter().enumerate() {
            if job_ix.get(job.id.as_str()) == Some(&k) && !spec.merit.contains_key(&job.id) {
                errors.push(ValidationError::MeritMissing {
                    individual: spec.id.clone(),
                    job: job.id.clone(),
                });
            }
        }

        let mut preferences = Vec::new();
        for jname in &spec.preferences {
            match job_ix.get(jname.as_str()) {
                Some(&j) => {
                    if preferences.contains(&JobId(j)) {
                        errors.push(ValidationError::DuplicatePreference {
                            individual: spec.id.clone(),
                            job: jname.clone(),
                        });
                    } else {
                        preferences.push(JobId(j));
                    }
                }
                None => errors.push(ValidationError::UnknownReference {
                    owner: owner.clone(),
                    what: "job",
                    id: jname.clone(),
                }),
            }
        }
        individuals.push(Individual {
            id: spec.id.clone(),
            category,
            traits,
            merit,
            preferences,
        });
    }

    let mut tie_broken = false;
    for (j, job) in jobs.iter().enumerate() {
        let mut order: Vec<usize> = (0..individuals.len())
            .filter(|&i| individuals[i].merit[j].is_finite())
            .collect();
        order.sort_by(|&a, &b| {
            individuals[b].merit[j]
                .total_cmp(&individuals[a].merit[j])
                .then_with(|| individuals[a].id.cmp(&individuals[b].id))
        });
        match tie_break {
            TieBreak::Reject => {
                for w in order.windows(2) {
                    let (a, b) = (&individuals[w[0]], &individuals[w[1]]);
                    if a.merit[j] == b.merit[j] {
                        errors.push(ValidationError::TiedMeritScores {
                            job: job.id.clone(),
                            first: a.id.clone(),
                            second: b.id.clone(),
                            score: a.merit[j],
                        });
                    }
                }
            }
            TieBreak::ById => {
                for k in 1..order.len() {
                    let prev = individuals[order[k - 1]].merit[j];
                    let cur = &mut individuals[order[k]].merit[j];
                    if *cur >= prev {
                        *cur = next_down(prev);
                        tie_broken = true;
                    }
                }
            }
        }
    }

    if errors.is_empty() {
        Ok(Instance {
            jobs,
            categories: raw.categories.clone(),
            traits: raw.traits.clone(),
            individuals,
            tie_broken,
        })
    } else {
        Err(errors)
    }
}

fn next_down(x: f64) -> f64 {
    if x == 0.0 {
        return -f64::from_bits(1);
    }
    let bits = x.to_bits();
    if x > 0.0 {
        f64::from_bits(bits - 1)
    } else {
        f64::from_bits(bits + 1)
    }
}

// ---------------------------------------------------------------------------
// Assignments
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("individual `{individual}` is not eligible for `{vertical}` positions at `{job}`")]
    Ineligible {
        individual: String,
        job: String,
        vertical: String,
    },
    #[error("`{job}` has {assigned} individuals in `{vertical}` but only {capacity} positions")]
    OverCapacity {
        job: String,
        vertical: String,
        assigned: usize,
        capacity: u32,
    },
    #[error("assignment covers {got} individuals, instance has {expected}")]
    WrongLength { got: usize, expected: usize },
}

/// Maps each individual to a seat or leaves her unassigned.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    seats: Vec<Option<Seat>>,
}

impl Assignment {
    pub fn unassigned(n: usize) -> Self {
        Assignment {
            seats: vec![None; n],
        }
    }

    pub fn from_seats(seats: Vec<Option<Seat>>) -> Self {
        Assignment { seats }
    }

    pub fn len(&self) -> usize {
        self.seats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seats.is_empty()
    }

    pub fn get(&self, i: IndividualId) -> Option<Seat> {
        self.seats[i.0]
    }

    pub fn job_of(&self, i: IndividualId) -> Option<JobId> {
        self.seats[i.0].map(|s| s.job)
    }

    pub fn set(&mut self, i: IndividualId, seat: Option<Seat>) {
        self.seats[i.0] = seat;
    }

    pub fn seats(&self) -> &[Option<Seat>] {
        &self.seats
    }

    pub fn iter(&self) -> impl Iterator<Item = (IndividualId, Option<Seat>)> + '_ {
        self.seats
            .iter()
            .enumerate()
            .map(|(i, s)| (IndividualId(i), *s))
    }

    /// Holders of `(j, v)` in individual-index order.
    pub fn holders(&self, job: JobId, v: Vertical) -> Vec<IndividualId> {
        let target = Some(Seat::new(job, v));
        self.iter()
            .filter(|(_, s)| *s == target)
            .map(|(i, _)| i)
            .collect()
    }

    /// Everyone holding a position at `job`, in any category.
    pub fn job_holders(&self, job: JobId) -> Vec<IndividualId> {
        self.iter()
            .filter(|(_, s)| s.map(|s| s.job) == Some(job))
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks eligibility and per-seat capacity against `instance`.
    pub fn validate(&self, instance: &Instance) -> Result<(), AssignmentError> {
        if self.seats.len() != instance.individuals.len() {
            return Err(AssignmentError::WrongLength {
                got: self.seats.len(),
                expected: instance.individuals.len(),
            });
        }
        let mut load = vec![vec![0usize; instance.vertical_count()]; instance.jobs.len()];
        for (i, seat) in self.iter() {
            let Some(seat) = seat else { continue };
            if !instance.eligible(i, seat.vertical) {
                return Err(AssignmentError::Ineligible {
                    individual: instance.individual_name(i).to_string(),
                    job: instance.job_name(seat.job).to_string(),
                    vertical: instance.vertical_name(seat.vertical).to_string(),
                });
            }
            load[seat.job.0][seat.vertical.index()] += 1;
        }
        for j in instance.job_ids() {
            for v in instance.verticals() {
                let assigned = load[j.0][v.index()];
                let capacity = instance.job(j).reserve(v);
                if assigned > capacity as usize {
                    return Err(AssignmentError::OverCapacity {
                        job: instance.job_name(j).to_string(),
                        vertical: instance.vertical_name(v).to_string(),
                        assigned,
                        capacity,
                    });
                }
            }
        }
        Ok(())
    }

    /// The job matching obtained by forgetting categories.
    pub fn induce_job_matching(&self) -> JobMatching {
        JobMatching {
            jobs: self.seats.iter().map(|s| s.map(|s| s.job)).collect(),
        }
    }
}

/// Individual → job, with categories forgotten.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JobMatching {
    pub jobs: Vec<Option<JobId>>,
}

impl JobMatching {
    pub fn count_at(&self, job: JobId) -> usize {
        self.jobs.iter().filter(|&&j| j == Some(job)).count()
    }
}

pub fn induce_job_matching(a: &Assignment) -> JobMatching {
    a.induce_job_matching()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    ABetter,
    BBetter,
    Indifferent,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::ABetter => "a-better",
            Comparison::BBetter => "b-better",
            Comparison::Indifferent => "indifferent",
        })
    }
}

/// Compares two assignments from `i`'s point of view; categories at the same
/// job are indifferent.
pub fn compare_assignments_for_individual(
    instance: &Instance,
    i: IndividualId,
    a: &Assignment,
    b: &Assignment,
) -> Comparison {
    match instance
        .individual(i)
        .compare_jobs(a.job_of(i), b.job_of(i))
    {
        Ordering::Greater => Comparison::ABetter,
        Ordering::Less => Comparison::BBetter,
        Ordering::Equal => Comparison::Indifferent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    fn one_job(capacity: u32, vr: &[(&str, u32)], hr: &[(&str, &str, u32)]) -> InstanceSpec {
        let mut hr_reserves: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
        for (v, t, n) in hr {
            hr_reserves
                .entry(v.to_string())
                .or_default()
                .insert(t.to_string(), *n);
        }
        InstanceSpec {
            jobs: vec![JobSpec {
                id: "x".into(),
                capacity,
                vr_reserves: vr.iter().map(|(c, n)| (c.to_string(), *n)).collect(),
                hr_reserves,
            }],
            categories: vec!["c".into()],
            traits: vec!["t".into()],
            individuals: vec![],
        }
    }

    fn person(id: &str, merit: f64) -> IndividualSpec {
        IndividualSpec {
            id: id.into(),
            category: None,
            traits: vec![],
            merit: [("x".to_string(), merit)].into(),
            preferences: vec!["x".into()],
        }
    }

    #[test]
    fn hr_on_open_with_no_open_positions() {
        let spec = one_job(1, &[("c", 1)], &[("o", "t", 1)]);
        let errs = validate_instance(&spec).unwrap_err();
        assert!(matches!(
            errs.as_slice(),
            [ValidationError::HrExceedsVr {
                available: 0,
                hr: 1,
                ..
            }]
        ));
    }

    #[test]
    fn tied_merit_rejected_by_default() {
        let mut spec = one_job(2, &[], &[]);
        spec.individuals = vec![person("a", 5.0), person("b", 5.0)];
        let errs = validate_instance(&spec).unwrap_err();
        assert!(matches!(
            errs.as_slice(),
            [ValidationError::TiedMeritScores { .. }]
        ));
    }

    #[test]
    fn tie_break_by_id_orders_lexicographically() {
        let mut spec = one_job(2, &[], &[]);
        spec.individuals = vec![person("b", 5.0), person("a", 5.0)];
        let inst = validate_instance_with(&spec, TieBreak::ById).unwrap();
        assert!(inst.tie_broken);
        let a = inst.individual_index("a").unwrap();
        let b = inst.individual_index("b").unwrap();
        assert!(inst.merit(a, JobId(0)) > inst.merit(b, JobId(0)));
    }

    #[test]
    fn reports_every_violation() {
        let mut spec = one_job(1, &[("c", 2), ("zz", 1)], &[]);
        spec.individuals = vec![person("a", 1.0), person("a", 2.0)];
        spec.individuals[1].merit.clear();
        let errs = validate_instance(&spec).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::DuplicateId { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::UnknownReference { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::ReserveExceedsCapacity { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::MeritMissing { .. })));
    }

    #[test]
    fn open_is_not_a_category_name() {
        let mut spec = one_job(1, &[], &[]);
        spec.categories.push("o".into());
        assert!(validate_instance(&spec)
            .unwrap_err()
            .contains(&ValidationError::ReservedCategoryName));
    }

    #[test]
    fn worked_example_validates_and_round_trips() {
        let inst = scenarios::hr_inefficiency_trio();
        let again = validate_instance(&inst.to_spec()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn preference_extension() {
        let inst = scenarios::hr_tradeoff_pair();
        let a = inst.individual_index("a").unwrap();
        let (x, y) = (JobId(0), JobId(1));
        let mut one = Assignment::unassigned(2);
        let mut two = Assignment::unassigned(2);
        one.set(a, Some(Seat::new(x, Vertical::Open)));
        two.set(a, Some(Seat::new(x, Vertical::Open)));
        assert_eq!(
            compare_assignments_for_individual(&inst, a, &one, &two),
            Comparison::Indifferent
        );
        one.set(a, Some(Seat::new(y, Vertical::Open)));
        assert_eq!(
            compare_assignments_for_individual(&inst, a, &one, &two),
            Comparison::ABetter
        );
        one.set(a, None);
        assert_eq!(
            compare_assignments_for_individual(&inst, a, &one, &two),
            Comparison::BBetter
        );
    }

    #[test]
    fn same_job_different_category_is_indifferent() {
        let inst = scenarios::upsc_migration();
        let b1 = inst.individual_index("b1").unwrap();
        let x = inst.job_index("x").unwrap();
        let c = inst.vertical_by_name("c").unwrap();
        let mut a = Assignment::unassigned(inst.individuals.len());
        let mut b = a.clone();
        a.set(b1, Some(Seat::new(x, Vertical::Open)));
        b.set(b1, Some(Seat::new(x, c)));
        assert_eq!(
            compare_assignments_for_individual(&inst, b1, &a, &b),
            Comparison::Indifferent
        );
    }

    #[test]
    fn job_matching_forgets_categories() {
        let inst = scenarios::upsc_migration();
        let x = inst.job_index("x").unwrap();
        let c = inst.vertical_by_name("c").unwrap();
        let mut a = Assignment::unassigned(inst.individuals.len());
        a.set(IndividualId(0), Some(Seat::new(x, Vertical::Open)));
        a.set(IndividualId(3), Some(Seat::new(x, c)));
        let m = a.induce_job_matching();
        assert_eq!(m.jobs[0], Some(x));
        assert_eq!(m.jobs[3], Some(x));
        assert_eq!(m.count_at(x), 2);
        let none = Assignment::unassigned(3).induce_job_matching();
        assert!(none.jobs.iter().all(Option::is_none));
    }

    #[test]
    fn validate_flags_ineligible_and_overfull() {
        let inst = scenarios::upsc_migration();
        let x = inst.job_index("x").unwrap();
        let c = inst.vertical_by_name("c").unwrap();
        let a1 = inst.individual_index("a1").unwrap();
        let mut a = Assignment::unassigned(inst.individuals.len());
        a.set(a1, Some(Seat::new(x, c)));
        assert!(matches!(
            a.validate(&inst),
            Err(AssignmentError::Ineligible { .. })
        ));
        let mut b = Assignment::unassigned(inst.individuals.len());
        b.set(IndividualId(0), Some(Seat::new(x, Vertical::Open)));
        b.set(IndividualId(1), Some(Seat::new(x, Vertical::Open)));
        assert!(matches!(
            b.validate(&inst),
            Err(AssignmentError::OverCapacity { .. })
        ));
    }
}

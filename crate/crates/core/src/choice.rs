//! Single-job choice rules.
//!
//! [`mh_choose`] is the meritorious horizontal rule for one vertical
//! category: first take, in merit order, every applicant whose admission
//! raises the honored HR count, then fill what is left by merit.
//! [`two_smh_choose`] runs it for the open category over all applicants and
//! then for each VR category over its members who were not taken for open
//! positions. [`two_smh_boost_choose`] is the soft-reserve variant in which
//! one category is open to everybody but its members get a score boost.

use thiserror::Error;

use crate::hr::HrMatcher;
use crate::model::{CategoryId, IndividualId, Instance, JobId, Vertical};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ChoiceError {
    #[error("individual `{individual}` is not eligible for `{vertical}` positions")]
    IneligibleIndividual {
        individual: String,
        vertical: String,
    },
    #[error("job `{job}`: `{first}` and `{second}` tie at {score} after the boost")]
    TiedMeritScoresAfterBoost {
        job: String,
        first: String,
        second: String,
        score: f64,
    },
    #[error("invalid boost configuration: {0}")]
    InvalidBoost(String),
}

/// Why an individual was taken by the meritorious horizontal rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pick {
    /// Step 1: admission raised the honored count to `honored`.
    Hr { honored: usize },
    /// Step 2: filled by merit.
    Merit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MhStep {
    pub individual: IndividualId,
    pub pick: Pick,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MhOutcome {
    /// Chosen individuals in index order.
    pub chosen: Vec<IndividualId>,
    /// Picks in the order they were made.
    pub trace: Vec<MhStep>,
}

impl MhOutcome {
    pub fn hr_picks(&self) -> impl Iterator<Item = IndividualId> + '_ {
        self.trace
            .iter()
            .filter(|s| matches!(s.pick, Pick::Hr { .. }))
            .map(|s| s.individual)
    }
}

/// Per-category chosen sets at one job.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceResult {
    /// Chosen set per vertical, indexed by [`Vertical::index`], each in index order.
    pub parts: Vec<Vec<IndividualId>>,
    /// The step trace behind each part.
    pub traces: Vec<Vec<MhStep>>,
}

impl ChoiceResult {
    fn empty(verticals: usize) -> Self {
        ChoiceResult {
            parts: vec![Vec::new(); verticals],
            traces: vec![Vec::new(); verticals],
        }
    }

    pub fn part(&self, v: Vertical) -> &[IndividualId] {
        &self.parts[v.index()]
    }

    /// Union of all parts, in index order.
    pub fn aggregate(&self) -> Vec<IndividualId> {
        let mut all: Vec<IndividualId> = self.parts.iter().flatten().copied().collect();
        all.sort();
        all
    }

    pub fn vertical_of(&self, i: IndividualId) -> Option<Vertical> {
        self.parts
            .iter()
            .position(|p| p.contains(&i))
            .map(Vertical::from_index)
    }

    pub fn total(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }
}

fn normalized(applicants: &[IndividualId]) -> Vec<IndividualId> {
    let mut v = applicants.to_vec();
    v.sort();
    v.dedup();
    v
}

/// The meritorious horizontal rule over `candidates` with an arbitrary score.
/// Candidates must have pairwise distinct scores.
fn meritorious_horizontal(
    instance: &Instance,
    job: JobId,
    v: Vertical,
    candidates: &[IndividualId],
    score: impl Fn(IndividualId) -> f64,
) -> MhOutcome {
    let capacity = instance.job(job).reserve(v) as usize;
    let mut order = candidates.to_vec();
    order.sort_by(|&a, &b| score(b).total_cmp(&score(a)).then(a.cmp(&b)));

    let mut taken = vec![false; order.len()];
    let mut trace = Vec::new();
    if capacity > 0 {
        // Honored count is a matroid rank, so a candidate that fails to raise
        // it now never will later: one pass in merit order is the whole of Step 1.
        let mut matcher = HrMatcher::new(instance, job, v);
        if matcher.slot_count() > 0 {
            for (k, &i) in order.iter().enumerate() {
                if matcher.size() == matcher.slot_count() || trace.len() == capacity {
                    break;
                }
                if matcher.would_increase(i) {
                    matcher.insert(i);
                    taken[k] = true;
                    trace.push(MhStep {
                        individual: i,
                        pick: Pick::Hr {
                            honored: matcher.size(),
                        },
                    });
                }
            }
        }
        for (k, &i) in order.iter().enumerate() {
            if trace.len() == capacity {
                break;
            }
            if !taken[k] {
                taken[k] = true;
                trace.push(MhStep {
                    individual: i,
                    pick: Pick::Merit,
                });
            }
        }
    }
    let mut chosen: Vec<IndividualId> = trace.iter().map(|s| s.individual).collect();
    chosen.sort();
    MhOutcome { chosen, trace }
}

/// Meritorious horizontal choice for category `v` at `job`.
pub fn mh_choose(
    instance: &Instance,
    job: JobId,
    v: Vertical,
    applicants: &[IndividualId],
) -> Result<MhOutcome, ChoiceError> {
    let applicants = normalized(applicants);
    if let Some(&bad) = applicants.iter().find(|&&i| !instance.eligible(i, v)) {
        return Err(ChoiceError::IneligibleIndividual {
            individual: instance.individual_name(bad).to_string(),
            vertical: instance.vertical_name(v).to_string(),
        });
    }
    Ok(meritorious_horizontal(instance, job, v, &applicants, |i| {
        instance.merit(i, job)
    }))
}

/// The 2-step meritorious horizontal rule: open category first, then each VR category.
pub fn two_smh_choose(
    instance: &Instance,
    job: JobId,
    applicants: &[IndividualId],
) -> ChoiceResult {
    let applicants = normalized(applicants);
    let merit = |i: IndividualId| instance.merit(i, job);
    let mut result = ChoiceResult::empty(instance.vertical_count());

    let open = meritorious_horizontal(instance, job, Vertical::Open, &applicants, merit);
    let rest: Vec<IndividualId> = applicants
        .iter()
        .copied()
        .filter(|i| !open.chosen.contains(i))
        .collect();
    result.parts[0] = open.chosen;
    result.traces[0] = open.trace;

    for c in 0..instance.categories.len() {
        let v = Vertical::Reserved(CategoryId(c));
        let members: Vec<IndividualId> = rest
            .iter()
            .copied()
            .filter(|&i| instance.eligible(i, v))
            .collect();
        let out = meritorious_horizontal(instance, job, v, &members, merit);
        result.parts[v.index()] = out.chosen;
        result.traces[v.index()] = out.trace;
    }
    result
}

/// Everyone chosen by [`two_smh_choose`].
pub fn aggregate_choose(
    instance: &Instance,
    job: JobId,
    applicants: &[IndividualId],
) -> Vec<IndividualId> {
    two_smh_choose(instance, job, applicants).aggregate()
}

/// Soft-reserve configuration for one VR category.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostConfig {
    pub boosted: CategoryId,
    pub boost: f64,
    /// Processing order of every VR category after the open category.
    pub sequence: Vec<CategoryId>,
}

pub const DEFAULT_BOOST: f64 = 10.0;

impl BoostConfig {
    pub fn new(
        instance: &Instance,
        boosted: CategoryId,
        boost: f64,
        sequence: Vec<CategoryId>,
    ) -> Result<Self, ChoiceError> {
        if !(boost.is_finite() && boost >= 0.0) {
            return Err(ChoiceError::InvalidBoost(format!(
                "boost must be a non-negative number, got {boost}"
            )));
        }
        if boosted.0 >= instance.categories.len() {
            return Err(ChoiceError::InvalidBoost("unknown boosted category".into()));
        }
        let mut sorted = sequence.clone();
        sorted.sort();
        let expected: Vec<CategoryId> = (0..instance.categories.len()).map(CategoryId).collect();
        if sorted != expected {
            return Err(ChoiceError::InvalidBoost(
                "sequence must list every VR category exactly once".into(),
            ));
        }
        Ok(BoostConfig {
            boosted,
            boost,
            sequence,
        })
    }

    /// Builds a configuration from category names.
    pub fn from_names(
        instance: &Instance,
        boosted: &str,
        boost: f64,
        sequence: &[&str],
    ) -> Result<Self, ChoiceError> {
        let lookup = |name: &str| {
            instance
                .category_index(name)
                .ok_or_else(|| ChoiceError::InvalidBoost(format!("unknown category `{name}`")))
        };
        let seq = sequence
            .iter()
            .map(|s| lookup(s))
            .collect::<Result<Vec<_>, _>>()?;
        BoostConfig::new(instance, lookup(boosted)?, boost, seq)
    }

    /// Whether `i` may hold a `v` position under this soft reserve.
    pub fn eligible(&self, instance: &Instance, i: IndividualId, v: Vertical) -> bool {
        v == Vertical::Reserved(self.boosted) || instance.eligible(i, v)
    }
}

/// 2SMH with `cfg.boosted` as a soft reserve: every remaining applicant competes
/// for it, members with their score raised by `cfg.boost`.
pub fn two_smh_boost_choose(
    instance: &Instance,
    job: JobId,
    applicants: &[IndividualId],
    cfg: &BoostConfig,
) -> Result<ChoiceResult, ChoiceError> {
    let applicants = normalized(applicants);
    let merit = |i: IndividualId| instance.merit(i, job);
    let boosted = |i: IndividualId| {
        let m = instance.merit(i, job);
        if instance.individual(i).category == Some(cfg.boosted) {
            m + cfg.boost
        } else {
            m
        }
    };
    let mut result = ChoiceResult::empty(instance.vertical_count());

    let open = meritorious_horizontal(instance, job, Vertical::Open, &applicants, merit);
    let mut remaining: Vec<IndividualId> = applicants
        .iter()
        .copied()
        .filter(|i| !open.chosen.contains(i))
        .collect();
    result.parts[0] = open.chosen;
    result.traces[0] = open.trace;

    for &c in &cfg.sequence {
        let v = Vertical::Reserved(c);
        let out = if c == cfg.boosted {
            let mut scored: Vec<(f64, IndividualId)> =
                remaining.iter().map(|&i| (boosted(i), i)).collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0));
            if let Some(w) = scored.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(ChoiceError::TiedMeritScoresAfterBoost {
                    job: instance.job_name(job).to_string(),
                    first: instance.individual_name(w[0].1).to_string(),
                    second: instance.individual_name(w[1].1).to_string(),
                    score: w[0].0,
                });
            }
            meritorious_horizontal(instance, job, v, &remaining, boosted)
        } else {
            let members: Vec<IndividualId> = remaining
                .iter()
                .copied()
                .filter(|&i| instance.eligible(i, v))
                .collect();
            meritorious_horizontal(instance, job, v, &members, merit)
        };
        remaining.retain(|i| !out.chosen.contains(i));
        result.parts[v.index()] = out.chosen;
        result.traces[v.index()] = out.trace;
    }
    Ok(result)
}

/// A multi-category choice rule usable by deferred acceptance.
pub trait ChoiceRule {
    fn choose(
        &self,
        instance: &Instance,
        job: JobId,
        applicants: &[IndividualId],
    ) -> Result<ChoiceResult, ChoiceError>;
}

/// The 2SMH rule with hard VR reserves.
#[derive(Clone, Copy, Debug, Default)]
pub struct TwoStepMh;

impl ChoiceRule for TwoStepMh {
    fn choose(
        &self,
        instance: &Instance,
        job: JobId,
        applicants: &[IndividualId],
    ) -> Result<ChoiceResult, ChoiceError> {
        Ok(two_smh_choose(instance, job, applicants))
    }
}

impl ChoiceRule for BoostConfig {
    fn choose(
        &self,
        instance: &Instance,
        job: JobId,
        applicants: &[IndividualId],
    ) -> Result<ChoiceResult, ChoiceError> {
        two_smh_boost_choose(instance, job, applicants, self)
    }
}

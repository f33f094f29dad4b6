//! Seeded random instances for property tests and simulations.
//!
//! The same `(seed, profile)` always yields the same instance. Merit scores
//! come from random permutations, so they never tie.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_instance, IndividualSpec, Instance, InstanceSpec, JobSpec, OPEN};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GenError {
    #[error("infeasible profile: {0}")]
    InfeasibleProfile(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenProfile {
    pub jobs: usize,
    pub individuals: usize,
    /// Number of reserved categories, named `c1`, `c2`, ... Ignored when
    /// `category_shares` is non-empty.
    pub categories: usize,
    /// Population share per named category; the rest are general.
    pub category_shares: BTreeMap<String, f64>,
    pub traits: usize,
    pub capacity_min: u32,
    pub capacity_max: u32,
    /// Expected fraction of a job's capacity reserved for each category.
    pub reserve_density: f64,
    /// Probability that a trait gets HR positions within a vertical.
    pub hr_density: f64,
    /// Probability that an individual holds a given trait.
    pub trait_density: f64,
    /// Probability that a job is acceptable to an individual.
    pub acceptance: f64,
    pub common_merit: bool,
    pub empty_pref_prob: f64,
}

impl Default for GenProfile {
    fn default() -> Self {
        GenProfile {
            jobs: 3,
            individuals: 5,
            categories: 1,
            category_shares: BTreeMap::new(),
            traits: 1,
            capacity_min: 1,
            capacity_max: 2,
            reserve_density: 0.3,
            hr_density: 0.3,
            trait_density: 0.4,
            acceptance: 0.7,
            common_merit: false,
            empty_pref_prob: 0.05,
        }
    }
}

impl GenProfile {
    fn category_names(&self) -> Vec<String> {
        if self.category_shares.is_empty() {
            (1..=self.categories).map(|k| format!("c{k}")).collect()
        } else {
            self.category_shares.keys().cloned().collect()
        }
    }

    fn check(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::InfeasibleProfile(msg));
        let probs = [
            ("reserve_density", self.reserve_density),
            ("hr_density", self.hr_density),
            ("trait_density", self.trait_density),
            ("acceptance", self.acceptance),
            ("empty_pref_prob", self.empty_pref_prob),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.capacity_min > self.capacity_max {
            return bad(format!(
                "capacity range {}..={} is empty",
                self.capacity_min, self.capacity_max
            ));
        }
        let cats = self.category_names();
        if cats.iter().any(|c| c == OPEN) {
            return bad(format!("category name `{OPEN}` is reserved"));
        }
        if self.reserve_density * cats.len() as f64 > 1.0 {
            return bad(format!(
                "reserve density {} over {} categories exceeds capacity",
                self.reserve_density,
                cats.len()
            ));
        }
        let share: f64 = self.category_shares.values().sum();
        if self.category_shares.values().any(|s| *s < 0.0) || share > 1.0 {
            return bad(format!("category shares sum to {share}"));
        }
        Ok(())
    }
}

/// Draws an instance. The result always passes validation.
pub fn generate(seed: u64, profile: &GenProfile) -> Result<Instance, GenError> {
    let spec = generate_spec(seed, profile)?;
    Ok(validate_instance(&spec).expect("generated instances are valid"))
}

pub fn generate_spec(seed: u64, p: &GenProfile) -> Result<InstanceSpec, GenError> {
    p.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let categories = p.category_names();
    let traits: Vec<String> = (1..=p.traits).map(|k| format!("t{k}")).collect();
    let job_ids: Vec<String> = (1..=p.jobs).map(|k| format!("j{k}")).collect();

    let mut jobs = Vec::with_capacity(p.jobs);
    for id in &job_ids {
        let capacity = rng.gen_range(p.capacity_min..=p.capacity_max);
        let mut left = capacity;
        let mut vr_reserves = BTreeMap::new();
        for c in &categories {
            let drawn = (0..capacity)
                .filter(|_| rng.gen_bool(p.reserve_density))
                .count() as u32;
            let r = drawn.min(left);
            left -= r;
            vr_reserves.insert(c.clone(), r);
        }
        let mut hr_reserves = BTreeMap::new();
        let verticals = std::iter::once((OPEN.to_string(), left))
            .chain(categories.iter().map(|c| (c.clone(), vr_reserves[c])));
        for (v, size) in verticals {
            let mut budget = size;
            let mut per_trait = BTreeMap::new();
            for t in &traits {
                if budget > 0 && rng.gen_bool(p.hr_density) {
                    let n = rng.gen_range(1..=budget);
                    budget -= n;
                    per_trait.insert(t.clone(), n);
                }
            }
            if !per_trait.is_empty() {
                hr_reserves.insert(v, per_trait);
            }
        }
        vr_reserves.retain(|_, r| *r > 0);
        jobs.push(JobSpec {
            id: id.clone(),
            capacity,
            vr_reserves,
            hr_reserves,
        });
    }

    let n = p.individuals;
    let mut membership: Vec<Option<String>> = if p.category_shares.is_empty() {
        (0..n)
            .map(|_| {
                let k = rng.gen_range(0..=categories.len());
                categories.get(k).cloned()
            })
            .collect()
    } else {
        let mut m = Vec::with_capacity(n);
        for (c, share) in &p.category_shares {
            let k = ((share * n as f64).round() as usize).min(n - m.len());
            m.extend(std::iter::repeat_n(Some(c.clone()), k));
        }
        m.resize(n, None);
        m.shuffle(&mut rng);
        m
    };

    let rank = |rng: &mut ChaCha8Rng| {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        // score of individual `order[pos]` is n - pos
        let mut score = vec![0.0; n];
        for (pos, &i) in order.iter().enumerate() {
            score[i] = (n - pos) as f64;
        }
        score
    };
    let scores: Vec<Vec<f64>> = if p.common_merit {
        let s = rank(&mut rng);
        vec![s; p.jobs]
    } else {
        (0..p.jobs).map(|_| rank(&mut rng)).collect()
    };

    let mut individuals = Vec::with_capacity(n);
    for (k, category) in membership.drain(..).enumerate() {
        let person_traits = traits
            .iter()
            .filter(|_| rng.gen_bool(p.trait_density))
            .cloned()
            .collect();
        let preferences = if p.jobs == 0 || rng.gen_bool(p.empty_pref_prob) {
            Vec::new()
        } else {
            let mut acc: Vec<String> = job_ids
                .iter()
                .filter(|_| rng.gen_bool(p.acceptance))
                .cloned()
                .collect();
            if acc.is_empty() {
                acc.push(job_ids.choose(&mut rng).unwrap().clone());
            }
            acc.shuffle(&mut rng);
            acc
        };
        individuals.push(IndividualSpec {
            id: format!("i{}", k + 1),
            category,
            traits: person_traits,
            merit: job_ids
                .iter()
                .enumerate()
                .map(|(j, id)| (id.clone(), scores[j][k]))
                .collect(),
            preferences,
        });
    }

    Ok(InstanceSpec {
        jobs,
        categories,
        traits,
        individuals,
    })
}

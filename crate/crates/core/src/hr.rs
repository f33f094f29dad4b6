//! HR graphs and the honored-count rank function.
//!
//! For a fixed job `j` and vertical category `v`, each trait `t` contributes
//! `r^{v,t}_j` interchangeable slots. An individual is adjacent to every slot
//! of every trait she holds. The number of HR-protected positions honored by
//! a set of individuals is the size of a maximum matching in this graph.
//!
//! [`HrMatcher`] grows the matching one individual at a time with augmenting
//! paths (Kuhn's method). Individuals are tried in the order given and slots
//! in master trait order, so the witness is reproducible. An individual that
//! fails to augment when inserted can never be matched by later insertions,
//! which is what lets the choice rules use it incrementally.

use thiserror::Error;

use crate::model::{IndividualId, Instance, JobId, TraitId, Vertical};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HrError {
    #[error("individual `{individual}` is not eligible for `{vertical}` positions")]
    IneligibleIndividual {
        individual: String,
        vertical: String,
    },
}

/// A maximum trait matching: which individual covers which trait slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraitMatching {
    /// `(individual, trait)` in individual order; unmatched individuals are absent.
    pub pairs: Vec<(IndividualId, TraitId)>,
}

impl TraitMatching {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn trait_of(&self, i: IndividualId) -> Option<TraitId> {
        self.pairs.iter().find(|(k, _)| *k == i).map(|(_, t)| *t)
    }
}

/// The bipartite HR graph for one `(job, vertical)` pair.
#[derive(Clone, Debug)]
pub struct HrGraph {
    pub individuals: Vec<IndividualId>,
    /// `(trait, index within that trait)` per slot.
    pub slots: Vec<(TraitId, u32)>,
    /// `(individual position, slot position)` pairs.
    pub edges: Vec<(usize, usize)>,
}

impl HrGraph {
    pub fn build(instance: &Instance, job: JobId, v: Vertical, members: &[IndividualId]) -> Self {
        let slots = slot_traits(instance, job, v)
            .into_iter()
            .scan((None, 0u32), |(last, k), t| {
                if *last == Some(t) {
                    *k += 1;
                } else {
                    *last = Some(t);
                    *k = 0;
                }
                Some((t, *k))
            })
            .collect::<Vec<_>>();
        let mut edges = Vec::new();
        for (p, &i) in members.iter().enumerate() {
            let person = instance.individual(i);
            for (s, (t, _)) in slots.iter().enumerate() {
                if person.has_trait(*t) {
                    edges.push((p, s));
                }
            }
        }
        HrGraph {
            individuals: members.to_vec(),
            slots,
            edges,
        }
    }
}

fn slot_traits(instance: &Instance, job: JobId, v: Vertical) -> Vec<TraitId> {
    instance
        .job(job)
        .hr_reserves(v)
        .iter()
        .enumerate()
        .flat_map(|(t, &n)| std::iter::repeat_n(TraitId(t), n as usize))
        .collect()
}

/// Incrementally maintained maximum trait matching for one `(job, vertical)`.
#[derive(Clone, Debug)]
pub struct HrMatcher<'a> {
    instance: &'a Instance,
    slots: Vec<TraitId>,
    slot_owner: Vec<Option<usize>>,
    members: Vec<IndividualId>,
    member_slot: Vec<Option<usize>>,
    size: usize,
}

impl<'a> HrMatcher<'a> {
    pub fn new(instance: &'a Instance, job: JobId, v: Vertical) -> Self {
        let slots = slot_traits(instance, job, v);
        HrMatcher {
            instance,
            slot_owner: vec![None; slots.len()],
            slots,
            members: Vec::new(),
            member_slot: Vec::new(),
            size: 0,
        }
    }

    /// Current maximum matching size over inserted individuals.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn members(&self) -> &[IndividualId] {
        &self.members
    }

    /// Adds `i` and returns whether the honored count went up by one.
    pub fn insert(&mut self, i: IndividualId) -> bool {
        let p = self.members.len();
        self.members.push(i);
        self.member_slot.push(None);
        if self.size == self.slots.len() {
            return false;
        }
        let mut visited = vec![false; self.slots.len()];
        if self.augment(p, &mut visited) {
            self.size += 1;
            true
        } else {
            false
        }
    }

    /// Whether inserting `i` would raise the honored count, without inserting.
    pub fn would_increase(&self, i: IndividualId) -> bool {
        if self.size == self.slots.len() {
            return false;
        }
        let person = self.instance.individual(i);
        if !self.slots.iter().any(|t| person.has_trait(*t)) {
            return false;
        }
        self.clone().insert(i)
    }

    fn augment(&mut self, p: usize, visited: &mut [bool]) -> bool {
        let person = self.instance.individual(self.members[p]);
        for s in 0..self.slots.len() {
            if visited[s] || !person.has_trait(self.slots[s]) {
                continue;
            }
            visited[s] = true;
            let free = match self.slot_owner[s] {
                None => true,
                Some(q) => self.augment(q, visited),
            };
            if free {
                self.slot_owner[s] = Some(p);
                self.member_slot[p] = Some(s);
                return true;
            }
        }
        false
    }

    pub fn matching(&self) -> TraitMatching {
        let mut pairs: Vec<(IndividualId, TraitId)> = self
            .members
            .iter()
            .zip(&self.member_slot)
            .filter_map(|(&i, s)| s.map(|s| (i, self.slots[s])))
            .collect();
        pairs.sort();
        TraitMatching { pairs }
    }
}

/// Honored count for `set` without an eligibility check. Individuals are
/// processed in index order.
pub fn hr_count(instance: &Instance, job: JobId, v: Vertical, set: &[IndividualId]) -> usize {
    if instance.job(job).hr_reserves(v).iter().all(|&r| r == 0) {
        return 0;
    }
    let mut sorted = set.to_vec();
    sorted.sort();
    let mut m = HrMatcher::new(instance, job, v);
    for i in sorted {
        m.insert(i);
    }
    m.size()
}

/// Maximum trait matching witness for `set` at `(job, v)`; its size is `n_j^v(set)`.
pub fn honored_count(
    instance: &Instance,
    job: JobId,
    v: Vertical,
    set: &[IndividualId],
) -> Result<TraitMatching, HrError> {
    if let Some(&bad) = set.iter().find(|&&i| !instance.eligible(i, v)) {
        return Err(HrError::IneligibleIndividual {
            individual: instance.individual_name(bad).to_string(),
            vertical: instance.vertical_name(v).to_string(),
        });
    }
    Ok(trait_matching_unchecked(instance, job, v, set))
}

pub(crate) fn trait_matching_unchecked(
    instance: &Instance,
    job: JobId,
    v: Vertical,
    set: &[IndividualId],
) -> TraitMatching {
    let mut sorted = set.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut m = HrMatcher::new(instance, job, v);
    for i in sorted {
        m.insert(i);
    }
    m.matching()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, IndividualSpec, InstanceSpec, JobSpec};
    use std::collections::BTreeMap;

    fn instance(hr: &[(&str, u32)], people: &[(&str, &[&str])]) -> Instance {
        let spec = InstanceSpec {
            jobs: vec![JobSpec {
                id: "j".into(),
                capacity: 4,
                vr_reserves: BTreeMap::new(),
                hr_reserves: [(
                    "o".to_string(),
                    hr.iter().map(|(t, n)| (t.to_string(), *n)).collect(),
                )]
                .into(),
            }],
            categories: vec![],
            traits: vec!["women".into(), "pwd".into(), "t".into()],
            individuals: people
                .iter()
                .enumerate()
                .map(|(k, (id, traits))| IndividualSpec {
                    id: id.to_string(),
                    category: None,
                    traits: traits.iter().map(|s| s.to_string()).collect(),
                    merit: [("j".to_string(), k as f64)].into(),
                    preferences: vec!["j".into()],
                })
                .collect(),
        };
        validate_instance(&spec).unwrap()
    }

    fn ids(n: usize) -> Vec<IndividualId> {
        (0..n).map(IndividualId).collect()
    }

    #[test]
    fn empty_set_honors_nothing() {
        let inst = instance(&[("women", 1)], &[("a", &["women"])]);
        let m = honored_count(&inst, JobId(0), Vertical::Open, &[]).unwrap();
        assert_eq!(m.size(), 0);
    }

    #[test]
    fn overlapping_traits_cover_both_slots() {
        let inst = instance(
            &[("women", 1), ("pwd", 1)],
            &[("dw", &["women", "pwd"]), ("dm", &["pwd"])],
        );
        let m = honored_count(&inst, JobId(0), Vertical::Open, &ids(2)).unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.trait_of(IndividualId(0)), Some(TraitId(0)));
        assert_eq!(m.trait_of(IndividualId(1)), Some(TraitId(1)));
    }

    #[test]
    fn single_dual_trait_individual_covers_one() {
        let inst = instance(&[("women", 1), ("pwd", 1)], &[("dw", &["women", "pwd"])]);
        let m = honored_count(&inst, JobId(0), Vertical::Open, &ids(1)).unwrap();
        assert_eq!(m.size(), 1);
    }

    #[test]
    fn single_trait_closed_form() {
        let inst = instance(&[("t", 2)], &[("a", &["t"]), ("b", &["t"]), ("c", &["t"])]);
        assert_eq!(hr_count(&inst, JobId(0), Vertical::Open, &ids(3)), 2);
    }

    #[test]
    fn zero_reserve_traits_have_no_slots() {
        let inst = instance(&[("women", 0)], &[("a", &["women"])]);
        assert_eq!(hr_count(&inst, JobId(0), Vertical::Open, &ids(1)), 0);
        let g = HrGraph::build(&inst, JobId(0), Vertical::Open, &ids(1));
        assert!(g.slots.is_empty() && g.edges.is_empty());
    }

    #[test]
    fn graph_edges_follow_traits() {
        let inst = instance(
            &[("women", 2), ("pwd", 1)],
            &[("a", &["women"]), ("b", &["pwd", "women"]), ("c", &[])],
        );
        let g = HrGraph::build(&inst, JobId(0), Vertical::Open, &ids(3));
        assert_eq!(
            g.slots,
            vec![(TraitId(0), 0), (TraitId(0), 1), (TraitId(1), 0)]
        );
        assert_eq!(g.edges, vec![(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)]);
    }

    #[test]
    fn augmenting_path_reroutes_earlier_match() {
        // `a` first grabs the women slot; `b` (women only) forces `a` over to pwd.
        let inst = instance(
            &[("women", 1), ("pwd", 1)],
            &[("a", &["women", "pwd"]), ("b", &["women"])],
        );
        let mut m = HrMatcher::new(&inst, JobId(0), Vertical::Open);
        assert!(m.insert(IndividualId(0)));
        assert!(m.would_increase(IndividualId(1)));
        assert!(m.insert(IndividualId(1)));
        let w = m.matching();
        assert_eq!(w.trait_of(IndividualId(0)), Some(TraitId(1)));
        assert_eq!(w.trait_of(IndividualId(1)), Some(TraitId(0)));
    }

    #[test]
    fn ineligible_member_is_an_error() {
        let inst = crate::scenarios::upsc_migration();
        let c = inst.vertical_by_name("c").unwrap();
        let a1 = inst.individual_index("a1").unwrap();
        assert!(matches!(
            honored_count(&inst, JobId(0), c, &[a1]),
            Err(HrError::IneligibleIndividual { .. })
        ));
    }
}

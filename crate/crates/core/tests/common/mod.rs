//! Brute-force reference implementations and instance samplers shared by
//! the integration tests. Nothing here calls the library's HR matcher,
//! choice rules or axiom checkers.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reserve_match::generator::{generate, GenProfile};
use reserve_match::{Assignment, IndividualId, Instance, JobId, Vertical};

/// Largest number of HR positions a set can honor, by trying every
/// individual-to-trait assignment.
pub fn brute_hr_count(inst: &Instance, j: JobId, v: Vertical, set: &[IndividualId]) -> usize {
    fn go(inst: &Instance, set: &[IndividualId], slots: &mut [u32], k: usize) -> usize {
        if k == set.len() {
            return 0;
        }
        let mut best = go(inst, set, slots, k + 1);
        let person = inst.individual(set[k]);
        for t in 0..slots.len() {
            if slots[t] > 0 && person.traits.iter().any(|x| x.0 == t) {
                slots[t] -= 1;
                best = best.max(1 + go(inst, set, slots, k + 1));
                slots[t] += 1;
            }
        }
        best
    }
    let mut slots = inst.job(j).hr_reserves(v).to_vec();
    go(inst, set, &mut slots, 0)
}

fn holders(a: &Assignment, j: JobId, v: Vertical) -> Vec<IndividualId> {
    a.iter()
        .filter(|(_, s)| s.is_some_and(|s| s.job == j && s.vertical == v))
        .map(|(i, _)| i)
        .collect()
}

fn better(inst: &Instance, a: &Assignment, i: IndividualId, j: JobId) -> bool {
    let p = &inst.individual(i).preferences;
    let Some(rj) = p.iter().position(|&x| x == j) else {
        return false;
    };
    match a.job_of(i) {
        None => true,
        Some(cur) => p.iter().position(|&x| x == cur).is_none_or(|rc| rj < rc),
    }
}

fn eligible(inst: &Instance, i: IndividualId, v: Vertical) -> bool {
    match v {
        Vertical::Open => true,
        Vertical::Reserved(c) => inst.individual(i).category == Some(c),
    }
}

fn verticals(inst: &Instance) -> Vec<Vertical> {
    (0..=inst.categories.len())
        .map(Vertical::from_index)
        .collect()
}

fn swap(set: &[IndividualId], out: IndividualId, inn: IndividualId) -> Vec<IndividualId> {
    let mut s: Vec<_> = set.iter().copied().filter(|&x| x != out).collect();
    s.push(inn);
    s
}

/// The five axioms evaluated directly from their quantified definitions,
/// in the order individual rationality, non-wastefulness, maximal HR
/// accommodation, no justified envy, VR compliance.
pub fn brute_axioms(inst: &Instance, a: &Assignment) -> [bool; 5] {
    let people: Vec<IndividualId> = (0..inst.individuals.len()).map(IndividualId).collect();
    let jobs: Vec<JobId> = (0..inst.jobs.len()).map(JobId).collect();
    let vs = verticals(inst);

    let ir = people.iter().all(|&i| {
        a.job_of(i)
            .is_none_or(|j| inst.individual(i).preferences.contains(&j))
    });

    let mut nw = true;
    let mut hr = true;
    let mut nje = true;
    for &j in &jobs {
        for &v in &vs {
            let h = holders(a, j, v);
            let n = brute_hr_count(inst, j, v, &h);
            for &i in &people {
                if !eligible(inst, i, v) || !better(inst, a, i, j) {
                    continue;
                }
                if (h.len() as u32) < inst.job(j).reserve(v) {
                    nw = false;
                }
                let mut plus = h.clone();
                plus.push(i);
                if brute_hr_count(inst, j, v, &plus) > n {
                    hr = false;
                }
                for &k in &h {
                    if inst.merit(i, j) > inst.merit(k, j)
                        && brute_hr_count(inst, j, v, &swap(&h, k, i)) >= n
                    {
                        nje = false;
                    }
                }
            }
        }
    }

    let mut vr = true;
    for &j in &jobs {
        let open = holders(a, j, Vertical::Open);
        let n_open = brute_hr_count(inst, j, Vertical::Open, &open);
        for &v in &vs[1..] {
            for i in holders(a, j, v) {
                if (open.len() as u32) < inst.job(j).reserve(Vertical::Open) {
                    vr = false;
                }
                for &k in &open {
                    if inst.merit(i, j) > inst.merit(k, j)
                        && brute_hr_count(inst, j, Vertical::Open, &swap(&open, k, i)) >= n_open
                    {
                        vr = false;
                    }
                }
                let mut plus = open.clone();
                plus.push(i);
                if brute_hr_count(inst, j, Vertical::Open, &plus) > n_open {
                    vr = false;
                }
            }
        }
    }
    [ir, nw, hr, nje, vr]
}

/// A random small profile: up to `max_people` individuals and `max_jobs` jobs.
pub fn small_profile(seed: u64, max_people: usize, max_jobs: usize) -> GenProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let categories = rng.gen_range(0..=2);
    GenProfile {
        jobs: rng.gen_range(1.max(max_jobs - 1)..=max_jobs),
        individuals: rng.gen_range(1.max(max_people - 2)..=max_people),
        categories,
        traits: rng.gen_range(0..=2),
        capacity_min: 1,
        capacity_max: 2,
        reserve_density: if categories == 0 {
            0.0
        } else {
            rng.gen_range(0.2..=0.5)
        },
        hr_density: rng.gen_range(0.2..=0.9),
        trait_density: rng.gen_range(0.2..=0.7),
        acceptance: rng.gen_range(0.5..=1.0),
        common_merit: rng.gen_bool(0.3),
        ..GenProfile::default()
    }
}

pub fn small_instance(seed: u64, max_people: usize, max_jobs: usize) -> Instance {
    generate(seed, &small_profile(seed, max_people, max_jobs)).expect("feasible profile")
}

/// `(subset as bitmask) -> members`, for subsets of `universe`.
pub fn subset(universe: &[IndividualId], mask: usize) -> Vec<IndividualId> {
    universe
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, &i)| i)
        .collect()
}

/// Bitmask of `chosen` relative to `universe`.
pub fn mask_of(universe: &[IndividualId], chosen: &[IndividualId]) -> usize {
    chosen
        .iter()
        .map(|i| {
            1 << universe
                .iter()
                .position(|u| u == i)
                .expect("chosen from universe")
        })
        .fold(0, |m, b| m | b)
}

/// Checks substitutes, IRC, the law of aggregate demand and (for the
/// aggregate rule) path independence of a choice function given as a
/// table over all subsets of a universe. `table[mask]` is the chosen mask.
pub fn lemma_violations(name: &str, table: &[usize], path_independence: bool) -> Vec<String> {
    let mut bad = Vec::new();
    let full = table.len() - 1;
    for t in 0..=full {
        let ct = table[t];
        if ct & !t != 0 {
            bad.push(format!("{name}: C({t:b}) = {ct:b} not a subset"));
        }
        // every S ⊆ T, enumerated by the standard submask walk
        let mut s = t;
        loop {
            let cs = table[s];
            if ct & s & !cs != 0 {
                bad.push(format!("{name}: substitutes fail at S={s:b} T={t:b}"));
            }
            if ct & !s == 0 && cs != ct {
                bad.push(format!("{name}: IRC fails at S={s:b} T={t:b}"));
            }
            if cs.count_ones() > ct.count_ones() {
                bad.push(format!("{name}: LAD fails at S={s:b} T={t:b}"));
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & t;
        }
        if path_independence {
            for u in 0..=full {
                if table[t | u] != table[table[t] | u] || table[t | u] != table[table[t] | table[u]]
                {
                    bad.push(format!("{name}: path independence fails at {t:b},{u:b}"));
                }
            }
        }
        if bad.len() > 5 {
            break;
        }
    }
    bad
}

/// Checks monotonicity, unit marginals and submodularity of a set function
/// tabulated over all subsets.
pub fn rank_violations(n: &[usize]) -> Vec<String> {
    let mut bad = Vec::new();
    let k = n.len().trailing_zeros() as usize;
    for t in 0..n.len() {
        for i in 0..k {
            let bit = 1 << i;
            if t & bit != 0 {
                continue;
            }
            let gain_t = n[t | bit] as i64 - n[t] as i64;
            if !(0..=1).contains(&gain_t) {
                bad.push(format!("unit marginal fails adding {i} to {t:b}"));
            }
            let mut s = t;
            loop {
                let gain_s = n[s | bit] as i64 - n[s] as i64;
                if gain_s < gain_t {
                    bad.push(format!("submodularity fails: {s:b} ⊆ {t:b}, element {i}"));
                }
                if n[s] > n[t] {
                    bad.push(format!("monotonicity fails: {s:b} ⊆ {t:b}"));
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
        }
    }
    bad
}

/// One job, up to six applicants, up to two traits and two categories.
pub fn choice_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc401ce);
    let categories = rng.gen_range(0..=2);
    let profile = GenProfile {
        jobs: 1,
        individuals: rng.gen_range(1..=6),
        categories,
        traits: rng.gen_range(0..=2),
        capacity_min: 1,
        capacity_max: 5,
        reserve_density: if categories == 0 {
            0.0
        } else {
            rng.gen_range(0.1..=0.5)
        },
        hr_density: rng.gen_range(0.2..=0.9),
        trait_density: rng.gen_range(0.2..=0.8),
        acceptance: 1.0,
        empty_pref_prob: 0.0,
        ..GenProfile::default()
    };
    generate(seed, &profile).expect("feasible profile")
}

/// Every choice-rule law on every subset pair of applicants at job 0.
pub fn choice_lemma_check(inst: &Instance) -> Vec<String> {
    use reserve_match::choice::{aggregate_choose, mh_choose, two_smh_choose};
    let j = JobId(0);
    let everyone: Vec<IndividualId> = (0..inst.individuals.len()).map(IndividualId).collect();
    let mut bad = Vec::new();

    let size = 1 << everyone.len();
    let agg: Vec<usize> = (0..size)
        .map(|m| mask_of(&everyone, &aggregate_choose(inst, j, &subset(&everyone, m))))
        .collect();
    bad.extend(lemma_violations("aggregate", &agg, true));

    let parts: Vec<Vec<usize>> = (0..size)
        .map(|m| {
            let c = two_smh_choose(inst, j, &subset(&everyone, m));
            verticals(inst)
                .into_iter()
                .map(|v| mask_of(&everyone, c.part(v)))
                .collect()
        })
        .collect();
    for t in 0..size {
        for i in 0..everyone.len() {
            let bit = 1 << i;
            if t & bit != 0 && agg[t] & bit == 0 && parts[t & !bit] != parts[t] {
                bad.push(format!("component IRC fails removing {i} from {t:b}"));
            }
        }
    }

    for v in verticals(inst) {
        let pool: Vec<IndividualId> = everyone
            .iter()
            .copied()
            .filter(|&i| eligible(inst, i, v))
            .collect();
        let r = inst.job(j).reserve(v) as usize;
        let table: Vec<usize> = (0..1usize << pool.len())
            .map(|m| {
                let chosen = mh_choose(inst, j, v, &subset(&pool, m))
                    .expect("eligible applicants")
                    .chosen;
                if chosen.len() != r.min(m.count_ones() as usize) {
                    bad.push(format!("cardinality fails for {v:?} at {m:b}"));
                }
                mask_of(&pool, &chosen)
            })
            .collect();
        bad.extend(lemma_violations(&format!("mh {v:?}"), &table, false));
    }
    bad
}

/// Honored count against brute force over all subsets of each
/// `(job, vertical)` pool, plus the rank-function laws.
pub fn hr_rank_check(inst: &Instance) -> Vec<String> {
    use reserve_match::hr::honored_count;
    let mut bad = Vec::new();
    for j in (0..inst.jobs.len()).map(JobId) {
        for v in verticals(inst) {
            let pool: Vec<IndividualId> = (0..inst.individuals.len())
                .map(IndividualId)
                .filter(|&i| eligible(inst, i, v))
                .collect();
            let mut table = Vec::with_capacity(1 << pool.len());
            for m in 0..1usize << pool.len() {
                let set = subset(&pool, m);
                let w = honored_count(inst, j, v, &set).expect("eligible set");
                let brute = brute_hr_count(inst, j, v, &set);
                if w.size() != brute {
                    bad.push(format!(
                        "{j:?} {v:?} {m:b}: matcher {} brute {brute}",
                        w.size()
                    ));
                }
                // witness validity: members of the set, holders of their trait, within slot counts
                let mut used = inst.job(j).hr_reserves(v).to_vec();
                for (i, t) in &w.pairs {
                    if !set.contains(i) || !inst.individual(*i).traits.contains(t) || used[t.0] == 0
                    {
                        bad.push(format!("{j:?} {v:?} {m:b}: invalid witness"));
                    }
                    used[t.0] = used[t.0].saturating_sub(1);
                }
                table.push(brute);
            }
            bad.extend(rank_violations(&table));
        }
    }
    bad
}

/// A single HR graph: one job, open positions only, up to six individuals
/// and six slots over up to three possibly overlapping traits.
pub fn hr_graph_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a9);
    let profile = GenProfile {
        jobs: 1,
        individuals: rng.gen_range(0..=6),
        categories: 0,
        traits: rng.gen_range(1..=3),
        capacity_min: 1,
        capacity_max: 6,
        reserve_density: 0.0,
        hr_density: rng.gen_range(0.5..=1.0),
        trait_density: rng.gen_range(0.3..=0.8),
        ..GenProfile::default()
    };
    generate(seed, &profile).expect("feasible profile")
}

/// Instances with an EWS category next to the usual ones, sized for the oracle.
pub fn ews_instance(seed: u64, max_people: usize, max_jobs: usize) -> Instance {
    let mut profile = small_profile(seed, max_people, max_jobs);
    profile.categories = 0;
    profile.category_shares = [("SC", 0.15), ("OBC", 0.27), ("EWS", 0.10)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    profile.reserve_density = 0.2;
    generate(seed, &profile).expect("feasible profile")
}

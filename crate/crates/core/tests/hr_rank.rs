mod common;

use proptest::prelude::*;
use reserve_match::hr::{honored_count, hr_count};
use reserve_match::{IndividualId, JobId, Vertical};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matcher_is_a_rank_function(seed in any::<u64>()) {
        let inst = common::hr_graph_instance(seed);
        let bad = common::hr_rank_check(&inst);
        prop_assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn insertion_order_does_not_matter(seed in any::<u64>()) {
        let inst = common::hr_graph_instance(seed);
        let mut set: Vec<IndividualId> = (0..inst.individuals.len()).map(IndividualId).collect();
        let n = hr_count(&inst, JobId(0), Vertical::Open, &set);
        set.reverse();
        let w = honored_count(&inst, JobId(0), Vertical::Open, &set).unwrap();
        prop_assert_eq!(w.size(), n);
    }

    #[test]
    fn single_trait_closed_form(seed in any::<u64>()) {
        let inst = common::hr_graph_instance(seed);
        let set: Vec<IndividualId> = (0..inst.individuals.len()).map(IndividualId).collect();
        prop_assume!(inst.individuals.iter().all(|i| i.traits.len() <= 1));
        let slots = inst.job(JobId(0)).hr_reserves(Vertical::Open);
        let expected: usize = (0..slots.len())
            .map(|t| {
                let holders = inst.individuals.iter().filter(|i| i.traits.iter().any(|x| x.0 == t)).count();
                holders.min(slots[t] as usize)
            })
            .sum();
        prop_assert_eq!(hr_count(&inst, JobId(0), Vertical::Open, &set), expected);
    }
}

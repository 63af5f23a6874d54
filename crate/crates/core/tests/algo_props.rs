//! Properties of the Dolev-Yao closure and implicit structures.

mod common;

use std::collections::BTreeSet;

use omniscope::algo::{dy_closure, dy_closure_rounds, dy_derives, Message};
use omniscope::implicit::{induce, policy_example, primality_example, refine, Rule};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ATOMS: [&str; 4] = ["a", "b", "c", "d"];
const KEYS: [&str; 2] = ["k1", "k2"];

fn message() -> impl Strategy<Value = Message> {
    let leaf = prop_oneof![
        prop::sample::select(&ATOMS[..]).prop_map(Message::atom),
        prop::sample::select(&KEYS[..]).prop_map(Message::key),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(&KEYS[..])).prop_map(|(m, k)| Message::encrypt(m, k)),
            (inner.clone(), inner).prop_map(|(a, b)| Message::concat(a, b)),
        ]
    })
}

fn literal() -> impl Strategy<Value = (String, bool)> {
    (prop::sample::select(vec!["s", "t", "u"]), any::<bool>()).prop_map(|(p, b)| (p.to_string(), b))
}

fn conclusion() -> impl Strategy<Value = (String, bool)> {
    (prop::sample::select(vec!["Permitted", "Banned"]), any::<bool>()).prop_map(|(p, b)| (p.to_string(), b))
}

fn rule() -> impl Strategy<Value = Rule> {
    (
        prop::collection::vec(literal(), 1..=2),
        prop::collection::vec(conclusion(), 1..=2),
    )
        .prop_map(|(antecedent, conclusion)| Rule { antecedent, conclusion })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn derivation_is_monotone(h in prop::collection::vec(message(), 0..4), extra in prop::collection::vec(message(), 0..3), m in message()) {
        let mut bigger = h.clone();
        bigger.extend(extra);
        prop_assert!(!dy_derives(&h, &m) || dy_derives(&bigger, &m));
    }

    #[test]
    fn closure_is_idempotent(h in prop::collection::vec(message(), 0..4)) {
        let closure = dy_closure(&h);
        for m in &closure {
            let mut more = h.clone();
            more.push(m.clone());
            prop_assert_eq!(&dy_closure(&more), &closure);
        }
    }

    #[test]
    fn closure_saturates_quickly(h in prop::collection::vec(message(), 0..4)) {
        let subs: BTreeSet<Message> = h.iter().flat_map(Message::submessages).collect();
        let (closure, rounds) = dy_closure_rounds(&h);
        prop_assert!(rounds <= subs.len());
        prop_assert!(closure.is_subset(&subs));
    }

    #[test]
    fn closure_matches_search(h in prop::collection::vec(message(), 1..4), m in message()) {
        let budget = h.iter().flat_map(Message::submessages).collect::<BTreeSet<_>>().len();
        prop_assert_eq!(dy_derives(&h, &m), common::dy_search(&h, &m, budget));
    }

    #[test]
    fn message_round_trip(m in message()) {
        prop_assert_eq!(Message::parse(&m.render()).unwrap(), m);
    }

    #[test]
    fn refinement_only_shrinks(nums in prop::collection::btree_set(2u64..40, 1..4), keep_mask: u64) {
        let nums: Vec<u64> = nums.into_iter().collect();
        let i = primality_example(&nums).unwrap();
        let ids: Vec<String> = i.worlds.keys().cloned().collect();
        let keep: BTreeSet<String> = ids.iter().enumerate()
            .filter(|(k, _)| keep_mask >> (k % 64) & 1 == 1)
            .map(|(_, w)| w.clone())
            .collect();
        let r = refine(&i, |w, _| keep.contains(w)).unwrap();
        let (before, after) = (induce(&i), induce(&r));
        prop_assert!(after.possible.is_subset(&before.possible));
        prop_assert_eq!(&after.worlds, &before.worlds);
        prop_assert!(after.validate().is_empty());
        prop_assert!(refine(&r, |_, _| true).is_err() || r.possible == i.possible);
    }

    #[test]
    fn induce_partitions_worlds(rules in prop::collection::vec(rule(), 0..4), drop_mask: u64) {
        let facts: Vec<String> = vec!["s".into(), "t".into()];
        let i = policy_example(&rules, &facts).unwrap();
        let ids: Vec<String> = i.worlds.keys().cloned().collect();
        let i = refine(&i, |w, _| {
            let k = ids.iter().position(|x| x == w).unwrap();
            drop_mask >> k & 1 == 0
        }).unwrap();
        let s = induce(&i);
        prop_assert!(s.validate().is_empty(), "{:?}", s.validate());
        for (id, c) in &i.worlds {
            let real = s.worlds.contains(id);
            let possible = s.possible.contains(id);
            prop_assert_eq!(real, c.is_consistent());
            prop_assert_eq!(possible, i.test(id));
            if !real {
                prop_assert_eq!(s.is_impossible_world(id), i.test(id));
            }
        }
        prop_assert!(s.possible.iter().all(|w| i.worlds.contains_key(w)));
    }

    #[test]
    fn policy_ignores_rule_order(rules in prop::collection::vec(rule(), 0..5), seed: u64) {
        let facts: Vec<String> = vec!["s".into()];
        let mut shuffled = rules.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(policy_example(&rules, &facts).unwrap(), policy_example(&shuffled, &facts).unwrap());
    }
}

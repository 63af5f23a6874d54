//! Properties of formulas, structures, the model checker and linarith.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use omniscope::document::{load_structure, save_structure};
use omniscope::formula::{eval_prop, sub_closure_p, subformulas, Relation, TruthAssignment};
use omniscope::linarith::{feasible, int, rat, ConstraintRel, LinearConstraint, LinearConstraintSystem, Rational};
use omniscope::model::{holds, Checker};
use omniscope::structures::{Distribution, WorldFormulas};
use omniscope::{Approach, ClassTag, EpistemicStructure, Formula, Modal};
use proptest::prelude::*;
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PROPS: [&str; 3] = ["p", "q", "r"];

fn basic() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => prop::sample::select(&PROPS[..]).prop_map(Formula::prop),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::know),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::and(a, b)),
        ]
    })
}

fn propositional() -> impl Strategy<Value = Formula> {
    prop::sample::select(&PROPS[..])
        .prop_map(Formula::prop)
        .prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::and(a, b)),
            ]
        })
}

fn relation() -> impl Strategy<Value = Relation> {
    prop::sample::select(vec![Relation::Ge, Relation::Gt, Relation::Le, Relation::Lt, Relation::Eq])
}

fn likelihood_atom() -> impl Strategy<Value = Formula> {
    (
        prop::collection::vec((-3i64..=3, propositional()), 1..=2),
        relation(),
        -2i64..=3,
    )
        .prop_map(|(terms, rel, b)| Formula::lik(terms, rel, b))
}

/// Formulas with likelihood atoms, possibly under `K`.
fn with_likelihood() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        2 => prop::sample::select(&PROPS[..]).prop_map(Formula::prop),
        1 => likelihood_atom(),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::know),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::and(a, b)),
        ]
    })
}

fn assignment(rng: &mut ChaCha8Rng) -> TruthAssignment {
    PROPS.iter().map(|p| (p.to_string(), rng.gen_bool(0.5))).collect()
}

/// A random structure of the class, built from formulas `pool` for C and A.
fn structure(tag: ClassTag, seed: u64, pool: &[Formula]) -> EpistemicStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = EpistemicStructure::new(tag);
    let n = rng.gen_range(1..=3);
    for i in 0..n {
        s.add_world(format!("w{i}"), assignment(&mut rng));
    }
    let pick = |rng: &mut ChaCha8Rng| -> BTreeSet<Formula> {
        pool.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
    };
    let worlds: Vec<String> = s.worlds.iter().cloned().collect();
    match (tag.modal, tag.approach) {
        (Modal::S5, _) => s.possible = s.worlds.clone(),
        (Modal::KD45, _) | (Modal::KD45Minus, _) => {
            s.possible = worlds.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            if s.possible.is_empty() {
                s.possible.insert(worlds.iter().choose(&mut rng).unwrap().clone());
            }
        }
        (Modal::K45, _) => s.possible = worlds.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect(),
    }
    match tag.approach {
        Approach::Syntactic => {
            for w in &worlds {
                s.c.insert(w.clone(), WorldFormulas::Explicit(pick(&mut rng)));
            }
        }
        Approach::Awareness => {
            for w in &worlds {
                s.a.insert(w.clone(), pick(&mut rng));
            }
        }
        Approach::Impossible => {
            for i in 0..rng.gen_range(0..=2) {
                let x = format!("x{i}");
                s.possible.insert(x.clone());
                s.c.insert(x, WorldFormulas::Explicit(pick(&mut rng)));
            }
        }
        _ => {}
    }
    if tag.probabilistic && !s.possible.is_empty() {
        let weights: Vec<i64> = s.possible.iter().map(|_| rng.gen_range(0..4)).collect();
        let total: i64 = weights.iter().sum::<i64>().max(1);
        let mut mu: BTreeMap<String, Rational> = s
            .possible
            .iter()
            .zip(&weights)
            .map(|(w, &k)| (w.clone(), rat(k, total)))
            .collect();
        if weights.iter().all(|&k| k == 0) {
            *mu.values_mut().next().unwrap() = Rational::one();
        }
        s.mu = Some(Distribution(mu));
    }
    s
}

fn tags() -> impl Strategy<Value = ClassTag> {
    prop::sample::select(ClassTag::all_basic())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_parse_round_trip(f in basic()) {
        let back: Formula = f.render().parse().unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn likelihood_round_trip(f in with_likelihood()) {
        let back: Formula = f.render().parse().unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn sub_closure_bounds(f in with_likelihood()) {
        let subs: BTreeSet<Formula> = subformulas(&f).into_iter().collect();
        let closure: BTreeSet<Formula> = sub_closure_p(&f).into_iter().collect();
        prop_assert!(closure.is_superset(&subs));
        prop_assert!(closure.len() <= 2 * f.size());
    }

    #[test]
    fn de_morgan(a in propositional(), b in propositional(), bits in 0u64..8) {
        let vocab: Vec<String> = PROPS.iter().map(|p| p.to_string()).collect();
        let v = TruthAssignment::from_bits(&vocab, bits);
        let lhs = Formula::not(Formula::and(a.clone(), b.clone()));
        let rhs = Formula::or(Formula::not(a), Formula::not(b));
        prop_assert_eq!(eval_prop(&v, &lhs).unwrap(), eval_prop(&v, &rhs).unwrap());
    }

    #[test]
    fn validate_is_total(seed: u64, tag in tags(), junk in prop::collection::vec("[a-z]{1,3}", 0..4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = structure(tag, seed, &[Formula::prop("p")]);
        for j in &junk {
            match rng.gen_range(0..4) {
                0 => { s.possible.insert(j.clone()); }
                1 => { s.c.insert(j.clone(), WorldFormulas::Explicit(BTreeSet::new())); }
                2 => { s.a.insert(j.clone(), BTreeSet::new()); }
                _ => { s.pi.insert(j.clone(), TruthAssignment::new()); }
            }
        }
        if rng.gen_bool(0.3) {
            s.mu = Some(Distribution([(junk.first().cloned().unwrap_or_default(), rat(1, 3))].into()));
        }
        let _ = s.validate();
    }

    #[test]
    fn distribution_exact_after_round_trip(seed: u64) {
        let tag = ClassTag::prob(Modal::KD45, Approach::Impossible);
        let s = structure(tag, seed, &[Formula::prop("p"), Formula::not(Formula::prop("p"))]);
        prop_assume!(s.validate().is_empty());
        let back = load_structure(&save_structure(&s)).unwrap();
        prop_assert_eq!(back.mu.as_ref().unwrap().total(), Rational::one());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn connectives_compositional_at_real_worlds(seed: u64, tag in tags(), f in basic(), g in basic()) {
        let pool = [f.clone(), g.clone(), Formula::prop("p")];
        let s = structure(tag, seed, &pool);
        prop_assume!(s.validate().is_empty());
        let mut c = Checker::new(&s);
        for w in &s.worlds {
            let (a, b) = (c.holds(w, &f).unwrap(), c.holds(w, &g).unwrap());
            prop_assert_eq!(c.holds(w, &Formula::not(f.clone())).unwrap(), !a);
            prop_assert_eq!(c.holds(w, &Formula::and(f.clone(), g.clone())).unwrap(), a && b);
        }
    }

    #[test]
    fn likelihood_ignores_the_world(seed: u64, l in likelihood_atom(), approach in prop::sample::select(vec![Approach::Awareness, Approach::Impossible])) {
        let tag = ClassTag::prob(Modal::KD45, approach);
        let pool = [Formula::prop("p"), Formula::not(Formula::prop("q"))];
        let s = structure(tag, seed, &pool);
        prop_assume!(s.validate().is_empty());
        let all: Vec<&String> = s.worlds.union(&s.possible).collect();
        let first = holds(&s, all[0], &l).unwrap();
        for w in all {
            prop_assert_eq!(holds(&s, w, &l).unwrap(), first);
        }
    }

    #[test]
    fn standard_introspection(seed: u64, modal in prop::sample::select(vec![Modal::K45, Modal::KD45, Modal::S5]), phi in basic(), psi in basic()) {
        let s = structure(ClassTag::new(modal, Approach::Standard), seed, &[]);
        prop_assume!(s.validate().is_empty());
        let k = |f: &Formula| Formula::know(f.clone());
        let mut laws = vec![
            Formula::implies(Formula::and(k(&phi), k(&Formula::implies(phi.clone(), psi.clone()))), k(&psi)),
            Formula::implies(k(&phi), k(&k(&phi))),
            Formula::implies(Formula::not(k(&phi)), k(&Formula::not(k(&phi)))),
        ];
        if modal != Modal::K45 {
            laws.push(Formula::not(k(&Formula::False)));
        }
        if modal == Modal::S5 {
            laws.push(Formula::implies(k(&phi), phi.clone()));
        }
        for w in &s.worlds {
            for law in &laws {
                prop_assert!(holds(&s, w, law).unwrap(), "{} fails at {}", law, w);
            }
        }
    }

    #[test]
    fn empty_awareness_knows_nothing(seed: u64, phi in basic()) {
        let mut s = structure(ClassTag::new(Modal::K45, Approach::Awareness), seed, &[]);
        for set in s.a.values_mut() {
            set.clear();
        }
        for w in &s.worlds {
            prop_assert!(!holds(&s, w, &Formula::know(phi.clone())).unwrap());
        }
    }

    #[test]
    fn scaling_keeps_the_verdict(seed: u64, num in 1i64..7, den in 1i64..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = ["x", "y", "z"];
        let mut sys = LinearConstraintSystem::new();
        for _ in 0..rng.gen_range(1..=6) {
            let terms: Vec<(&str, Rational)> = vars.iter().map(|v| (*v, int(rng.gen_range(-3..=3)))).collect();
            let rel = [ConstraintRel::Le, ConstraintRel::Lt, ConstraintRel::Eq][rng.gen_range(0..3)];
            sys.push(LinearConstraint::new(terms, rel, int(rng.gen_range(-4..=4))));
        }
        let which = rng.gen_range(0..sys.len());
        let mut scaled = sys.clone();
        scaled.constraints[which] = sys.constraints[which].scaled(&rat(num, den));
        let (a, b) = (feasible(&sys), feasible(&scaled));
        prop_assert_eq!(a.is_sat(), b.is_sat());
        if let Some(w) = b.witness() {
            prop_assert!(scaled.satisfied_by(w) && sys.satisfied_by(w));
        }
    }
}

#[test]
fn impossible_worlds_break_connectives() {
    let mut s = EpistemicStructure::new(ClassTag::new(Modal::K45, Approach::Impossible));
    s.add_world("w", TruthAssignment::new());
    let p = Formula::prop("p");
    s.possible.insert("x".into());
    s.c.insert("x".into(), WorldFormulas::Explicit([p.clone(), Formula::not(p.clone())].into()));
    assert!(s.validate().is_empty());
    assert!(holds(&s, "x", &p).unwrap());
    assert!(holds(&s, "x", &Formula::not(p)).unwrap());
}

#[test]
fn empty_possible_set_knows_false() {
    let mut s = EpistemicStructure::new(ClassTag::new(Modal::K45, Approach::Standard));
    s.add_world("w", TruthAssignment::new());
    assert!(holds(&s, "w", &Formula::know(Formula::False)).unwrap());
}

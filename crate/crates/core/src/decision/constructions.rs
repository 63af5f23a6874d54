//! Explicit structures realising a prescribed set of known formulas.

use std::collections::BTreeSet;
use std::fmt;

use super::encode::constant;
use crate::algo::{AlgorithmSpec, TableAlgorithm};
use crate::error::DecisionError;
use crate::formula::{propositionally_consistent, Formula, TruthAssignment};
use crate::model::Checker;
use crate::structures::{Approach, ClassTag, EpistemicStructure, Modal, WorldFormulas};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClosureViolation {
    /// `a & b` present without both conjuncts.
    Conjunction(Formula),
    /// `~~a` present without `a`.
    DoubleNegation(Formula),
    /// `~(a & b)` present without `~a` or `~b`.
    NegatedConjunction(Formula),
    /// `K a` present without `a`.
    Knowledge(Formula),
}

impl fmt::Display for ClosureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureViolation::Conjunction(g) => write!(f, "(a) {g}: missing a conjunct"),
            ClosureViolation::DoubleNegation(g) => write!(f, "(b) {g}: missing the unnegated formula"),
            ClosureViolation::NegatedConjunction(g) => {
                write!(f, "(c) {g}: neither negated conjunct present")
            }
            ClosureViolation::Knowledge(g) => write!(f, "(d) {g}: known formula missing"),
        }
    }
}

pub fn downward_closed(set: &BTreeSet<Formula>) -> Result<(), Vec<ClosureViolation>> {
    let mut out = Vec::new();
    for g in set {
        match g {
            Formula::And(a, b) if !(set.contains(a) && set.contains(b)) => {
                out.push(ClosureViolation::Conjunction(g.clone()))
            }
            Formula::Not(inner) => match &**inner {
                Formula::Not(a) if !set.contains(a) => {
                    out.push(ClosureViolation::DoubleNegation(g.clone()))
                }
                Formula::And(a, b)
                    if !set.contains(&Formula::not((**a).clone()))
                        && !set.contains(&Formula::not((**b).clone())) =>
                {
                    out.push(ClosureViolation::NegatedConjunction(g.clone()))
                }
                _ => {}
            },
            Formula::Know(a) if !set.contains(a) => out.push(ClosureViolation::Knowledge(g.clone())),
            _ => {}
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Every `K psi` in `fp` has `psi` in `f`.
pub fn k_compatible(f: &BTreeSet<Formula>, fp: &BTreeSet<Formula>) -> bool {
    fp.iter().all(|g| match g {
        Formula::Know(a) => f.contains(a),
        _ => true,
    })
}

/// Replaces each maximal `K a` by whether `a` is in `known`.
fn fix_knowledge(g: &Formula, known: &BTreeSet<Formula>) -> Formula {
    match g {
        Formula::Know(a) => constant(known.contains(a)),
        Formula::Not(a) => Formula::not(fix_knowledge(a, known)),
        Formula::And(a, b) => Formula::and(fix_knowledge(a, known), fix_knowledge(b, known)),
        _ => g.clone(),
    }
}

/// One-world structure whose agent knows exactly `known`.
pub(crate) fn theorem1_structure(
    known: &BTreeSet<Formula>,
    v: TruthAssignment,
    tag: ClassTag,
) -> EpistemicStructure {
    let mut s = EpistemicStructure::new(tag);
    s.add_world("w", v);
    match tag.approach {
        Approach::Syntactic => {
            s.c.insert("w".into(), WorldFormulas::Explicit(known.clone()));
        }
        Approach::Awareness => {
            s.a.insert("w".into(), known.clone());
        }
        Approach::Standard => {}
        Approach::Algorithmic => {
            s.algorithm = Some(AlgorithmSpec::Table(TableAlgorithm {
                yes: known.clone(),
                no: BTreeSet::new(),
            }));
        }
        Approach::Impossible => {
            s.possible.insert("w'".into());
            s.c.insert("w'".into(), WorldFormulas::Explicit(known.clone()));
        }
    }
    s
}

/// A structure with world `w` where `K phi` holds exactly for `phi` in `f`
/// and every member of `g` is true.
pub fn construct_theorem1(
    f: &BTreeSet<Formula>,
    g: &[Formula],
    approach: Approach,
) -> Result<EpistemicStructure, DecisionError> {
    if approach == Approach::Standard {
        return Err(DecisionError::UnsupportedClass(
            "standard structures are logically omniscient".into(),
        ));
    }
    if let Some(bad) = g.iter().chain(f).find(|x| x.has_likelihood()) {
        return Err(DecisionError::LikelihoodPresent(bad.render()));
    }
    let fixed: Vec<Formula> = g.iter().map(|x| fix_knowledge(x, f)).collect();
    let Some(model) = propositionally_consistent(&fixed) else {
        return Err(DecisionError::Precondition(
            "G is propositionally inconsistent".into(),
        ));
    };
    let v: TruthAssignment = g
        .iter()
        .flat_map(Formula::propositions)
        .map(|p| {
            let b = model.get(&Formula::Prop(p.clone())).copied().unwrap_or(false);
            (p, b)
        })
        .collect();
    Ok(theorem1_structure(f, v, ClassTag::new(Modal::K45, approach)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem4Kind {
    Awareness,
    Impossible,
}

/// KD45 (or S5) structure with worlds `w`, `w'`: `K phi` holds at `w` exactly
/// for `phi` in `f`, and every member of `fp` holds at `w'`.
pub fn construct_theorem4(
    f: &BTreeSet<Formula>,
    fp: &BTreeSet<Formula>,
    kind: Theorem4Kind,
    s5: bool,
) -> Result<EpistemicStructure, DecisionError> {
    if let Some(bad) = fp.iter().chain(f).find(|x| x.has_likelihood()) {
        return Err(DecisionError::LikelihoodPresent(bad.render()));
    }
    let members: Vec<Formula> = fp.iter().cloned().collect();
    if propositionally_consistent(&members).is_none() {
        return Err(DecisionError::Precondition("F′ is propositionally inconsistent".into()));
    }
    if let Err(vs) = downward_closed(fp) {
        let list: Vec<String> = vs.iter().map(ToString::to_string).collect();
        return Err(DecisionError::Precondition(format!(
            "F′ is not downward closed: {}",
            list.join("; ")
        )));
    }
    if let Some(x) = f.difference(fp).next() {
        return Err(DecisionError::Precondition(format!("F ⊄ F′: {x} is missing from F′")));
    }
    if kind == Theorem4Kind::Impossible && !k_compatible(f, fp) {
        return Err(DecisionError::Precondition("F is not k-compatible with F′".into()));
    }
    if s5 && f != fp {
        return Err(DecisionError::Precondition("the S5 construction needs F = F′".into()));
    }
    if kind == Theorem4Kind::Impossible || s5 {
        for g in fp {
            if let Formula::Not(inner) = g {
                if let Formula::Know(a) = &**inner {
                    if f.contains(a) {
                        return Err(DecisionError::Precondition(format!(
                            "{g} is in F′ while {a} is in F"
                        )));
                    }
                }
            }
        }
    }

    let v: TruthAssignment = fp
        .iter()
        .flat_map(Formula::propositions)
        .map(|p| {
            let b = fp.contains(&Formula::Prop(p.clone()));
            (p, b)
        })
        .collect();
    let modal = if s5 { Modal::S5 } else { Modal::KD45 };
    let inner = if s5 { "w" } else { "w'" };
    let s = match kind {
        Theorem4Kind::Awareness => {
            let mut s = EpistemicStructure::new(ClassTag::new(modal, Approach::Awareness));
            s.add_world("w", v.clone());
            s.a.insert("w".into(), f.clone());
            if !s5 {
                s.add_world("w'", v);
                let aware = fp
                    .iter()
                    .filter_map(|g| match g {
                        Formula::Know(a) => Some((**a).clone()),
                        _ => None,
                    })
                    .collect();
                s.a.insert("w'".into(), aware);
            }
            s.possible.insert(inner.into());
            s
        }
        Theorem4Kind::Impossible => {
            let mut s = EpistemicStructure::new(ClassTag::new(modal, Approach::Impossible));
            s.add_world("w", v.clone());
            if !s5 {
                s.add_world("w'", v);
            }
            s.possible = [inner.to_string(), "w''".to_string()].into();
            s.c.insert("w''".into(), WorldFormulas::Explicit(f.clone()));
            s
        }
    };

    let violations = s.validate();
    if !violations.is_empty() {
        return Err(DecisionError::Invariant(violations.join("; ")));
    }
    let mut checker = Checker::new(&s);
    for g in fp {
        if !checker.holds(inner, g)? {
            return Err(DecisionError::Invariant(format!("{g} fails at {inner}")));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::holds;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<Formula> {
        xs.iter().map(|x| f(x)).collect()
    }

    #[test]
    fn closure_conditions() {
        assert!(downward_closed(&set(&["p & q", "p", "q"])).is_ok());
        assert!(matches!(
            downward_closed(&set(&["~~p"])).unwrap_err()[..],
            [ClosureViolation::DoubleNegation(_)]
        ));
        assert!(matches!(
            downward_closed(&set(&["K p"])).unwrap_err()[..],
            [ClosureViolation::Knowledge(_)]
        ));
        assert!(downward_closed(&set(&["~(p & q)"])).is_err());
        assert!(downward_closed(&set(&["~(p & q)", "~q"])).is_ok());
    }

    #[test]
    fn compatibility() {
        assert!(k_compatible(&set(&["p"]), &set(&["K p", "p"])));
        assert!(!k_compatible(&set(&[]), &set(&["K p"])));
        assert!(k_compatible(&set(&["p", "q"]), &set(&["K p", "K q", "r"])));
    }

    #[test]
    fn theorem1_examples() {
        let s = construct_theorem1(&set(&["p"]), &[f("q")], Approach::Syntactic).unwrap();
        assert!(holds(&s, "w", &f("K p")).unwrap());
        assert!(!holds(&s, "w", &f("K q")).unwrap());
        assert!(holds(&s, "w", &f("q")).unwrap());

        let s = construct_theorem1(&set(&[]), &[], Approach::Awareness).unwrap();
        assert!(!holds(&s, "w", &f("K true")).unwrap());

        let s = construct_theorem1(&set(&["p", "p -> q"]), &[], Approach::Algorithmic).unwrap();
        assert!(holds(&s, "w", &f("K p & K (p -> q) & ~K q")).unwrap());

        assert!(construct_theorem1(&set(&[]), &[f("p"), f("~p")], Approach::Impossible).is_err());
        assert!(construct_theorem1(&set(&["p"]), &[f("~K p")], Approach::Impossible).is_err());
    }

    #[test]
    fn theorem4_examples() {
        let fs = set(&["p"]);
        let fp = set(&["p", "K p"]);
        for kind in [Theorem4Kind::Awareness, Theorem4Kind::Impossible] {
            let s = construct_theorem4(&fs, &fp, kind, false).unwrap();
            assert!(holds(&s, "w", &f("K p")).unwrap());
            assert!(!holds(&s, "w", &f("K q")).unwrap());
        }
        let s = construct_theorem4(&fp, &fp, Theorem4Kind::Awareness, true).unwrap();
        assert_eq!(s.world_count(), 1);
        assert!(holds(&s, "w", &f("K K p")).unwrap());
        assert!(construct_theorem4(&set(&["q"]), &fp, Theorem4Kind::Awareness, false).is_err());
        assert!(construct_theorem4(&set(&[]), &fp, Theorem4Kind::Impossible, false).is_err());
    }
}

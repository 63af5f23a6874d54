//! Decision procedures for the knowledge-only language.
//!
//! Each class has a fixed witness shape, so satisfiability reduces to one
//! propositional problem over per-world copies of the atoms of `f`.

use std::collections::BTreeSet;

use super::constructions::theorem1_structure;
use super::encode::{
    assignment_at, constant, k_at, prop_at, value, Atoms, Model,
};
use super::Verdict;
use crate::error::DecisionError;
use crate::formula::{propositionally_consistent, Formula};
use crate::structures::{Approach, ClassTag, EpistemicStructure, Modal, WorldFormulas};

pub fn satisfiable(f: &Formula, tag: ClassTag) -> Result<Verdict, DecisionError> {
    if f.has_likelihood() {
        return Err(DecisionError::LikelihoodPresent(f.render()));
    }
    if tag.probabilistic || !tag.is_well_formed() {
        return Err(DecisionError::UnsupportedClass(tag.to_string()));
    }
    let atoms = Atoms::of(f);
    match (tag.approach, tag.modal) {
        (Approach::Syntactic | Approach::Algorithmic, _)
        | (Approach::Awareness, Modal::K45)
        | (Approach::Impossible, Modal::K45 | Modal::KD45Minus) => free_knowledge(f, &atoms, tag),
        (Approach::Awareness, modal) => awareness(f, &atoms, tag, modal == Modal::S5),
        (Approach::Impossible, modal) => impossible(f, &atoms, tag, modal == Modal::S5),
        (Approach::Standard, _) => standard(f, &atoms, tag),
    }
}

fn no_lik(_: usize) -> Formula {
    unreachable!("likelihood atoms were rejected")
}

/// `f` at world copy `world`, `K` atoms taken from scope `kscope`.
fn at(atoms: &Atoms, f: &Formula, world: &str, kscope: &str) -> Formula {
    atoms.rename(f, &|p| prop_at(world, p), &|j| k_at(kscope, j), &no_lik)
}

/// `K psi_j -> psi_j` with `psi_j` read at `world`, for every `K` subformula.
fn veridical(atoms: &Atoms, world: &str, kscope: &str) -> Vec<Formula> {
    (0..atoms.knows.len())
        .map(|j| {
            Formula::implies(
                k_at(kscope, j),
                at(atoms, atoms.karg(j), world, kscope),
            )
        })
        .collect()
}

fn known(atoms: &Atoms, model: &Model, kscope: &str) -> BTreeSet<Formula> {
    (0..atoms.knows.len())
        .filter(|&j| value(model, &k_at(kscope, j)))
        .map(|j| atoms.karg(j).clone())
        .collect()
}

/// Classes where knowledge atoms are independent of each other.
fn free_knowledge(f: &Formula, atoms: &Atoms, tag: ClassTag) -> Result<Verdict, DecisionError> {
    let Some(model) = propositionally_consistent(&[at(atoms, f, "w", "w")]) else {
        return Ok(Verdict::unsat(1));
    };
    let maximal: BTreeSet<Formula> = f.maximal_knowledge_subformulas().into_iter().collect();
    let fk: BTreeSet<Formula> = known(atoms, &model, "w")
        .into_iter()
        .filter(|g| maximal.contains(&Formula::know(g.clone())))
        .collect();
    let v = assignment_at(&model, "w", &atoms.props);
    let s = theorem1_structure(&fk, v, tag);
    Verdict::sat(s, "w", f)
}

/// One possible world `v`, with the actual world `w` either `v` itself
/// or a second world outside W'.
fn awareness(f: &Formula, atoms: &Atoms, tag: ClassTag, s5: bool) -> Result<Verdict, DecisionError> {
    let mut one = veridical(atoms, "v", "v");
    one.push(at(atoms, f, "v", "v"));
    if let Some(model) = propositionally_consistent(&one) {
        let mut s = EpistemicStructure::new(tag);
        s.add_world("v", assignment_at(&model, "v", &atoms.props));
        s.possible.insert("v".into());
        s.a.insert("v".into(), known(atoms, &model, "v"));
        return Verdict::sat(s, "v", f);
    }
    if s5 {
        return Ok(Verdict::unsat(1));
    }
    let mut two = veridical(atoms, "v", "v");
    for j in 0..atoms.knows.len() {
        two.push(Formula::implies(k_at("w", j), at(atoms, atoms.karg(j), "v", "v")));
    }
    two.push(at(atoms, f, "w", "w"));
    let Some(model) = propositionally_consistent(&two) else {
        return Ok(Verdict::unsat(2));
    };
    let mut s = EpistemicStructure::new(tag);
    s.add_world("w", assignment_at(&model, "w", &atoms.props));
    s.add_world("v", assignment_at(&model, "v", &atoms.props));
    s.possible.insert("v".into());
    s.a.insert("w".into(), known(atoms, &model, "w"));
    s.a.insert("v".into(), known(atoms, &model, "v"));
    Verdict::sat(s, "w", f)
}

/// Possible world `v` and impossible world `x` whose formula set is the
/// set of known formulas; knowledge is global across possible worlds.
fn impossible(f: &Formula, atoms: &Atoms, tag: ClassTag, s5: bool) -> Result<Verdict, DecisionError> {
    let base = veridical(atoms, "v", "g");
    let build = |model: &Model, actual: Option<&str>| {
        let mut s = EpistemicStructure::new(tag);
        s.add_world("v", assignment_at(model, "v", &atoms.props));
        if let Some(w) = actual {
            s.add_world(w, assignment_at(model, w, &atoms.props));
        }
        s.possible = ["v".to_string(), "x".to_string()].into();
        s.c.insert(
            "x".into(),
            WorldFormulas::Explicit(known(atoms, model, "g")),
        );
        s
    };
    let mut one = base.clone();
    one.push(at(atoms, f, "v", "g"));
    if let Some(model) = propositionally_consistent(&one) {
        return Verdict::sat(build(&model, None), "v", f);
    }
    if s5 {
        return Ok(Verdict::unsat(2));
    }
    let mut two = base;
    two.push(at(atoms, f, "w", "g"));
    let Some(model) = propositionally_consistent(&two) else {
        return Ok(Verdict::unsat(3));
    };
    Verdict::sat(build(&model, Some("w")), "w", f)
}

/// Kripke semantics: guess the set of true `K` subformulas, then find a
/// falsifying world for each false one.
fn standard(f: &Formula, atoms: &Atoms, tag: ClassTag) -> Result<Verdict, DecisionError> {
    let k = atoms.knows.len();
    if k > 20 {
        return Err(DecisionError::BoundsTooLarge(format!(
            "{k} knowledge subformulas"
        )));
    }
    let modal = tag.modal;
    for bits in 0..1u64 << k {
        let kval = |j: usize| constant(bits >> j & 1 == 1);
        let sub = |g: &Formula, world: &str| atoms.rename(g, &|p| prop_at(world, p), &kval, &no_lik);
        let gamma = |world: &str| -> Vec<Formula> {
            (0..k)
                .filter(|j| bits >> j & 1 == 1)
                .map(|j| sub(atoms.karg(j), world))
                .collect()
        };
        let mut actual = vec![sub(f, "w")];
        if modal == Modal::S5 {
            actual.extend(gamma("w"));
        }
        let Some(mut model) = propositionally_consistent(&actual) else {
            continue;
        };
        let mut falsifiers = Vec::new();
        let mut ok = true;
        for j in (0..k).filter(|j| bits >> j & 1 == 0) {
            let u = format!("u{j}");
            let mut cs = gamma(&u);
            cs.push(Formula::not(sub(atoms.karg(j), &u)));
            match propositionally_consistent(&cs) {
                Some(m) => {
                    model.extend(m);
                    falsifiers.push(u);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if modal == Modal::KD45 && falsifiers.is_empty() {
            match propositionally_consistent(&gamma("e")) {
                Some(m) => {
                    model.extend(m);
                    falsifiers.push("e".to_string());
                }
                None => continue,
            }
        }
        let mut s = EpistemicStructure::new(tag);
        s.add_world("w", assignment_at(&model, "w", &atoms.props));
        for u in &falsifiers {
            s.add_world(u.clone(), assignment_at(&model, u, &atoms.props));
            s.possible.insert(u.clone());
        }
        if modal == Modal::S5 {
            s.possible.insert("w".into());
        }
        return Verdict::sat(s, "w", f);
    }
    Ok(Verdict::unsat(k + 2))
}


#[cfg(test)]
mod tests {
    use super::super::valid;
    use super::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn sat(s: &str, tag: &str) -> bool {
        satisfiable(&f(s), tag.parse().unwrap()).unwrap().satisfiable
    }

    #[test]
    fn examples() {
        assert!(sat("K false", "k45-awareness"));
        assert!(!sat("K p & K ~p", "kd45-awareness"));
        assert!(!sat("~(K (K q) -> K q)", "kd45-impossible"));
        assert!(!sat("~(K p -> p)", "s5-awareness"));
        assert!(sat("p", "s5-standard"));
        assert!(!sat("K p & ~K K p", "k45-standard"));
        assert!(!sat("K false", "kd45-standard"));
        assert!(sat("K false", "k45-standard"));
        assert!(sat("K p & K ~p", "k45-impossible"));
        assert!(sat("K (K q) & ~K q", "kd45-awareness"));
    }

    #[test]
    fn validity_with_countermodel() {
        let tag: ClassTag = "kd45-awareness".parse().unwrap();
        let v = valid(&f("K p -> p"), tag).unwrap();
        assert!(!v.valid);
        let w = v.countermodel.unwrap();
        assert!(w.structure.world_count() <= 2);
        assert!(valid(&f("K p -> p"), "s5-awareness".parse().unwrap()).unwrap().valid);
        for tag in ClassTag::all_basic() {
            assert!(valid(&f("p | ~p"), tag).unwrap().valid, "{tag}");
        }
    }
}

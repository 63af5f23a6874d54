//! Exhaustive structure enumeration, used as a test oracle.
//!
//! Structures are sets of distinct world descriptors: an assignment over the
//! propositions of `f`, membership in W', and (where the class has one) an
//! awareness or formula set drawn from the `K` arguments of `f`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::Verdict;
use crate::algo::{AlgorithmSpec, TableAlgorithm};
use crate::error::DecisionError;
use crate::formula::{Formula, Relation, TruthAssignment};
use crate::linarith::{int, satisfiable_lin_form, LinForm, LinearConstraint, Rational};
use crate::model::Checker;
use crate::structures::{Approach, ClassTag, Distribution, EpistemicStructure, WorldFormulas};

/// Hard ceiling on `max_worlds`; `OMNISCOPE_MAX_WORLDS` overrides it.
pub const DEFAULT_WORLD_CAP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteBounds {
    /// Worlds per structure (standard structures get one more).
    pub max_worlds: usize,
    /// Largest admissible set of formulas that C and A sets range over.
    pub max_universe: usize,
}

impl Default for BruteBounds {
    fn default() -> Self {
        BruteBounds {
            max_worlds: 3,
            max_universe: 4,
        }
    }
}

impl BruteBounds {
    pub fn worlds(max_worlds: usize) -> Self {
        BruteBounds {
            max_worlds,
            ..Self::default()
        }
    }
}

fn world_cap() -> usize {
    std::env::var("OMNISCOPE_MAX_WORLDS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_WORLD_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Desc {
    /// A world of W: assignment index, set index, in W'.
    Real(usize, usize, bool),
    /// A world of W' - W with the given formula-set index.
    Impossible(usize),
}

pub fn brute_force_sat(f: &Formula, tag: ClassTag, bounds: BruteBounds) -> Result<Verdict, DecisionError> {
    if !tag.is_well_formed() {
        return Err(DecisionError::UnsupportedClass(tag.to_string()));
    }
    if f.has_likelihood() && !tag.probabilistic {
        return Err(DecisionError::LikelihoodPresent(f.render()));
    }
    let n = match tag.approach {
        Approach::Standard => bounds.max_worlds + 1,
        _ => bounds.max_worlds,
    };
    let cap = world_cap();
    if n > cap {
        return Err(DecisionError::BoundsTooLarge(format!(
            "{n} worlds exceeds the cap of {cap}"
        )));
    }
    let props: Vec<String> = f.propositions().into_iter().collect();
    let mut universe = f.knowledge_arguments();
    if tag.probabilistic && tag.approach == Approach::Impossible {
        for a in f.likelihood_arguments() {
            if !universe.contains(&a) {
                universe.push(a);
            }
        }
    }
    if tag.approach == Approach::Standard {
        universe.clear();
    }
    if universe.len() > bounds.max_universe {
        return Err(DecisionError::BoundsTooLarge(format!(
            "{} formulas in the C/A universe exceeds {}",
            universe.len(),
            bounds.max_universe
        )));
    }
    let assignments: Vec<TruthAssignment> = TruthAssignment::enumerate(&props).collect();
    let sets: Vec<BTreeSet<Formula>> = universe
        .iter()
        .cloned()
        .powerset()
        .map(|s| s.into_iter().collect())
        .collect();

    let with_sets = matches!(tag.approach, Approach::Syntactic | Approach::Awareness);
    let uses_wp = tag.modal_matters();
    let mut descs = Vec::new();
    for v in 0..assignments.len() {
        for c in 0..if with_sets { sets.len() } else { 1 } {
            descs.push(Desc::Real(v, c, false));
            if uses_wp {
                descs.push(Desc::Real(v, c, true));
            }
        }
    }
    if tag.approach == Approach::Impossible {
        descs.extend((0..sets.len()).map(Desc::Impossible));
    }
    let tables = if tag.approach == Approach::Algorithmic {
        sets.len()
    } else {
        1
    };

    let env = Env {
        f,
        tag,
        assignments: &assignments,
        sets: &sets,
    };
    for k in 1..=n.min(descs.len()) {
        let combos: Vec<Vec<usize>> = (0..descs.len()).combinations(k).collect();
        let found = combos
            .par_iter()
            .flat_map_iter(|combo| (0..tables).map(move |t| (combo, t)))
            .map(|(combo, t)| env.try_structure(combo.iter().map(|&i| descs[i]), t))
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            });
        match found {
            Some(Ok(Some((s, w)))) => return Verdict::sat(s, w, f),
            Some(Err(e)) => return Err(e),
            _ => {}
        }
    }
    Ok(Verdict::unsat(n))
}

struct Env<'a> {
    f: &'a Formula,
    tag: ClassTag,
    assignments: &'a [TruthAssignment],
    sets: &'a [BTreeSet<Formula>],
}

type Found = Option<(EpistemicStructure, String)>;

impl Env<'_> {
    fn try_structure(&self, descs: impl Iterator<Item = Desc>, table: usize) -> Result<Found, DecisionError> {
        let mut s = EpistemicStructure::new(self.tag);
        for (i, d) in descs.enumerate() {
            match d {
                Desc::Real(v, c, in_wp) => {
                    let w = format!("w{i}");
                    s.add_world(w.clone(), self.assignments[v].clone());
                    match self.tag.approach {
                        Approach::Syntactic => {
                            s.c.insert(w.clone(), WorldFormulas::Explicit(self.sets[c].clone()));
                        }
                        Approach::Awareness => {
                            s.a.insert(w.clone(), self.sets[c].clone());
                        }
                        _ => {}
                    }
                    if in_wp {
                        s.possible.insert(w);
                    }
                }
                Desc::Impossible(c) => {
                    let x = format!("x{i}");
                    s.possible.insert(x.clone());
                    s.c.insert(x, WorldFormulas::Explicit(self.sets[c].clone()));
                }
            }
        }
        if self.tag.approach == Approach::Algorithmic {
            s.algorithm = Some(AlgorithmSpec::Table(TableAlgorithm {
                yes: self.sets[table].clone(),
                no: BTreeSet::new(),
            }));
        }
        if s.worlds.is_empty() {
            return Ok(None);
        }
        if !self.tag.probabilistic {
            return self.check(s);
        }
        let liks = self.f.likelihood_atoms();
        for l in 0..1u64 << liks.len() {
            let Some(mu) = self.distribution(&s, &liks, l)? else {
                continue;
            };
            let mut t = s.clone();
            t.mu = Some(mu);
            if let Some(found) = self.check(t)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    fn check(&self, s: EpistemicStructure) -> Result<Found, DecisionError> {
        if !s.validate().is_empty() {
            return Ok(None);
        }
        let hit = {
            let mut checker = Checker::new(&s);
            let mut hit = None;
            for w in &s.worlds {
                if checker.holds(w, self.f)? {
                    hit = Some(w.clone());
                    break;
                }
            }
            hit
        };
        Ok(hit.map(|w| (s, w)))
    }

    /// A distribution on W' making likelihood atom `i` true exactly when
    /// bit `i` of `l` is set.
    fn distribution(
        &self,
        s: &EpistemicStructure,
        liks: &[Formula],
        l: u64,
    ) -> Result<Option<Distribution>, DecisionError> {
        let wp: Vec<String> = s.possible.iter().cloned().collect();
        if wp.is_empty() {
            return Ok(None);
        }
        let var = |w: &str| format!("mu_{w}");
        // extensions of propositional arguments do not depend on mu
        let mut probe = s.clone();
        probe.mu = Some(Distribution::uniform(&wp));
        let mut checker = Checker::new(&probe);
        let mut forms = Vec::new();
        for w in &wp {
            forms.push(LinForm::Atom(LinearConstraint::ge([(var(w), Rational::one())], Rational::zero())));
        }
        forms.push(LinForm::Atom(LinearConstraint::eq(
            wp.iter().map(|w| (var(w), Rational::one())),
            Rational::one(),
        )));
        for (i, atom) in liks.iter().enumerate() {
            let Formula::Lik(t) = atom else { unreachable!() };
            let mut terms: Vec<(String, Rational)> = Vec::new();
            for (a, phi) in &t.terms {
                for w in &wp {
                    if checker.holds(w, phi)? {
                        terms.push((var(w), int(*a)));
                    }
                }
            }
            let b = int(t.bound);
            let c = match t.relation {
                Relation::Ge => LinearConstraint::ge(terms, b),
                Relation::Gt => LinearConstraint::gt(terms, b),
                Relation::Le => LinearConstraint::le(terms, b),
                Relation::Lt => LinearConstraint::lt(terms, b),
                Relation::Eq => LinearConstraint::eq(terms, b),
            };
            forms.push(if l >> i & 1 == 1 {
                LinForm::Atom(c)
            } else {
                LinForm::Atom(c).negate()
            });
        }
        let Some(sol) = satisfiable_lin_form(&LinForm::And(forms)) else {
            return Ok(None);
        };
        let mu: BTreeMap<String, Rational> = wp
            .iter()
            .map(|w| (w.clone(), sol.get(&var(w)).cloned().unwrap_or_else(Rational::zero)))
            .collect();
        Ok(Some(Distribution(mu)))
    }
}

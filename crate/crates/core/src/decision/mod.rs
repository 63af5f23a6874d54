//! Satisfiability and validity for every structure class.

pub mod audit;
pub mod brute;
pub mod constructions;
mod encode;
mod knowledge;
mod prob;
pub mod search;

use crate::error::DecisionError;
use crate::formula::Formula;
use crate::model;
use crate::structures::{Approach, ClassTag, EpistemicStructure, Modal};

pub use audit::{audit_axioms, AuditOptions, AuditReport, AxiomId, AxiomResult};
pub use brute::{brute_force_sat, BruteBounds};
pub use constructions::{
    construct_theorem1, construct_theorem4, downward_closed, k_compatible, ClosureViolation,
    Theorem4Kind,
};
pub use knowledge::satisfiable;
pub use prob::{satisfiable_prob, satisfiable_prob_with, ProbOptions};

/// A structure together with the world where the formula holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub structure: EpistemicStructure,
    pub world: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub satisfiable: bool,
    pub witness: Option<Witness>,
    /// |W u W'| of the witness, or the search bound for UNSAT answers.
    pub bound_used: usize,
}

impl Verdict {
    pub fn unsat(bound_used: usize) -> Self {
        Verdict {
            satisfiable: false,
            witness: None,
            bound_used,
        }
    }

    /// Re-checks the witness before wrapping it.
    pub fn sat(
        structure: EpistemicStructure,
        world: impl Into<String>,
        f: &Formula,
    ) -> Result<Self, DecisionError> {
        let world = world.into();
        let violations = structure.validate();
        if !violations.is_empty() {
            return Err(DecisionError::Invariant(format!(
                "witness for `{f}` violates its class: {}",
                violations.join("; ")
            )));
        }
        if !model::holds(&structure, &world, f)? {
            return Err(DecisionError::Invariant(format!(
                "witness for `{f}` does not satisfy it at `{world}`"
            )));
        }
        Ok(Verdict {
            satisfiable: true,
            bound_used: structure.world_count(),
            witness: Some(Witness { structure, world }),
        })
    }
}

/// Outcome of a validity query: a countermodel when not valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validity {
    pub valid: bool,
    pub countermodel: Option<Witness>,
}

impl From<Verdict> for Validity {
    fn from(v: Verdict) -> Self {
        Validity {
            valid: !v.satisfiable,
            countermodel: v.witness,
        }
    }
}

/// Truth at every world of W in every structure of the class.
pub fn valid(f: &Formula, tag: ClassTag) -> Result<Validity, DecisionError> {
    Ok(satisfiable(&Formula::not(f.clone()), tag)?.into())
}

pub fn valid_prob(f: &Formula, tag: ClassTag) -> Result<Validity, DecisionError> {
    Ok(satisfiable_prob(&Formula::not(f.clone()), tag)?.into())
}

/// Dispatches on `tag.probabilistic`.
pub fn decide(f: &Formula, tag: ClassTag) -> Result<Verdict, DecisionError> {
    if tag.probabilistic {
        satisfiable_prob(f, tag)
    } else {
        satisfiable(f, tag)
    }
}

pub fn decide_valid(f: &Formula, tag: ClassTag) -> Result<Validity, DecisionError> {
    Ok(decide(&Formula::not(f.clone()), tag)?.into())
}

/// Axiom systems used to discharge side conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerSystem {
    /// Prop, MP, Ver: S5 awareness structures.
    Basic,
    /// Prop, MP, Prob, KL, Ver: S5 probabilistic awareness structures.
    Probabilistic,
    /// Prop, MP, Ineq, Bound, Ver, KL: S5 probabilistic impossible-worlds
    /// structures.
    Bounded,
}

impl VerSystem {
    pub fn class(self) -> ClassTag {
        match self {
            VerSystem::Basic => ClassTag::new(Modal::S5, Approach::Awareness),
            VerSystem::Probabilistic => ClassTag::prob(Modal::S5, Approach::Awareness),
            VerSystem::Bounded => ClassTag::prob(Modal::S5, Approach::Impossible),
        }
    }
}

/// Derivability, decided as validity in the class the system is complete for.
pub fn derivable_ver(f: &Formula, system: VerSystem) -> Result<bool, DecisionError> {
    if system == VerSystem::Basic && f.has_likelihood() {
        return Err(DecisionError::LikelihoodPresent(f.render()));
    }
    Ok(decide_valid(f, system.class())?.valid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn derivability_examples() {
        assert!(derivable_ver(&f("~(p & ~p)"), VerSystem::Basic).unwrap());
        assert!(derivable_ver(&f("K p -> p"), VerSystem::Basic).unwrap());
        assert!(!derivable_ver(&f("p -> K p"), VerSystem::Basic).unwrap());
        assert!(derivable_ver(&f("l(p) + l(~p) = 1"), VerSystem::Probabilistic).unwrap());
        assert!(!derivable_ver(&f("l(p) + l(~p) = 1"), VerSystem::Bounded).unwrap());
        assert!(derivable_ver(&f("K p -> l(p) > 0"), VerSystem::Bounded).unwrap());
    }
}

//! Propositional encodings of small-model searches: every world of the
//! candidate witness gets its own copy of the atoms.

use std::collections::{BTreeMap, HashMap};

use crate::formula::{subformulas, Formula, TruthAssignment};

pub(crate) type Model = BTreeMap<Formula, bool>;

/// Atoms of a formula: propositions, `K` subformulas (nested ones
/// included) and likelihood atoms, each in subformula order.
pub(crate) struct Atoms {
    pub props: Vec<String>,
    pub knows: Vec<Formula>,
    pub liks: Vec<Formula>,
    k_index: HashMap<Formula, usize>,
    l_index: HashMap<Formula, usize>,
}

impl Atoms {
    pub fn of(f: &Formula) -> Self {
        let subs = subformulas(f);
        let props = f.propositions().into_iter().collect();
        let knows: Vec<Formula> = subs
            .iter()
            .filter(|g| matches!(g, Formula::Know(_)))
            .cloned()
            .collect();
        let liks: Vec<Formula> = subs.iter().filter(|g| g.is_likelihood_atom()).cloned().collect();
        let k_index = knows.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let l_index = liks.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        Atoms {
            props,
            knows,
            liks,
            k_index,
            l_index,
        }
    }

    /// Argument of the `j`th `K` subformula.
    pub fn karg(&self, j: usize) -> &Formula {
        match &self.knows[j] {
            Formula::Know(g) => g,
            _ => unreachable!("knows only holds K formulas"),
        }
    }

    pub fn know_index(&self, f: &Formula) -> Option<usize> {
        self.k_index.get(f).copied()
    }

    pub fn lik_index(&self, f: &Formula) -> Option<usize> {
        self.l_index.get(f).copied()
    }

    /// Replaces propositions, `K` nodes (without descending into them) and
    /// likelihood atoms.
    pub fn rename(
        &self,
        f: &Formula,
        prop: &dyn Fn(&str) -> Formula,
        know: &dyn Fn(usize) -> Formula,
        lik: &dyn Fn(usize) -> Formula,
    ) -> Formula {
        match f {
            Formula::Prop(p) => prop(p),
            Formula::True | Formula::False => f.clone(),
            Formula::Not(g) => Formula::not(self.rename(g, prop, know, lik)),
            Formula::And(a, b) => Formula::and(
                self.rename(a, prop, know, lik),
                self.rename(b, prop, know, lik),
            ),
            Formula::Know(_) => know(self.k_index[f]),
            Formula::Lik(_) => lik(self.l_index[f]),
        }
    }
}

/// Fresh atom private to the encoding.
pub(crate) fn atom(scope: &str, name: &str) -> Formula {
    Formula::Prop(format!("\u{1}{scope}\u{1}{name}"))
}

pub(crate) fn prop_at(world: &str, p: &str) -> Formula {
    atom(world, p)
}

pub(crate) fn k_at(scope: &str, j: usize) -> Formula {
    atom(scope, &format!("K{j}"))
}

pub(crate) fn value(model: &Model, a: &Formula) -> bool {
    model.get(a).copied().unwrap_or(false)
}

pub(crate) fn constant(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

/// The truth assignment of world copy `world`, over `props`.
pub(crate) fn assignment_at(model: &Model, world: &str, props: &[String]) -> TruthAssignment {
    props
        .iter()
        .map(|p| (p.clone(), value(model, &prop_at(world, p))))
        .collect()
}

//! Satisfaction for every structure class.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use crate::algo::{Answer, KnowledgeAlgorithm};
use crate::error::{FormulaError, ModelError};
use crate::formula::Formula;
use crate::linarith::{int, Rational};
use crate::structures::{Approach, EpistemicStructure};

/// `(s, w) |= f`.
pub fn holds(s: &EpistemicStructure, w: &str, f: &Formula) -> Result<bool, ModelError> {
    Checker::new(s).holds(w, f)
}

/// Worlds of W u W' where the propositional formula `f` holds. Impossible
/// worlds count when `f` is in their formula set.
pub fn extension(s: &EpistemicStructure, f: &Formula) -> Result<BTreeSet<String>, ModelError> {
    if !f.is_propositional() {
        return Err(FormulaError::NotPropositional(f.render()).into());
    }
    let mut checker = Checker::new(s);
    let mut out = BTreeSet::new();
    for w in s.worlds.union(&s.possible) {
        if checker.holds(w, f)? {
            out.insert(w.clone());
        }
    }
    Ok(out)
}

/// `mu(ext(f) n W')`.
pub fn likelihood(s: &EpistemicStructure, f: &Formula) -> Result<Rational, ModelError> {
    Checker::new(s).likelihood(f)
}

/// Evaluator memoising `K` and likelihood nodes per world.
pub struct Checker<'s> {
    s: &'s EpistemicStructure,
    memo: HashMap<(Formula, String), bool>,
}

impl<'s> Checker<'s> {
    pub fn new(s: &'s EpistemicStructure) -> Self {
        Checker {
            s,
            memo: HashMap::new(),
        }
    }

    pub fn holds(&mut self, w: &str, f: &Formula) -> Result<bool, ModelError> {
        if !self.s.contains_world(w) {
            return Err(ModelError::UnknownWorld(w.to_string()));
        }
        self.eval(w, f)
    }

    fn eval(&mut self, w: &str, f: &Formula) -> Result<bool, ModelError> {
        let s = self.s;
        if let Formula::Lik(_) = f {
            return self.memoised(f, "", |me| me.eval_likelihood(f));
        }
        if s.tag.approach == Approach::Impossible && s.is_impossible_world(w) {
            return Ok(s.c.get(w).is_some_and(|c| c.contains(f)));
        }
        match f {
            Formula::Prop(p) => Ok(s.pi.get(w).and_then(|v| v.get(p)).unwrap_or(false)),
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Not(g) => Ok(!self.eval(w, g)?),
            Formula::And(a, b) => Ok(self.eval(w, a)? && self.eval(w, b)?),
            Formula::Know(g) => self.memoised(f, w, |me| me.eval_know(w, g)),
            Formula::Lik(_) => unreachable!(),
        }
    }

    fn memoised(
        &mut self,
        f: &Formula,
        w: &str,
        compute: impl FnOnce(&mut Self) -> Result<bool, ModelError>,
    ) -> Result<bool, ModelError> {
        let key = (f.clone(), w.to_string());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let v = compute(self)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    fn everywhere_possible(&mut self, g: &Formula) -> Result<bool, ModelError> {
        let s = self.s;
        for u in &s.possible {
            if !self.eval(u, g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn eval_know(&mut self, w: &str, g: &Formula) -> Result<bool, ModelError> {
        let s = self.s;
        match s.tag.approach {
            Approach::Standard | Approach::Impossible => self.everywhere_possible(g),
            Approach::Syntactic => Ok(s.c.get(w).is_some_and(|c| c.contains(g))),
            Approach::Awareness => {
                let aware = s.a.get(w).is_some_and(|a| a.contains(g));
                Ok(aware && self.everywhere_possible(g)?)
            }
            Approach::Algorithmic => Ok(s
                .algorithm
                .as_ref()
                .is_some_and(|alg| alg.answer(g) == Answer::Yes)),
        }
    }

    pub fn likelihood(&mut self, g: &Formula) -> Result<Rational, ModelError> {
        let s = self.s;
        let Some(mu) = &s.mu else {
            return Err(ModelError::NotProbabilistic(g.render()));
        };
        let mut total = Rational::zero();
        for u in &s.possible {
            if self.eval(u, g)? {
                total += mu.get(u);
            }
        }
        Ok(total)
    }

    fn eval_likelihood(&mut self, f: &Formula) -> Result<bool, ModelError> {
        let Formula::Lik(l) = f else {
            unreachable!()
        };
        if self.s.mu.is_none() || !self.s.tag.probabilistic {
            return Err(ModelError::NotProbabilistic(f.render()));
        }
        let mut lhs = Rational::zero();
        for (a, g) in &l.terms {
            lhs += int(*a) * self.likelihood(g)?;
        }
        Ok(l.relation.holds(&lhs, &int(l.bound)))
    }
}

//! Randomised soundness audit of the axiom catalogue against a class.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{decide_valid, derivable_ver, VerSystem, Witness};
use crate::error::DecisionError;
use crate::formula::{Formula, Relation};
use crate::linarith::{int, valid_lin_form, LinForm, LinearConstraint};
use crate::structures::{Approach, ClassTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    Prop,
    MP,
    Ver,
    DC,
    KC,
    KL,
    WVer,
    Bound,
    Ineq,
    Prob,
    DCP,
    KCP,
    KDist,
    PosIntro,
    NegIntro,
    D,
}

impl AxiomId {
    pub const ALL: [AxiomId; 16] = [
        AxiomId::Prop,
        AxiomId::MP,
        AxiomId::Ver,
        AxiomId::DC,
        AxiomId::KC,
        AxiomId::KL,
        AxiomId::WVer,
        AxiomId::Bound,
        AxiomId::Ineq,
        AxiomId::Prob,
        AxiomId::DCP,
        AxiomId::KCP,
        AxiomId::KDist,
        AxiomId::PosIntro,
        AxiomId::NegIntro,
        AxiomId::D,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxiomId::Prop => "Prop",
            AxiomId::MP => "MP",
            AxiomId::Ver => "Ver",
            AxiomId::DC => "DC",
            AxiomId::KC => "KC",
            AxiomId::KL => "KL",
            AxiomId::WVer => "WVer",
            AxiomId::Bound => "Bound",
            AxiomId::Ineq => "Ineq",
            AxiomId::Prob => "Prob",
            AxiomId::DCP => "DCP",
            AxiomId::KCP => "KCP",
            AxiomId::KDist => "K-dist",
            AxiomId::PosIntro => "PosIntro",
            AxiomId::NegIntro => "NegIntro",
            AxiomId::D => "D",
        }
    }

    /// Whether instances mention likelihood.
    pub fn probabilistic(self) -> bool {
        matches!(
            self,
            AxiomId::KL
                | AxiomId::WVer
                | AxiomId::Bound
                | AxiomId::Ineq
                | AxiomId::Prob
                | AxiomId::DCP
                | AxiomId::KCP
        )
    }

    /// Axioms relevant to `tag`.
    pub fn catalog(tag: ClassTag) -> Vec<AxiomId> {
        AxiomId::ALL
            .into_iter()
            .filter(|a| tag.probabilistic || !a.probabilistic())
            .collect()
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxiomId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().replace("^", "");
        AxiomId::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(&key))
            .ok_or_else(|| format!("unknown axiom `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    pub vocabulary_size: usize,
    pub instances: usize,
    pub seed: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            vocabulary_size: 2,
            instances: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: Formula,
    /// Where the negated instance holds.
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomResult {
    pub axiom: AxiomId,
    pub valid: bool,
    pub tested: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub tag: ClassTag,
    pub results: BTreeMap<AxiomId, AxiomResult>,
}

impl AuditReport {
    pub fn get(&self, axiom: AxiomId) -> Option<&AxiomResult> {
        self.results.get(&axiom)
    }

    pub fn is_valid(&self, axiom: AxiomId) -> Option<bool> {
        self.get(axiom).map(|r| r.valid)
    }
}

pub fn audit_axioms(tag: ClassTag, opts: &AuditOptions) -> Result<AuditReport, DecisionError> {
    let mut results = BTreeMap::new();
    for axiom in AxiomId::catalog(tag) {
        let instances = Generator::new(tag, opts, axiom).instances(axiom, opts.instances)?;
        let verdicts: Vec<_> = instances
            .par_iter()
            .map(|g| decide_valid(g, tag))
            .collect::<Result<_, _>>()?;
        let counterexample = instances.iter().zip(verdicts).find_map(|(g, v)| {
            v.countermodel.map(|witness| Counterexample {
                instance: g.clone(),
                witness,
            })
        });
        results.insert(
            axiom,
            AxiomResult {
                axiom,
                valid: counterexample.is_none(),
                tested: instances.len(),
                counterexample,
            },
        );
    }
    Ok(AuditReport { tag, results })
}

struct Generator {
    rng: ChaCha8Rng,
    vocab: Vec<Formula>,
    tag: ClassTag,
}

const NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

fn k(f: Formula) -> Formula {
    Formula::know(f)
}

fn not(f: Formula) -> Formula {
    Formula::not(f)
}

fn and(a: Formula, b: Formula) -> Formula {
    Formula::and(a, b)
}

fn imp(a: Formula, b: Formula) -> Formula {
    Formula::implies(a, b)
}

fn lik1(phi: Formula, rel: Relation, bound: i64) -> Formula {
    Formula::lik(vec![(1, phi)], rel, bound)
}

impl Generator {
    fn new(tag: ClassTag, opts: &AuditOptions, axiom: AxiomId) -> Self {
        let n = opts.vocabulary_size.clamp(1, NAMES.len());
        let salt = AxiomId::ALL.iter().position(|a| *a == axiom).unwrap_or(0) as u64;
        Generator {
            rng: ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            vocab: NAMES[..n].iter().map(|p| Formula::prop(*p)).collect(),
            tag,
        }
    }

    fn prop(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return self.vocab.choose(&mut self.rng).cloned().expect("nonempty vocabulary");
        }
        match self.rng.gen_range(0..3) {
            0 => not(self.prop(depth - 1)),
            1 => and(self.prop(depth - 1), self.prop(depth - 1)),
            _ => Formula::or(self.prop(depth - 1), self.prop(depth - 1)),
        }
    }

    fn lik_atom(&mut self) -> Formula {
        let phi = self.prop(1);
        let rel = *[Relation::Gt, Relation::Ge, Relation::Le, Relation::Lt]
            .choose(&mut self.rng)
            .expect("nonempty");
        let (num, den) = if self.rng.gen_bool(0.5) { (0, 1) } else { (1, 2) };
        Formula::lik(vec![(den, phi)], rel, num)
    }

    /// Small formula; `K` and likelihood atoms appear with modest odds.
    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.35) {
            if self.tag.probabilistic && self.rng.gen_bool(0.2) {
                return self.lik_atom();
            }
            return self.vocab.choose(&mut self.rng).cloned().expect("nonempty vocabulary");
        }
        match self.rng.gen_range(0..4) {
            0 => not(self.formula(depth - 1)),
            1 => and(self.formula(depth - 1), self.formula(depth - 1)),
            2 => imp(self.formula(depth - 1), self.formula(depth - 1)),
            _ => k(self.formula(depth - 1)),
        }
    }

    /// Formula without likelihood atoms.
    fn plain(&mut self, depth: usize) -> Formula {
        let probabilistic = self.tag.probabilistic;
        self.tag.probabilistic = false;
        let f = self.formula(depth);
        self.tag.probabilistic = probabilistic;
        f
    }

    /// Side conditions are derivable from the Ver system of the class family.
    fn system(&self) -> VerSystem {
        match self.tag.approach {
            Approach::Impossible => VerSystem::Bounded,
            _ => VerSystem::Probabilistic,
        }
    }

    fn instances(&mut self, axiom: AxiomId, n: usize) -> Result<Vec<Formula>, DecisionError> {
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n && attempts < 50 * n.max(1) {
            attempts += 1;
            if let Some(g) = self.instance(axiom)? {
                out.push(g);
            }
        }
        Ok(out)
    }

    fn instance(&mut self, axiom: AxiomId) -> Result<Option<Formula>, DecisionError> {
        let g = match axiom {
            AxiomId::Prop => {
                let (a, b, c) = (self.formula(2), self.formula(2), self.formula(1));
                match self.rng.gen_range(0..6) {
                    0 => Formula::or(a.clone(), not(a)),
                    1 => imp(a.clone(), imp(b, a)),
                    2 => imp(
                        imp(a.clone(), imp(b.clone(), c.clone())),
                        imp(imp(a.clone(), b), imp(a, c)),
                    ),
                    3 => imp(imp(not(a.clone()), not(b.clone())), imp(b, a)),
                    4 => imp(and(a.clone(), b), a),
                    _ => Formula::iff(not(not(a.clone())), a),
                }
            }
            AxiomId::MP => {
                let (a, b) = (self.formula(2), self.formula(2));
                imp(and(a.clone(), imp(a, b.clone())), b)
            }
            AxiomId::Ver => {
                let a = self.formula(2);
                imp(k(a.clone()), a)
            }
            AxiomId::DC => {
                let parts = self.inconsistent_parts();
                let g = not(Formula::conjunction(parts.iter().cloned().map(k)));
                let side = not(Formula::conjunction(parts));
                return self.guarded(g, side, VerSystem::Basic);
            }
            AxiomId::KC => {
                let (lhs, rhs) = self.kc_shape();
                let side = imp(Formula::conjunction(lhs.clone()), Formula::disjunction(rhs.iter().cloned().map(k)));
                let g = imp(
                    Formula::conjunction(lhs.into_iter().map(k)),
                    Formula::disjunction(rhs.into_iter().map(k)),
                );
                return self.guarded(g, side, VerSystem::Basic);
            }
            AxiomId::KDist => {
                let (a, b) = (self.formula(1), self.formula(1));
                imp(and(k(a.clone()), k(imp(a, b.clone()))), k(b))
            }
            AxiomId::PosIntro => {
                let a = self.formula(1);
                imp(k(a.clone()), k(k(a)))
            }
            AxiomId::NegIntro => {
                let a = self.formula(1);
                imp(not(k(a.clone())), k(not(k(a))))
            }
            AxiomId::D => not(k(Formula::False)),
            AxiomId::KL => {
                let a = self.prop(2);
                imp(k(a.clone()), lik1(a, Relation::Gt, 0))
            }
            AxiomId::WVer => {
                let a = self.lik_atom();
                imp(k(a.clone()), a)
            }
            AxiomId::Bound => {
                let a = self.prop(2);
                and(lik1(a.clone(), Relation::Ge, 0), lik1(a, Relation::Le, 1))
            }
            AxiomId::Ineq => return Ok(self.ineq()),
            AxiomId::Prob => {
                let (a, b) = (self.prop(1), self.prop(1));
                match self.rng.gen_range(0..4) {
                    0 => lik1(Formula::True, Relation::Eq, 1),
                    1 => Formula::lik(vec![(1, a.clone()), (1, not(a))], Relation::Eq, 1),
                    2 => Formula::lik(
                        vec![(1, and(a.clone(), b.clone())), (1, and(a.clone(), not(b))), (-1, a)],
                        Relation::Eq,
                        0,
                    ),
                    _ => {
                        let same = match self.rng.gen_range(0..3) {
                            0 => not(not(a.clone())),
                            1 => and(a.clone(), a.clone()),
                            _ => Formula::or(and(a.clone(), b.clone()), and(a.clone(), not(b))),
                        };
                        Formula::lik(vec![(1, a), (-1, same)], Relation::Eq, 0)
                    }
                }
            }
            AxiomId::DCP | AxiomId::KCP => {
                let (lhs, rhs) = self.dcp_shape(axiom == AxiomId::KCP);
                let side = imp(Formula::conjunction(lhs.clone()), Formula::disjunction(rhs.clone()));
                let g = imp(Formula::conjunction(lhs.into_iter().map(k)), Formula::disjunction(rhs));
                let system = self.system();
                return self.guarded(g, side, system);
            }
        };
        Ok(Some(g))
    }

    fn guarded(&self, g: Formula, side: Formula, system: VerSystem) -> Result<Option<Formula>, DecisionError> {
        Ok(derivable_ver(&side, system)?.then_some(g))
    }

    /// Formulas whose conjunction is refutable from Ver.
    fn inconsistent_parts(&mut self) -> Vec<Formula> {
        let (a, b) = (self.plain(1), self.plain(1));
        match self.rng.gen_range(0..4) {
            0 => vec![a.clone(), not(a)],
            1 => vec![and(a.clone(), b), not(a)],
            2 => vec![k(a.clone()), not(a)],
            _ => vec![a.clone(), imp(a, b.clone()), not(b)],
        }
    }

    fn kc_shape(&mut self) -> (Vec<Formula>, Vec<Formula>) {
        let (a, b) = (self.plain(1), self.plain(1));
        match self.rng.gen_range(0..5) {
            0 => (vec![k(a.clone())], vec![a]),
            1 => (self.inconsistent_parts(), vec![]),
            2 => (vec![a.clone(), imp(a, k(b.clone()))], vec![b]),
            3 => (vec![Formula::or(k(a.clone()), k(b.clone()))], vec![a, b]),
            _ => (vec![and(k(a.clone()), b)], vec![a]),
        }
    }

    fn dcp_shape(&mut self, kcp: bool) -> (Vec<Formula>, Vec<Formula>) {
        let a = self.prop(1);
        let shapes = if kcp { 7 } else { 5 };
        match self.rng.gen_range(0..shapes) {
            0 => (vec![a.clone(), lik1(a.clone(), Relation::Ge, 1)], vec![lik1(a, Relation::Gt, 0)]),
            1 => {
                let l = self.lik_atom();
                (vec![l.clone()], vec![l])
            }
            2 => (vec![a.clone(), not(a)], vec![]),
            3 => (
                vec![Formula::True],
                vec![Formula::lik(vec![(1, a.clone()), (1, not(a))], Relation::Eq, 1)],
            ),
            4 => (
                vec![Formula::lik(vec![(2, a.clone())], Relation::Ge, 1)],
                vec![lik1(a, Relation::Gt, 0)],
            ),
            5 => (vec![k(a.clone())], vec![k(a)]),
            _ => {
                let b = self.prop(1);
                (
                    vec![and(k(a.clone()), b.clone())],
                    vec![k(a), lik1(b, Relation::Gt, 0)],
                )
            }
        }
    }

    /// `c1 & c2 -> c` where `c` is a loosened nonnegative combination.
    fn ineq(&mut self) -> Option<Formula> {
        let args: Vec<Formula> = (0..2).map(|_| self.prop(1)).collect();
        let row = |rng: &mut ChaCha8Rng| -> (Vec<i64>, i64) {
            ((0..2).map(|_| rng.gen_range(-2..=2)).collect(), rng.gen_range(-1..=2))
        };
        let (c1, b1) = row(&mut self.rng);
        let (c2, b2) = row(&mut self.rng);
        let (alpha, beta) = (self.rng.gen_range(0..=2), self.rng.gen_range(0..=2));
        let slack = self.rng.gen_range(0..=1);
        let comb: Vec<i64> = (0..2).map(|i| alpha * c1[i] + beta * c2[i]).collect();
        let bound = alpha * b1 + beta * b2 + slack;
        let atom = |coef: &[i64], b: i64| {
            Formula::lik(
                coef.iter().cloned().zip(args.iter().cloned()).collect(),
                Relation::Le,
                b,
            )
        };
        let lin = |coef: &[i64], b: i64| {
            LinForm::Atom(LinearConstraint::le(
                coef.iter().enumerate().map(|(i, c)| (format!("x{i}"), int(*c))),
                int(b),
            ))
        };
        let implication = LinForm::implies(
            LinForm::And(vec![lin(&c1, b1), lin(&c2, b2)]),
            lin(&comb, bound),
        );
        if !valid_lin_form(&implication) {
            return None;
        }
        Some(imp(and(atom(&c1, b1), atom(&c2, b2)), atom(&comb, bound)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in AxiomId::ALL {
            assert_eq!(a.as_str().parse::<AxiomId>().unwrap(), a);
        }
        assert_eq!("KC^P".parse::<AxiomId>().unwrap(), AxiomId::KCP);
    }

    #[test]
    fn deterministic() {
        let tag: ClassTag = "kd45-awareness".parse().unwrap();
        let opts = AuditOptions {
            instances: 10,
            ..AuditOptions::default()
        };
        assert_eq!(audit_axioms(tag, &opts).unwrap(), audit_axioms(tag, &opts).unwrap());
    }

    #[test]
    fn k45_awareness_small() {
        let tag: ClassTag = "k45-awareness".parse().unwrap();
        let opts = AuditOptions {
            instances: 20,
            ..AuditOptions::default()
        };
        let r = audit_axioms(tag, &opts).unwrap();
        assert_eq!(r.is_valid(AxiomId::Prop), Some(true));
        assert_eq!(r.is_valid(AxiomId::Ver), Some(false));
        assert!(r.get(AxiomId::Ver).unwrap().counterexample.is_some());
    }
}

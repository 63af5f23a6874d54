//! Satisfiability with likelihood formulas.
//!
//! Guess truth values for the likelihood atoms and for "psi holds everywhere
//! in W'" per `K` subformula, then realise the guess: one SAT call per world
//! kind and one exact linear feasibility problem for the distribution.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::encode::{assignment_at, constant, k_at, prop_at, value, Atoms, Model};
use super::search::{backtrack, Tri};
use super::Verdict;
use crate::error::DecisionError;
use crate::formula::{eval_prop, propositionally_consistent, sub_closure_p, Formula, Relation, TruthAssignment};
use crate::linarith::{feasible, int, Feasibility, LinForm, LinearConstraint, Rational};
use crate::structures::{Approach, ClassTag, Distribution, EpistemicStructure, Modal, WorldFormulas};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProbOptions {
    /// Target number of positive-probability worlds; `None` means
    /// |subClosureP(f)| + 1.
    pub support: Option<usize>,
    /// Skip greedy support reduction.
    pub dense: bool,
}

pub fn satisfiable_prob(f: &Formula, tag: ClassTag) -> Result<Verdict, DecisionError> {
    satisfiable_prob_with(f, tag, &ProbOptions::default())
}

pub fn satisfiable_prob_with(
    f: &Formula,
    tag: ClassTag,
    opts: &ProbOptions,
) -> Result<Verdict, DecisionError> {
    if !ClassTag::probabilistic_supported().contains(&tag) {
        return Err(DecisionError::UnsupportedClass(tag.to_string()));
    }
    let atoms = Atoms::of(f);
    let (nl, nk) = (atoms.liks.len(), atoms.knows.len());
    if nl + nk > 24 {
        return Err(DecisionError::BoundsTooLarge(format!(
            "{nl} likelihood atoms and {nk} knowledge subformulas"
        )));
    }
    let support = opts.support.unwrap_or(sub_closure_p(f).len() + 1);
    let ctx = Ctx {
        f,
        atoms: &atoms,
        tag,
        support,
        sparsify: !opts.dense,
    };
    let mut found: Option<Result<EpistemicStructure, DecisionError>> = None;
    backtrack(nl + nk, |vals, complete| {
        if ctx.prefilter(vals) == Tri::False {
            return Tri::False;
        }
        if !complete {
            return Tri::Unknown;
        }
        let l: Vec<bool> = vals[..nl].iter().map(|v| v.unwrap_or(false)).collect();
        let kn: Vec<bool> = vals[nl..].iter().map(|v| v.unwrap_or(false)).collect();
        let realised = match tag.approach {
            Approach::Awareness => ctx.awareness(&l, &kn),
            _ => ctx.impossible(&l, &kn),
        };
        match realised {
            Ok(None) => Tri::False,
            Ok(Some(s)) => {
                found = Some(Ok(s));
                Tri::True
            }
            Err(e) => {
                found = Some(Err(e));
                Tri::True
            }
        }
    });
    match found {
        None => Ok(Verdict::unsat(support)),
        Some(Ok(s)) => Verdict::sat(s, "w", f),
        Some(Err(e)) => Err(e),
    }
}

struct Ctx<'a> {
    f: &'a Formula,
    atoms: &'a Atoms,
    tag: ClassTag,
    support: usize,
    sparsify: bool,
}

/// An assignment to the likelihood-argument vocabulary, realised by a world.
struct Candidate {
    name: String,
    v: TruthAssignment,
    model: Model,
}

impl Ctx<'_> {
    fn nl(&self) -> usize {
        self.atoms.liks.len()
    }

    /// Kleene value of `f` at the actual world under a partial guess.
    fn eval3(&self, g: &Formula, vals: &[Option<bool>]) -> Tri {
        match g {
            Formula::Prop(_) => Tri::Unknown,
            Formula::True => Tri::True,
            Formula::False => Tri::False,
            Formula::Not(a) => self.eval3(a, vals).not(),
            Formula::And(a, b) => match self.eval3(a, vals) {
                Tri::False => Tri::False,
                t => t.and(self.eval3(b, vals)),
            },
            Formula::Know(_) => {
                let j = self.atoms.know_index(g).expect("indexed");
                let v = vals[self.nl() + j];
                match self.tag.approach {
                    // awareness can still withhold knowledge of a global truth
                    Approach::Awareness if v == Some(true) => Tri::Unknown,
                    _ => Tri::from(v),
                }
            }
            Formula::Lik(_) => Tri::from(vals[self.atoms.lik_index(g).expect("indexed")]),
        }
    }

    fn prefilter(&self, vals: &[Option<bool>]) -> Tri {
        // K of a likelihood atom is that atom, since W' is nonempty
        for j in 0..self.atoms.knows.len() {
            let arg = self.atoms.karg(j);
            if let Some(i) = self.atoms.lik_index(arg) {
                if let (Some(a), Some(b)) = (vals[i], vals[self.nl() + j]) {
                    if a != b {
                        return Tri::False;
                    }
                }
            }
        }
        self.eval3(self.f, vals)
    }

    fn lik_args(&self) -> Vec<Formula> {
        self.f.likelihood_arguments()
    }

    fn lik_vocabulary(&self) -> Vec<String> {
        let mut out = BTreeSet::new();
        for a in self.lik_args() {
            out.extend(a.propositions());
        }
        out.into_iter().collect()
    }

    /// Worlds satisfying `gamma`, one per realisable assignment to the
    /// likelihood vocabulary.
    fn candidates(&self, gamma: &dyn Fn(&str) -> Vec<Formula>) -> Vec<Candidate> {
        let vocab = self.lik_vocabulary();
        let mut out = Vec::new();
        for (bits, v) in TruthAssignment::enumerate(&vocab).enumerate() {
            let name = format!("u{bits}");
            let mut cs = gamma(&name);
            for p in &vocab {
                let lit = prop_at(&name, p);
                cs.push(if v.get(p) == Some(true) { lit } else { Formula::not(lit) });
            }
            if let Some(model) = propositionally_consistent(&cs) {
                out.push(Candidate { name, v, model });
            }
        }
        out
    }

    /// One linear constraint per likelihood atom, negated when guessed false.
    fn lik_forms(&self, l: &[bool], x: &dyn Fn(&Formula) -> Vec<(String, Rational)>) -> Vec<LinForm> {
        self.atoms
            .liks
            .iter()
            .zip(l)
            .map(|(atom, &truth)| {
                let Formula::Lik(t) = atom else { unreachable!() };
                let mut terms = Vec::new();
                for (a, phi) in &t.terms {
                    for (var, c) in x(phi) {
                        terms.push((var, c * int(*a)));
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
                if truth {
                    LinForm::Atom(c)
                } else {
                    LinForm::Atom(c).negate()
                }
            })
            .collect()
    }

    /// A solution of `base` plus some disjunct of `forms`, thinned greedily
    /// by zeroing the variables in `mass` one at a time.
    fn solve(
        &self,
        base: Vec<LinearConstraint>,
        forms: Vec<LinForm>,
        vars: &[String],
        mass: &[String],
    ) -> Option<BTreeMap<String, Rational>> {
        for conj in LinForm::And(forms).dnf() {
            let mut cs = base.clone();
            cs.extend(conj);
            let mut sys: crate::linarith::LinearConstraintSystem = cs.into_iter().collect();
            for v in vars {
                sys.declare(v.clone());
            }
            let Feasibility::Sat(mut sol) = feasible(&sys) else {
                continue;
            };
            if self.sparsify {
                let positive = |sol: &BTreeMap<String, Rational>| {
                    mass.iter().filter(|m| get(sol, m).is_positive()).count()
                };
                for m in mass {
                    if positive(&sol) <= self.support {
                        break;
                    }
                    if get(&sol, m).is_zero() {
                        continue;
                    }
                    let mut trial = sys.clone();
                    trial.push(LinearConstraint::eq([(m.clone(), Rational::one())], Rational::zero()));
                    if let Feasibility::Sat(s) = feasible(&trial) {
                        sys = trial;
                        sol = s;
                    }
                }
            }
            return Some(sol);
        }
        None
    }

    fn awareness(&self, l: &[bool], kn: &[bool]) -> Result<Option<EpistemicStructure>, DecisionError> {
        let atoms = self.atoms;
        let nk = atoms.knows.len();
        let enc = |c: &str, g: &Formula| {
            atoms.rename(
                g,
                &|p| prop_at(c, p),
                &|j| if kn[j] { k_at(c, j) } else { Formula::False },
                &|i| constant(l[i]),
            )
        };
        let gamma = |c: &str| -> Vec<Formula> {
            (0..nk).filter(|&j| kn[j]).map(|j| enc(c, atoms.karg(j))).collect()
        };
        let s5 = self.tag.modal == Modal::S5;
        let mut actual = vec![enc("w", self.f)];
        if s5 {
            actual.extend(gamma("w"));
        }
        let Some(wm) = propositionally_consistent(&actual) else {
            return Ok(None);
        };
        let mut falsifiers = Vec::new();
        for j in (0..nk).filter(|&j| !kn[j]) {
            let c = format!("z{j}");
            let mut cs = gamma(&c);
            cs.push(Formula::not(enc(&c, atoms.karg(j))));
            match propositionally_consistent(&cs) {
                Some(m) => falsifiers.push((c, m)),
                None => return Ok(None),
            }
        }
        let cands = self.candidates(&gamma);
        if cands.is_empty() {
            return Ok(None);
        }
        let ys: Vec<String> = cands.iter().map(|c| format!("y{}", &c.name[1..])).collect();
        let mut base: Vec<LinearConstraint> = ys
            .iter()
            .map(|y| LinearConstraint::ge([(y.clone(), Rational::one())], Rational::zero()))
            .collect();
        base.push(LinearConstraint::eq(
            ys.iter().map(|y| (y.clone(), Rational::one())),
            Rational::one(),
        ));
        let x = |phi: &Formula| -> Vec<(String, Rational)> {
            cands
                .iter()
                .zip(&ys)
                .filter(|(c, _)| eval_prop(&c.v, phi).unwrap_or(false))
                .map(|(_, y)| (y.clone(), Rational::one()))
                .collect()
        };
        let forms = self.lik_forms(l, &x);
        let Some(sol) = self.solve(base, forms, &ys, &ys) else {
            return Ok(None);
        };

        let aware = |m: &Model, c: &str| -> BTreeSet<Formula> {
            (0..nk)
                .filter(|&j| kn[j] && value(m, &k_at(c, j)))
                .map(|j| atoms.karg(j).clone())
                .collect()
        };
        let mut s = EpistemicStructure::new(self.tag);
        let mut mu = BTreeMap::new();
        s.add_world("w", assignment_at(&wm, "w", &atoms.props));
        s.a.insert("w".into(), aware(&wm, "w"));
        if s5 {
            s.possible.insert("w".into());
            mu.insert("w".to_string(), Rational::zero());
        }
        for (c, y) in cands.iter().zip(&ys) {
            let p = get(&sol, y);
            if !p.is_positive() {
                continue;
            }
            s.add_world(c.name.clone(), assignment_at(&c.model, &c.name, &atoms.props));
            s.a.insert(c.name.clone(), aware(&c.model, &c.name));
            s.possible.insert(c.name.clone());
            mu.insert(c.name.clone(), p);
        }
        for (c, m) in &falsifiers {
            s.add_world(c.clone(), assignment_at(m, c, &atoms.props));
            s.a.insert(c.clone(), aware(m, c));
            s.possible.insert(c.clone());
            mu.insert(c.clone(), Rational::zero());
        }
        s.mu = Some(Distribution(mu));
        Ok(Some(s))
    }

    fn impossible(&self, l: &[bool], kn: &[bool]) -> Result<Option<EpistemicStructure>, DecisionError> {
        let atoms = self.atoms;
        let nk = atoms.knows.len();
        let enc = |c: &str, g: &Formula| {
            atoms.rename(g, &|p| prop_at(c, p), &|j| constant(kn[j]), &|i| constant(l[i]))
        };
        let gamma = |c: &str| -> Vec<Formula> {
            (0..nk).filter(|&j| kn[j]).map(|j| enc(c, atoms.karg(j))).collect()
        };
        let modal = self.tag.modal;
        let mut actual = vec![enc("w", self.f)];
        if modal == Modal::S5 {
            actual.extend(gamma("w"));
        }
        let Some(wm) = propositionally_consistent(&actual) else {
            return Ok(None);
        };
        let cands = self.candidates(&gamma);
        if modal == Modal::KD45 && cands.is_empty() {
            return Ok(None);
        }
        // formulas every impossible world in W' must contain
        let base_c: BTreeSet<Formula> = (0..nk)
            .filter(|&j| kn[j] && !atoms.karg(j).is_likelihood_atom())
            .map(|j| atoms.karg(j).clone())
            .collect();
        let args = self.lik_args();
        let ys: Vec<String> = cands.iter().map(|c| format!("y{}", &c.name[1..])).collect();
        let zs: Vec<String> = (0..args.len()).map(|a| format!("z{a}")).collect();
        let m = "m".to_string();
        let one = Rational::one;
        let zero = Rational::zero;
        let mut base: Vec<LinearConstraint> = ys
            .iter()
            .chain([&m])
            .map(|y| LinearConstraint::ge([(y.clone(), one())], zero()))
            .collect();
        for (z, phi) in zs.iter().zip(&args) {
            base.push(LinearConstraint::ge([(z.clone(), one())], zero()));
            let diff = [(z.clone(), one()), (m.clone(), -one())];
            base.push(if base_c.contains(phi) {
                LinearConstraint::eq(diff, zero())
            } else {
                LinearConstraint::le(diff, zero())
            });
        }
        base.push(LinearConstraint::eq(
            ys.iter().chain([&m]).map(|y| (y.clone(), one())),
            one(),
        ));
        let x = |phi: &Formula| -> Vec<(String, Rational)> {
            let mut out: Vec<(String, Rational)> = cands
                .iter()
                .zip(&ys)
                .filter(|(c, _)| eval_prop(&c.v, phi).unwrap_or(false))
                .map(|(_, y)| (y.clone(), one()))
                .collect();
            let a = args.iter().position(|g| g == phi).expect("likelihood argument");
            out.push((zs[a].clone(), one()));
            out
        };
        let forms = self.lik_forms(l, &x);
        let mut vars = ys.clone();
        vars.extend(zs.iter().cloned());
        vars.push(m.clone());
        let mut mass = ys.clone();
        mass.push(m.clone());
        let Some(sol) = self.solve(base, forms, &vars, &mass) else {
            return Ok(None);
        };

        let mut s = EpistemicStructure::new(self.tag);
        let mut mu: BTreeMap<String, Rational> = BTreeMap::new();
        s.add_world("w", assignment_at(&wm, "w", &atoms.props));
        if modal == Modal::S5 {
            s.possible.insert("w".into());
            mu.insert("w".into(), zero());
        }
        let mut any_possible = modal == Modal::S5;
        for (c, y) in cands.iter().zip(&ys) {
            let p = get(&sol, y);
            if !p.is_positive() {
                continue;
            }
            any_possible = true;
            s.add_world(c.name.clone(), assignment_at(&c.model, &c.name, &atoms.props));
            s.possible.insert(c.name.clone());
            mu.insert(c.name.clone(), p);
        }
        if !any_possible && modal == Modal::KD45 {
            let c = &cands[0];
            s.add_world(c.name.clone(), assignment_at(&c.model, &c.name, &atoms.props));
            s.possible.insert(c.name.clone());
            mu.insert(c.name.clone(), zero());
        }

        // nested chain: the k-th world adds the k-th argument by decreasing z
        let mut order: Vec<usize> = (0..args.len()).collect();
        order.sort_by(|&a, &b| get(&sol, &zs[b]).cmp(&get(&sol, &zs[a])).then(a.cmp(&b)));
        let total = get(&sol, &m);
        let mut set = base_c.clone();
        let mut upper = total;
        let mut chain = Vec::new();
        for k in 0..=order.len() {
            let next = order.get(k).map_or_else(zero, |&a| get(&sol, &zs[a]));
            let mass = &upper - &next;
            if mass.is_positive() {
                chain.push((set.clone(), mass));
            }
            if let Some(&a) = order.get(k) {
                set.insert(args[a].clone());
            }
            upper = next;
        }
        for (k, (c, p)) in chain.into_iter().enumerate() {
            let name = format!("x{k}");
            s.possible.insert(name.clone());
            s.c.insert(name.clone(), WorldFormulas::Explicit(c));
            mu.insert(name, p);
        }
        let needs_falsifier = (0..nk).any(|j| !kn[j] && !atoms.karg(j).is_likelihood_atom());
        if needs_falsifier {
            s.possible.insert("xf".into());
            s.c.insert("xf".into(), WorldFormulas::Explicit(base_c));
            mu.insert("xf".into(), zero());
        }
        s.mu = Some(Distribution(mu));
        Ok(Some(s))
    }
}

fn get(sol: &BTreeMap<String, Rational>, v: &str) -> Rational {
    sol.get(v).cloned().unwrap_or_else(Rational::zero)
}

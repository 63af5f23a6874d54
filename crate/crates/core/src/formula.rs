//! Formulas of the single-agent epistemic language and its likelihood
//! extension.
//!
//! The AST only stores negation, conjunction, `K` and likelihood atoms;
//! disjunction, implication and equivalence are desugared by the parser.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::FormulaError;
use crate::linarith::Rational;

/// Comparison used by a likelihood atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
        }
    }

    /// Compares `lhs` against `rhs` under this relation.
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

/// `a1 l(f1) + ... + an l(fn) rel c` with integer coefficients and bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LikelihoodTerm {
    pub terms: Vec<(i64, Formula)>,
    pub relation: Relation,
    pub bound: i64,
}

impl LikelihoodTerm {
    pub fn new(terms: Vec<(i64, Formula)>, relation: Relation, bound: i64) -> Self {
        LikelihoodTerm {
            terms,
            relation,
            bound,
        }
    }

    /// Likelihood arguments in order of first appearance, without repeats.
    pub fn arguments(&self) -> Vec<&Formula> {
        let mut out: Vec<&Formula> = Vec::new();
        for (_, f) in &self.terms {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Prop(String),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Know(Box<Formula>),
    Lik(LikelihoodTerm),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn know(f: Formula) -> Formula {
        Formula::Know(Box::new(f))
    }

    /// `~(~a & ~b)`
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `~(a & ~b)`
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::True,
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::False,
            Some(first) => iter.fold(first, Formula::or),
        }
    }

    pub fn lik(terms: Vec<(i64, Formula)>, relation: Relation, bound: i64) -> Formula {
        Formula::Lik(LikelihoodTerm::new(terms, relation, bound))
    }

    /// No `K` and no likelihood atom anywhere.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Prop(_) | Formula::True | Formula::False => true,
            Formula::Not(f) => f.is_propositional(),
            Formula::And(a, b) => a.is_propositional() && b.is_propositional(),
            Formula::Know(_) | Formula::Lik(_) => false,
        }
    }

    pub fn has_likelihood(&self) -> bool {
        match self {
            Formula::Prop(_) | Formula::True | Formula::False => false,
            Formula::Not(f) | Formula::Know(f) => f.has_likelihood(),
            Formula::And(a, b) => a.has_likelihood() || b.has_likelihood(),
            Formula::Lik(_) => true,
        }
    }

    pub fn is_likelihood_atom(&self) -> bool {
        matches!(self, Formula::Lik(_))
    }

    /// AST node count; likelihood arguments are counted.
    pub fn size(&self) -> usize {
        match self {
            Formula::Prop(_) | Formula::True | Formula::False => 1,
            Formula::Not(f) | Formula::Know(f) => 1 + f.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Lik(l) => 1 + l.terms.iter().map(|(_, f)| f.size()).sum::<usize>(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Formula::Prop(_) | Formula::True | Formula::False => 0,
            Formula::Not(f) | Formula::Know(f) => 1 + f.height(),
            Formula::And(a, b) => 1 + a.height().max(b.height()),
            Formula::Lik(l) => 1 + l.terms.iter().map(|(_, f)| f.height()).max().unwrap_or(0),
        }
    }

    /// Proposition names occurring anywhere in the formula.
    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prop(p) => {
                out.insert(p.clone());
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) | Formula::Know(f) => f.collect_props(out),
            Formula::And(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
            Formula::Lik(l) => {
                for (_, f) in &l.terms {
                    f.collect_props(out);
                }
            }
        }
    }

    /// Arguments of every `K` subformula, deduplicated, in subformula order.
    pub fn knowledge_arguments(&self) -> Vec<Formula> {
        subformulas(self)
            .into_iter()
            .filter_map(|f| match f {
                Formula::Know(inner) => Some(*inner),
                _ => None,
            })
            .fold(Vec::new(), |mut acc, f| {
                if !acc.contains(&f) {
                    acc.push(f);
                }
                acc
            })
    }

    /// `K` subformulas not nested inside another `K`.
    pub fn maximal_knowledge_subformulas(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect_maximal_k(&mut out);
        out.sort_by(subformula_order);
        out.dedup();
        out
    }

    fn collect_maximal_k(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::Know(_) => out.push(self.clone()),
            Formula::Not(f) => f.collect_maximal_k(out),
            Formula::And(a, b) => {
                a.collect_maximal_k(out);
                b.collect_maximal_k(out);
            }
            _ => {}
        }
    }

    /// Likelihood atoms occurring in the formula, in subformula order.
    pub fn likelihood_atoms(&self) -> Vec<Formula> {
        subformulas(self)
            .into_iter()
            .filter(Formula::is_likelihood_atom)
            .collect()
    }

    /// Distinct arguments of all likelihood atoms, in subformula order.
    pub fn likelihood_arguments(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = Vec::new();
        for atom in self.likelihood_atoms() {
            if let Formula::Lik(l) = atom {
                for arg in l.arguments() {
                    if !out.contains(arg) {
                        out.push(arg.clone());
                    }
                }
            }
        }
        out.sort_by(subformula_order);
        out
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        render_into(self, Prec::Top, &mut s);
        s
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::parser::parse(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    AndRight,
    Operand,
}

fn render_into(f: &Formula, ctx: Prec, out: &mut String) {
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Not(inner) => {
            out.push('~');
            render_operand(inner, out);
        }
        Formula::Know(inner) => {
            out.push_str("K ");
            render_operand(inner, out);
        }
        Formula::And(a, b) => {
            let parens = ctx >= Prec::AndRight;
            if parens {
                out.push('(');
            }
            // `&` is left-associative, so only the right child needs grouping
            render_into(a, Prec::Top, out);
            out.push_str(" & ");
            render_into(b, Prec::AndRight, out);
            if parens {
                out.push(')');
            }
        }
        Formula::Lik(l) => {
            let parens = ctx >= Prec::Operand;
            if parens {
                out.push('(');
            }
            for (i, (coef, arg)) in l.terms.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                if *coef != 1 {
                    out.push_str(&coef.to_string());
                    out.push(' ');
                }
                out.push_str("l(");
                render_into(arg, Prec::Top, out);
                out.push(')');
            }
            out.push(' ');
            out.push_str(l.relation.symbol());
            out.push(' ');
            out.push_str(&l.bound.to_string());
            if parens {
                out.push(')');
            }
        }
    }
}

fn render_operand(f: &Formula, out: &mut String) {
    match f {
        Formula::And(..) => {
            out.push('(');
            render_into(f, Prec::Top, out);
            out.push(')');
        }
        _ => render_into(f, Prec::Operand, out),
    }
}

/// Order used for every deterministic formula listing: children before
/// parents (by height), ties broken by the rendered string.
pub fn subformula_order(a: &Formula, b: &Formula) -> std::cmp::Ordering {
    a.height()
        .cmp(&b.height())
        .then_with(|| a.render().cmp(&b.render()))
        .then_with(|| a.cmp(b))
}

/// All subformulas of `f`, including `f` itself and likelihood arguments.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    let mut set = BTreeSet::new();
    collect_subformulas(f, &mut set);
    let mut out: Vec<Formula> = set.into_iter().collect();
    out.sort_by(subformula_order);
    out
}

fn collect_subformulas(f: &Formula, set: &mut BTreeSet<Formula>) {
    if set.contains(f) {
        return;
    }
    match f {
        Formula::Prop(_) | Formula::True | Formula::False => {}
        Formula::Not(inner) | Formula::Know(inner) => collect_subformulas(inner, set),
        Formula::And(a, b) => {
            collect_subformulas(a, set);
            collect_subformulas(b, set);
        }
        Formula::Lik(l) => {
            for (_, arg) in &l.terms {
                collect_subformulas(arg, set);
            }
        }
    }
    set.insert(f.clone());
}

/// Subformulas plus `l(psi) > 0` for every propositional subformula `psi`.
pub fn sub_closure_p(f: &Formula) -> Vec<Formula> {
    let subs = subformulas(f);
    let mut set: BTreeSet<Formula> = subs.iter().cloned().collect();
    for psi in &subs {
        if psi.is_propositional() {
            set.insert(Formula::lik(vec![(1, psi.clone())], Relation::Gt, 0));
        }
    }
    let mut out: Vec<Formula> = set.into_iter().collect();
    out.sort_by(subformula_order);
    out
}

/// Truth values for a finite vocabulary of primitive propositions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthAssignment(pub BTreeMap<String, bool>);

impl TruthAssignment {
    pub fn new() -> Self {
        TruthAssignment(BTreeMap::new())
    }

    pub fn get(&self, prop: &str) -> Option<bool> {
        self.0.get(prop).copied()
    }

    pub fn set(&mut self, prop: impl Into<String>, value: bool) {
        self.0.insert(prop.into(), value);
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    /// The assignment over `vocab` whose bits are read from `bits`
    /// (first proposition is the least significant bit).
    pub fn from_bits(vocab: &[String], bits: u64) -> Self {
        TruthAssignment(
            vocab
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), bits >> i & 1 == 1))
                .collect(),
        )
    }

    /// Every assignment over `vocab`, in bit order.
    pub fn enumerate(vocab: &[String]) -> impl Iterator<Item = TruthAssignment> + '_ {
        (0..1u64 << vocab.len()).map(move |bits| TruthAssignment::from_bits(vocab, bits))
    }
}

impl FromIterator<(String, bool)> for TruthAssignment {
    fn from_iter<I: IntoIterator<Item = (String, bool)>>(iter: I) -> Self {
        TruthAssignment(iter.into_iter().collect())
    }
}

/// Classical evaluation of a propositional formula.
pub fn eval_prop(v: &TruthAssignment, f: &Formula) -> Result<bool, FormulaError> {
    match f {
        Formula::Prop(p) => v
            .get(p)
            .ok_or_else(|| FormulaError::UnboundProposition(p.clone())),
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Not(inner) => Ok(!eval_prop(v, inner)?),
        Formula::And(a, b) => Ok(eval_prop(v, a)? && eval_prop(v, b)?),
        Formula::Know(_) | Formula::Lik(_) => Err(FormulaError::NotPropositional(f.render())),
    }
}

/// Whether some assignment over the propositions of `formulas` satisfies
/// all of them. `K` subformulas and likelihood atoms are treated as fresh
/// atoms.
pub fn propositionally_consistent(formulas: &[Formula]) -> Option<BTreeMap<Formula, bool>> {
    use crate::decision::search::{solve, Node};
    let mut atoms: Vec<Formula> = Vec::new();
    for f in formulas {
        collect_prop_atoms(f, &mut atoms);
    }
    let index: BTreeMap<&Formula, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    fn compile(f: &Formula, index: &BTreeMap<&Formula, usize>) -> Node {
        match f {
            Formula::True => Node::Const(true),
            Formula::False => Node::Const(false),
            Formula::Not(inner) => Node::Not(Box::new(compile(inner, index))),
            Formula::And(a, b) => Node::And(Box::new(compile(a, index)), Box::new(compile(b, index))),
            _ => Node::Var(index[f]),
        }
    }
    let nodes: Vec<Node> = formulas.iter().map(|f| compile(f, &index)).collect();
    let found = solve(&nodes, atoms.len())?;
    Some(atoms.iter().cloned().zip(found).collect())
}

fn collect_prop_atoms(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Not(inner) => collect_prop_atoms(inner, out),
        Formula::And(a, b) => {
            collect_prop_atoms(a, out);
            collect_prop_atoms(b, out);
        }
        Formula::Prop(_) | Formula::Know(_) | Formula::Lik(_) => {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
    }
}

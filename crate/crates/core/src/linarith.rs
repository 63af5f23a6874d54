//! Exact linear arithmetic: Fourier-Motzkin feasibility over the rationals
//! and validity of boolean combinations of linear constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Always `"num/den"`, in lowest terms with a positive denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintRel {
    Le,
    Lt,
    Eq,
}

impl ConstraintRel {
    pub fn symbol(self) -> &'static str {
        match self {
            ConstraintRel::Le => "<=",
            ConstraintRel::Lt => "<",
            ConstraintRel::Eq => "=",
        }
    }
}

/// `sum coefficients[x] * x rel bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearConstraint {
    pub coefficients: BTreeMap<String, Rational>,
    pub relation: ConstraintRel,
    pub bound: Rational,
}

impl LinearConstraint {
    pub fn new<I, S>(terms: I, relation: ConstraintRel, bound: Rational) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut coefficients: BTreeMap<String, Rational> = BTreeMap::new();
        for (v, a) in terms {
            *coefficients.entry(v.into()).or_insert_with(Rational::zero) += a;
        }
        coefficients.retain(|_, a| !a.is_zero());
        LinearConstraint {
            coefficients,
            relation,
            bound,
        }
    }

    pub fn le<I, S>(terms: I, bound: Rational) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        Self::new(terms, ConstraintRel::Le, bound)
    }

    pub fn lt<I, S>(terms: I, bound: Rational) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        Self::new(terms, ConstraintRel::Lt, bound)
    }

    pub fn eq<I, S>(terms: I, bound: Rational) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        Self::new(terms, ConstraintRel::Eq, bound)
    }

    /// `sum >= bound`, stored as `-sum <= -bound`.
    pub fn ge<I, S>(terms: I, bound: Rational) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        Self::le(terms.into_iter().map(|(v, a)| (v, -a)), -bound)
    }

    pub fn gt<I, S>(terms: I, bound: Rational) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        Self::lt(terms.into_iter().map(|(v, a)| (v, -a)), -bound)
    }

    pub fn lhs(&self, assignment: &BTreeMap<String, Rational>) -> Rational {
        let mut sum = Rational::zero();
        for (v, a) in &self.coefficients {
            if let Some(x) = assignment.get(v) {
                sum += a * x;
            }
        }
        sum
    }

    /// Unassigned variables count as 0.
    pub fn satisfied_by(&self, assignment: &BTreeMap<String, Rational>) -> bool {
        let lhs = self.lhs(assignment);
        match self.relation {
            ConstraintRel::Le => lhs <= self.bound,
            ConstraintRel::Lt => lhs < self.bound,
            ConstraintRel::Eq => lhs == self.bound,
        }
    }

    /// Multiplies both sides by `factor`, which must be positive.
    pub fn scaled(&self, factor: &Rational) -> LinearConstraint {
        assert!(factor.is_positive(), "scaling factor must be positive");
        LinearConstraint {
            coefficients: self
                .coefficients
                .iter()
                .map(|(v, a)| (v.clone(), a * factor))
                .collect(),
            relation: self.relation,
            bound: &self.bound * factor,
        }
    }

    /// The negation as a disjunction of constraints.
    pub fn negation(&self) -> Vec<LinearConstraint> {
        let neg: Vec<(String, Rational)> = self
            .coefficients
            .iter()
            .map(|(v, a)| (v.clone(), -a.clone()))
            .collect();
        let pos: Vec<(String, Rational)> = self
            .coefficients
            .iter()
            .map(|(v, a)| (v.clone(), a.clone()))
            .collect();
        match self.relation {
            ConstraintRel::Le => vec![LinearConstraint::lt(neg, -self.bound.clone())],
            ConstraintRel::Lt => vec![LinearConstraint::le(neg, -self.bound.clone())],
            ConstraintRel::Eq => vec![
                LinearConstraint::lt(pos, self.bound.clone()),
                LinearConstraint::lt(neg, -self.bound.clone()),
            ],
        }
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            write!(f, "0")?;
        }
        for (i, (v, a)) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}*{v}")?;
        }
        write!(f, " {} {}", self.relation.symbol(), self.bound)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearConstraintSystem {
    pub constraints: Vec<LinearConstraint>,
    pub variables: BTreeSet<String>,
}

impl LinearConstraintSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, var: impl Into<String>) {
        self.variables.insert(var.into());
    }

    pub fn push(&mut self, c: LinearConstraint) {
        self.variables.extend(c.coefficients.keys().cloned());
        self.constraints.push(c);
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn satisfied_by(&self, assignment: &BTreeMap<String, Rational>) -> bool {
        self.constraints.iter().all(|c| c.satisfied_by(assignment))
    }
}

impl FromIterator<LinearConstraint> for LinearConstraintSystem {
    fn from_iter<T: IntoIterator<Item = LinearConstraint>>(iter: T) -> Self {
        let mut sys = LinearConstraintSystem::new();
        for c in iter {
            sys.push(c);
        }
        sys
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Sat(BTreeMap<String, Rational>),
    Unsat,
}

impl Feasibility {
    pub fn is_sat(&self) -> bool {
        matches!(self, Feasibility::Sat(_))
    }

    pub fn witness(&self) -> Option<&BTreeMap<String, Rational>> {
        match self {
            Feasibility::Sat(w) => Some(w),
            Feasibility::Unsat => None,
        }
    }
}

// Dense row `sum coef[i] x_i (< | <=) bound` over variable indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    coef: Vec<Rational>,
    bound: Rational,
    strict: bool,
}

impl Row {
    fn is_constant(&self) -> bool {
        self.coef.iter().all(Zero::is_zero)
    }

    fn constant_holds(&self) -> bool {
        if self.strict {
            Rational::zero() < self.bound
        } else {
            Rational::zero() <= self.bound
        }
    }

    // Positive rescaling so the first nonzero coefficient has magnitude 1.
    fn normalize(mut self) -> Row {
        if let Some(lead) = self.coef.iter().find(|a| !a.is_zero()).map(|a| a.abs()) {
            if !lead.is_one() {
                for a in &mut self.coef {
                    *a /= &lead;
                }
                self.bound /= &lead;
            }
        }
        self
    }
}

// Equality `x_var = (bound - sum_{j != var} coef[j] x_j) / coef[var]`.
struct Substitution {
    var: usize,
    coef: Vec<Rational>,
    bound: Rational,
}

struct Level {
    var: usize,
    rows: Vec<Row>,
}

// Indices of the input rows a derived row combines.
type History = BTreeSet<usize>;
type Tracked = (Row, History);

/// Feasibility with the default elimination order (fewest generated rows
/// first, ties by name).
pub fn feasible(sys: &LinearConstraintSystem) -> Feasibility {
    solve(sys, None)
}

/// Feasibility eliminating variables in the given order; variables missing
/// from `order` are eliminated afterwards in name order.
pub fn feasible_with_order(sys: &LinearConstraintSystem, order: &[String]) -> Feasibility {
    solve(sys, Some(order))
}

fn solve(sys: &LinearConstraintSystem, order: Option<&[String]>) -> Feasibility {
    let mut names: Vec<String> = sys.variables.iter().cloned().collect();
    for c in &sys.constraints {
        for v in c.coefficients.keys() {
            if !sys.variables.contains(v) && !names.contains(v) {
                names.push(v.clone());
            }
        }
    }
    let index: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let n = names.len();

    let mut rows = Vec::new();
    let mut equalities = Vec::new();
    for c in &sys.constraints {
        let mut coef = vec![Rational::zero(); n];
        for (v, a) in &c.coefficients {
            coef[index[v.as_str()]] = a.clone();
        }
        match c.relation {
            ConstraintRel::Eq => equalities.push((coef, c.bound.clone())),
            rel => rows.push(Row {
                coef,
                bound: c.bound.clone(),
                strict: rel == ConstraintRel::Lt,
            }),
        }
    }

    let mut subs: Vec<Substitution> = Vec::new();
    let mut eliminated = vec![false; n];
    while let Some((coef, bound)) = equalities.pop() {
        let Some(var) = coef.iter().position(|a| !a.is_zero()) else {
            if bound.is_zero() {
                continue;
            }
            return Feasibility::Unsat;
        };
        let pivot = coef[var].clone();
        let substitute = |target: &mut Vec<Rational>, target_bound: &mut Rational| {
            let t = target[var].clone();
            if t.is_zero() {
                return;
            }
            let factor = &t / &pivot;
            for (j, a) in coef.iter().enumerate() {
                target[j] -= &factor * a;
            }
            *target_bound -= &factor * &bound;
        };
        for (c, b) in equalities.iter_mut() {
            substitute(c, b);
        }
        for row in rows.iter_mut() {
            substitute(&mut row.coef, &mut row.bound);
        }
        eliminated[var] = true;
        subs.push(Substitution { var, coef, bound });
    }

    let rows: Vec<(Row, History)> = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| (r, BTreeSet::from([i])))
        .collect();
    let mut rows = match tidy(rows) {
        Some(r) => r,
        None => return Feasibility::Unsat,
    };

    let mut explicit: Vec<usize> = Vec::new();
    if let Some(order) = order {
        for v in order {
            if let Some(&i) = index.get(v.as_str()) {
                if !eliminated[i] && !explicit.contains(&i) {
                    explicit.push(i);
                }
            }
        }
    }
    let mut levels: Vec<Level> = Vec::new();
    let mut levels_done = 0;
    loop {
        let remaining: Vec<usize> = (0..n)
            .filter(|&i| !eliminated[i] && rows.iter().any(|(r, _)| !r.coef[i].is_zero()))
            .collect();
        if remaining.is_empty() {
            break;
        }
        let var = match order {
            Some(_) => explicit
                .iter()
                .copied()
                .find(|i| remaining.contains(i))
                .unwrap_or(remaining[0]),
            None => *remaining
                .iter()
                .min_by_key(|&&i| {
                    let pos = rows.iter().filter(|(r, _)| r.coef[i].is_positive()).count();
                    let neg = rows.iter().filter(|(r, _)| r.coef[i].is_negative()).count();
                    (pos * neg) as isize - (pos + neg) as isize
                })
                .expect("nonempty"),
        };
        eliminated[var] = true;
        levels_done += 1;
        let (touching, mut rest): (Vec<Tracked>, Vec<Tracked>) =
            rows.into_iter().partition(|(r, _)| !r.coef[var].is_zero());
        let (pos, neg): (Vec<&Tracked>, Vec<&Tracked>) =
            touching.iter().partition(|(r, _)| r.coef[var].is_positive());
        for (p, hp) in &pos {
            for (q, hq) in &neg {
                let history: History = hp.union(hq).copied().collect();
                // Chernikov: more than k+1 sources after k eliminations is redundant
                if history.len() > levels_done + 1 {
                    continue;
                }
                let a = p.coef[var].clone();
                let b = -q.coef[var].clone();
                let coef: Vec<Rational> = p
                    .coef
                    .iter()
                    .zip(&q.coef)
                    .map(|(x, y)| x / &a + y / &b)
                    .collect();
                let row = Row {
                    coef,
                    bound: &p.bound / &a + &q.bound / &b,
                    strict: p.strict || q.strict,
                };
                rest.push((row, history));
            }
        }
        levels.push(Level {
            var,
            rows: touching.into_iter().map(|(r, _)| r).collect(),
        });
        rows = match tidy(rest) {
            Some(r) => r,
            None => return Feasibility::Unsat,
        };
    }

    let mut values: Vec<Rational> = vec![Rational::zero(); n];
    for level in levels.iter().rev() {
        values[level.var] = pick(level, &values);
    }
    for s in subs.iter().rev() {
        let mut rhs = s.bound.clone();
        for (j, a) in s.coef.iter().enumerate() {
            if j != s.var {
                rhs -= a * &values[j];
            }
        }
        values[s.var] = rhs / &s.coef[s.var];
    }
    let witness: BTreeMap<String, Rational> = names.into_iter().zip(values).collect();
    assert!(
        sys.satisfied_by(&witness),
        "internal invariant violated: Fourier-Motzkin witness does not satisfy the system"
    );
    Feasibility::Sat(witness)
}

// Drops satisfied constant rows and duplicates (keeping the shorter
// history); None if a constant row fails.
fn tidy(rows: Vec<(Row, History)>) -> Option<Vec<(Row, History)>> {
    let mut seen: BTreeMap<Row, History> = BTreeMap::new();
    for (row, h) in rows {
        if row.is_constant() {
            if !row.constant_holds() {
                return None;
            }
            continue;
        }
        let row = row.normalize();
        match seen.get(&row) {
            Some(old) if old.len() <= h.len() => {}
            _ => {
                seen.insert(row, h);
            }
        }
    }
    // a strict row makes its non-strict twin redundant
    let out = seen
        .iter()
        .filter(|(r, _)| {
            r.strict
                || !seen.contains_key(&Row {
                    coef: r.coef.clone(),
                    bound: r.bound.clone(),
                    strict: true,
                })
        })
        .map(|(r, h)| (r.clone(), h.clone()))
        .collect();
    Some(out)
}

fn pick(level: &Level, values: &[Rational]) -> Rational {
    let v = level.var;
    let mut lo: Option<(Rational, bool)> = None;
    let mut hi: Option<(Rational, bool)> = None;
    for row in &level.rows {
        let mut rest = row.bound.clone();
        for (j, a) in row.coef.iter().enumerate() {
            if j != v && !a.is_zero() {
                rest -= a * &values[j];
            }
        }
        let limit = rest / &row.coef[v];
        if row.coef[v].is_positive() {
            let tighter = match &hi {
                None => true,
                Some((h, s)) => limit < *h || (limit == *h && row.strict && !s),
            };
            if tighter {
                hi = Some((limit, row.strict));
            }
        } else {
            let tighter = match &lo {
                None => true,
                Some((l, s)) => limit > *l || (limit == *l && row.strict && !s),
            };
            if tighter {
                lo = Some((limit, row.strict));
            }
        }
    }
    match (lo, hi) {
        (Some((l, _)), Some((h, _))) => (l + h) / int(2),
        (Some((l, strict)), None) => {
            if strict {
                l + Rational::one()
            } else {
                l
            }
        }
        (None, Some((h, strict))) => {
            if strict {
                h - Rational::one()
            } else {
                h
            }
        }
        (None, None) => Rational::zero(),
    }
}

/// Boolean combination of linear constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinForm {
    Atom(LinearConstraint),
    Not(Box<LinForm>),
    And(Vec<LinForm>),
    Or(Vec<LinForm>),
}

impl LinForm {
    pub fn implies(a: LinForm, b: LinForm) -> LinForm {
        LinForm::Or(vec![LinForm::Not(Box::new(a)), b])
    }

    pub fn negate(self) -> LinForm {
        LinForm::Not(Box::new(self))
    }

    /// Disjunctive normal form as a list of conjunctions.
    pub fn dnf(&self) -> Vec<Vec<LinearConstraint>> {
        dnf(self, false)
    }
}

fn dnf(f: &LinForm, negated: bool) -> Vec<Vec<LinearConstraint>> {
    match (f, negated) {
        (LinForm::Atom(c), false) => vec![vec![c.clone()]],
        (LinForm::Atom(c), true) => c.negation().into_iter().map(|d| vec![d]).collect(),
        (LinForm::Not(g), _) => dnf(g, !negated),
        (LinForm::And(gs), false) | (LinForm::Or(gs), true) => {
            let mut acc: Vec<Vec<LinearConstraint>> = vec![Vec::new()];
            for g in gs {
                let part = dnf(g, negated);
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for p in &part {
                        let mut conj = a.clone();
                        conj.extend(p.iter().cloned());
                        next.push(conj);
                    }
                }
                acc = next;
            }
            acc
        }
        (LinForm::Or(gs), false) | (LinForm::And(gs), true) => {
            gs.iter().flat_map(|g| dnf(g, negated)).collect()
        }
    }
}

/// Some disjunct of the DNF is feasible; returns its witness.
pub fn satisfiable_lin_form(f: &LinForm) -> Option<BTreeMap<String, Rational>> {
    f.dnf().into_iter().find_map(|conj| {
        match feasible(&conj.into_iter().collect()) {
            Feasibility::Sat(w) => Some(w),
            Feasibility::Unsat => None,
        }
    })
}

/// Holds under every real assignment.
pub fn valid_lin_form(f: &LinForm) -> bool {
    satisfiable_lin_form(&f.clone().negate()).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &str, a: i64) -> (String, Rational) {
        (v.to_string(), int(a))
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert_eq!(format_rational(&int(1)), "1/1");
    }

    #[test]
    fn unit_square_with_sum() {
        let sys: LinearConstraintSystem = vec![
            LinearConstraint::ge([t("x", 1)], int(0)),
            LinearConstraint::le([t("x", 1)], int(1)),
            LinearConstraint::eq([t("x", 1), t("y", 1)], int(1)),
            LinearConstraint::ge([t("y", 1)], int(0)),
        ]
        .into_iter()
        .collect();
        let w = feasible(&sys);
        assert!(sys.satisfied_by(w.witness().unwrap()));
    }

    #[test]
    fn contradictory_bounds() {
        let sys: LinearConstraintSystem = vec![
            LinearConstraint::ge([t("x", 1)], int(1)),
            LinearConstraint::le([t("x", 1)], int(0)),
        ]
        .into_iter()
        .collect();
        assert_eq!(feasible(&sys), Feasibility::Unsat);
    }

    #[test]
    fn strictness_is_tracked() {
        let sys: LinearConstraintSystem = vec![
            LinearConstraint::gt([t("x", 1)], int(0)),
            LinearConstraint::le([t("x", 1)], int(0)),
        ]
        .into_iter()
        .collect();
        assert_eq!(feasible(&sys), Feasibility::Unsat);
        let open: LinearConstraintSystem = vec![
            LinearConstraint::gt([t("x", 1)], int(0)),
            LinearConstraint::lt([t("x", 1)], int(1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(feasible(&open).witness().unwrap()["x"], rat(1, 2));
    }

    #[test]
    fn half_probability() {
        let sys: LinearConstraintSystem = vec![
            LinearConstraint::ge([t("xp", 2)], int(1)),
            LinearConstraint::eq([t("xp", 1), t("xnp", 1)], int(1)),
            LinearConstraint::le([t("xp", 2)], int(1)),
            LinearConstraint::ge([t("xp", 1)], int(0)),
            LinearConstraint::ge([t("xnp", 1)], int(0)),
        ]
        .into_iter()
        .collect();
        assert_eq!(feasible(&sys).witness().unwrap()["xp"], rat(1, 2));
    }

    #[test]
    fn implication_example() {
        let a = LinearConstraint::le([t("x", 2), t("y", 3), t("z", -5)], int(0));
        let b = LinearConstraint::le([t("x", 1), t("y", -1), t("z", -12)], int(0));
        let c = LinearConstraint::le([t("x", 3), t("y", 2), t("z", -17)], int(0));
        let f = LinForm::implies(
            LinForm::And(vec![LinForm::Atom(a), LinForm::Atom(b)]),
            LinForm::Atom(c),
        );
        assert!(valid_lin_form(&f));
    }

    #[test]
    fn trivial_validities() {
        let xx = LinearConstraint::le([t("x", 1), t("x", -1)], int(0));
        assert!(valid_lin_form(&LinForm::Atom(xx)));
        let x1 = LinearConstraint::ge([t("x", 1)], int(1));
        assert!(!valid_lin_form(&LinForm::Atom(x1)));
    }

    #[test]
    fn equality_negation_splits() {
        let e = LinearConstraint::eq([t("x", 1)], int(0));
        let f = LinForm::Atom(e).negate();
        assert!(!valid_lin_form(&f));
        assert!(satisfiable_lin_form(&f).is_some());
    }
}

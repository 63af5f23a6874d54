//! Implicit structures: candidate worlds, a possibility test and a literal
//! theory per world, inducing an impossible-worlds structure.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::ImplicitError;
use crate::formula::{Formula, TruthAssignment};
use crate::structures::{Approach, ClassTag, EpistemicStructure, Modal, WorldFormulas, WorldTheory};

/// `(S, T, C)` with `T` evaluated once per world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicitStructure {
    /// S together with C.
    pub worlds: BTreeMap<String, WorldTheory>,
    /// Worlds passing T.
    pub possible: BTreeSet<String>,
}

impl ImplicitStructure {
    pub fn new(
        worlds: BTreeMap<String, WorldTheory>,
        test: impl Fn(&str, &WorldTheory) -> bool,
    ) -> Self {
        let possible = worlds
            .iter()
            .filter(|(id, c)| test(id, c))
            .map(|(id, _)| id.clone())
            .collect();
        ImplicitStructure { worlds, possible }
    }

    pub fn test(&self, w: &str) -> bool {
        self.possible.contains(w)
    }

    pub fn theory(&self, w: &str) -> Option<&WorldTheory> {
        self.worlds.get(w)
    }
}

/// W holds the worlds with consistent theories, W' those passing T; the
/// impossible worlds keep their theory as C.
pub fn induce(i: &ImplicitStructure) -> EpistemicStructure {
    let mut s = EpistemicStructure::new(ClassTag::new(Modal::K45, Approach::Impossible));
    for (id, c) in &i.worlds {
        if c.is_consistent() {
            s.add_world(id.clone(), c.assignment());
        } else if i.test(id) {
            s.c.insert(id.clone(), WorldFormulas::Theory(c.clone()));
        }
    }
    s.possible = i.possible.clone();
    s
}

/// Replaces T by a stricter test.
pub fn refine(
    i: &ImplicitStructure,
    test: impl Fn(&str, &WorldTheory) -> bool,
) -> Result<ImplicitStructure, ImplicitError> {
    let next = ImplicitStructure::new(i.worlds.clone(), test);
    if let Some(w) = next.possible.difference(&i.possible).next() {
        return Err(ImplicitError::NonMonotone(w.clone()));
    }
    Ok(next)
}

/// Trial division.
pub fn ground_truth(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_name(n: u64) -> String {
    format!("Prime_{n}")
}

/// The number named by a `Prime_n` proposition.
fn prime_number(p: &str) -> Option<u64> {
    p.strip_prefix("Prime_")?.parse().ok()
}

/// One world per guess about which of `nums` are prime; every world is
/// considered possible.
pub fn primality_example(nums: &[u64]) -> Result<ImplicitStructure, ImplicitError> {
    if nums.is_empty() {
        return Err(ImplicitError::NoNumbers);
    }
    if let Some(&n) = nums.iter().find(|&&n| n < 2) {
        return Err(ImplicitError::InvalidNumber(n));
    }
    let uniq: BTreeSet<u64> = nums.iter().copied().collect();
    let vocab: Vec<String> = uniq.iter().map(|&n| prime_name(n)).collect();
    let worlds = TruthAssignment::enumerate(&vocab)
        .enumerate()
        .map(|(k, v)| (format!("w{k}"), WorldTheory::from_assignment(&v)))
        .collect();
    Ok(ImplicitStructure::new(worlds, |_, _| true))
}

/// Test passing exactly the worlds whose primality guesses are all right.
pub fn primality_test(_: &str, c: &WorldTheory) -> bool {
    c.vocabulary.iter().all(|p| match prime_number(p) {
        Some(n) => c.positive.contains(p) == ground_truth(n) && c.negative.contains(p) != ground_truth(n),
        None => true,
    })
}

/// `l1 & ... & ln -> m1 & ... & mk` over literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub antecedent: Vec<(String, bool)>,
    pub conclusion: Vec<(String, bool)>,
}

impl Rule {
    fn fires(&self, v: &TruthAssignment) -> bool {
        self.antecedent
            .iter()
            .all(|(p, b)| v.get(p).unwrap_or(false) == *b)
    }
}

/// Worlds are assignments to the facts and antecedent propositions; each
/// theory adds the conclusions of the rules that fire.
pub fn policy_example(rules: &[Rule], facts: &[String]) -> Result<ImplicitStructure, ImplicitError> {
    let mut antecedents: BTreeSet<String> = facts.iter().cloned().collect();
    for r in rules {
        antecedents.extend(r.antecedent.iter().map(|(p, _)| p.clone()));
    }
    let overlap: Vec<String> = rules
        .iter()
        .flat_map(|r| r.conclusion.iter().map(|(p, _)| p.clone()))
        .filter(|p| antecedents.contains(p))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !overlap.is_empty() {
        return Err(ImplicitError::VocabularyOverlap(overlap.join(", ")));
    }
    let vocab: Vec<String> = antecedents.into_iter().collect();
    let conclusions: BTreeSet<String> = rules
        .iter()
        .flat_map(|r| r.conclusion.iter().map(|(p, _)| p.clone()))
        .collect();
    let worlds = TruthAssignment::enumerate(&vocab)
        .enumerate()
        .map(|(k, v)| {
            let mut c = WorldTheory::from_assignment(&v);
            c.vocabulary.extend(conclusions.iter().cloned());
            for r in rules.iter().filter(|r| r.fires(&v)) {
                for (p, b) in &r.conclusion {
                    c.add(p.clone(), *b);
                }
            }
            (format!("w{k}"), c)
        })
        .collect();
    Ok(ImplicitStructure::new(worlds, |_, _| true))
}

fn literals(f: &Formula, out: &mut Vec<(String, bool)>) -> Result<(), String> {
    match f {
        Formula::Prop(p) => out.push((p.clone(), true)),
        Formula::Not(g) => match &**g {
            Formula::Prop(p) => out.push((p.clone(), false)),
            _ => return Err(format!("`{f}` is not a literal")),
        },
        Formula::And(a, b) => {
            literals(a, out)?;
            literals(b, out)?;
        }
        _ => return Err(format!("`{f}` is not a literal")),
    }
    Ok(())
}

/// One rule per line; blank lines and `#` comments are skipped.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, ImplicitError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ImplicitError::RuleSyntax { line: n + 1, message };
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| err("expected `antecedent -> conclusion`".into()))?;
        let side = |s: &str| -> Result<Vec<(String, bool)>, ImplicitError> {
            let f: Formula = s.parse().map_err(|e| err(format!("{e}")))?;
            let mut lits = Vec::new();
            literals(&f, &mut lits).map_err(err)?;
            Ok(lits)
        };
        out.push(Rule {
            antecedent: side(lhs)?,
            conclusion: side(rhs)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> Vec<Rule> {
        parse_rules(
            "# sports policy\n\
             Student & Female -> Permitted(a,PlaySports)\n\
             \n\
             Faculty & Female -> ~Permitted(a,PlaySports)\n",
        )
        .unwrap()
    }

    #[test]
    fn primality() {
        assert!(ground_truth(3) && ground_truth(5) && !ground_truth(4) && !ground_truth(1));
        let i = primality_example(&[3]).unwrap();
        assert_eq!(i.worlds.len(), 2);
        let i = primality_example(&[4, 5]).unwrap();
        let s = induce(&i);
        assert_eq!(s.worlds.len(), 4);
        assert_eq!(s.possible.len(), 4);
        let r = refine(&i, primality_test).unwrap();
        let s2 = induce(&r);
        assert_eq!(s2.possible.len(), 1);
        assert_eq!(s2.worlds, s.worlds);
        assert!(s2.validate().is_empty());
        assert!(primality_example(&[]).is_err());
        assert!(matches!(primality_example(&[1]), Err(ImplicitError::InvalidNumber(1))));
    }

    #[test]
    fn refinement_must_shrink() {
        let i = primality_example(&[4]).unwrap();
        let r = refine(&i, |_, _| false).unwrap();
        assert!(induce(&r).possible.is_empty());
        assert!(matches!(refine(&r, |_, _| true), Err(ImplicitError::NonMonotone(_))));
        assert_eq!(refine(&i, |_, _| true).unwrap(), i);
    }

    #[test]
    fn policy_clash() {
        let facts: Vec<String> = ["Student", "Faculty", "Female"].map(String::from).into();
        let i = policy_example(&policy(), &facts).unwrap();
        let s = induce(&i);
        assert!(s.validate().is_empty());
        let permitted = Formula::prop("Permitted(a,PlaySports)");
        for (id, c) in &i.worlds {
            let all = ["Student", "Faculty", "Female"].iter().all(|p| c.positive.contains(*p));
            assert_eq!(s.is_impossible_world(id), all, "{id}");
            let student_only =
                c.positive.contains("Student") && c.positive.contains("Female") && !c.positive.contains("Faculty");
            if student_only {
                assert_eq!(s.pi[id].get(&permitted.to_string()), Some(true));
            }
        }
        let rev: Vec<Rule> = policy().into_iter().rev().collect();
        assert_eq!(policy_example(&rev, &facts).unwrap(), i);
        let empty = policy_example(&[], &facts).unwrap();
        assert!(empty.worlds.values().all(WorldTheory::is_consistent));
    }

    #[test]
    fn overlap_rejected() {
        let rules = parse_rules("a -> b\nb -> c").unwrap();
        assert!(matches!(policy_example(&rules, &[]), Err(ImplicitError::VocabularyOverlap(_))));
        assert!(matches!(parse_rules("a b"), Err(ImplicitError::RuleSyntax { line: 1, .. })));
        assert!(parse_rules("a | b -> c").is_err());
    }
}

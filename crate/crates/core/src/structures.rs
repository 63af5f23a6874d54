//! Epistemic structures for every approach and their class constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::algo::AlgorithmSpec;
use crate::formula::{Formula, TruthAssignment};
use crate::linarith::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Approach {
    Standard,
    Syntactic,
    Awareness,
    Algorithmic,
    Impossible,
}

impl Approach {
    pub const ALL: [Approach; 5] = [
        Approach::Standard,
        Approach::Syntactic,
        Approach::Awareness,
        Approach::Algorithmic,
        Approach::Impossible,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Standard => "standard",
            Approach::Syntactic => "syntactic",
            Approach::Awareness => "awareness",
            Approach::Algorithmic => "algorithmic",
            Approach::Impossible => "impossible",
        }
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Approach::ALL
            .into_iter()
            .find(|a| a.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown approach `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modal {
    K45,
    /// KD45 with the weaker constraint W' nonempty, only for impossible worlds.
    KD45Minus,
    KD45,
    S5,
}

impl Modal {
    pub const ALL: [Modal; 4] = [Modal::K45, Modal::KD45Minus, Modal::KD45, Modal::S5];

    /// Spelling used in structure documents.
    pub fn as_str(self) -> &'static str {
        match self {
            Modal::K45 => "K45",
            Modal::KD45Minus => "KD45-",
            Modal::KD45 => "KD45",
            Modal::S5 => "S5",
        }
    }
}

impl FromStr for Modal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "K45" => Ok(Modal::K45),
            "KD45-" | "KD45⁻" => Ok(Modal::KD45Minus),
            "KD45" => Ok(Modal::KD45),
            "S5" => Ok(Modal::S5),
            _ => Err(format!("unknown modal class `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassTag {
    pub approach: Approach,
    pub modal: Modal,
    pub probabilistic: bool,
}

impl ClassTag {
    pub fn new(modal: Modal, approach: Approach) -> Self {
        ClassTag {
            approach,
            modal,
            probabilistic: false,
        }
    }

    pub fn prob(modal: Modal, approach: Approach) -> Self {
        ClassTag {
            approach,
            modal,
            probabilistic: true,
        }
    }

    /// KD45- exists only for impossible-worlds structures.
    pub fn is_well_formed(&self) -> bool {
        self.modal != Modal::KD45Minus || self.approach == Approach::Impossible
    }

    /// Syntactic and algorithmic truth does not depend on W'.
    pub fn modal_matters(&self) -> bool {
        !matches!(self.approach, Approach::Syntactic | Approach::Algorithmic)
    }

    /// Every well-formed non-probabilistic tag.
    pub fn all_basic() -> Vec<ClassTag> {
        let mut out = Vec::new();
        for approach in Approach::ALL {
            for modal in Modal::ALL {
                let tag = ClassTag::new(modal, approach);
                if tag.is_well_formed() {
                    out.push(tag);
                }
            }
        }
        out
    }

    /// Tags handled by the probabilistic decision procedure.
    pub fn probabilistic_supported() -> Vec<ClassTag> {
        vec![
            ClassTag::prob(Modal::KD45, Approach::Awareness),
            ClassTag::prob(Modal::S5, Approach::Awareness),
            ClassTag::prob(Modal::KD45Minus, Approach::Impossible),
            ClassTag::prob(Modal::KD45, Approach::Impossible),
            ClassTag::prob(Modal::S5, Approach::Impossible),
        ]
    }
}

/// Command-line spelling `<modal>-[prob-]<approach>`, e.g. `kd45--prob-impossible`.
impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let modal = self.modal.as_str().to_ascii_lowercase();
        let prob = if self.probabilistic { "prob-" } else { "" };
        write!(f, "{modal}-{prob}{}", self.approach.as_str())
    }
}

impl FromStr for ClassTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (rest, approach) = lower
            .rsplit_once('-')
            .ok_or_else(|| format!("class tag `{s}` needs the form <modal>-[prob-]<approach>"))?;
        let approach: Approach = approach.parse()?;
        let (modal, probabilistic) = match rest.strip_suffix("-prob") {
            Some(m) => (m, true),
            None => (rest, false),
        };
        let tag = ClassTag {
            approach,
            modal: modal.parse()?,
            probabilistic,
        };
        if !tag.is_well_formed() {
            return Err("KD45- is only defined for impossible-worlds structures".into());
        }
        Ok(tag)
    }
}

/// Literal-level theory standing for every propositional formula forced by
/// its literals; contradictory literal pairs are allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldTheory {
    pub vocabulary: BTreeSet<String>,
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
}

impl WorldTheory {
    pub fn new(vocabulary: impl IntoIterator<Item = String>) -> Self {
        WorldTheory {
            vocabulary: vocabulary.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn from_assignment(v: &TruthAssignment) -> Self {
        let mut t = WorldTheory::new(v.vocabulary().cloned());
        for (p, b) in &v.0 {
            t.add(p.clone(), *b);
        }
        t
    }

    pub fn add(&mut self, prop: String, value: bool) {
        self.vocabulary.insert(prop.clone());
        if value {
            self.positive.insert(prop);
        } else {
            self.negative.insert(prop);
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.positive.is_disjoint(&self.negative)
    }

    /// Propositions assigned both values.
    pub fn clashes(&self) -> BTreeSet<String> {
        self.positive.intersection(&self.negative).cloned().collect()
    }

    /// The truth assignment over the vocabulary; unassigned propositions
    /// are false.
    pub fn assignment(&self) -> TruthAssignment {
        self.vocabulary
            .iter()
            .map(|p| (p.clone(), self.positive.contains(p)))
            .collect()
    }

    /// Forced (true, false) values under four-valued evaluation.
    fn force(&self, f: &Formula) -> (bool, bool) {
        match f {
            Formula::Prop(p) => (self.positive.contains(p), self.negative.contains(p)),
            Formula::True => (true, false),
            Formula::False => (false, true),
            Formula::Not(g) => {
                let (t, f) = self.force(g);
                (f, t)
            }
            Formula::And(a, b) => {
                let (at, af) = self.force(a);
                let (bt, bf) = self.force(b);
                (at && bt, af || bf)
            }
            Formula::Know(_) | Formula::Lik(_) => (false, false),
        }
    }

    /// Whether `f` belongs to the theory: it is forced true by the literals.
    pub fn contains(&self, f: &Formula) -> bool {
        self.force(f).0
    }
}

/// Formula set attached to a world: explicit, or generated by a theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WorldFormulas {
    Explicit(BTreeSet<Formula>),
    Theory(WorldTheory),
}

impl WorldFormulas {
    pub fn contains(&self, f: &Formula) -> bool {
        match self {
            WorldFormulas::Explicit(set) => set.contains(f),
            WorldFormulas::Theory(t) => t.contains(f),
        }
    }

    pub fn explicit(&self) -> Option<&BTreeSet<Formula>> {
        match self {
            WorldFormulas::Explicit(set) => Some(set),
            WorldFormulas::Theory(_) => None,
        }
    }
}

impl Default for WorldFormulas {
    fn default() -> Self {
        WorldFormulas::Explicit(BTreeSet::new())
    }
}

impl FromIterator<Formula> for WorldFormulas {
    fn from_iter<T: IntoIterator<Item = Formula>>(iter: T) -> Self {
        WorldFormulas::Explicit(iter.into_iter().collect())
    }
}

/// Exact probability over W'.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Distribution(pub BTreeMap<String, Rational>);

impl Distribution {
    pub fn uniform<'a>(worlds: impl IntoIterator<Item = &'a String>) -> Self {
        let ws: Vec<&String> = worlds.into_iter().collect();
        let share = Rational::one() / Rational::from_integer(ws.len().into());
        Distribution(ws.into_iter().map(|w| (w.clone(), share.clone())).collect())
    }

    pub fn get(&self, w: &str) -> Rational {
        self.0.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.0.values().fold(Rational::zero(), |acc, x| acc + x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicStructure {
    pub tag: ClassTag,
    /// W, the possible worlds.
    pub worlds: BTreeSet<String>,
    /// W', the worlds the agent considers possible.
    pub possible: BTreeSet<String>,
    pub pi: BTreeMap<String, TruthAssignment>,
    /// Syntactic: on W. Impossible worlds: on W' - W.
    pub c: BTreeMap<String, WorldFormulas>,
    /// Awareness sets, on W.
    pub a: BTreeMap<String, BTreeSet<Formula>>,
    pub algorithm: Option<AlgorithmSpec>,
    pub mu: Option<Distribution>,
}

impl EpistemicStructure {
    pub fn new(tag: ClassTag) -> Self {
        EpistemicStructure {
            tag,
            worlds: BTreeSet::new(),
            possible: BTreeSet::new(),
            pi: BTreeMap::new(),
            c: BTreeMap::new(),
            a: BTreeMap::new(),
            algorithm: None,
            mu: None,
        }
    }

    /// Adds `w` to W with assignment `v`.
    pub fn add_world(&mut self, w: impl Into<String>, v: TruthAssignment) {
        let w = w.into();
        self.worlds.insert(w.clone());
        self.pi.insert(w, v);
    }

    pub fn is_impossible_world(&self, w: &str) -> bool {
        self.possible.contains(w) && !self.worlds.contains(w)
    }

    pub fn impossible_worlds(&self) -> BTreeSet<String> {
        self.possible.difference(&self.worlds).cloned().collect()
    }

    pub fn contains_world(&self, w: &str) -> bool {
        self.worlds.contains(w) || self.possible.contains(w)
    }

    /// |W u W'|.
    pub fn world_count(&self) -> usize {
        self.worlds.union(&self.possible).count()
    }

    pub fn validate(&self) -> Vec<String> {
        validate(self)
    }
}

/// Every broken class constraint, one message per violation.
pub fn validate(s: &EpistemicStructure) -> Vec<String> {
    let mut out = Vec::new();
    let tag = s.tag;
    if !tag.is_well_formed() {
        out.push("KD45- is only defined for impossible-worlds structures".to_string());
    }
    if s.worlds.is_empty() {
        out.push("W must be nonempty".to_string());
    }
    for w in &s.worlds {
        if !s.pi.contains_key(w) {
            out.push(format!("pi is undefined at world `{w}`"));
        }
    }
    for w in s.pi.keys() {
        if !s.worlds.contains(w) {
            out.push(format!("pi is defined at `{w}`, which is not in W"));
        }
    }

    let wp_sub_w = s.possible.is_subset(&s.worlds);
    if tag.approach == Approach::Impossible {
        match tag.modal {
            Modal::K45 => {}
            Modal::KD45Minus => {
                if s.possible.is_empty() {
                    out.push("KD45- requires W′ ≠ ∅".to_string());
                }
            }
            Modal::KD45 => {
                if s.possible.is_disjoint(&s.worlds) {
                    out.push("KD45 requires W ∩ W′ ≠ ∅".to_string());
                }
            }
            Modal::S5 => {
                if !s.worlds.is_subset(&s.possible) {
                    out.push("S5 requires W ⊆ W′".to_string());
                }
            }
        }
    } else {
        if !wp_sub_w {
            out.push(format!(
                "{} structures require W′ ⊆ W",
                tag.approach.as_str()
            ));
        }
        if tag.modal_matters() {
            match tag.modal {
                Modal::K45 | Modal::KD45Minus => {}
                Modal::KD45 => {
                    if s.possible.is_empty() {
                        out.push("KD45 requires W′ ≠ ∅".to_string());
                    }
                }
                Modal::S5 => {
                    if s.possible != s.worlds {
                        out.push("S5 requires W′ = W".to_string());
                    }
                }
            }
        }
    }

    let c_domain: BTreeSet<String> = match tag.approach {
        Approach::Syntactic => s.worlds.clone(),
        Approach::Impossible => s.impossible_worlds(),
        _ => BTreeSet::new(),
    };
    for w in &c_domain {
        if !s.c.contains_key(w) {
            out.push(format!("C is undefined at world `{w}`"));
        }
    }
    for w in s.c.keys() {
        if !c_domain.contains(w) {
            out.push(format!("C is defined at `{w}`, outside its domain"));
        }
    }

    if tag.approach == Approach::Awareness {
        for w in &s.worlds {
            if !s.a.contains_key(w) {
                out.push(format!("A is undefined at world `{w}`"));
            }
        }
    }
    for w in s.a.keys() {
        if tag.approach != Approach::Awareness || !s.worlds.contains(w) {
            out.push(format!("A is defined at `{w}`, outside its domain"));
        }
    }

    match (tag.approach == Approach::Algorithmic, &s.algorithm) {
        (true, None) => out.push("algorithmic structures need a knowledge algorithm".to_string()),
        (false, Some(_)) => out.push("knowledge algorithm on a non-algorithmic structure".to_string()),
        _ => {}
    }

    match (tag.probabilistic, &s.mu) {
        (true, None) => out.push("probabilistic structures need a distribution".to_string()),
        (false, Some(_)) => out.push("distribution on a non-probabilistic structure".to_string()),
        (true, Some(mu)) => {
            for (w, x) in &mu.0 {
                if !s.possible.contains(w) {
                    out.push(format!("distribution assigns mass to `{w}`, outside W′"));
                }
                if x.is_negative() {
                    out.push(format!("distribution is negative at `{w}`"));
                }
            }
            let total = mu.total();
            if !total.is_one() {
                out.push(format!("distribution sums to {}", show_rational(&total)));
            }
        }
        (false, None) => {}
    }

    if !tag.probabilistic {
        let in_c = s
            .c
            .values()
            .filter_map(WorldFormulas::explicit)
            .any(|set| set.iter().any(Formula::has_likelihood));
        let in_a = s.a.values().any(|set| set.iter().any(Formula::has_likelihood));
        if in_c || in_a {
            out.push("likelihood formulas in a non-probabilistic structure".to_string());
        }
    }
    out
}

fn show_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rational(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linarith::rat;

    fn world(s: &mut EpistemicStructure, w: &str) {
        s.add_world(w, TruthAssignment::new());
    }

    #[test]
    fn tag_spelling() {
        for tag in ClassTag::all_basic() {
            assert_eq!(tag.to_string().parse::<ClassTag>().unwrap(), tag);
        }
        let t: ClassTag = "kd45--prob-impossible".parse().unwrap();
        assert_eq!(t, ClassTag::prob(Modal::KD45Minus, Approach::Impossible));
        assert!("kd45--awareness".parse::<ClassTag>().is_err());
        assert!("s5-awareness".parse::<ClassTag>().is_ok());
    }

    #[test]
    fn kd45_needs_possible_world() {
        let mut s = EpistemicStructure::new(ClassTag::new(Modal::KD45, Approach::Standard));
        world(&mut s, "w0");
        assert_eq!(s.validate(), vec!["KD45 requires W′ ≠ ∅".to_string()]);
    }

    #[test]
    fn s5_impossible_needs_w_in_wp() {
        let mut s = EpistemicStructure::new(ClassTag::new(Modal::S5, Approach::Impossible));
        world(&mut s, "w0");
        s.possible.insert("u".into());
        s.c.insert("u".into(), WorldFormulas::default());
        assert_eq!(s.validate(), vec!["S5 requires W ⊆ W′".to_string()]);
    }

    #[test]
    fn distribution_must_sum_to_one() {
        let mut s = EpistemicStructure::new(ClassTag::prob(Modal::KD45, Approach::Awareness));
        world(&mut s, "w0");
        s.possible.insert("w0".into());
        s.a.insert("w0".into(), BTreeSet::new());
        s.mu = Some(Distribution([("w0".to_string(), rat(9, 10))].into()));
        assert_eq!(s.validate(), vec!["distribution sums to 9/10".to_string()]);
    }

    #[test]
    fn theory_membership_is_four_valued() {
        let mut t = WorldTheory::new(["p".to_string(), "q".to_string()]);
        t.add("p".into(), true);
        t.add("p".into(), false);
        let p = Formula::prop("p");
        let q = Formula::prop("q");
        assert!(!t.is_consistent());
        assert!(t.contains(&p));
        assert!(t.contains(&Formula::not(p.clone())));
        assert!(!t.contains(&q));
        assert!(!t.contains(&Formula::not(q.clone())));
        assert!(t.contains(&Formula::or(q.clone(), p.clone())));
        assert!(!t.contains(&Formula::and(q, p)));
    }
}

//! Knowledge algorithms and the Dolev-Yao adversary.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{MessageError, ModelError};
use crate::formula::Formula;
use crate::model;
use crate::parser::has_name;
use crate::structures::EpistemicStructure;

/// Messages built from atoms and keys by concatenation and symmetric
/// encryption under an atomic key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Message {
    Atom(String),
    Key(String),
    Concat(Box<Message>, Box<Message>),
    Encrypt(Box<Message>, String),
}

impl Message {
    pub fn atom(name: impl Into<String>) -> Message {
        Message::Atom(name.into())
    }

    pub fn key(name: impl Into<String>) -> Message {
        Message::Key(name.into())
    }

    pub fn concat(a: Message, b: Message) -> Message {
        Message::Concat(Box::new(a), Box::new(b))
    }

    pub fn encrypt(body: Message, key: impl Into<String>) -> Message {
        Message::Encrypt(Box::new(body), key.into())
    }

    /// Nesting depth; atoms and keys have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Message::Atom(_) | Message::Key(_) => 0,
            Message::Concat(a, b) => 1 + a.depth().max(b.depth()),
            Message::Encrypt(b, _) => 1 + b.depth(),
        }
    }

    /// The message and all its syntactic sub-messages (encryption keys are
    /// names, not sub-messages).
    pub fn submessages(&self) -> BTreeSet<Message> {
        let mut out = BTreeSet::new();
        self.collect_submessages(&mut out);
        out
    }

    fn collect_submessages(&self, out: &mut BTreeSet<Message>) {
        out.insert(self.clone());
        match self {
            Message::Atom(_) | Message::Key(_) => {}
            Message::Concat(a, b) => {
                a.collect_submessages(out);
                b.collect_submessages(out);
            }
            Message::Encrypt(b, _) => b.collect_submessages(out),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Message::Atom(a) => a.clone(),
            Message::Key(k) => format!("key:{k}"),
            Message::Concat(a, b) => {
                let right = if matches!(**b, Message::Concat(..)) {
                    format!("({})", b.render())
                } else {
                    b.render()
                };
                format!("{}.{}", a.render(), right)
            }
            Message::Encrypt(b, k) => format!("{{{}}}{}", b.render(), k),
        }
    }

    /// Parses `msg := ident | key:ident | msg.msg | {msg}ident | (msg)`;
    /// concatenation is left-associative.
    pub fn parse(text: &str) -> Result<Message, MessageError> {
        let mut p = MessageParser {
            src: text.as_bytes(),
            i: 0,
        };
        let m = p.concat()?;
        p.skip_ws();
        if p.i != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(m)
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Message {
    type Err = MessageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Message::parse(s)
    }
}

struct MessageParser<'a> {
    src: &'a [u8],
    i: usize,
}

impl MessageParser<'_> {
    fn error(&self, message: &str) -> MessageError {
        MessageError::Syntax {
            pos: self.i,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.i < self.src.len() && self.src[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, MessageError> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.src.len()
            && (self.src[self.i].is_ascii_alphanumeric() || self.src[self.i] == b'_')
        {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.error("expected an identifier"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.i]).into_owned())
    }

    fn concat(&mut self) -> Result<Message, MessageError> {
        let mut m = self.unit()?;
        while self.eat(b'.') {
            let rhs = self.unit()?;
            m = Message::concat(m, rhs);
        }
        Ok(m)
    }

    fn unit(&mut self) -> Result<Message, MessageError> {
        if self.eat(b'{') {
            let body = self.concat()?;
            if !self.eat(b'}') {
                return Err(self.error("expected `}`"));
            }
            let key = self.ident()?;
            return Ok(Message::encrypt(body, key));
        }
        if self.eat(b'(') {
            let m = self.concat()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(m);
        }
        let name = self.ident()?;
        if name == "key" && self.eat(b':') {
            return Ok(Message::Key(self.ident()?));
        }
        Ok(Message::Atom(name))
    }
}

/// Least superset of `h` closed under projection and decryption with a
/// derivable key, plus the number of saturation rounds it took.
pub fn dy_closure_rounds(h: &[Message]) -> (BTreeSet<Message>, usize) {
    let mut known: BTreeSet<Message> = h.iter().cloned().collect();
    let mut rounds = 0;
    loop {
        let mut fresh = Vec::new();
        for m in &known {
            match m {
                Message::Concat(a, b) => {
                    fresh.push((**a).clone());
                    fresh.push((**b).clone());
                }
                Message::Encrypt(body, k) if known.contains(&Message::Key(k.clone())) => {
                    fresh.push((**body).clone());
                }
                _ => {}
            }
        }
        let before = known.len();
        known.extend(fresh);
        if known.len() == before {
            return (known, rounds);
        }
        rounds += 1;
    }
}

pub fn dy_closure(h: &[Message]) -> BTreeSet<Message> {
    dy_closure_rounds(h).0
}

/// `H |-DY m`.
pub fn dy_derives(h: &[Message], m: &Message) -> bool {
    dy_closure(h).contains(m)
}

/// Answer of a knowledge algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "Yes",
            Answer::No => "No",
            Answer::Unknown => "?",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A deterministic procedure answering knowledge queries.
pub trait KnowledgeAlgorithm {
    fn answer(&self, query: &Formula) -> Answer;
}

impl<F: Fn(&Formula) -> Answer> KnowledgeAlgorithm for F {
    fn answer(&self, query: &Formula) -> Answer {
        self(query)
    }
}

/// The Dolev-Yao adversary: `has(m)` is answered by extraction from the
/// intercepted messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DolevYao {
    intercepted: Vec<Message>,
    closure: BTreeSet<Message>,
    /// Answer for `has(m)` when `m` is not derivable.
    pub underivable: Answer,
}

impl DolevYao {
    pub fn new(intercepted: Vec<Message>) -> Self {
        let closure = dy_closure(&intercepted);
        DolevYao {
            intercepted,
            closure,
            underivable: Answer::No,
        }
    }

    /// Answer "?" instead of "No" for underivable messages.
    pub fn cautious(mut self) -> Self {
        self.underivable = Answer::Unknown;
        self
    }

    pub fn intercepted(&self) -> &[Message] {
        &self.intercepted
    }

    pub fn derives(&self, m: &Message) -> bool {
        self.closure.contains(m)
    }
}

/// `has(m)` as a formula.
pub fn has(m: &Message) -> Formula {
    Formula::Prop(has_name(m))
}

/// The message named by a `has(m)` proposition.
pub fn has_message(f: &Formula) -> Option<Message> {
    match f {
        Formula::Prop(name) => name
            .strip_prefix("has(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|inner| Message::parse(inner).ok()),
        _ => None,
    }
}

impl KnowledgeAlgorithm for DolevYao {
    fn answer(&self, query: &Formula) -> Answer {
        match has_message(query) {
            Some(m) if self.derives(&m) => Answer::Yes,
            Some(_) => self.underivable,
            None => Answer::Unknown,
        }
    }
}

pub fn dy_algorithm(h: Vec<Message>) -> DolevYao {
    DolevYao::new(h)
}

/// Answers from explicit formula tables; everything else is "?".
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableAlgorithm {
    pub yes: BTreeSet<Formula>,
    pub no: BTreeSet<Formula>,
}

impl KnowledgeAlgorithm for TableAlgorithm {
    fn answer(&self, query: &Formula) -> Answer {
        if self.yes.contains(query) {
            Answer::Yes
        } else if self.no.contains(query) {
            Answer::No
        } else {
            Answer::Unknown
        }
    }
}

/// Knowledge algorithm stored in an algorithmic structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgorithmSpec {
    Table(TableAlgorithm),
    DolevYao(DolevYao),
}

impl KnowledgeAlgorithm for AlgorithmSpec {
    fn answer(&self, query: &Formula) -> Answer {
        match self {
            AlgorithmSpec::Table(t) => t.answer(query),
            AlgorithmSpec::DolevYao(d) => d.answer(query),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessViolation {
    pub query: Formula,
    pub answer: Answer,
    /// A possible world contradicting the answer, when there is one.
    pub world: Option<String>,
}

impl fmt::Display for SoundnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.answer, &self.world) {
            (Answer::Yes, Some(w)) => {
                write!(f, "answered Yes to `{}` but it fails at `{w}`", self.query)
            }
            _ => write!(
                f,
                "answered {} to `{}` but it holds at every possible world",
                self.answer, self.query
            ),
        }
    }
}

/// "Yes" must mean true at every world of W', "No" false at some world.
pub fn check_soundness(
    alg: &dyn KnowledgeAlgorithm,
    s: &EpistemicStructure,
    probes: &[Formula],
) -> Result<Vec<SoundnessViolation>, ModelError> {
    let mut out = Vec::new();
    for probe in probes {
        let answer = alg.answer(probe);
        if answer == Answer::Unknown {
            continue;
        }
        let mut failing = None;
        for w in &s.possible {
            if !model::holds(s, w, probe)? {
                failing = Some(w.clone());
                break;
            }
        }
        match (answer, failing) {
            (Answer::Yes, Some(w)) => out.push(SoundnessViolation {
                query: probe.clone(),
                answer,
                world: Some(w),
            }),
            (Answer::No, None) => out.push(SoundnessViolation {
                query: probe.clone(),
                answer,
                world: None,
            }),
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Message {
        Message::parse(s).unwrap()
    }

    #[test]
    fn message_grammar() {
        assert_eq!(m("{m}k"), Message::encrypt(Message::atom("m"), "k"));
        assert_eq!(m("key:k"), Message::key("k"));
        assert_eq!(
            m("a.b.c"),
            Message::concat(Message::concat(m("a"), m("b")), m("c"))
        );
        assert_eq!(m("a.(b.c)").render(), "a.(b.c)");
        assert_eq!(m("{ a . key:k2 } k1").render(), "{a.key:k2}k1");
        assert!(Message::parse("{a}").is_err());
        assert!(Message::parse("a.").is_err());
        assert!(Message::parse("").is_err());
    }

    #[test]
    fn canned_derivations() {
        assert!(dy_derives(&[m("{m}k"), m("key:k")], &m("m")));
        assert!(!dy_derives(&[m("{m}k")], &m("m")));
        assert!(dy_derives(&[m("m1.m2")], &m("m2")));
        // no composition rules
        assert!(!dy_derives(&[m("a"), m("b")], &m("a.b")));
        // key hidden inside a concatenation still opens the ciphertext
        assert!(dy_derives(&[m("{s}k.key:k")], &m("s")));
    }

    #[test]
    fn algorithm_answers() {
        let alg = dy_algorithm(vec![m("{m}k"), m("key:k")]);
        assert_eq!(alg.answer(&has(&m("m"))), Answer::Yes);
        assert_eq!(dy_algorithm(vec![]).answer(&has(&m("m"))), Answer::No);
        assert_eq!(
            dy_algorithm(vec![]).cautious().answer(&has(&m("m"))),
            Answer::Unknown
        );
        assert_eq!(
            alg.answer(&Formula::know(Formula::prop("p"))),
            Answer::Unknown
        );
        let parsed: Formula = "has({m}k)".parse().unwrap();
        assert_eq!(alg.answer(&parsed), Answer::Yes);
    }
}

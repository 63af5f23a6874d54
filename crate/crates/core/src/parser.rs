//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, tightest first: `~` and `K`, then `&` (left-assoc), `|`
//! (left-assoc), `->` (right-assoc) and `<->` (right-assoc). A likelihood
//! atom `[c] l(f) {+ [c] l(f)} rel n` is a primary.
//!
//! An identifier written directly against `(`, such as `Permitted(a,b)`,
//! is a single proposition name. `has(m)` names are canonicalised through
//! the message grammar.

use crate::algo::Message;
use crate::error::FormulaError;
use crate::formula::{Formula, Relation};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    True,
    False,
    Know,
    Lik,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Iff,
    LParen,
    RParen,
    Plus,
    Minus,
    Rel(Relation),
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(n) => format!("integer {n}"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |pos: usize, message: String| FormulaError::Syntax { pos, message };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => {
                out.push((start, Tok::Tilde));
                i += 1;
            }
            b'&' => {
                out.push((start, Tok::Amp));
                i += 1;
            }
            b'|' => {
                out.push((start, Tok::Bar));
                i += 1;
            }
            b'(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            b'+' => {
                out.push((start, Tok::Plus));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((start, Tok::Arrow));
                i += 2;
            }
            b'-' => {
                out.push((start, Tok::Minus));
                i += 1;
            }
            b'<' if src[i..].starts_with("<->") => {
                out.push((start, Tok::Iff));
                i += 3;
            }
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                out.push((start, Tok::Rel(Relation::Le)));
                i += 2;
            }
            b'<' => {
                out.push((start, Tok::Rel(Relation::Lt)));
                i += 1;
            }
            b'>' if bytes.get(i + 1) == Some(&b'=') => {
                out.push((start, Tok::Rel(Relation::Ge)));
                i += 2;
            }
            b'>' => {
                out.push((start, Tok::Rel(Relation::Gt)));
                i += 1;
            }
            b'=' => {
                out.push((start, Tok::Rel(Relation::Eq)));
                i += 1;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: i64 = src[start..i]
                    .parse()
                    .map_err(|_| syntax(start, "integer out of range".into()))?;
                out.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "K" => Tok::Know,
                    "l" if src[i..].trim_start().starts_with('(') => Tok::Lik,
                    _ if bytes.get(i) == Some(&b'(') => {
                        let close = matching_paren(bytes, i)
                            .ok_or_else(|| syntax(i, "unclosed `(` in proposition name".into()))?;
                        let inner = &src[i + 1..close];
                        i = close + 1;
                        Tok::Ident(predicate_name(word, inner, start)?)
                    }
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((start, tok));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        }
    }
    out.push((src.len(), Tok::Eof));
    Ok(out)
}

fn matching_paren(bytes: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (j, &b) in bytes.iter().enumerate().skip(open) {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(j);
                }
            }
            _ => {}
        }
    }
    None
}

fn predicate_name(head: &str, inner: &str, pos: usize) -> Result<String, FormulaError> {
    if head == "has" {
        let msg = Message::parse(inner).map_err(|e| FormulaError::Syntax {
            pos,
            message: e.to_string(),
        })?;
        return Ok(has_name(&msg));
    }
    let args: String = inner.chars().filter(|c| !c.is_whitespace()).collect();
    Ok(format!("{head}({args})"))
}

/// Proposition name for `has(m)`.
pub fn has_name(m: &Message) -> String {
    format!("has({})", m.render())
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn pos(&self) -> usize {
        self.toks[self.i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].1.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let found = describe(self.peek());
            self.error(format!("expected {}, found {found}", describe(&want)))
        }
    }

    fn form(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.form()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Know => {
                self.bump();
                Ok(Formula::know(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.form()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Prop(name))
            }
            Tok::Int(_) | Tok::Minus | Tok::Lik => self.likelihood(),
            other => self.error(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn likelihood(&mut self) -> Result<Formula, FormulaError> {
        let mut terms = vec![self.term(false)?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term(false)?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(self.term(true)?);
                }
                _ => break,
            }
        }
        let relation = match self.peek().clone() {
            Tok::Rel(r) => {
                self.bump();
                r
            }
            other => {
                return self.error(format!(
                    "expected a comparison after likelihood terms, found {}",
                    describe(&other)
                ))
            }
        };
        let bound = self.signed_int()?;
        Ok(Formula::lik(terms, relation, bound))
    }

    fn signed_int(&mut self) -> Result<i64, FormulaError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(if negative { -n } else { n })
            }
            other => self.error(format!("expected an integer, found {}", describe(&other))),
        }
    }

    fn term(&mut self, negated: bool) -> Result<(i64, Formula), FormulaError> {
        let mut coef = 1i64;
        if *self.peek() == Tok::Minus {
            self.bump();
            coef = -coef;
        }
        if let Tok::Int(n) = self.peek().clone() {
            self.bump();
            coef *= n;
        }
        if negated {
            coef = -coef;
        }
        self.expect(Tok::Lik)?;
        self.expect(Tok::LParen)?;
        let arg_pos = self.pos();
        let arg = self.form()?;
        self.expect(Tok::RParen)?;
        if !arg.is_propositional() {
            return Err(FormulaError::NonPropositionalLikelihood { pos: arg_pos });
        }
        Ok((coef, arg))
    }
}

pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0 };
    let f = p.form()?;
    if *p.peek() != Tok::Eof {
        let found = describe(p.peek());
        return p.error(format!("unexpected {found} after formula"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::prop("p")
    }

    #[test]
    fn parses_knowledge() {
        assert_eq!(parse("K p").unwrap(), Formula::know(p()));
        assert_eq!(parse("Kp").unwrap(), Formula::prop("Kp"));
        assert_eq!(
            parse("K(p & q)").unwrap(),
            Formula::know(Formula::and(p(), Formula::prop("q")))
        );
    }

    #[test]
    fn parses_likelihood_sum() {
        let f = parse("1 l(p) + 1 l(~p) >= 1").unwrap();
        assert_eq!(
            f,
            Formula::lik(vec![(1, p()), (1, Formula::not(p()))], Relation::Ge, 1)
        );
        let g = parse("l(p) - 2 l(q) < -1").unwrap();
        assert_eq!(
            g,
            Formula::lik(vec![(1, p()), (-2, Formula::prop("q"))], Relation::Lt, -1)
        );
    }

    #[test]
    fn rejects_nested_likelihood() {
        assert_eq!(
            parse("l(K p) >= 0"),
            Err(FormulaError::NonPropositionalLikelihood { pos: 2 })
        );
        assert!(matches!(
            parse("l(l(p) > 0) >= 0"),
            Err(FormulaError::NonPropositionalLikelihood { .. })
        ));
        assert_eq!(
            parse("l(K p) >= 0").unwrap_err().to_string(),
            "non-propositional likelihood argument at 2"
        );
    }

    #[test]
    fn desugars_connectives() {
        let q = Formula::prop("q");
        assert_eq!(parse("p | q").unwrap(), Formula::or(p(), q.clone()));
        assert_eq!(parse("p -> q").unwrap(), Formula::implies(p(), q.clone()));
        assert_eq!(parse("p <-> q").unwrap(), Formula::iff(p(), q.clone()));
        // -> is right associative, & binds tighter than |
        assert_eq!(
            parse("p -> q -> p").unwrap(),
            Formula::implies(p(), Formula::implies(q.clone(), p()))
        );
        assert_eq!(
            parse("p & q | p").unwrap(),
            Formula::or(Formula::and(p(), q.clone()), p())
        );
        assert_eq!(
            parse("~K p & q").unwrap(),
            Formula::and(Formula::not(Formula::know(p())), q)
        );
    }

    #[test]
    fn likelihood_atoms_inside_connectives() {
        let f = parse("~(l(p) >= 0 & l(p) <= 1)").unwrap();
        let lo = Formula::lik(vec![(1, p())], Relation::Ge, 0);
        let hi = Formula::lik(vec![(1, p())], Relation::Le, 1);
        assert_eq!(f, Formula::not(Formula::and(lo.clone(), hi)));
        assert_eq!(parse("K p -> l(p) > 0").unwrap().render(), "~(K p & ~(l(p) > 0))");
        assert_eq!(parse("l(p) >= 1 & p").unwrap(), Formula::and(lo_ge1(), p()));
    }

    fn lo_ge1() -> Formula {
        Formula::lik(vec![(1, p())], Relation::Ge, 1)
    }

    #[test]
    fn predicate_names() {
        assert_eq!(
            parse("Permitted(a, PlaySports)").unwrap(),
            Formula::prop("Permitted(a,PlaySports)")
        );
        assert_eq!(
            parse("K has( {m}k )").unwrap(),
            Formula::know(Formula::prop("has({m}k)"))
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("p & & q") {
            Err(FormulaError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("(p").is_err());
        assert!(parse("p q").is_err());
        assert!(parse("l(p) +").is_err());
        assert!(parse("").is_err());
        assert!(parse("p $ q").is_err());
    }
}

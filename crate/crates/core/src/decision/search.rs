//! Three-valued backtracking over boolean choice variables.

/// Kleene truth value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tri {
    False,
    Unknown,
    True,
}

impl Tri {
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Tri {
        match self {
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
            Tri::True => Tri::False,
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, other: Tri) -> Tri {
        self.not().and(other.not()).not()
    }
}

impl From<bool> for Tri {
    fn from(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

impl From<Option<bool>> for Tri {
    fn from(b: Option<bool>) -> Tri {
        b.map_or(Tri::Unknown, Tri::from)
    }
}

/// Depth-first search over `n` variables, assigned in index order with
/// `false` tried before `true`.
///
/// `check` sees the partial assignment and whether it is complete. `False`
/// prunes the subtree. `True` accepts; on a partial assignment it must mean
/// every completion is acceptable, and unassigned variables stay `None`.
/// `Unknown` on a complete assignment rejects it.
pub fn backtrack<F>(n: usize, mut check: F) -> Option<Vec<Option<bool>>>
where
    F: FnMut(&[Option<bool>], bool) -> Tri,
{
    let mut vals = vec![None; n];
    if descend(&mut vals, 0, &mut check) {
        Some(vals)
    } else {
        None
    }
}

fn descend<F>(vals: &mut [Option<bool>], depth: usize, check: &mut F) -> bool
where
    F: FnMut(&[Option<bool>], bool) -> Tri,
{
    let complete = depth == vals.len();
    match check(vals, complete) {
        Tri::False => return false,
        Tri::True => return true,
        Tri::Unknown if complete => return false,
        Tri::Unknown => {}
    }
    for value in [false, true] {
        vals[depth] = Some(value);
        if descend(vals, depth + 1, check) {
            return true;
        }
    }
    vals[depth] = None;
    false
}

/// Propositional formula over indexed variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Const(bool),
    Var(usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
}

impl Node {
    pub fn eval3(&self, vals: &[Option<bool>]) -> Tri {
        match self {
            Node::Const(b) => Tri::from(*b),
            Node::Var(i) => Tri::from(vals[*i]),
            Node::Not(n) => n.eval3(vals).not(),
            Node::And(a, b) => match a.eval3(vals) {
                Tri::False => Tri::False,
                t => t.and(b.eval3(vals)),
            },
        }
    }
}

/// A satisfying assignment for every node in `constraints`, or `None`.
/// Variables left open by the search are reported as `false`.
pub fn solve(constraints: &[Node], nvars: usize) -> Option<Vec<bool>> {
    let found = backtrack(nvars, |vals, _| {
        let mut acc = Tri::True;
        for c in constraints {
            acc = acc.and(c.eval3(vals));
            if acc == Tri::False {
                break;
            }
        }
        acc
    })?;
    Some(found.into_iter().map(|v| v.unwrap_or(false)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kleene_tables() {
        assert_eq!(Tri::Unknown.and(Tri::False), Tri::False);
        assert_eq!(Tri::Unknown.or(Tri::True), Tri::True);
        assert_eq!(Tri::Unknown.and(Tri::True), Tri::Unknown);
        assert_eq!(Tri::True.not(), Tri::False);
    }

    #[test]
    fn finds_first_assignment_in_order() {
        // x0 | x1, with false tried first: x0 = false, x1 = true
        let found = backtrack(2, |v, complete| {
            let t = Tri::from(v[0]).or(Tri::from(v[1]));
            if complete || t != Tri::True {
                t
            } else {
                Tri::Unknown
            }
        })
        .unwrap();
        assert_eq!(found, vec![Some(false), Some(true)]);
    }

    #[test]
    fn solves_small_cnf() {
        use Node::*;
        let x = |i| Box::new(Var(i));
        // x0 & ~(x0 & ~x1)  forces x1
        let c = vec![Var(0), Not(Box::new(And(x(0), Box::new(Not(x(1))))))];
        assert_eq!(solve(&c, 2), Some(vec![true, true]));
        assert_eq!(solve(&[Var(0), Not(x(0))], 1), None);
    }

    #[test]
    fn exhausts_unsatisfiable() {
        let mut visits = 0;
        let found = backtrack(3, |v, _| {
            visits += 1;
            Tri::from(v[0]).and(Tri::from(v[0]).not())
        });
        assert!(found.is_none());
        assert_eq!(visits, 3);
    }
}

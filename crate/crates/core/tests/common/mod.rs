#![allow(dead_code)]

use std::collections::BTreeSet;

use omniscope::algo::Message;
use omniscope::Formula;
use rand::seq::SliceRandom;
use rand::Rng;

/// Every formula over `props` built with `~`, `&` and `K` with exactly
/// `size` nodes.
pub fn formulas_of_size(props: &[&str], size: usize) -> Vec<Formula> {
    let mut table: Vec<Vec<Formula>> = vec![Vec::new()];
    for n in 1..=size {
        let mut row = Vec::new();
        if n == 1 {
            row.extend(props.iter().map(|p| Formula::prop(*p)));
        } else {
            for f in &table[n - 1] {
                row.push(Formula::not(f.clone()));
                row.push(Formula::know(f.clone()));
            }
            for i in 1..n - 1 {
                for a in &table[i] {
                    for b in &table[n - 1 - i] {
                        row.push(Formula::and(a.clone(), b.clone()));
                    }
                }
            }
        }
        table.push(row);
    }
    table.pop().unwrap()
}

pub fn formulas_up_to(props: &[&str], size: usize) -> Vec<Formula> {
    (1..=size).flat_map(|n| formulas_of_size(props, n)).collect()
}

/// A random formula with at most `size` nodes.
pub fn random_formula<R: Rng>(rng: &mut R, props: &[&str], size: usize) -> Formula {
    if size <= 1 {
        return Formula::prop(*props.choose(rng).unwrap());
    }
    match rng.gen_range(0..4) {
        0 => Formula::prop(*props.choose(rng).unwrap()),
        1 => Formula::not(random_formula(rng, props, size - 1)),
        2 => Formula::know(random_formula(rng, props, size - 1)),
        _ if size >= 3 => {
            let left = rng.gen_range(1..size - 1);
            Formula::and(
                random_formula(rng, props, left),
                random_formula(rng, props, size - 1 - left),
            )
        }
        _ => Formula::not(random_formula(rng, props, size - 1)),
    }
}

/// Every message over the given atoms and keys with nesting depth at most
/// `depth` (atoms and keys have depth 0).
pub fn messages_up_to(atoms: &[&str], keys: &[&str], depth: usize) -> Vec<Message> {
    let mut all: Vec<Message> = atoms
        .iter()
        .map(|a| Message::atom(*a))
        .chain(keys.iter().map(|k| Message::key(*k)))
        .collect();
    for _ in 0..depth {
        let mut next: BTreeSet<Message> = all.iter().cloned().collect();
        for a in &all {
            for k in keys {
                next.insert(Message::encrypt(a.clone(), *k));
            }
            for b in &all {
                next.insert(Message::concat(a.clone(), b.clone()));
            }
        }
        all = next.into_iter().collect();
    }
    all
}

pub fn random_message<R: Rng>(rng: &mut R, atoms: &[&str], keys: &[&str], depth: usize) -> Message {
    let leaf = |rng: &mut R| {
        if rng.gen_bool(0.3) {
            Message::key(*keys.choose(rng).unwrap())
        } else {
            Message::atom(*atoms.choose(rng).unwrap())
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => leaf(rng),
        1 => Message::encrypt(random_message(rng, atoms, keys, depth - 1), *keys.choose(rng).unwrap()),
        _ => Message::concat(
            random_message(rng, atoms, keys, depth - 1),
            random_message(rng, atoms, keys, depth - 1),
        ),
    }
}

/// Backward proof search for `h |- m` using projection and decryption,
/// with at most `budget` rule applications along any branch. Goals already
/// open on the current branch are not re-entered.
pub fn dy_search(h: &[Message], m: &Message, budget: usize) -> bool {
    search(h, m, budget, &mut Vec::new())
}

fn search(h: &[Message], m: &Message, budget: usize, open: &mut Vec<Message>) -> bool {
    if h.contains(m) {
        return true;
    }
    if budget == 0 || open.contains(m) {
        return false;
    }
    let mut parents = BTreeSet::new();
    for x in h {
        for s in x.submessages() {
            match &s {
                Message::Concat(a, b) if **a == *m || **b == *m => {
                    parents.insert(s.clone());
                }
                Message::Encrypt(body, _) if **body == *m => {
                    parents.insert(s.clone());
                }
                _ => {}
            }
        }
    }
    open.push(m.clone());
    let found = parents.into_iter().any(|p| match &p {
        Message::Concat(..) => search(h, &p, budget - 1, open),
        Message::Encrypt(_, k) => {
            search(h, &p, budget - 1, open) && search(h, &Message::key(k.clone()), budget - 1, open)
        }
        _ => false,
    });
    open.pop();
    found
}

//! Shared generators and fixture helpers for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use mdl_reconcile::mdl::{Alt, Collection, Entry};
use mdl_reconcile::{ConstraintItem, Guard, Label, Problem, Term};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn golden_netlist() -> PathBuf {
    fixtures_dir().join("kmeans/kmeans.net")
}

pub fn no_k_netlist() -> PathBuf {
    fixtures_dir().join("kmeans/kmeans_no_k.net")
}

const SYMBOLS: &[&str] = &["int", "string", "float"];
const LABELS: &[&str] = &["a", "b", "c", "d"];

fn label(name: &str) -> Label {
    Label::new(name).unwrap()
}

fn entries<R: Rng>(rng: &mut R, max: usize, mut term: impl FnMut(&mut R) -> Term) -> Vec<Entry> {
    let n = rng.gen_range(0..=max);
    let mut labels: Vec<&str> = LABELS.to_vec();
    labels.shuffle(rng);
    labels[..n]
        .iter()
        .map(|l| Entry::new(label(l), Guard::True, term(rng)))
        .collect()
}

/// A ground canonical term (constant-true guards, no switches) of depth at
/// most `depth`.
pub fn ground_term<R: Rng>(rng: &mut R, depth: usize) -> Term {
    let atom = depth <= 1 || rng.gen_bool(0.3);
    if atom {
        return match rng.gen_range(0..4) {
            0 => Term::nil(),
            1 => Term::none(),
            _ => Term::symbol(*SYMBOLS.choose(rng).unwrap()),
        };
    }
    match rng.gen_range(0..3) {
        0 => {
            let n = rng.gen_range(1..=2);
            Term::Tuple((0..n).map(|_| ground_term(rng, depth - 1)).collect())
        }
        1 => Term::Record(Collection::new(entries(rng, 3, |r| ground_term(r, depth - 1)), None)),
        _ => Term::Choice(Collection::new(entries(rng, 3, |r| ground_term(r, depth - 1)), None)),
    }
}

/// A term junior to `t`: records gain fields, choices lose variants, and
/// subterms are weakened recursively.
pub fn junior_of<R: Rng>(rng: &mut R, t: &Term) -> Term {
    match t {
        // everything but a choice is junior to nil
        Term::Record(c) if c.entries.is_empty() && rng.gen_bool(0.3) => loop {
            let t = ground_term(rng, 2);
            if !t.is_choice() {
                break t;
            }
        },
        Term::Record(c) => {
            let mut es: Vec<Entry> = c
                .entries
                .iter()
                .map(|e| Entry::new(e.label.clone(), Guard::True, junior_of(rng, &e.term)))
                .collect();
            for l in LABELS {
                if rng.gen_bool(0.2) && !es.iter().any(|e| e.label.as_str() == *l) {
                    es.push(Entry::new(label(l), Guard::True, ground_term(rng, 1)));
                }
            }
            es.shuffle(rng);
            Term::Record(Collection::new(es, None))
        }
        Term::Choice(c) => {
            let mut es = Vec::new();
            for e in &c.entries {
                if rng.gen_bool(0.7) {
                    es.push(Entry::new(e.label.clone(), Guard::True, junior_of(rng, &e.term)));
                }
            }
            es.shuffle(rng);
            Term::Choice(Collection::new(es, None))
        }
        Term::Tuple(items) => Term::Tuple(items.iter().map(|x| junior_of(rng, x)).collect()),
        _ => t.clone(),
    }
}

/// Same term with record and choice entries shuffled.
pub fn permuted<R: Rng>(rng: &mut R, t: &Term) -> Term {
    let coll = |rng: &mut R, c: &Collection| {
        let mut es: Vec<Entry> = c
            .entries
            .iter()
            .map(|e| Entry::new(e.label.clone(), e.guard.clone(), permuted(rng, &e.term)))
            .collect();
        es.shuffle(rng);
        Collection::new(es, c.tail.clone())
    };
    match t {
        Term::Record(c) => Term::Record(coll(rng, c)),
        Term::Choice(c) => Term::Choice(coll(rng, c)),
        Term::Tuple(items) => Term::Tuple(items.iter().map(|x| permuted(rng, x)).collect()),
        _ => t.clone(),
    }
}

pub fn guard<R: Rng>(rng: &mut R, flags: &[&str], depth: usize) -> Guard {
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..10) {
            0 => Guard::True,
            1 => Guard::False,
            _ => Guard::flag(flags.choose(rng).unwrap()),
        };
    }
    match rng.gen_range(0..3) {
        0 => Guard::not(guard(rng, flags, depth - 1)),
        1 => Guard::and(guard(rng, flags, depth - 1), guard(rng, flags, depth - 1)),
        _ => Guard::or(guard(rng, flags, depth - 1), guard(rng, flags, depth - 1)),
    }
}

/// Arbitrary term for syntax round trips: guards, switches, variables and
/// tails included.
pub fn any_term<R: Rng>(rng: &mut R, depth: usize) -> Term {
    let flags = ["p", "q", "r"];
    if depth <= 1 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..6) {
            0 => Term::up(["u", "w", "m.x"].choose(rng).unwrap().to_string()),
            1 => Term::down(["v", "z", "m.y"].choose(rng).unwrap().to_string()),
            2 => Term::symbol("vector<vector<double>>"),
            _ => Term::symbol(*SYMBOLS.choose(rng).unwrap()),
        };
    }
    let coll = |rng: &mut R, tail: &[&str]| {
        let n = rng.gen_range(0..=3);
        let es = (0..n)
            .map(|_| {
                let g = if rng.gen_bool(0.5) { Guard::True } else { guard(rng, &flags, 2) };
                Entry::new(label(LABELS.choose(rng).unwrap()), g, any_term(rng, depth - 1))
            })
            .collect();
        let tail = rng.gen_bool(0.4).then(|| tail.choose(rng).unwrap().to_string());
        Collection::new(es, tail)
    };
    match rng.gen_range(0..4) {
        0 => Term::Tuple((0..rng.gen_range(1..=3)).map(|_| any_term(rng, depth - 1)).collect()),
        1 => Term::Record(coll(rng, &["v", "n.t"])),
        2 => Term::Choice(coll(rng, &["u", "n.s"])),
        _ => Term::Switch(
            (0..rng.gen_range(1..=3))
                .map(|_| Alt {
                    guard: guard(rng, &flags, 2),
                    term: any_term(rng, depth - 1),
                })
                .collect(),
        ),
    }
}

/// A tiny instance: at most three flags and two variables, shallow terms,
/// variables at the top or in tail position.
pub fn tiny_instance<R: Rng>(rng: &mut R) -> Problem {
    tiny_instance_with(rng, false)
}

/// As [`tiny_instance`]; `nested` also lets variables occur as entry terms.
pub fn tiny_instance_with<R: Rng>(rng: &mut R, nested: bool) -> Problem {
    let all_flags = ["f1", "f2", "f3"];
    let nflags = rng.gen_range(0..=3);
    let flags = &all_flags[..nflags];
    let up_var = rng.gen_bool(0.5).then_some("u");
    let down_var = rng.gen_bool(0.6).then_some("v");
    let syms = ["int", "string"];
    let labels = ["x", "y"];

    let g = |rng: &mut R| -> Guard {
        if flags.is_empty() || rng.gen_bool(0.4) {
            Guard::True
        } else {
            guard(rng, flags, 1)
        }
    };
    let leaf = |rng: &mut R| -> Term {
        match rng.gen_range(0..7) {
            0 => Term::nil(),
            5 if nested && down_var.is_some() => Term::down(down_var.unwrap()),
            6 if nested && up_var.is_some() => Term::up(up_var.unwrap()),
            _ => Term::symbol(*syms.choose(rng).unwrap()),
        }
    };
    let collection = |rng: &mut R, choice: bool| -> Term {
        let mut ls = labels.to_vec();
        ls.shuffle(rng);
        let n = rng.gen_range(0..=2);
        let es = ls[..n]
            .iter()
            .map(|l| Entry::new(label(l), g(rng), leaf(rng)))
            .collect();
        let tail = if choice {
            up_var.filter(|_| rng.gen_bool(0.4))
        } else {
            down_var.filter(|_| rng.gen_bool(0.4))
        };
        let c = Collection::new(es, tail.map(str::to_string));
        if choice {
            Term::Choice(c)
        } else {
            Term::Record(c)
        }
    };
    let side = |rng: &mut R, choice: bool| -> Term {
        match rng.gen_range(0..10) {
            0 | 1 => match (choice, up_var, down_var) {
                (true, Some(u), _) => Term::up(u),
                (false, _, Some(v)) => Term::down(v),
                _ => collection(rng, choice),
            },
            2 if !choice && !flags.is_empty() => Term::Switch(vec![
                Alt {
                    guard: Guard::flag(flags[0]),
                    term: leaf(rng),
                },
                Alt {
                    guard: Guard::not(Guard::flag(flags[0])),
                    term: leaf(rng),
                },
            ]),
            3 if !choice => leaf(rng),
            _ => collection(rng, choice),
        }
    };
    let n = rng.gen_range(1..=3);
    let constraints = (0..n)
        .map(|i| {
            let choice = rng.gen_bool(0.4);
            ConstraintItem::new(side(rng, choice), side(rng, choice), format!("c{i}"))
        })
        .collect();
    Problem::from_constraints(constraints)
}

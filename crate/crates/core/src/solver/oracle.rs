//! Exhaustive reference solver for tiny instances.
//!
//! Enumerates every flag assignment and every instantiation of the variables
//! drawn from a finite universe of shallow ground terms built from the
//! symbols, labels and tuple arities of the instance itself.

use std::collections::{BTreeMap, BTreeSet};

use crate::mdl::{Collection, Entry, FlagModel, Label, Term};

use super::bind::check_constraint;
use super::Problem;

#[derive(Clone, Copy, Debug)]
pub struct UniverseBounds {
    /// maximum term depth, atoms having depth 1
    pub max_depth: usize,
    /// maximum entries per record or choice
    pub max_entries: usize,
    /// maximum number of (model, instantiation) pairs to try
    pub max_candidates: u64,
}

impl Default for UniverseBounds {
    fn default() -> Self {
        UniverseBounds {
            max_depth: 2,
            max_entries: 2,
            max_candidates: 5_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleVerdict {
    Sat {
        model: FlagModel,
        up: BTreeMap<String, Term>,
        down: BTreeMap<String, Term>,
    },
    Unsat,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleVerdict::Sat { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search space of {0} candidates exceeds the limit")]
    UniverseTooLarge(u128),
}

struct Inventory {
    symbols: BTreeSet<String>,
    labels: BTreeSet<Label>,
    arities: BTreeSet<usize>,
}

fn scan(t: &Term, inv: &mut Inventory) {
    match t {
        Term::Symbol(s) => {
            inv.symbols.insert(s.clone());
        }
        Term::Tuple(items) => {
            inv.arities.insert(items.len());
            items.iter().for_each(|x| scan(x, inv));
        }
        Term::Record(c) | Term::Choice(c) => {
            for e in &c.entries {
                inv.labels.insert(e.label.clone());
                scan(&e.term, inv);
            }
        }
        Term::Switch(alts) => alts.iter().for_each(|a| scan(&a.term, inv)),
        Term::Up(_) | Term::Down(_) => {}
    }
}

/// All canonical ground terms of depth at most `depth`.
fn universe(inv: &Inventory, depth: usize, max_entries: usize) -> Vec<Term> {
    let mut out: Vec<Term> = inv.symbols.iter().map(Term::symbol).collect();
    out.push(Term::nil());
    out.push(Term::none());
    if depth <= 1 {
        return out;
    }
    let inner = universe(inv, depth - 1, max_entries);
    for &n in &inv.arities {
        for items in product(&inner, n) {
            out.push(Term::Tuple(items));
        }
    }
    let labels: Vec<&Label> = inv.labels.iter().collect();
    for k in 1..=max_entries.min(labels.len()) {
        for chosen in subsets(&labels, k) {
            for terms in product(&inner, k) {
                let entries: Vec<Entry> = chosen
                    .iter()
                    .zip(terms)
                    .map(|(l, t)| Entry::new((*l).clone(), crate::mdl::Guard::True, t))
                    .collect();
                out.push(Term::Record(Collection::new(entries.clone(), None)));
                out.push(Term::Choice(Collection::new(entries, None)));
            }
        }
    }
    out
}

fn product(items: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut acc = vec![Vec::new()];
    for _ in 0..n {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    acc
}

fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut with: Vec<Vec<T>> = subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    with.extend(subsets(&items[1..], k));
    with
}

/// Decides the instance by enumeration. Only instantiations inside the
/// universe are considered, so `Unsat` means "no solution of bounded depth".
pub fn brute_force_solve(problem: &Problem, bounds: &UniverseBounds) -> Result<OracleVerdict, OracleError> {
    let mut inv = Inventory {
        symbols: BTreeSet::new(),
        labels: BTreeSet::new(),
        arities: BTreeSet::new(),
    };
    for c in &problem.constraints {
        scan(&c.junior, &mut inv);
        scan(&c.senior, &mut inv);
    }
    let all = universe(&inv, bounds.max_depth, bounds.max_entries);
    let (ups, downs): (Vec<Term>, Vec<Term>) = all.into_iter().partition(Term::is_choice);

    let mut flags: BTreeSet<_> = problem.flags.clone();
    for c in &problem.constraints {
        flags.extend(c.junior.free_flags());
        flags.extend(c.senior.free_flags());
    }
    let flags: Vec<_> = flags.into_iter().collect();
    let vars_up: Vec<&String> = problem.vars_up.iter().collect();
    let vars_down: Vec<&String> = problem.vars_down.iter().collect();

    let total = (1u128 << flags.len().min(100))
        * (ups.len() as u128).pow(vars_up.len() as u32)
        * (downs.len() as u128).pow(vars_down.len() as u32);
    if total > u128::from(bounds.max_candidates) {
        return Err(OracleError::UniverseTooLarge(total));
    }

    for bits in 0u64..(1u64 << flags.len()) {
        let model: FlagModel = flags
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), bits >> i & 1 == 1))
            .collect();
        let mut up_idx = vec![0usize; vars_up.len()];
        loop {
            let up: BTreeMap<String, Term> = vars_up
                .iter()
                .zip(&up_idx)
                .map(|(v, &i)| ((*v).clone(), ups[i].clone()))
                .collect();
            let mut down_idx = vec![0usize; vars_down.len()];
            loop {
                let down: BTreeMap<String, Term> = vars_down
                    .iter()
                    .zip(&down_idx)
                    .map(|(v, &i)| ((*v).clone(), downs[i].clone()))
                    .collect();
                if problem
                    .constraints
                    .iter()
                    .all(|c| check_constraint(c, &model, &up, &down))
                {
                    return Ok(OracleVerdict::Sat { model, up, down });
                }
                if !advance(&mut down_idx, downs.len()) {
                    break;
                }
            }
            if !advance(&mut up_idx, ups.len()) {
                break;
            }
        }
    }
    Ok(OracleVerdict::Unsat)
}

/// Odometer step; false once every combination has been visited.
fn advance(idx: &mut [usize], radix: usize) -> bool {
    for i in idx.iter_mut() {
        *i += 1;
        if *i < radix {
            return true;
        }
        *i = 0;
    }
    false
}

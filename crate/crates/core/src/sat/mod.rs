//! The adjunct Boolean problem: a growing set of assertions over flags.
//!
//! Satisfiability is decided by a small DPLL search over a Tseitin encoding.
//! Models are chosen deterministically: flags are branched in name order,
//! false before true, so the returned model is the lexicographically least one.

mod cnf;
mod dpll;

use std::collections::{BTreeSet, HashSet};

use crate::mdl::{Flag, FlagModel, Guard};

pub use cnf::Cnf;

/// Insertion-ordered, duplicate-free conjunction of guards.
#[derive(Clone, Debug, Default)]
pub struct AssertionSet {
    assertions: Vec<Guard>,
    seen: HashSet<Guard>,
    generation: u64,
}

impl AssertionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `g` unless it is a tautology or already present after
    /// normalization. Returns whether the set grew.
    pub fn add(&mut self, g: Guard) -> bool {
        let g = g.normalize();
        if g.is_true() || self.seen.contains(&g) {
            return false;
        }
        self.seen.insert(g.clone());
        self.assertions.push(g);
        self.generation += 1;
        true
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn assertions(&self) -> &[Guard] {
        &self.assertions
    }

    pub fn flags(&self) -> BTreeSet<Flag> {
        let mut out = BTreeSet::new();
        for g in &self.assertions {
            g.collect_flags(&mut out);
        }
        out
    }

    pub fn to_cnf(&self) -> Cnf {
        Cnf::encode(&self.assertions, &BTreeSet::new())
    }
}

impl FromIterator<Guard> for AssertionSet {
    fn from_iter<I: IntoIterator<Item = Guard>>(iter: I) -> Self {
        let mut set = AssertionSet::new();
        for g in iter {
            set.add(g);
        }
        set
    }
}

pub fn is_satisfiable(set: &AssertionSet) -> bool {
    guards_satisfiable(set.assertions())
}

/// Satisfiability of a plain slice of guards.
pub fn guards_satisfiable(guards: &[Guard]) -> bool {
    let cnf = Cnf::encode(guards, &BTreeSet::new());
    dpll::solve(&cnf).is_some()
}

/// The false-first lexicographically least model over `all_flags` and every
/// flag of the set, or `None` if unsatisfiable.
pub fn solve_model(set: &AssertionSet, all_flags: &BTreeSet<Flag>) -> Option<FlagModel> {
    let cnf = Cnf::encode(set.assertions(), all_flags);
    let assignment = dpll::solve(&cnf)?;
    Some(
        cnf.flag_vars()
            .iter()
            .map(|(f, &v)| (f.clone(), assignment[v as usize]))
            .collect(),
    )
}

/// Whether every model of `set` satisfies `g`.
pub fn implied(set: &AssertionSet, g: &Guard) -> bool {
    let mut guards = set.assertions().to_vec();
    guards.push(Guard::not(g.clone()).normalize());
    !guards_satisfiable(&guards)
}

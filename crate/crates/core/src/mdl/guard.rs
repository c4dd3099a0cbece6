//! Boolean guards over flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Flag, MdlError};

/// A total assignment of truth values to flags.
pub type FlagModel = BTreeMap<Flag, bool>;

/// Boolean expression attached to record/choice entries and switch alternatives.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    False,
    True,
    Flag(Flag),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn flag(name: &str) -> Guard {
        Guard::Flag(Flag::new(name).expect("valid flag name"))
    }

    pub fn not(g: Guard) -> Guard {
        Guard::Not(Box::new(g))
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        Guard::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Guard, b: Guard) -> Guard {
        Guard::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Guard, b: Guard) -> Guard {
        Guard::or(Guard::not(a), b)
    }

    pub fn iff(a: Guard, b: Guard) -> Guard {
        Guard::and(Guard::implies(a.clone(), b.clone()), Guard::implies(b, a))
    }

    /// Conjunction of all guards; `True` for an empty iterator.
    pub fn all<I: IntoIterator<Item = Guard>>(items: I) -> Guard {
        let mut it = items.into_iter();
        match it.next() {
            None => Guard::True,
            Some(first) => it.fold(first, Guard::and),
        }
    }

    /// Disjunction of all guards; `False` for an empty iterator.
    pub fn any<I: IntoIterator<Item = Guard>>(items: I) -> Guard {
        let mut it = items.into_iter();
        match it.next() {
            None => Guard::False,
            Some(first) => it.fold(first, Guard::or),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Guard::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Guard::False)
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Guard::True | Guard::False)
    }

    pub fn flags(&self) -> BTreeSet<Flag> {
        let mut out = BTreeSet::new();
        self.collect_flags(&mut out);
        out
    }

    pub(crate) fn collect_flags(&self, out: &mut BTreeSet<Flag>) {
        match self {
            Guard::False | Guard::True => {}
            Guard::Flag(f) => {
                out.insert(f.clone());
            }
            Guard::Not(g) => g.collect_flags(out),
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.collect_flags(out);
                b.collect_flags(out);
            }
        }
    }

    pub fn eval(&self, model: &FlagModel) -> Result<bool, MdlError> {
        Ok(match self {
            Guard::False => false,
            Guard::True => true,
            Guard::Flag(f) => *model
                .get(f)
                .ok_or_else(|| MdlError::MissingFlag(f.to_string()))?,
            Guard::Not(g) => !g.eval(model)?,
            Guard::And(a, b) => a.eval(model)? && b.eval(model)?,
            Guard::Or(a, b) => a.eval(model)? || b.eval(model)?,
        })
    }

    /// Replaces every flag with its model value, then folds constants.
    pub fn substitute(&self, model: &FlagModel) -> Result<Guard, MdlError> {
        Ok(if self.eval(model)? {
            Guard::True
        } else {
            Guard::False
        })
    }

    /// Normal form used for deduplication and syntactic comparison: constants
    /// folded, double negations removed, nested conjunctions/disjunctions
    /// flattened with sorted, deduplicated operands.
    pub fn normalize(&self) -> Guard {
        match self {
            Guard::False | Guard::True | Guard::Flag(_) => self.clone(),
            Guard::Not(g) => match g.normalize() {
                Guard::True => Guard::False,
                Guard::False => Guard::True,
                Guard::Not(inner) => *inner,
                other => Guard::not(other),
            },
            Guard::And(..) => normalize_nary(self, true),
            Guard::Or(..) => normalize_nary(self, false),
        }
    }
}

fn flatten<'a>(g: &'a Guard, conj: bool, out: &mut Vec<&'a Guard>) {
    match (g, conj) {
        (Guard::And(a, b), true) | (Guard::Or(a, b), false) => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        _ => out.push(g),
    }
}

fn normalize_nary(g: &Guard, conj: bool) -> Guard {
    let (unit, absorbing) = if conj {
        (Guard::True, Guard::False)
    } else {
        (Guard::False, Guard::True)
    };
    let mut raw = Vec::new();
    flatten(g, conj, &mut raw);
    let mut ops = BTreeSet::new();
    for op in raw {
        let n = op.normalize();
        // normalizing an operand may surface a nested operator of the same kind
        let mut parts = Vec::new();
        flatten(&n, conj, &mut parts);
        for p in parts {
            if *p == absorbing {
                return absorbing;
            }
            if *p != unit {
                ops.insert(p.clone());
            }
        }
    }
    for op in &ops {
        if let Guard::Not(inner) = op {
            if ops.contains(inner.as_ref()) {
                return absorbing;
            }
        }
    }
    let mut it = ops.into_iter();
    let Some(first) = it.next() else {
        return unit;
    };
    it.fold(first, |acc, op| {
        if conj {
            Guard::and(acc, op)
        } else {
            Guard::or(acc, op)
        }
    })
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::print::guard_to_string(self))
    }
}

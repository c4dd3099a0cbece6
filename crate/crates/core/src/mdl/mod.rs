//! The message definition term algebra.
//!
//! Terms are symbols, tuples, records, choices, switches and term variables.
//! Up-coerced variables (`$^v`) range over choices, down-coerced variables
//! (`$_v`) over everything else. Records and choices carry guarded entries and
//! an optional tail variable of the matching sort.
//!
//! Entry order is kept for printing only; [`Term::sem_eq`] compares records,
//! choices and switches modulo permutation.

mod guard;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use guard::{FlagModel, Guard};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MdlError {
    #[error("flag `{0}` is not assigned by the model")]
    MissingFlag(String),
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("tuples must have at least one item")]
    EmptyTuple,
    #[error("switches must have at least one alternative")]
    EmptySwitch,
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("switch does not have exactly one true alternative")]
    IllFormedSwitch,
    #[error("term is not ground")]
    NotGround,
    #[error("term is not well-formed")]
    NotWellFormed,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

macro_rules! ident_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Result<Self, MdlError> {
                let name = name.into();
                if valid_identifier(&name) {
                    Ok($name(name))
                } else {
                    Err(MdlError::InvalidIdentifier(name))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

ident_newtype!(
    /// Record field or choice variant name.
    Label
);
ident_newtype!(
    /// Boolean variable occurring in guards. Flag names are global to a network.
    Flag
);

/// Coercion sort of a term: choices and up-coerced variables are `Up`,
/// everything else is `Down`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entry {
    pub label: Label,
    pub guard: Guard,
    pub term: Term,
}

impl Entry {
    pub fn new(label: Label, guard: Guard, term: Term) -> Self {
        Entry { label, guard, term }
    }
}

/// Entries plus optional tail variable, shared by records and choices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Collection {
    pub entries: Vec<Entry>,
    pub tail: Option<String>,
}

impl Collection {
    pub fn new(entries: Vec<Entry>, tail: Option<String>) -> Self {
        Collection { entries, tail }
    }

    pub fn is_empty_closed(&self) -> bool {
        self.entries.is_empty() && self.tail.is_none()
    }

    pub fn with_label<'a>(&'a self, label: &'a Label) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| &e.label == label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alt {
    pub guard: Guard,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Symbol(String),
    Tuple(Vec<Term>),
    Record(Collection),
    Choice(Collection),
    Switch(Vec<Alt>),
    Up(String),
    Down(String),
}

impl Term {
    pub fn symbol(name: impl Into<String>) -> Term {
        Term::Symbol(name.into())
    }

    pub fn tuple(items: Vec<Term>) -> Result<Term, MdlError> {
        if items.is_empty() {
            return Err(MdlError::EmptyTuple);
        }
        Ok(Term::Tuple(items))
    }

    pub fn switch(alts: Vec<Alt>) -> Result<Term, MdlError> {
        if alts.is_empty() {
            return Err(MdlError::EmptySwitch);
        }
        Ok(Term::Switch(alts))
    }

    pub fn up(name: impl Into<String>) -> Term {
        Term::Up(name.into())
    }

    pub fn down(name: impl Into<String>) -> Term {
        Term::Down(name.into())
    }

    /// The empty record.
    pub fn nil() -> Term {
        Term::Record(Collection::default())
    }

    /// The empty choice.
    pub fn none() -> Term {
        Term::Choice(Collection::default())
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Record(c) if c.is_empty_closed())
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Term::Choice(c) if c.is_empty_closed())
    }

    pub fn is_choice(&self) -> bool {
        matches!(self, Term::Choice(_))
    }

    /// `None` for switches whose alternatives disagree on sort.
    pub fn sort(&self) -> Option<Sort> {
        match self {
            Term::Choice(_) | Term::Up(_) => Some(Sort::Up),
            Term::Symbol(_) | Term::Tuple(_) | Term::Record(_) | Term::Down(_) => Some(Sort::Down),
            Term::Switch(alts) => {
                let mut sorts = alts.iter().map(|a| a.term.sort());
                let first = sorts.next()??;
                sorts.all(|s| s == Some(first)).then_some(first)
            }
        }
    }

    pub fn free_vars_up(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |sort, name| {
            if sort == Sort::Up {
                out.insert(name.to_string());
            }
        });
        out
    }

    pub fn free_vars_down(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |sort, name| {
            if sort == Sort::Down {
                out.insert(name.to_string());
            }
        });
        out
    }

    pub fn free_flags(&self) -> BTreeSet<Flag> {
        let mut out = BTreeSet::new();
        self.collect_flags(&mut out);
        out
    }

    fn collect_flags(&self, out: &mut BTreeSet<Flag>) {
        match self {
            Term::Symbol(_) | Term::Up(_) | Term::Down(_) => {}
            Term::Tuple(items) => items.iter().for_each(|t| t.collect_flags(out)),
            Term::Record(c) | Term::Choice(c) => {
                for e in &c.entries {
                    e.guard.collect_flags(out);
                    e.term.collect_flags(out);
                }
            }
            Term::Switch(alts) => {
                for a in alts {
                    a.guard.collect_flags(out);
                    a.term.collect_flags(out);
                }
            }
        }
    }

    /// Calls `f` for every variable occurrence, tails included.
    pub fn visit_vars(&self, f: &mut impl FnMut(Sort, &str)) {
        match self {
            Term::Symbol(_) => {}
            Term::Up(v) => f(Sort::Up, v),
            Term::Down(v) => f(Sort::Down, v),
            Term::Tuple(items) => items.iter().for_each(|t| t.visit_vars(f)),
            Term::Record(c) => {
                c.entries.iter().for_each(|e| e.term.visit_vars(f));
                if let Some(v) = &c.tail {
                    f(Sort::Down, v);
                }
            }
            Term::Choice(c) => {
                c.entries.iter().for_each(|e| e.term.visit_vars(f));
                if let Some(v) = &c.tail {
                    f(Sort::Up, v);
                }
            }
            Term::Switch(alts) => alts.iter().for_each(|a| a.term.visit_vars(f)),
        }
    }

    pub fn is_semi_ground(&self) -> bool {
        let mut any = false;
        self.visit_vars(&mut |_, _| any = true);
        !any
    }

    pub fn is_ground(&self) -> bool {
        self.is_semi_ground() && self.free_flags().is_empty()
    }

    /// Number of nested constructors; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Symbol(_) | Term::Up(_) | Term::Down(_) => 1,
            Term::Tuple(items) => 1 + items.iter().map(Term::depth).max().unwrap_or(0),
            Term::Record(c) | Term::Choice(c) => {
                if c.entries.is_empty() {
                    1
                } else {
                    1 + c.entries.iter().map(|e| e.term.depth()).max().unwrap_or(0)
                }
            }
            Term::Switch(alts) => 1 + alts.iter().map(|a| a.term.depth()).max().unwrap_or(0),
        }
    }

    /// Replaces every guard by its constant value under `model`.
    pub fn substitute_flags(&self, model: &FlagModel) -> Result<Term, MdlError> {
        self.map_guards(&mut |g| g.substitute(model))
    }

    fn map_guards(
        &self,
        f: &mut impl FnMut(&Guard) -> Result<Guard, MdlError>,
    ) -> Result<Term, MdlError> {
        Ok(match self {
            Term::Symbol(_) | Term::Up(_) | Term::Down(_) => self.clone(),
            Term::Tuple(items) => Term::Tuple(
                items
                    .iter()
                    .map(|t| t.map_guards(f))
                    .collect::<Result<_, _>>()?,
            ),
            Term::Record(c) => Term::Record(map_collection_guards(c, f)?),
            Term::Choice(c) => Term::Choice(map_collection_guards(c, f)?),
            Term::Switch(alts) => Term::Switch(
                alts.iter()
                    .map(|a| {
                        Ok(Alt {
                            guard: f(&a.guard)?,
                            term: a.term.map_guards(f)?,
                        })
                    })
                    .collect::<Result<_, MdlError>>()?,
            ),
        })
    }

    /// Normalizes every guard (see [`Guard::normalize`]).
    pub fn normalize_guards(&self) -> Term {
        self.map_guards(&mut |g| Ok(g.normalize()))
            .expect("normalization is infallible")
    }

    /// Simultaneous substitution of term variables. A tail variable bound to a
    /// collection of the same kind is spliced: its entries are appended to the
    /// host and its tail becomes the host's tail. Unbound names are kept.
    pub fn substitute_vars(
        &self,
        up: &BTreeMap<String, Term>,
        down: &BTreeMap<String, Term>,
    ) -> Result<Term, MdlError> {
        Ok(match self {
            Term::Symbol(_) => self.clone(),
            Term::Up(v) => match up.get(v) {
                None => self.clone(),
                Some(t) if t.is_choice() => t.clone(),
                Some(_) => {
                    return Err(MdlError::SortMismatch(format!(
                        "up-coerced `{v}` bound to a non-choice"
                    )))
                }
            },
            Term::Down(v) => match down.get(v) {
                None => self.clone(),
                Some(t) if t.sort() != Some(Sort::Up) => t.clone(),
                Some(_) => {
                    return Err(MdlError::SortMismatch(format!(
                        "down-coerced `{v}` bound to a choice"
                    )))
                }
            },
            Term::Tuple(items) => Term::Tuple(
                items
                    .iter()
                    .map(|t| t.substitute_vars(up, down))
                    .collect::<Result<_, _>>()?,
            ),
            Term::Record(c) => {
                let mut out = substitute_entries(c, up, down)?;
                if let Some(v) = &c.tail {
                    match down.get(v) {
                        None => out.tail = Some(v.clone()),
                        Some(Term::Record(bound)) => {
                            out.entries.extend(bound.entries.iter().cloned());
                            out.tail = bound.tail.clone();
                        }
                        Some(_) => {
                            return Err(MdlError::SortMismatch(format!(
                                "record tail `{v}` bound to a non-record"
                            )))
                        }
                    }
                }
                Term::Record(out)
            }
            Term::Choice(c) => {
                let mut out = substitute_entries(c, up, down)?;
                if let Some(v) = &c.tail {
                    match up.get(v) {
                        None => out.tail = Some(v.clone()),
                        Some(Term::Choice(bound)) => {
                            out.entries.extend(bound.entries.iter().cloned());
                            out.tail = bound.tail.clone();
                        }
                        Some(_) => {
                            return Err(MdlError::SortMismatch(format!(
                                "choice tail `{v}` bound to a non-choice"
                            )))
                        }
                    }
                }
                Term::Choice(out)
            }
            Term::Switch(alts) => Term::Switch(
                alts.iter()
                    .map(|a| {
                        Ok(Alt {
                            guard: a.guard.clone(),
                            term: a.term.substitute_vars(up, down)?,
                        })
                    })
                    .collect::<Result<_, MdlError>>()?,
            ),
        })
    }

    /// Canonical form: guards normalized, `false` entries and alternatives
    /// dropped, switches with a single `true` alternative collapsed to it, and
    /// duplicate entries (same label, same guard, semantically equal term)
    /// merged. Applied bottom-up; non-constant guards are left in place.
    pub fn canonicalize(&self) -> Result<Term, MdlError> {
        Ok(match self {
            Term::Symbol(_) | Term::Up(_) | Term::Down(_) => self.clone(),
            Term::Tuple(items) => Term::Tuple(
                items
                    .iter()
                    .map(Term::canonicalize)
                    .collect::<Result<_, _>>()?,
            ),
            Term::Record(c) => Term::Record(canonical_collection(c)?),
            Term::Choice(c) => Term::Choice(canonical_collection(c)?),
            Term::Switch(alts) => {
                let mut live = Vec::new();
                for a in alts {
                    let guard = a.guard.normalize();
                    if !guard.is_false() {
                        live.push((guard, &a.term));
                    }
                }
                if live.iter().all(|(g, _)| g.is_const()) {
                    // every remaining guard is `true`
                    if live.len() != 1 {
                        return Err(MdlError::IllFormedSwitch);
                    }
                    live[0].1.canonicalize()?
                } else {
                    Term::Switch(
                        live.into_iter()
                            .map(|(guard, t)| {
                                Ok(Alt {
                                    guard,
                                    term: t.canonicalize()?,
                                })
                            })
                            .collect::<Result<_, MdlError>>()?,
                    )
                }
            }
        })
    }

    /// Well-formedness of a ground term: unique labels among enabled entries,
    /// nonempty tuples, switches with exactly one `true` alternative, and
    /// well-formed enabled subterms.
    pub fn is_well_formed(&self) -> Result<bool, MdlError> {
        if !self.is_semi_ground() {
            return Err(MdlError::NotGround);
        }
        self.well_formed_inner()
    }

    fn well_formed_inner(&self) -> Result<bool, MdlError> {
        let truth = |g: &Guard| -> Result<bool, MdlError> {
            match g.normalize() {
                Guard::True => Ok(true),
                Guard::False => Ok(false),
                _ => Err(MdlError::NotGround),
            }
        };
        match self {
            Term::Symbol(_) => Ok(true),
            Term::Tuple(items) => {
                if items.is_empty() {
                    return Ok(false);
                }
                for t in items {
                    if !t.well_formed_inner()? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Term::Record(c) | Term::Choice(c) => {
                let mut seen = BTreeSet::new();
                for e in &c.entries {
                    if truth(&e.guard)?
                        && (!seen.insert(&e.label) || !e.term.well_formed_inner()?) {
                            return Ok(false);
                        }
                }
                Ok(true)
            }
            Term::Switch(alts) => {
                let mut enabled = None;
                for a in alts {
                    if truth(&a.guard)? {
                        if enabled.is_some() {
                            return Ok(false);
                        }
                        enabled = Some(&a.term);
                    }
                }
                match enabled {
                    Some(t) => t.well_formed_inner(),
                    None => Ok(false),
                }
            }
            Term::Up(_) | Term::Down(_) => Err(MdlError::NotGround),
        }
    }

    /// Representative of the term's permutation class: guards normalized,
    /// record/choice entries and switch alternatives sorted and deduplicated.
    pub fn normalized(&self) -> Term {
        match self {
            Term::Symbol(_) | Term::Up(_) | Term::Down(_) => self.clone(),
            Term::Tuple(items) => Term::Tuple(items.iter().map(Term::normalized).collect()),
            Term::Record(c) => Term::Record(normalized_collection(c)),
            Term::Choice(c) => Term::Choice(normalized_collection(c)),
            Term::Switch(alts) => {
                let set: BTreeSet<Alt> = alts
                    .iter()
                    .map(|a| Alt {
                        guard: a.guard.normalize(),
                        term: a.term.normalized(),
                    })
                    .filter(|a| !a.guard.is_false())
                    .collect();
                Term::Switch(set.into_iter().collect())
            }
        }
    }

    /// Equality modulo entry order and guard normalization.
    pub fn sem_eq(&self, other: &Term) -> bool {
        self == other || self.normalized() == other.normalized()
    }
}

fn map_collection_guards(
    c: &Collection,
    f: &mut impl FnMut(&Guard) -> Result<Guard, MdlError>,
) -> Result<Collection, MdlError> {
    Ok(Collection {
        entries: c
            .entries
            .iter()
            .map(|e| {
                Ok(Entry {
                    label: e.label.clone(),
                    guard: f(&e.guard)?,
                    term: e.term.map_guards(f)?,
                })
            })
            .collect::<Result<_, MdlError>>()?,
        tail: c.tail.clone(),
    })
}

fn substitute_entries(
    c: &Collection,
    up: &BTreeMap<String, Term>,
    down: &BTreeMap<String, Term>,
) -> Result<Collection, MdlError> {
    Ok(Collection {
        entries: c
            .entries
            .iter()
            .map(|e| {
                Ok(Entry {
                    label: e.label.clone(),
                    guard: e.guard.clone(),
                    term: e.term.substitute_vars(up, down)?,
                })
            })
            .collect::<Result<_, MdlError>>()?,
        tail: None,
    })
}

fn canonical_collection(c: &Collection) -> Result<Collection, MdlError> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut keys: Vec<(Label, Guard, Term)> = Vec::new();
    for e in &c.entries {
        let guard = e.guard.normalize();
        if guard.is_false() {
            continue;
        }
        let term = e.term.canonicalize()?;
        let key = (e.label.clone(), guard.clone(), term.normalized());
        if keys.contains(&key) {
            continue;
        }
        keys.push(key);
        entries.push(Entry {
            label: e.label.clone(),
            guard,
            term,
        });
    }
    Ok(Collection {
        entries,
        tail: c.tail.clone(),
    })
}

fn normalized_collection(c: &Collection) -> Collection {
    let set: BTreeSet<Entry> = c
        .entries
        .iter()
        .map(|e| Entry {
            label: e.label.clone(),
            guard: e.guard.normalize(),
            term: e.term.normalized(),
        })
        .filter(|e| !e.guard.is_false())
        .collect();
    Collection {
        entries: set.into_iter().collect(),
        tail: c.tail.clone(),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::print::term_to_string(self))
    }
}

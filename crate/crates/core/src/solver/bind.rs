//! Reading ground instantiations off the approximations.

use std::collections::BTreeMap;

use crate::mdl::{FlagModel, MdlError, Term};
use crate::seniority::{join, meet, seniority_holds};

use super::{Approx, ConstraintItem, Snapshot};

type Bindings = BTreeMap<String, Term>;

/// Rounds of re-materialization before giving up on mutually dependent
/// bounds.
const MAX_ROUNDS: usize = 32;

/// Bindings larger than this many constructors are taken as a sign of a
/// bound that refers to its own variable, which has no finite solution.
const MAX_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BindError {
    #[error(transparent)]
    Term(#[from] MdlError),
    #[error("bounds of `{0}` have no common junior")]
    NoMeet(String),
    #[error("bounds of `{0}` have no common senior")]
    NoJoin(String),
    #[error("bound of `{0}` is not well-formed under the model")]
    IllFormed(String),
    #[error("instantiations did not stabilize")]
    NotConverged,
}

/// Instantiates every variable of `snapshot` under `model`: the join of the
/// enabled lower bounds of each up variable and the meet of the enabled upper
/// bounds of each down variable. Bounds that mention other variables are
/// re-evaluated until the bindings stop changing.
pub fn bind(snapshot: &Snapshot, model: &FlagModel) -> Result<(Bindings, Bindings), BindError> {
    let up_bounds = enabled(&snapshot.up, model)?;
    let down_bounds = enabled(&snapshot.down, model)?;
    let mut up: Bindings = up_bounds.keys().map(|v| (v.clone(), Term::none())).collect();
    let mut down: Bindings = down_bounds.keys().map(|v| (v.clone(), Term::nil())).collect();

    for _ in 0..MAX_ROUNDS {
        let mut next_up = Bindings::new();
        for (v, terms) in &up_bounds {
            let mut acc = Term::none();
            for t in terms {
                let t = ground(v, t, &up, &down)?;
                acc = join(&acc, &t).ok_or_else(|| BindError::NoJoin(v.clone()))?;
            }
            next_up.insert(v.clone(), acc);
        }
        let mut next_down = Bindings::new();
        for (v, terms) in &down_bounds {
            let mut acc = Term::nil();
            for t in terms {
                let t = ground(v, t, &up, &down)?;
                acc = meet(&acc, &t).ok_or_else(|| BindError::NoMeet(v.clone()))?;
            }
            next_down.insert(v.clone(), acc);
        }
        let stable = same(&next_up, &up) && same(&next_down, &down);
        up = next_up;
        down = next_down;
        if stable {
            return Ok((up, down));
        }
    }
    Err(BindError::NotConverged)
}

/// Flag-substituted terms of the bounds enabled by `model`.
fn enabled(approx: &Approx, model: &FlagModel) -> Result<BTreeMap<String, Vec<Term>>, BindError> {
    let mut out = BTreeMap::new();
    for (v, bounds) in approx {
        let mut terms = Vec::new();
        for b in bounds {
            if b.guard.eval(model)? {
                terms.push(b.term.substitute_flags(model)?);
            }
        }
        out.insert(v.clone(), terms);
    }
    Ok(out)
}

fn size(t: &Term) -> usize {
    match t {
        Term::Symbol(_) | Term::Up(_) | Term::Down(_) => 1,
        Term::Tuple(items) => 1 + items.iter().map(size).sum::<usize>(),
        Term::Record(c) | Term::Choice(c) => 1 + c.entries.iter().map(|e| size(&e.term)).sum::<usize>(),
        Term::Switch(alts) => 1 + alts.iter().map(|a| size(&a.term)).sum::<usize>(),
    }
}

fn ground(v: &str, t: &Term, up: &Bindings, down: &Bindings) -> Result<Term, BindError> {
    let t = t.substitute_vars(up, down)?.canonicalize()?;
    if size(&t) > MAX_SIZE {
        return Err(BindError::NotConverged);
    }
    if !t.is_well_formed()? {
        return Err(BindError::IllFormed(v.to_string()));
    }
    Ok(t)
}

fn same(a: &Bindings, b: &Bindings) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|((k, x), (l, y))| k == l && x.sem_eq(y))
}

/// Whether `junior ⊑ senior` holds once flags and then variables are
/// substituted. Any failure along the way counts as a violation.
pub(crate) fn check_constraint(
    c: &ConstraintItem,
    model: &FlagModel,
    up: &Bindings,
    down: &Bindings,
) -> bool {
    let instantiate = |t: &Term| -> Result<Term, MdlError> {
        t.substitute_flags(model)?.substitute_vars(up, down)?.canonicalize()
    };
    match (instantiate(&c.junior), instantiate(&c.senior)) {
        (Ok(j), Ok(s)) => seniority_holds(&j, &s).unwrap_or(false),
        _ => false,
    }
}

/// Per-constraint verdicts for a candidate solution.
pub fn verify_solution(
    constraints: &[ConstraintItem],
    model: &FlagModel,
    up: &Bindings,
    down: &Bindings,
) -> Vec<bool> {
    constraints
        .iter()
        .map(|c| check_constraint(c, model, up, down))
        .collect()
}

//! The seniority relation: structural subtyping on ground terms.
//!
//! `t ⊑ s` reads "t is junior to s": a message of shape `t` is acceptable
//! wherever `s` is expected. Records are covariant in their field sets and
//! choices contravariant in their variant sets.

use crate::mdl::{Collection, Guard, MdlError, Term};

/// `junior ⊑ senior` on ground well-formed terms. Both sides are
/// canonicalized first, so switches and false-guarded entries are allowed.
pub fn seniority_holds(junior: &Term, senior: &Term) -> Result<bool, MdlError> {
    let j = prepare(junior)?;
    let s = prepare(senior)?;
    Ok(holds(&j, &s))
}

fn prepare(t: &Term) -> Result<Term, MdlError> {
    if !t.is_ground() {
        return Err(MdlError::NotGround);
    }
    if !t.is_well_formed()? {
        return Err(MdlError::NotWellFormed);
    }
    t.canonicalize()
}

/// The relation proper, on canonical terms.
pub(crate) fn holds(t: &Term, s: &Term) -> bool {
    if t.is_none() && s.is_choice() {
        return true;
    }
    if s.is_nil() && !t.is_choice() {
        return true;
    }
    match (t, s) {
        (Term::Symbol(a), Term::Symbol(b)) => a == b,
        (Term::Tuple(xs), Term::Tuple(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| holds(x, y))
        }
        // every senior field is provided by the junior
        (Term::Record(jr), Term::Record(sr)) => covers(jr, sr, holds),
        // every junior variant is accepted by the senior
        (Term::Choice(jc), Term::Choice(sc)) => covers(sc, jc, |s, j| holds(j, s)),
        _ => t == s,
    }
}

/// Every entry of `small` has a same-label entry in `big` related by `rel`.
fn covers(big: &Collection, small: &Collection, rel: impl Fn(&Term, &Term) -> bool) -> bool {
    small.entries.iter().all(|e| {
        big.entries
            .iter()
            .any(|b| b.label == e.label && rel(&b.term, &e.term))
    })
}

/// Greatest common junior of two canonical ground terms, if any.
pub(crate) fn meet(a: &Term, b: &Term) -> Option<Term> {
    if holds(a, b) {
        return Some(a.clone());
    }
    if holds(b, a) {
        return Some(b.clone());
    }
    match (a, b) {
        (Term::Tuple(xs), Term::Tuple(ys)) if xs.len() == ys.len() => xs
            .iter()
            .zip(ys)
            .map(|(x, y)| meet(x, y))
            .collect::<Option<Vec<_>>>()
            .map(Term::Tuple),
        (Term::Record(x), Term::Record(y)) => {
            let mut entries = Vec::new();
            for e in &x.entries {
                match y.entries.iter().find(|f| f.label == e.label) {
                    Some(f) => {
                        let mut e = e.clone();
                        e.term = meet(&e.term, &f.term)?;
                        entries.push(e);
                    }
                    None => entries.push(e.clone()),
                }
            }
            for f in &y.entries {
                if !x.entries.iter().any(|e| e.label == f.label) {
                    entries.push(f.clone());
                }
            }
            Some(Term::Record(Collection::new(entries, None)))
        }
        (Term::Choice(x), Term::Choice(y)) => {
            let entries = x
                .entries
                .iter()
                .filter_map(|e| {
                    let f = y.entries.iter().find(|f| f.label == e.label)?;
                    let mut e = e.clone();
                    e.term = meet(&e.term, &f.term)?;
                    Some(e)
                })
                .collect();
            Some(Term::Choice(Collection::new(entries, None)))
        }
        _ => None,
    }
}

/// Least common senior of two canonical ground terms, if any. Only a choice
/// against a non-choice has none.
pub(crate) fn join(a: &Term, b: &Term) -> Option<Term> {
    if holds(a, b) {
        return Some(b.clone());
    }
    if holds(b, a) {
        return Some(a.clone());
    }
    match (a, b) {
        (Term::Choice(x), Term::Choice(y)) => {
            let mut entries = Vec::new();
            for e in &x.entries {
                match y.entries.iter().find(|f| f.label == e.label) {
                    Some(f) => {
                        let mut e = e.clone();
                        e.term = join(&e.term, &f.term)?;
                        entries.push(e);
                    }
                    None => entries.push(e.clone()),
                }
            }
            for f in &y.entries {
                if !x.entries.iter().any(|e| e.label == f.label) {
                    entries.push(f.clone());
                }
            }
            Some(Term::Choice(Collection::new(entries, None)))
        }
        (Term::Choice(_), _) | (_, Term::Choice(_)) => None,
        (Term::Tuple(xs), Term::Tuple(ys)) if xs.len() == ys.len() => Some(
            xs.iter()
                .zip(ys)
                .map(|(x, y)| join(x, y))
                .collect::<Option<Vec<_>>>()
                .map(Term::Tuple)
                .unwrap_or_else(Term::nil),
        ),
        (Term::Record(x), Term::Record(y)) => {
            let entries = x
                .entries
                .iter()
                .filter_map(|e| {
                    let f = y.entries.iter().find(|f| f.label == e.label)?;
                    let mut e = e.clone();
                    e.term = join(&e.term, &f.term)?;
                    Some(e)
                })
                .collect();
            Some(Term::Record(Collection::new(entries, None)))
        }
        _ => Some(Term::nil()),
    }
}

/// Guard under which two semi-ground terms denote the same ground term.
/// Variables compare by name only, which is conservative.
pub(crate) fn equal_when(a: &Term, b: &Term) -> Guard {
    match (a, b) {
        (Term::Switch(alts), _) => {
            Guard::all(alts.iter().map(|x| Guard::implies(x.guard.clone(), equal_when(&x.term, b))))
        }
        (_, Term::Switch(alts)) => {
            Guard::all(alts.iter().map(|x| Guard::implies(x.guard.clone(), equal_when(a, &x.term))))
        }
        (Term::Symbol(x), Term::Symbol(y)) => const_guard(x == y),
        (Term::Up(x), Term::Up(y)) | (Term::Down(x), Term::Down(y)) => const_guard(x == y),
        (Term::Tuple(xs), Term::Tuple(ys)) => {
            if xs.len() != ys.len() {
                return Guard::False;
            }
            Guard::all(xs.iter().zip(ys).map(|(x, y)| equal_when(x, y)))
        }
        (Term::Record(x), Term::Record(y)) | (Term::Choice(x), Term::Choice(y)) => {
            if x.tail != y.tail {
                return Guard::False;
            }
            let mut labels: Vec<_> = x.entries.iter().chain(&y.entries).map(|e| &e.label).collect();
            labels.sort();
            labels.dedup();
            let mut parts = Vec::new();
            for l in labels {
                let xe: Vec<_> = x.with_label(l).collect();
                let ye: Vec<_> = y.with_label(l).collect();
                parts.push(Guard::iff(
                    Guard::any(xe.iter().map(|e| e.guard.clone())),
                    Guard::any(ye.iter().map(|e| e.guard.clone())),
                ));
                for p in &xe {
                    for q in &ye {
                        parts.push(Guard::implies(
                            Guard::and(p.guard.clone(), q.guard.clone()),
                            equal_when(&p.term, &q.term),
                        ));
                    }
                }
            }
            Guard::all(parts).normalize()
        }
        _ => Guard::False,
    }
}

fn const_guard(b: bool) -> Guard {
    if b {
        Guard::True
    } else {
        Guard::False
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn le(a: &str, b: &str) -> bool {
        seniority_holds(&t(a), &t(b)).unwrap()
    }

    #[test]
    fn definition_examples() {
        assert!(le("{fname: string, K: int}", "{fname: string}"));
        assert!(le("(: init: {K: int} :)", "(: init: {K: int}, error: {msg: string} :)"));
        assert!(!le("(int)", "(int int)"));
        assert!(le("{x: int}", "{}"));
        assert!(le("(: :)", "(: a: {} :)"));
    }

    #[test]
    fn categories_never_mix() {
        assert!(!le("(: a: {} :)", "{}"));
        assert!(!le("{}", "(: a: {} :)"));
        assert!(!le("int", "(int)"));
        assert!(!le("{x: int}", "(: x: int :)"));
        assert!(le("(: :)", "(: :)"));
        assert!(le("{}", "{}"));
    }

    #[test]
    fn nested_variance() {
        assert!(le("(: a: {x: int, y: int} :)", "(: a: {x: int}, b: {} :)"));
        assert!(!le("(: a: {x: int} :)", "(: a: {x: int, y: int} :)"));
        assert!(le("({a: int, b: int} sym)", "({a: int} sym)"));
    }

    #[test]
    fn preconditions() {
        assert_eq!(seniority_holds(&Term::down("v"), &Term::nil()), Err(MdlError::NotGround));
        assert_eq!(
            seniority_holds(&t("{x: int, x: string}"), &Term::nil()),
            Err(MdlError::NotWellFormed)
        );
        assert!(le("<false: int, true: string>", "string"));
    }

    #[test]
    fn lattice_operations() {
        let a = t("{x: int}");
        let b = t("{y: int}");
        assert_eq!(meet(&a, &b), Some(t("{x: int, y: int}")));
        assert_eq!(join(&a, &b), Some(Term::nil()));
        let c = t("(: a: {} :)");
        let d = t("(: b: {} :)");
        assert_eq!(join(&c, &d), Some(t("(: a: {}, b: {} :)")));
        assert_eq!(meet(&c, &d), Some(Term::none()));
        assert_eq!(meet(&t("int"), &t("string")), None);
        assert_eq!(join(&c, &a), None);
    }

    #[test]
    fn symbolic_equality() {
        assert!(equal_when(&t("int"), &t("int")).is_true());
        assert!(equal_when(&t("int"), &t("string")).is_false());
        let g = equal_when(&t("{x(a): int}"), &t("{x: int}"));
        assert_eq!(g, t_guard("a"));
    }

    fn t_guard(s: &str) -> Guard {
        crate::frontend::parse_guard(s).unwrap().normalize()
    }
}

//! Solver state and the per-constraint dispatch.

use std::collections::{BTreeMap, BTreeSet};

use crate::mdl::{Collection, Entry, Guard, Sort, Term};
use crate::sat::{self, AssertionSet};
use crate::seniority::{equal_when, join, meet};

use super::Snapshot;

/// A bound on a variable, active when `guard` holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub guard: Guard,
    pub term: Term,
}

/// Bounds per variable name.
pub type Approx = BTreeMap<String, Vec<Bound>>;

pub struct SolverState {
    assertions: AssertionSet,
    /// constraint index responsible for each assertion
    origins: Vec<usize>,
    current: usize,
    up: Approx,
    down: Approx,
    /// bound expansions in progress, to cut cycles through tails
    expanding: Vec<(Sort, String, Term)>,
    changed: BTreeSet<String>,
}

impl SolverState {
    pub fn new(vars_up: &BTreeSet<String>, vars_down: &BTreeSet<String>) -> Self {
        SolverState {
            assertions: AssertionSet::new(),
            origins: Vec::new(),
            current: 0,
            up: vars_up.iter().map(|v| (v.clone(), Vec::new())).collect(),
            down: vars_down.iter().map(|v| (v.clone(), Vec::new())).collect(),
            expanding: Vec::new(),
            changed: BTreeSet::new(),
        }
    }

    pub fn assertions(&self) -> &AssertionSet {
        &self.assertions
    }

    pub fn approx_up(&self) -> &Approx {
        &self.up
    }

    pub fn approx_down(&self) -> &Approx {
        &self.down
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            up: self.up.clone(),
            down: self.down.clone(),
        }
    }

    pub(crate) fn begin_constraint(&mut self, index: usize) {
        self.current = index;
    }

    pub(crate) fn take_changed(&mut self) -> Vec<String> {
        std::mem::take(&mut self.changed).into_iter().collect()
    }

    pub fn assert(&mut self, g: Guard) {
        if self.assertions.add(g) {
            self.origins.push(self.current);
        }
    }

    /// Whether everything asserted since `prior` is implied by it.
    pub fn check_fixed_point(&self, prior: &AssertionSet) -> bool {
        self.assertions.assertions()[prior.len()..]
            .iter()
            .all(|g| sat::implied(prior, g))
    }

    /// The constraint that produced the shortest unsatisfiable prefix of the
    /// assertions.
    pub(crate) fn first_contradiction(&self) -> Option<usize> {
        let all = self.assertions.assertions();
        if sat::guards_satisfiable(all) {
            return None;
        }
        // smallest n with all[..n] unsatisfiable
        let (mut lo, mut hi) = (0, all.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if sat::guards_satisfiable(&all[..mid]) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo.checked_sub(1).map(|i| self.origins[i])
    }

    /// `cond → (t ⊑ senior)`.
    pub fn solve_constraint(&mut self, cond: &Guard, t: &Term, senior: &Term) {
        let cond = cond.normalize();
        if cond.is_false() {
            return;
        }
        self.assert_well_formed(&cond, t);
        self.assert_well_formed(&cond, senior);

        if (t.is_none() && senior.sort() == Some(Sort::Up))
            || (senior.is_nil() && t.sort() == Some(Sort::Down))
            || (t.is_ground() && senior.is_ground() && t.sem_eq(senior))
        {
            return;
        }

        match (t, senior) {
            (Term::Up(v), Term::Up(w)) => {
                for b in self.up[v].clone() {
                    self.update_approx_up(w, b.term, &Guard::and(cond.clone(), b.guard));
                }
            }
            (Term::Down(v), Term::Down(w)) => {
                for b in self.down[w].clone() {
                    self.update_approx_down(v, b.term, &Guard::and(cond.clone(), b.guard));
                }
            }
            (Term::Symbol(_) | Term::Tuple(_) | Term::Record(_), Term::Down(w)) => {
                self.expand(Sort::Down, &cond, w, t);
            }
            (Term::Choice(_), Term::Up(w)) => self.update_approx_up(w, t.clone(), &cond),
            (Term::Down(v), Term::Symbol(_) | Term::Tuple(_) | Term::Record(_)) => {
                self.update_approx_down(v, senior.clone(), &cond)
            }
            (Term::Up(v), Term::Choice(_)) => self.expand(Sort::Up, &cond, v, senior),
            (Term::Tuple(xs), Term::Tuple(ys)) => {
                if xs.len() == ys.len() {
                    for (x, y) in xs.iter().zip(ys) {
                        self.solve_constraint(&cond, x, y);
                    }
                } else {
                    self.assert(Guard::not(cond));
                }
            }
            (Term::Record(j), Term::Record(s)) if j.is_empty_closed() => self.solve_nil_record(&cond, s),
            // only nil is senior to a non-record, so the record must collapse to it
            (Term::Symbol(_) | Term::Tuple(_), Term::Record(s)) => self.solve_nil_record(&cond, s),
            (Term::Record(j), Term::Record(s)) => self.solve_record_record(&cond, j, s),
            (Term::Choice(j), Term::Choice(s)) => self.solve_choice_choice(&cond, j, s),
            (Term::Switch(alts), _) => {
                for a in alts {
                    self.solve_constraint(&Guard::and(cond.clone(), a.guard.clone()), &a.term, senior);
                }
            }
            (_, Term::Switch(alts)) => {
                for a in alts {
                    self.solve_constraint(&Guard::and(cond.clone(), a.guard.clone()), t, &a.term);
                }
            }
            _ => self.assert(Guard::not(cond)),
        }
    }

    /// Well-formedness of the top constructor under `cond`. Same-label entries
    /// may coexist only when equal; switches need exactly one enabled
    /// alternative.
    pub fn assert_well_formed(&mut self, cond: &Guard, t: &Term) {
        match t {
            Term::Record(c) | Term::Choice(c) => {
                for (i, a) in c.entries.iter().enumerate() {
                    for b in &c.entries[i + 1..] {
                        if a.label == b.label {
                            let clash = Guard::all([
                                a.guard.clone(),
                                b.guard.clone(),
                                Guard::not(equal_when(&a.term, &b.term)),
                            ]);
                            self.assert(Guard::implies(cond.clone(), Guard::not(clash)));
                        }
                    }
                }
            }
            Term::Switch(alts) => {
                self.assert(Guard::implies(
                    cond.clone(),
                    Guard::any(alts.iter().map(|a| a.guard.clone())),
                ));
                for (i, a) in alts.iter().enumerate() {
                    for b in &alts[i + 1..] {
                        self.assert(Guard::implies(
                            cond.clone(),
                            Guard::not(Guard::and(a.guard.clone(), b.guard.clone())),
                        ));
                    }
                }
            }
            _ => {}
        }
    }

    pub fn solve_nil_record(&mut self, cond: &Guard, senior: &Collection) {
        let none_enabled = Guard::all(senior.entries.iter().map(|e| Guard::not(e.guard.clone())));
        self.assert(Guard::implies(cond.clone(), none_enabled));
        if let Some(w) = &senior.tail {
            self.expand(Sort::Down, cond, w, &Term::nil());
        }
    }

    pub fn solve_record_record(&mut self, cond: &Guard, junior: &Collection, senior: &Collection) {
        for s in &senior.entries {
            let matches: Vec<&Entry> = junior.with_label(&s.label).collect();
            if matches.is_empty() {
                match &junior.tail {
                    Some(v) => self.update_approx_down(v, single_record(s.clone()), cond),
                    None => self.assert(Guard::implies(cond.clone(), Guard::not(s.guard.clone()))),
                }
                continue;
            }
            let provided = Guard::any(matches.iter().map(|e| e.guard.clone()));
            match &junior.tail {
                // the tail may supply the field when no explicit entry does
                Some(v) => {
                    let residual = Entry::new(
                        s.label.clone(),
                        Guard::and(s.guard.clone(), Guard::not(provided)).normalize(),
                        s.term.clone(),
                    );
                    if !residual.guard.is_false() {
                        self.update_approx_down(v, single_record(residual), cond);
                    }
                }
                None => self.assert(Guard::implies(
                    cond.clone(),
                    Guard::implies(s.guard.clone(), provided),
                )),
            }
            for j in matches {
                let sub = Guard::all([cond.clone(), s.guard.clone(), j.guard.clone()]);
                self.solve_constraint(&sub, &j.term, &s.term);
            }
        }
        if let Some(w) = &senior.tail {
            self.expand(Sort::Down, cond, w, &Term::Record(junior.clone()));
        }
    }

    pub fn solve_choice_choice(&mut self, cond: &Guard, junior: &Collection, senior: &Collection) {
        for j in &junior.entries {
            let matches: Vec<&Entry> = senior.with_label(&j.label).collect();
            if matches.is_empty() {
                match &senior.tail {
                    Some(w) => self.update_approx_up(w, single_choice(j.clone()), cond),
                    None => self.assert(Guard::implies(cond.clone(), Guard::not(j.guard.clone()))),
                }
                continue;
            }
            let accepted = Guard::any(matches.iter().map(|e| e.guard.clone()));
            match &senior.tail {
                Some(w) => {
                    let residual = Entry::new(
                        j.label.clone(),
                        Guard::and(j.guard.clone(), Guard::not(accepted)).normalize(),
                        j.term.clone(),
                    );
                    if !residual.guard.is_false() {
                        self.update_approx_up(w, single_choice(residual), cond);
                    }
                }
                None => self.assert(Guard::implies(
                    cond.clone(),
                    Guard::implies(j.guard.clone(), accepted),
                )),
            }
            for s in matches {
                let sub = Guard::all([cond.clone(), j.guard.clone(), s.guard.clone()]);
                self.solve_constraint(&sub, &j.term, &s.term);
            }
        }
        if let Some(u) = &junior.tail {
            self.expand(Sort::Up, cond, u, &Term::Choice(senior.clone()));
        }
    }

    /// Checks `other` against every bound of `var`: `other ⊑ bound` for down
    /// variables, `bound ⊑ other` for up variables.
    fn expand(&mut self, sort: Sort, cond: &Guard, var: &str, other: &Term) {
        let key = (sort, var.to_string(), other.normalized());
        if self.expanding.contains(&key) {
            return;
        }
        self.expanding.push(key);
        let bounds = match sort {
            Sort::Up => self.up[var].clone(),
            Sort::Down => self.down[var].clone(),
        };
        for b in bounds {
            let sub = Guard::and(cond.clone(), b.guard);
            match sort {
                Sort::Up => self.solve_constraint(&sub, &b.term, other),
                Sort::Down => self.solve_constraint(&sub, other, &b.term),
            }
        }
        self.expanding.pop();
    }

    /// Adds an upper bound `contribution` to `$_v` under `cond`.
    pub fn update_approx_down(&mut self, v: &str, contribution: Term, cond: &Guard) {
        if contribution.sort() != Some(Sort::Down) {
            self.assert(Guard::not(cond.clone()));
            return;
        }
        if contribution.is_nil() {
            return;
        }
        self.add_bound(Sort::Down, v, contribution, cond);
    }

    /// Adds a lower bound `contribution` to `$^v` under `cond`.
    pub fn update_approx_up(&mut self, v: &str, contribution: Term, cond: &Guard) {
        if contribution.sort() != Some(Sort::Up) {
            self.assert(Guard::not(cond.clone()));
            return;
        }
        if contribution.is_none() {
            return;
        }
        self.add_bound(Sort::Up, v, contribution, cond);
    }

    fn add_bound(&mut self, sort: Sort, v: &str, term: Term, cond: &Guard) {
        let guard = cond.normalize();
        if guard.is_false() {
            return;
        }
        let key = term.normalized();
        let bounds = match sort {
            Sort::Up => self.up.get_mut(v),
            Sort::Down => self.down.get_mut(v),
        }
        .expect("variable declared");
        if let Some(b) = bounds.iter_mut().find(|b| b.term.normalized() == key) {
            let widened = Guard::or(b.guard.clone(), guard).normalize();
            // only a semantically weaker guard counts as a change
            if !sat::guards_satisfiable(&[widened.clone(), Guard::not(b.guard.clone())]) {
                return;
            }
            b.guard = widened;
            self.changed.insert(format!("{}{v}", super::sort_prefix(sort)));
            return;
        }
        // incommensurable ground bounds cannot be enabled together
        let mut conflicts = Vec::new();
        if term.is_ground() {
            let canon = term.canonicalize().ok();
            for b in bounds.iter().filter(|b| b.term.is_ground()) {
                let (Some(x), Ok(y)) = (&canon, b.term.canonicalize()) else { continue };
                let combined = match sort {
                    Sort::Up => join(x, &y),
                    Sort::Down => meet(x, &y),
                };
                if combined.is_none() {
                    conflicts.push(Guard::not(Guard::and(guard.clone(), b.guard.clone())));
                }
            }
        }
        bounds.push(Bound { guard, term });
        self.changed.insert(format!("{}{v}", super::sort_prefix(sort)));
        for g in conflicts {
            self.assert(g);
        }
    }
}

fn single_record(e: Entry) -> Term {
    Term::Record(Collection::new(vec![e], None))
}

fn single_choice(e: Entry) -> Term {
    Term::Choice(Collection::new(vec![e], None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_guard, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn g(s: &str) -> Guard {
        parse_guard(s).unwrap()
    }

    fn state(up: &[&str], down: &[&str]) -> SolverState {
        SolverState::new(
            &up.iter().map(|s| s.to_string()).collect(),
            &down.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn asserted(s: &SolverState) -> Vec<String> {
        s.assertions().assertions().iter().map(|g| g.to_string()).collect()
    }

    #[test]
    fn down_var_against_record() {
        let mut s = state(&[], &["v"]);
        s.solve_constraint(&Guard::True, &Term::down("v"), &t("{x: int}"));
        assert_eq!(s.approx_down()["v"], vec![Bound { guard: Guard::True, term: t("{x: int}") }]);
    }

    #[test]
    fn equal_ground_terms_are_vacuous() {
        let mut s = state(&[], &[]);
        s.solve_constraint(&Guard::True, &t("int"), &t("int"));
        assert!(s.assertions().is_empty());
        s.solve_constraint(&g("b"), &t("int"), &t("string"));
        assert_eq!(asserted(&s), vec!["not b"]);
    }

    #[test]
    fn well_formedness_assertions() {
        let mut s = state(&[], &[]);
        s.assert_well_formed(&Guard::True, &t("{x(b1): int, x(b2): string}"));
        assert_eq!(asserted(&s), vec!["not (and b1 b2)"]);
        let mut s = state(&[], &[]);
        s.assert_well_formed(&Guard::True, &t("<b1: int, b2: string>"));
        assert_eq!(asserted(&s), vec!["or b1 b2", "not (and b1 b2)"]);
        let mut s = state(&[], &[]);
        s.assert_well_formed(&Guard::True, &t("{x: int, y: int}"));
        assert!(s.assertions().is_empty());
    }

    #[test]
    fn tuple_arity_mismatch() {
        let mut s = state(&[], &["v"]);
        s.solve_constraint(&g("c"), &t("(int)"), &t("(int int)"));
        assert_eq!(asserted(&s), vec!["not c"]);
        s.solve_constraint(&Guard::True, &t("($_v)"), &t("(int)"));
        assert_eq!(s.approx_down()["v"][0].term, t("int"));
    }

    #[test]
    fn nil_against_record() {
        let mut s = state(&[], &[]);
        s.solve_constraint(&Guard::True, &Term::nil(), &t("{x(b1): int}"));
        s.solve_constraint(&Guard::True, &Term::nil(), &t("{x(b1): int, y(b2): str}"));
        assert_eq!(asserted(&s), vec!["not b1", "and (not b1) (not b2)"]);
    }

    #[test]
    fn record_record_cases() {
        let mut s = state(&[], &["ro1"]);
        s.solve_constraint(&Guard::True, &t("{img(c): matrix | $_ro1}"), &t("{K: int, img: matrix}"));
        assert_eq!(s.approx_down()["ro1"][0].term, t("{K: int}"));
        let mut s = state(&[], &[]);
        s.solve_constraint(&Guard::True, &t("{fname: string, K: int}"), &t("{fname: string}"));
        assert!(s.assertions().is_empty());
        s.solve_constraint(&Guard::True, &t("{x: int}"), &t("{y(b): int}"));
        assert_eq!(asserted(&s), vec!["not b"]);
    }

    #[test]
    fn choice_choice_cases() {
        let mut s = state(&["r"], &[]);
        s.solve_constraint(
            &Guard::True,
            &t("(: read_color: {fname: string}, init: {K: int} :)"),
            &t("(: read_color(c): {fname: string}, read_grayscale(g): {fname: string} | $^r :)"),
        );
        // a disabled read_color may still be absorbed by the tail
        assert!(s.assertions().is_empty());
        let r: Vec<Term> = s.approx_up()["r"].iter().map(|b| b.term.clone()).collect();
        assert_eq!(
            r,
            vec![t("(: read_color(not c): {fname: string} :)"), t("(: init: {K: int} :)")]
        );
        let mut s = state(&[], &[]);
        s.solve_constraint(
            &Guard::True,
            &t("(: read_color: {fname: string} :)"),
            &t("(: read_color(c): {fname: string} :)"),
        );
        assert_eq!(asserted(&s), vec!["c"]);
        let mut s = state(&[], &[]);
        s.solve_constraint(&Guard::True, &t("(: a: {} :)"), &t("(: a: {}, b: {} :)"));
        assert!(s.assertions().is_empty());
        s.solve_constraint(&Guard::True, &t("(: a(b_a): {} :)"), &t("(: c: {} :)"));
        assert_eq!(asserted(&s), vec!["not b_a"]);
    }

    #[test]
    fn switch_cases() {
        let mut s = state(&[], &[]);
        s.solve_constraint(&Guard::True, &t("<a: int, not a: string>"), &t("string"));
        let b = s.assertions().clone();
        assert!(sat::implied(&b, &g("not a")));
        let mut s = state(&[], &[]);
        s.solve_constraint(&Guard::True, &t("int"), &t("<b1: int, b2: string>"));
        assert!(sat::implied(s.assertions(), &g("not b2")));
    }

    #[test]
    fn bound_merging() {
        let mut s = state(&["u"], &["v"]);
        s.update_approx_down("v", t("{K: int}"), &Guard::True);
        s.update_approx_down("v", t("{K: int}"), &g("b"));
        assert_eq!(s.approx_down()["v"], vec![Bound { guard: Guard::True, term: t("{K: int}") }]);
        let mut s = state(&["u"], &["v"]);
        s.update_approx_down("v", t("int"), &Guard::True);
        s.update_approx_down("v", t("string"), &g("b"));
        assert_eq!(asserted(&s), vec!["not b"]);
        s.update_approx_up("u", t("(: a: int :)"), &Guard::True);
        s.update_approx_up("u", t("(: a: (: x: {} :) :)"), &g("b"));
        assert_eq!(asserted(&s), vec!["not b"]);
        s.update_approx_down("v", Term::none(), &g("d"));
        assert_eq!(asserted(&s), vec!["not b", "not d"]);
    }
}

//! Backtracking search with unit propagation.
//!
//! Decisions are made on the lowest unassigned variable, false first. This
//! makes the first model found the lexicographically least one over the flag
//! variables, since propagation only ever assigns forced values.

use super::Cnf;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    Unset,
    True,
    False,
}

struct Search<'a> {
    clauses: &'a [Vec<i32>],
    /// clause indices per literal, indexed by `lit_index`
    occurs: Vec<Vec<usize>>,
    values: Vec<Value>,
    trail: Vec<u32>,
}

fn lit_index(lit: i32) -> usize {
    let v = lit.unsigned_abs() as usize;
    2 * v + usize::from(lit < 0)
}

impl<'a> Search<'a> {
    fn new(cnf: &'a Cnf) -> Self {
        let n = cnf.num_vars() as usize;
        let mut occurs = vec![Vec::new(); 2 * n + 2];
        for (i, c) in cnf.clauses().iter().enumerate() {
            for &lit in c {
                occurs[lit_index(lit)].push(i);
            }
        }
        Search {
            clauses: cnf.clauses(),
            occurs,
            values: vec![Value::Unset; n + 1],
            trail: Vec::new(),
        }
    }

    fn lit_value(&self, lit: i32) -> Value {
        match (self.values[lit.unsigned_abs() as usize], lit > 0) {
            (Value::Unset, _) => Value::Unset,
            (Value::True, true) | (Value::False, false) => Value::True,
            _ => Value::False,
        }
    }

    fn assign(&mut self, lit: i32) {
        let v = lit.unsigned_abs();
        self.values[v as usize] = if lit > 0 { Value::True } else { Value::False };
        self.trail.push(v);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail nonempty");
            self.values[v as usize] = Value::Unset;
        }
    }

    /// Returns false on conflict. `from` is the trail position whose
    /// assignments have not been propagated yet.
    fn propagate(&mut self, mut from: usize) -> bool {
        let clauses = self.clauses;
        while from < self.trail.len() {
            let v = self.trail[from] as i32;
            from += 1;
            // clauses containing the literal made false by this assignment
            let falsified = if self.values[v as usize] == Value::True { -v } else { v };
            for ci in 0..self.occurs[lit_index(falsified)].len() {
                let clause = &clauses[self.occurs[lit_index(falsified)][ci]];
                let mut unset = None;
                let mut n_unset = 0;
                let mut satisfied = false;
                for &lit in clause {
                    match self.lit_value(lit) {
                        Value::True => {
                            satisfied = true;
                            break;
                        }
                        Value::Unset => {
                            n_unset += 1;
                            unset = Some(lit);
                        }
                        Value::False => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match n_unset {
                    0 => return false,
                    1 => self.assign(unset.expect("one unset literal")),
                    _ => {}
                }
            }
        }
        true
    }

    fn run(&mut self) -> bool {
        if self.clauses.iter().any(|c| c.is_empty()) {
            return false;
        }
        // initial unit clauses
        let clauses = self.clauses;
        for c in clauses {
            if c.len() == 1 {
                match self.lit_value(c[0]) {
                    Value::False => return false,
                    Value::Unset => self.assign(c[0]),
                    Value::True => {}
                }
            }
        }
        if !self.propagate(0) {
            return false;
        }
        self.decide(1)
    }

    fn decide(&mut self, start: usize) -> bool {
        let Some(var) = (start..self.values.len()).find(|&v| self.values[v] == Value::Unset) else {
            return true;
        };
        for lit in [-(var as i32), var as i32] {
            let mark = self.trail.len();
            self.assign(lit);
            if self.propagate(mark) && self.decide(var + 1) {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

/// A satisfying assignment indexed by variable (index 0 unused), or `None`.
pub(crate) fn solve(cnf: &Cnf) -> Option<Vec<bool>> {
    let mut s = Search::new(cnf);
    if !s.run() {
        return None;
    }
    Some(s.values.iter().map(|v| *v == Value::True).collect())
}

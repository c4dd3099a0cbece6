//! Tseitin encoding of guard conjunctions and DIMACS output.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use crate::mdl::{Flag, Guard};

/// Clausal form. Variables are numbered from 1; flags come first in name
/// order, auxiliary definition variables after them.
#[derive(Clone, Debug)]
pub struct Cnf {
    num_vars: u32,
    num_flags: u32,
    clauses: Vec<Vec<i32>>,
    flag_vars: BTreeMap<Flag, u32>,
}

impl Cnf {
    pub fn encode(guards: &[Guard], extra_flags: &BTreeSet<Flag>) -> Cnf {
        let mut flags = extra_flags.clone();
        for g in guards {
            g.collect_flags(&mut flags);
        }
        let flag_vars: BTreeMap<Flag, u32> = flags
            .into_iter()
            .enumerate()
            .map(|(i, f)| (f, i as u32 + 1))
            .collect();
        let num_flags = flag_vars.len() as u32;
        let mut enc = Encoder {
            flag_vars: &flag_vars,
            next: num_flags + 1,
            clauses: Vec::new(),
            memo: HashMap::new(),
        };
        for g in guards {
            let g = g.normalize();
            match g {
                Guard::True => {}
                Guard::False => enc.clauses.push(Vec::new()),
                _ => {
                    let mut conj = Vec::new();
                    top_conjuncts(&g, &mut conj);
                    for c in conj {
                        enc.assert_clause(c);
                    }
                }
            }
        }
        let num_vars = enc.next - 1;
        let clauses = enc.clauses;
        Cnf {
            num_vars,
            num_flags,
            clauses,
            flag_vars,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_flags(&self) -> u32 {
        self.num_flags
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn flag_vars(&self) -> &BTreeMap<Flag, u32> {
        &self.flag_vars
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        out.push_str("c adjunct assertions, flags first\n");
        for (f, v) in &self.flag_vars {
            let _ = writeln!(out, "c flag {v} {f}");
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

fn top_conjuncts<'a>(g: &'a Guard, out: &mut Vec<&'a Guard>) {
    match g {
        Guard::And(a, b) => {
            top_conjuncts(a, out);
            top_conjuncts(b, out);
        }
        _ => out.push(g),
    }
}

struct Encoder<'a> {
    flag_vars: &'a BTreeMap<Flag, u32>,
    next: u32,
    clauses: Vec<Vec<i32>>,
    memo: HashMap<Guard, i32>,
}

impl Encoder<'_> {
    /// Adds `g` as a clause directly when it is a disjunction of literals,
    /// otherwise through its definition literal.
    fn assert_clause(&mut self, g: &Guard) {
        let mut ops = Vec::new();
        flatten(g, false, &mut ops);
        let clause: Vec<i32> = ops.into_iter().map(|op| self.literal(op)).collect();
        self.clauses.push(clause);
    }

    fn fresh(&mut self) -> i32 {
        let v = self.next;
        self.next += 1;
        v as i32
    }

    fn literal(&mut self, g: &Guard) -> i32 {
        match g {
            Guard::Flag(f) => self.flag_vars[f] as i32,
            Guard::Not(inner) => -self.literal(inner),
            Guard::True | Guard::False => {
                // only reachable through unnormalized input
                let x = self.fresh();
                self.clauses.push(vec![if g.is_true() { x } else { -x }]);
                x
            }
            Guard::And(..) | Guard::Or(..) => {
                if let Some(&lit) = self.memo.get(g) {
                    return lit;
                }
                let conj = matches!(g, Guard::And(..));
                let mut ops = Vec::new();
                flatten(g, conj, &mut ops);
                let lits: Vec<i32> = ops.into_iter().map(|op| self.literal(op)).collect();
                let x = self.fresh();
                if conj {
                    // x <-> l1 & ... & ln
                    for &l in &lits {
                        self.clauses.push(vec![-x, l]);
                    }
                    let mut big: Vec<i32> = lits.iter().map(|l| -l).collect();
                    big.push(x);
                    self.clauses.push(big);
                } else {
                    // x <-> l1 | ... | ln
                    for &l in &lits {
                        self.clauses.push(vec![x, -l]);
                    }
                    let mut big = lits;
                    big.push(-x);
                    self.clauses.push(big);
                }
                self.memo.insert(g.clone(), x);
                x
            }
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

//! Fixed-point solver for seniority constraints with an adjunct SAT problem.
//!
//! Every variable carries a list of guarded bounds: lower bounds for
//! up-coerced variables, upper bounds for down-coerced ones. Bounds are kept
//! symbolic (they may mention other variables) and grow monotonically. Each
//! outer iteration walks all constraints, adding bounds and Boolean
//! assertions, until neither changes. Ground instantiations are then read
//! off under the selected flag model: least joins for up variables, greatest
//! meets for down variables.

mod bind;
mod oracle;
mod state;

use std::collections::{BTreeMap, BTreeSet};

use crate::config::SolverConfig;
use crate::mdl::{Flag, FlagModel, Guard, Label, Sort, Term};
use crate::sat::{self, AssertionSet};

pub use bind::{bind, verify_solution, BindError};
pub use oracle::{brute_force_solve, OracleError, OracleVerdict, UniverseBounds};
pub use state::{Approx, Bound, SolverState};

/// `junior ⊑ senior`, tagged with where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintItem {
    pub junior: Term,
    pub senior: Term,
    pub origin: String,
}

impl ConstraintItem {
    pub fn new(junior: Term, senior: Term, origin: impl Into<String>) -> Self {
        ConstraintItem {
            junior,
            senior,
            origin: origin.into(),
        }
    }
}

/// An input-channel variant of a component, reported dead when its guard is
/// false under the chosen model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantSite {
    pub component: String,
    pub channel: u32,
    pub label: Label,
    pub guard: Guard,
}

impl VariantSite {
    pub fn name(&self) -> String {
        format!("{}.{}.{}", self.component, self.channel, self.label)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub constraints: Vec<ConstraintItem>,
    pub flags: BTreeSet<Flag>,
    pub vars_up: BTreeSet<String>,
    pub vars_down: BTreeSet<String>,
    pub variants: Vec<VariantSite>,
}

impl Problem {
    /// Problem whose inventories are exactly what the constraints mention.
    pub fn from_constraints(constraints: Vec<ConstraintItem>) -> Problem {
        let mut p = Problem {
            constraints,
            ..Problem::default()
        };
        for c in &p.constraints {
            for t in [&c.junior, &c.senior] {
                p.flags.extend(t.free_flags());
                p.vars_up.extend(t.free_vars_up());
                p.vars_down.extend(t.free_vars_down());
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub model: FlagModel,
    pub bindings_up: BTreeMap<String, Term>,
    pub bindings_down: BTreeMap<String, Term>,
    pub dead_variants: Vec<String>,
    pub verification: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Sat(Solution),
    /// `origin` names the constraint whose processing produced the first
    /// contradiction, when one can be singled out.
    Unsat { origin: Option<String> },
    BoundExceeded,
}

impl Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat(_))
    }

    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Sat(_) => "sat",
            Outcome::Unsat { .. } => "unsat",
            Outcome::BoundExceeded => "bound_exceeded",
        }
    }
}

/// One top-level constraint visit.
#[derive(Clone, Debug)]
pub struct TraceRecord {
    pub iteration: usize,
    pub constraint: usize,
    pub origin: String,
    pub new_assertions: Vec<Guard>,
    pub changed: Vec<String>,
}

impl std::fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "iter={} constraint={} origin=\"{}\"",
            self.iteration, self.constraint, self.origin
        )?;
        write!(f, " changed=[{}]", self.changed.join(","))?;
        let asserted: Vec<String> = self.new_assertions.iter().map(|g| g.to_string()).collect();
        write!(f, " asserted=[{}]", asserted.join("; "))
    }
}

/// Approximations at the end of one outer iteration (index 0 is the start).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Snapshot {
    pub up: Approx,
    pub down: Approx,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub iterations: usize,
    pub assertions: AssertionSet,
    pub trace: Vec<TraceRecord>,
    pub snapshots: Vec<Snapshot>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("variable `{0}` is not declared")]
    UndeclaredVariable(String),
}

/// Models tried after the fixed point before giving up on finding one whose
/// instantiation verifies.
const REFINEMENT_LIMIT: usize = 4096;

pub fn solve_network(problem: &Problem, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    for c in &problem.constraints {
        for t in [&c.junior, &c.senior] {
            if let Some(v) = t.free_vars_up().into_iter().find(|v| !problem.vars_up.contains(v)) {
                return Err(SolveError::UndeclaredVariable(format!("$^{v}")));
            }
            if let Some(v) = t.free_vars_down().into_iter().find(|v| !problem.vars_down.contains(v)) {
                return Err(SolveError::UndeclaredVariable(format!("$_{v}")));
            }
        }
    }

    let mut state = SolverState::new(&problem.vars_up, &problem.vars_down);
    let mut trace = Vec::new();
    let mut snapshots = Vec::new();
    if config.trace {
        snapshots.push(state.snapshot());
    }
    let max = config.max_iterations.max(1);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max {
        iterations += 1;
        let before = state.snapshot();
        let prior = state.assertions().clone();
        for (j, c) in problem.constraints.iter().enumerate() {
            let mark = state.assertions().len();
            state.begin_constraint(j);
            state.solve_constraint(&Guard::True, &c.junior, &c.senior);
            if config.trace {
                trace.push(TraceRecord {
                    iteration: iterations,
                    constraint: j,
                    origin: c.origin.clone(),
                    new_assertions: state.assertions().assertions()[mark..].to_vec(),
                    changed: state.take_changed(),
                });
            }
        }
        let after = state.snapshot();
        if config.trace {
            snapshots.push(after.clone());
        }
        if after == before && state.check_fixed_point(&prior) {
            converged = true;
            break;
        }
    }
    let assertions = state.assertions().clone();
    if !converged {
        return Ok(SolveReport {
            outcome: Outcome::BoundExceeded,
            iterations,
            assertions,
            trace,
            snapshots,
        });
    }

    let outcome = select_solution(problem, &state);
    Ok(SolveReport {
        outcome,
        iterations,
        assertions,
        trace,
        snapshots,
    })
}

fn select_solution(problem: &Problem, state: &SolverState) -> Outcome {
    let b = state.assertions();
    if !sat::is_satisfiable(b) {
        return Outcome::Unsat {
            origin: state
                .first_contradiction()
                .map(|i| problem.constraints[i].origin.clone()),
        };
    }
    let mut all_flags = problem.flags.clone();
    all_flags.extend(b.flags());
    let snapshot = state.snapshot();
    let mut refined = b.clone();
    for _ in 0..REFINEMENT_LIMIT {
        let Some(model) = sat::solve_model(&refined, &all_flags) else {
            return Outcome::Unsat {
                origin: Some("no flag model admits a verifiable instantiation".into()),
            };
        };
        if let Ok((up, down)) = bind(&snapshot, &model) {
            let verification = verify_solution(&problem.constraints, &model, &up, &down);
            if verification.iter().all(|&ok| ok) {
                let dead_variants = problem
                    .variants
                    .iter()
                    .filter(|v| !v.guard.eval(&model).unwrap_or(false))
                    .map(VariantSite::name)
                    .collect();
                return Outcome::Sat(Solution {
                    model,
                    bindings_up: up,
                    bindings_down: down,
                    dead_variants,
                    verification,
                });
            }
        }
        // exclude this model and try the next one
        let lits = model.iter().map(|(f, &v)| {
            let g = Guard::Flag(f.clone());
            if v {
                g
            } else {
                Guard::not(g)
            }
        });
        refined.add(Guard::not(Guard::all(lits)));
    }
    Outcome::BoundExceeded
}

/// Materializes the approximations of a snapshot under `model`, for checking
/// how instantiations evolve across iterations.
pub fn bind_snapshot(
    snapshot: &Snapshot,
    model: &FlagModel,
) -> Result<(BTreeMap<String, Term>, BTreeMap<String, Term>), BindError> {
    bind(snapshot, model)
}

pub(crate) fn sort_prefix(sort: Sort) -> &'static str {
    match sort {
        Sort::Up => "$^",
        Sort::Down => "$_",
    }
}

//! Interface reconciliation for Kahn process networks.
//!
//! Component interfaces are written as message definition terms with guards
//! over Boolean flags and coerced term variables. A network induces seniority
//! constraints along its channels; [`solver::solve_network`] finds flag values
//! and variable instantiations satisfying all of them, or reports that none
//! exist.

pub mod cli;
pub mod config;
pub mod frontend;
pub mod mdl;
pub mod report;
pub mod sat;
pub mod seniority;
pub mod solver;

pub use config::{OutputFormat, SolverConfig};
pub use mdl::{Flag, FlagModel, Guard, Label, MdlError, Sort, Term};
pub use seniority::seniority_holds;
pub use solver::{solve_network, ConstraintItem, Outcome, Problem, Solution};

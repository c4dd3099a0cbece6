//! Text formats: terms, guards, interface files (`.mdl`) and netlists
//! (`.net`), plus compilation of a netlist into solver constraints.

mod build;
mod lexer;
mod netlist;
mod parser;
pub mod print;

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::mdl::{Guard, Term};

pub use build::build_constraints;
pub use netlist::{load_netlist, parse_netlist, Edge, EnvVertex, NetGraph};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: sort error: {msg}")]
    Sort { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: unknown vertex `{name}`")]
    UnknownVertex { line: usize, name: String },
    #[error("line {line}: unknown channel `{name}`")]
    UnknownChannel { line: usize, name: String },
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<FrontendError>,
    },
}

/// `junior <= senior` between two variables of one interface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConstraint {
    pub junior: Term,
    pub senior: Term,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentInterface {
    pub name: String,
    pub in_channels: BTreeMap<u32, Term>,
    pub out_channels: BTreeMap<u32, Term>,
    pub local_constraints: Vec<LocalConstraint>,
}

pub fn parse_term(src: &str) -> Result<Term, FrontendError> {
    let mut p = parser::Parser::new(src)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_guard(src: &str) -> Result<Guard, FrontendError> {
    let mut p = parser::Parser::new(src)?;
    let g = p.guard()?;
    p.expect_eof()?;
    Ok(g)
}

/// Parses an interface file. The name is left empty; netlists assign it.
pub fn parse_interface(src: &str) -> Result<ComponentInterface, FrontendError> {
    parser::Parser::new(src)?.interface()
}

pub fn serialize_term(t: &Term) -> String {
    print::term_to_string(t)
}

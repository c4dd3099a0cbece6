//! The `solve` and `check` commands, writing to caller-supplied streams so
//! they can be driven from tests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::config::{OutputFormat, SolverConfig};
use crate::frontend::{build_constraints, load_netlist, parse_term};
use crate::mdl::{Flag, FlagModel, Term};
use crate::report::{text_report, JsonReport};
use crate::solver::{solve_network, verify_solution, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

pub fn cmd_solve(netlist: &Path, config: &SolverConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let graph = match load_netlist(netlist) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    for w in &graph.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let problem = build_constraints(&graph);
    let report = match solve_network(&problem, config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    if config.trace {
        for t in &report.trace {
            let _ = writeln!(err, "{t}");
        }
    }
    if let Some(path) = &config.dimacs_path {
        if let Err(e) = std::fs::write(path, report.assertions.to_cnf().to_dimacs()) {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    let _ = match config.output_format {
        OutputFormat::Json => writeln!(out, "{}", JsonReport::new(&problem, &report).to_json()),
        OutputFormat::Text => write!(out, "{}", text_report(&graph, &problem, &report)),
    };
    match &report.outcome {
        Outcome::Sat(_) => EXIT_OK,
        Outcome::Unsat { origin } => {
            let _ = writeln!(
                err,
                "unsatisfiable{}",
                origin.as_ref().map(|o| format!(": contradiction at {o}")).unwrap_or_default()
            );
            EXIT_UNSAT
        }
        Outcome::BoundExceeded => {
            let _ = writeln!(err, "no fixed point within {} iterations", config.max_iterations);
            EXIT_BOUND
        }
    }
}

pub fn cmd_check(netlist: &Path, solution: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let graph = match load_netlist(netlist) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let problem = build_constraints(&graph);
    let report: JsonReport = match std::fs::read_to_string(solution)
        .map_err(|e| e.to_string())
        .and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string()))
    {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", solution.display());
            return EXIT_INPUT;
        }
    };

    let mut model = FlagModel::new();
    for (name, &v) in &report.flags {
        match Flag::new(name.clone()) {
            Ok(f) if problem.flags.contains(&f) => {
                model.insert(f, v);
            }
            _ => {
                let _ = writeln!(err, "error: unknown flag `{name}`");
                return EXIT_INPUT;
            }
        }
    }
    let bindings = |map: &BTreeMap<String, String>, declared: &std::collections::BTreeSet<String>, sigil: &str, err: &mut dyn Write| {
        let mut out = BTreeMap::new();
        for (name, text) in map {
            if !declared.contains(name) {
                let _ = writeln!(err, "error: unknown variable `{sigil}{name}`");
                return None;
            }
            match parse_term(text) {
                Ok(t) => {
                    out.insert(name.clone(), t);
                }
                Err(e) => {
                    let _ = writeln!(err, "error: binding of `{sigil}{name}`: {e}");
                    return None;
                }
            }
        }
        Some(out)
    };
    let Some(up) = bindings(&report.variables_up, &problem.vars_up, "$^", err) else {
        return EXIT_INPUT;
    };
    let Some(down) = bindings(&report.variables_down, &problem.vars_down, "$_", err) else {
        return EXIT_INPUT;
    };

    let mut ok = true;
    for f in problem.flags.iter().filter(|f| !model.contains_key(*f)) {
        let _ = writeln!(err, "missing value for flag `{f}`");
        ok = false;
    }
    let missing = |declared: &std::collections::BTreeSet<String>, bound: &BTreeMap<String, Term>| {
        declared.iter().filter(|v| !bound.contains_key(*v)).cloned().collect::<Vec<_>>()
    };
    for v in missing(&problem.vars_up, &up) {
        let _ = writeln!(err, "missing binding for `$^{v}`");
        ok = false;
    }
    for v in missing(&problem.vars_down, &down) {
        let _ = writeln!(err, "missing binding for `$_{v}`");
        ok = false;
    }
    let verdicts = verify_solution(&problem.constraints, &model, &up, &down);
    for (c, v) in problem.constraints.iter().zip(&verdicts) {
        if !v {
            let _ = writeln!(err, "violated: {}", c.origin);
            ok = false;
        }
    }
    let _ = writeln!(
        out,
        "{} of {} constraints verified",
        verdicts.iter().filter(|v| **v).count(),
        verdicts.len()
    );
    if ok {
        EXIT_OK
    } else {
        EXIT_UNSAT
    }
}

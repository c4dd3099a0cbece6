//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use mdl_reconcile::frontend::{build_constraints, load_netlist, parse_interface, parse_term, serialize_term};
use mdl_reconcile::sat::{self, AssertionSet};
use mdl_reconcile::solver::{bind_snapshot, brute_force_solve, verify_solution, OracleError, UniverseBounds};
use mdl_reconcile::{seniority_holds, solve_network, Flag, FlagModel, Outcome, Problem, SolverConfig, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn run_cli(args: &[&str]) -> (i32, String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_mdlsolve"))
        .args(args)
        .output()
        .expect("run mdlsolve");
    let elapsed = start.elapsed();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), elapsed)
}

fn golden_problem() -> Problem {
    build_constraints(&load_netlist(&common::golden_netlist()).unwrap())
}

fn has_label(text: &str, label: &str) -> bool {
    match parse_term(text) {
        Ok(Term::Record(c)) | Ok(Term::Choice(c)) => c.entries.iter().any(|e| e.label.as_str() == label),
        _ => false,
    }
}

fn golden_run() -> Verdict {
    let path = common::golden_netlist();
    let (code, stdout, elapsed) = run_cli(&["solve", path.to_str().unwrap()]);
    let Ok(json) = serde_json::from_str::<Value>(&stdout) else {
        return verdict(false, format!("exit {code}, unparsable report"));
    };
    let flag = |f: &str| json["flags"][f].as_bool();
    let ro1 = json["variables_down"]["read.ro1"].as_str().unwrap_or("");
    let r = json["variables_up"]["read.r"].as_str().unwrap_or("");
    let checks = [
        ("exit 0", code == 0),
        ("c=true", flag("c") == Some(true)),
        ("g=false", flag("g") == Some(false)),
        ("u=false", flag("u") == Some(false)),
        ("read.ro1 has K", has_label(ro1, "K")),
        ("read.r has init", has_label(r, "init")),
        ("under 1s", elapsed < Duration::from_secs(1)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    verdict(
        failed.is_empty(),
        format!("ro1 = {ro1}, r = {r}, {:.0?}; failed: {failed:?}", elapsed),
    )
}

fn unsat_run() -> Verdict {
    let path = common::no_k_netlist();
    let (code, _, elapsed) = run_cli(&["solve", path.to_str().unwrap()]);
    verdict(
        code == 1 && elapsed < Duration::from_secs(1),
        format!("exit {code} in {elapsed:.0?}"),
    )
}

fn seniority_laws() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let le = |a: &Term, b: &Term| seniority_holds(a, b).expect("ground well-formed");
    let mut refl_fail = 0;
    for _ in 0..1000 {
        let t = common::ground_term(&mut rng, 3);
        if !le(&t, &t) {
            refl_fail += 1;
        }
    }
    let (mut triples, mut trans_fail) = (0, 0);
    for i in 0..2000 {
        let (t, s, u) = if i % 2 == 0 {
            let u = common::ground_term(&mut rng, 3);
            let s = common::junior_of(&mut rng, &u);
            let t = common::junior_of(&mut rng, &s);
            (t, s, u)
        } else {
            (
                common::ground_term(&mut rng, 2),
                common::ground_term(&mut rng, 2),
                common::ground_term(&mut rng, 2),
            )
        };
        if le(&t, &s) && le(&s, &u) {
            triples += 1;
            if !le(&t, &u) {
                trans_fail += 1;
            }
        }
    }
    let (mut pairs, mut anti_fail) = (0, 0);
    for i in 0..2000 {
        let a = common::ground_term(&mut rng, 3);
        let b = match i % 3 {
            0 => common::permuted(&mut rng, &a),
            1 => common::junior_of(&mut rng, &a),
            _ => common::ground_term(&mut rng, 3),
        };
        if le(&a, &b) && le(&b, &a) {
            pairs += 1;
            if !a.sem_eq(&b) {
                anti_fail += 1;
            }
        }
    }
    verdict(
        refl_fail == 0 && trans_fail == 0 && anti_fail == 0 && triples >= 1000,
        format!(
            "reflexivity 1000 terms, {refl_fail} failures; transitivity {triples} triples, {trans_fail} counterexamples; antisymmetry {pairs} pairs, {anti_fail} counterexamples"
        ),
    )
}

fn tiny_corpus() -> Vec<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut out = Vec::new();
    while out.len() < 100 {
        let p = common::tiny_instance(&mut rng);
        match brute_force_solve(&p, &UniverseBounds::default()) {
            Err(OracleError::UniverseTooLarge(_)) => continue,
            _ => out.push(p),
        }
    }
    out
}

fn show(p: &Problem) -> String {
    p.constraints
        .iter()
        .map(|c| format!("{} <= {}", c.junior, c.senior))
        .collect::<Vec<_>>()
        .join("; ")
}

fn oracle_equivalence(corpus: &[Problem]) -> Verdict {
    let mut disagreements = Vec::new();
    let mut sat_count = 0;
    for p in corpus {
        let solver = solve_network(p, &SolverConfig::default()).unwrap().outcome;
        let oracle = brute_force_solve(p, &UniverseBounds::default()).unwrap();
        sat_count += usize::from(oracle.is_sat());
        let agree = match solver {
            Outcome::Sat(_) => oracle.is_sat(),
            Outcome::Unsat { .. } => !oracle.is_sat(),
            Outcome::BoundExceeded => false,
        };
        if !agree {
            disagreements.push(format!("[solver {}, oracle {}] {}", solver.status(), if oracle.is_sat() { "sat" } else { "unsat" }, show(p)));
        }
    }
    for d in &disagreements {
        eprintln!("  disagreement: {d}");
    }
    verdict(
        disagreements.is_empty(),
        format!("{} instances ({sat_count} sat by oracle), {} disagreements", corpus.len(), disagreements.len()),
    )
}

fn soundness(corpus: &[Problem]) -> Verdict {
    let mut instances: Vec<Problem> = corpus.to_vec();
    instances.push(golden_problem());
    let (mut sat_count, mut failures) = (0, 0);
    for p in &instances {
        if let Outcome::Sat(s) = solve_network(p, &SolverConfig::default()).unwrap().outcome {
            sat_count += 1;
            let v = verify_solution(&p.constraints, &s.model, &s.bindings_up, &s.bindings_down);
            failures += v.iter().filter(|ok| !**ok).count();
        }
    }
    verdict(failures == 0, format!("{sat_count} satisfiable instances, {failures} failed constraints"))
}

fn monotonicity() -> Verdict {
    let p = golden_problem();
    let report = solve_network(&p, &SolverConfig::default().with_trace(true)).unwrap();
    let Outcome::Sat(s) = &report.outcome else {
        return verdict(false, "golden run is not satisfiable");
    };
    let mut violations = Vec::new();
    let mut bound = Vec::new();
    for (k, snap) in report.snapshots.iter().enumerate() {
        match bind_snapshot(snap, &s.model) {
            Ok(b) => bound.push(b),
            Err(e) => {
                violations.push(format!("snapshot {k}: {e}"));
                bound.push((BTreeMap::new(), BTreeMap::new()));
            }
        }
    }
    for (k, w) in bound.windows(2).enumerate() {
        let ((up0, down0), (up1, down1)) = (&w[0], &w[1]);
        for (v, a) in up0 {
            if let Some(b) = up1.get(v) {
                if !seniority_holds(a, b).unwrap_or(false) {
                    violations.push(format!("$^{v} step {k}: {a} then {b}"));
                }
            }
        }
        for (v, a) in down0 {
            if let Some(b) = down1.get(v) {
                if !seniority_holds(b, a).unwrap_or(false) {
                    violations.push(format!("$_{v} step {k}: {a} then {b}"));
                }
            }
        }
    }
    for v in &violations {
        eprintln!("  violation: {v}");
    }
    verdict(
        violations.is_empty(),
        format!("{} snapshots, {} violations", report.snapshots.len(), violations.len()),
    )
}

fn sat_subsolver() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let names: Vec<String> = (0..12).map(|i| format!("x{i}")).collect();
    let (mut mismatches, mut bad_models, mut unstable, mut sat_count) = (0, 0, 0, 0);
    for _ in 0..500 {
        let n = rng.gen_range(1..=12);
        let flags: Vec<&str> = names[..n].iter().map(String::as_str).collect();
        let m = rng.gen_range(1..=8);
        let guards: Vec<_> = (0..m).map(|_| common::guard(&mut rng, &flags, 3)).collect();
        let set: AssertionSet = guards.iter().cloned().collect();
        let all: BTreeSet<Flag> = flags.iter().map(|f| Flag::new(*f).unwrap()).collect();
        let truth = (0u32..1 << n).any(|bits| {
            let model: FlagModel = all.iter().enumerate().map(|(i, f)| (f.clone(), bits >> i & 1 == 1)).collect();
            guards.iter().all(|g| g.eval(&model).unwrap())
        });
        sat_count += usize::from(truth);
        if sat::is_satisfiable(&set) != truth {
            mismatches += 1;
        }
        let model = sat::solve_model(&set, &all);
        if model.is_some() != truth {
            mismatches += 1;
        }
        if let Some(model) = &model {
            if !guards.iter().all(|g| g.eval(model) == Ok(true)) {
                bad_models += 1;
            }
        }
        if format!("{:?}", sat::solve_model(&set, &all)) != format!("{model:?}") {
            unstable += 1;
        }
    }
    verdict(
        mismatches + bad_models + unstable == 0,
        format!("500 sets ({sat_count} sat), {mismatches} verdict mismatches, {bad_models} bad models, {unstable} unstable"),
    )
}

fn termination(corpus: &[Problem]) -> Verdict {
    let mut instances: Vec<Problem> = corpus.to_vec();
    instances.push(golden_problem());
    instances.push(build_constraints(&load_netlist(&common::no_k_netlist()).unwrap()));
    let mut max_iter = 0;
    let mut exceeded = 0;
    for p in &instances {
        let r = solve_network(p, &SolverConfig::default()).unwrap();
        max_iter = max_iter.max(r.iterations);
        if matches!(r.outcome, Outcome::BoundExceeded) || r.iterations > 1000 {
            exceeded += 1;
        }
    }
    let cut = solve_network(&golden_problem(), &SolverConfig::default().with_max_iterations(1)).unwrap();
    let bound_path = matches!(cut.outcome, Outcome::BoundExceeded);
    verdict(
        exceeded == 0 && bound_path,
        format!(
            "{} instances, max {max_iter} iterations, {exceeded} over the bound; max_iterations=1 gives {}",
            instances.len(),
            cut.outcome.status()
        ),
    )
}

fn round_trip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    for _ in 0..1000 {
        let t = common::any_term(&mut rng, 4);
        let text = serialize_term(&t);
        match parse_term(&text) {
            Ok(back) if back.sem_eq(&t) => {}
            other => failures.push(format!("{text} -> {other:?}")),
        }
    }
    let mut files = 0;
    let mut stack = vec![common::fixtures_dir()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let terms: Vec<Term> = match path.extension().and_then(|e| e.to_str()) {
                Some("mdl") => {
                    files += 1;
                    let i = parse_interface(&std::fs::read_to_string(&path).unwrap()).unwrap();
                    i.in_channels.into_values().chain(i.out_channels.into_values()).collect()
                }
                Some("net") => {
                    files += 1;
                    let g = load_netlist(&path).unwrap();
                    g.envs
                        .into_iter()
                        .flat_map(|e| e.in_channels.into_values().chain(e.out_channels.into_values()))
                        .collect()
                }
                _ => continue,
            };
            for t in terms {
                let text = serialize_term(&t);
                if !parse_term(&text).is_ok_and(|b| b.sem_eq(&t)) {
                    failures.push(format!("{}: {text}", path.display()));
                }
            }
        }
    }
    for f in failures.iter().take(5) {
        eprintln!("  round-trip failure: {f}");
    }
    verdict(
        failures.is_empty() && files > 0,
        format!("1000 generated terms and {files} fixture files, {} failures", failures.len()),
    )
}

fn main() {
    let corpus = tiny_corpus();
    let results = [
        ("1 k-means golden run", golden_run()),
        ("2 unsat detection", unsat_run()),
        ("3 seniority laws", seniority_laws()),
        ("4 oracle equivalence", oracle_equivalence(&corpus)),
        ("5 solution soundness", soundness(&corpus)),
        ("6 approximation monotonicity", monotonicity()),
        ("7 SAT subsolver", sat_subsolver()),
        ("8 termination", termination(&corpus)),
        ("9 round-trip", round_trip()),
    ];
    let mut all = true;
    for (name, v) in &results {
        all &= v.pass;
        println!("criterion {name}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if !all {
        std::process::exit(1);
    }
}

//! From a netlist to a constraint problem.

use crate::mdl::{Alt, Collection, Term};
use crate::solver::{ConstraintItem, Problem, VariantSite};

use super::NetGraph;

/// Prefixes every variable with `scope.`; flags stay global.
fn scoped(t: &Term, scope: &str) -> Term {
    let name = |v: &str| format!("{scope}.{v}");
    let coll = |c: &Collection| Collection {
        entries: c
            .entries
            .iter()
            .map(|e| {
                let mut e = e.clone();
                e.term = scoped(&e.term, scope);
                e
            })
            .collect(),
        tail: c.tail.as_deref().map(name),
    };
    match t {
        Term::Symbol(_) => t.clone(),
        Term::Up(v) => Term::Up(name(v)),
        Term::Down(v) => Term::Down(name(v)),
        Term::Tuple(items) => Term::Tuple(items.iter().map(|x| scoped(x, scope)).collect()),
        Term::Record(c) => Term::Record(coll(c)),
        Term::Choice(c) => Term::Choice(coll(c)),
        Term::Switch(alts) => Term::Switch(
            alts.iter()
                .map(|a| Alt {
                    guard: a.guard.clone(),
                    term: scoped(&a.term, scope),
                })
                .collect(),
        ),
    }
}

/// One constraint per edge (`out ⊑ in`) followed by every interface-local
/// constraint, with the flag and variable inventories of all declared terms.
pub fn build_constraints(g: &NetGraph) -> Problem {
    let channel = |vertex: &str, n: u32, out: bool| -> Term {
        let chans = if let Some(c) = g.components.iter().find(|c| c.name == vertex) {
            if out { &c.out_channels } else { &c.in_channels }
        } else {
            let e = g.envs.iter().find(|e| e.name == vertex).expect("validated vertex");
            if out { &e.out_channels } else { &e.in_channels }
        };
        scoped(&chans[&n], vertex)
    };

    let mut constraints: Vec<ConstraintItem> = g
        .edges
        .iter()
        .map(|e| {
            ConstraintItem::new(
                channel(&e.src, e.src_channel, true),
                channel(&e.dst, e.dst_channel, false),
                e.to_string(),
            )
        })
        .collect();
    for c in &g.components {
        for lc in &c.local_constraints {
            constraints.push(ConstraintItem::new(
                scoped(&lc.junior, &c.name),
                scoped(&lc.senior, &c.name),
                format!("{}: {} <= {}", c.name, lc.junior, lc.senior),
            ));
        }
    }

    let mut problem = Problem::from_constraints(constraints);
    let declared = g
        .components
        .iter()
        .flat_map(|c| {
            c.in_channels
                .values()
                .chain(c.out_channels.values())
                .map(|t| scoped(t, &c.name))
        })
        .chain(g.envs.iter().flat_map(|e| {
            e.in_channels
                .values()
                .chain(e.out_channels.values())
                .map(|t| scoped(t, &e.name))
        }));
    for t in declared {
        problem.flags.extend(t.free_flags());
        problem.vars_up.extend(t.free_vars_up());
        problem.vars_down.extend(t.free_vars_down());
    }
    for c in &g.components {
        for (&n, t) in &c.in_channels {
            let Term::Choice(coll) = t else { continue };
            for e in &coll.entries {
                problem.variants.push(VariantSite {
                    component: c.name.clone(),
                    channel: n,
                    label: e.label.clone(),
                    guard: e.guard.clone(),
                });
            }
        }
    }
    problem
}
